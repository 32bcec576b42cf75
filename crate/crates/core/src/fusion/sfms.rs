//! Greedy forward feature selection maximizing rank correlation.
//!
//! Starting from a seed set, every remaining candidate is tried in turn;
//! the candidate giving the best training-set rank correlation joins the
//! set if it strictly improves on the incumbent, otherwise selection stops.
//! The objective never decreases, so the result is at least as good as the
//! seed on the training table. An empty seed starts from an objective of
//! negative infinity so the first feature is always adopted.

use crate::error::{Error, Result};
use crate::evaluation::srocc;
use crate::features::FeatureKey;

use super::normalize::TrainingTable;
use super::svr::SvrHyper;
use super::train_svr;

/// Rank correlation of training-set predictions for one candidate key set.
fn objective(keys: &[FeatureKey], table: &TrainingTable, hyper: &SvrHyper) -> Result<f64> {
    let model = train_svr(table, keys, hyper)?;
    let preds: Vec<f64> = table
        .rows
        .iter()
        .map(|row| model.predict(&row.features))
        .collect::<Result<_>>()?;
    Ok(srocc(&preds, &table.mos())?.value)
}

pub fn sfms_select(
    pool: &[FeatureKey],
    seed: &[FeatureKey],
    table: &TrainingTable,
    hyper: &SvrHyper,
) -> Result<Vec<FeatureKey>> {
    if pool.is_empty() && seed.is_empty() {
        return Err(Error::InvalidInput(
            "selection needs a non-empty pool or seed set".into(),
        ));
    }
    if let Some(dup) = pool.iter().find(|k| seed.contains(k)) {
        return Err(Error::InvalidInput(format!(
            "pool and seed set must be disjoint (`{dup}` is in both)"
        )));
    }
    table.validate()?;

    let mut selected: Vec<FeatureKey> = seed.to_vec();
    let mut remaining: Vec<FeatureKey> = pool.to_vec();
    let mut best_so_far = if selected.is_empty() {
        f64::NEG_INFINITY
    } else {
        objective(&selected, table, hyper)?
    };

    while !remaining.is_empty() {
        // argmax over candidates; ties keep the earliest candidate
        let mut best_candidate: Option<(usize, f64)> = None;
        for (idx, &candidate) in remaining.iter().enumerate() {
            let mut trial = selected.clone();
            trial.push(candidate);
            let score = objective(&trial, table, hyper)?;
            if best_candidate.is_none_or(|(_, best)| score > best) {
                best_candidate = Some((idx, score));
            }
        }
        let (idx, score) = best_candidate.expect("remaining is non-empty");
        if score > best_so_far {
            best_so_far = score;
            selected.push(remaining.remove(idx));
        } else {
            break;
        }
    }
    Ok(selected)
}
