//! Two-model combination, weight tuning and the serialized model file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{fisher_aggregate, srocc};
use crate::features::FeatureVector;

use super::svr::SvrModel;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Convex per-frame combination of the two regressor outputs.
pub fn combine_models(m1_score: f64, m2_score: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidInput(format!(
            "beta must be in [0,1], got {beta}"
        )));
    }
    Ok(beta * m1_score + (1.0 - beta) * m2_score)
}

/// Grid-search the combination weight to maximize the Fisher-aggregated
/// rank correlation over the training databases. Ties (within 1e-12) break
/// toward 0.5, then toward the smaller weight.
pub fn tune_beta(
    preds1: &[Vec<f64>],
    preds2: &[Vec<f64>],
    mos: &[Vec<f64>],
    grid_step: f64,
) -> Result<f64> {
    if preds1.is_empty() || preds1.len() != preds2.len() || preds1.len() != mos.len() {
        return Err(Error::InvalidInput(
            "beta tuning needs aligned, non-empty prediction lists".into(),
        ));
    }
    for ((p1, p2), m) in preds1.iter().zip(preds2).zip(mos) {
        if p1.len() != m.len() || p2.len() != m.len() {
            return Err(Error::InvalidInput(
                "per-database prediction/MOS lengths differ".into(),
            ));
        }
    }
    if !(grid_step > 0.0 && grid_step <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "grid step must be in (0,1], got {grid_step}"
        )));
    }

    let steps = (1.0 / grid_step).round() as usize;
    let mut best: Option<(f64, f64)> = None; // (beta, objective)
    for k in 0..=steps {
        let beta = (k as f64 * grid_step).min(1.0);
        let mut sroccs = Vec::with_capacity(preds1.len());
        for ((p1, p2), m) in preds1.iter().zip(preds2).zip(mos) {
            let combined: Vec<f64> = p1
                .iter()
                .zip(p2)
                .map(|(&a, &b)| beta * a + (1.0 - beta) * b)
                .collect();
            sroccs.push(srocc(&combined, m)?.value);
        }
        let objective = fisher_aggregate(&sroccs)?.value;
        let better = match best {
            None => true,
            Some((b_beta, b_obj)) => {
                objective > b_obj + 1e-12
                    || ((objective - b_obj).abs() <= 1e-12
                        && (beta - 0.5).abs() < (b_beta - 0.5).abs() - 1e-15)
            }
        };
        if better {
            best = Some((beta, objective));
        }
    }
    Ok(best.expect("grid is non-empty").0)
}

/// How a model file came to be; carried along for reproducibility checks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

/// The complete two-regressor fusion model, as stored on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FusionModel {
    pub schema_version: u32,
    /// Texture exponent both regressors' detail-loss feature was extracted
    /// with.
    pub alpha: f64,
    /// Combination weight of model 1.
    pub beta: f64,
    #[serde(default)]
    pub provenance: Provenance,
    pub model1: SvrModel,
    pub model2: SvrModel,
}

impl FusionModel {
    pub fn new(model1: SvrModel, model2: SvrModel, beta: f64, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidInput(format!(
                "beta must be in [0,1], got {beta}"
            )));
        }
        Ok(Self {
            schema_version: MODEL_SCHEMA_VERSION,
            alpha,
            beta,
            provenance: Provenance::default(),
            model1,
            model2,
        })
    }

    /// Union of both regressors' feature keys, model-1 keys first, without
    /// duplicates. This is what a frame vector must provide for prediction.
    pub fn required_keys(&self) -> Vec<crate::features::FeatureKey> {
        let mut keys = self.model1.feature_keys.clone();
        for &key in &self.model2.feature_keys {
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys
    }

    /// Per-frame quality: the convex combination of both regressors.
    pub fn predict_frame(&self, features: &FeatureVector) -> Result<f64> {
        let m1 = self.model1.predict(features)?;
        let m2 = self.model2.predict(features)?;
        combine_models(m1, m2, self.beta)
    }

    /// Sequence score: mean over per-frame scores.
    pub fn predict_sequence(&self, frames: &[FeatureVector]) -> Result<f64> {
        if frames.is_empty() {
            return Err(Error::InvalidInput(
                "cannot score an empty frame list".into(),
            ));
        }
        let mut acc = 0.0;
        for frame in frames {
            acc += self.predict_frame(frame)?;
        }
        Ok(acc / frames.len() as f64)
    }

    /// Deterministic serialized form (field order is fixed, floats render
    /// shortest-round-trip), so identical models are byte-identical files.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        let found = value
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::ModelFormat("missing schema_version field".into()))?
            as u32;
        if found != MODEL_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found,
                expected: MODEL_SCHEMA_VERSION,
            });
        }
        serde_json::from_value(value).map_err(|e| Error::ModelFormat(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}
