//! SVR fusion: feature normalization, regressor training, greedy feature
//! selection, two-model combination and weight tuning.

mod model;
mod normalize;
mod sfms;
mod svr;

pub use model::{combine_models, tune_beta, FusionModel, Provenance, MODEL_SCHEMA_VERSION};
pub use normalize::{normalize_features, Normalizer, TrainingRow, TrainingTable};
pub use sfms::sfms_select;
pub use svr::{SvrHyper, SvrModel};

use crate::error::Result;
use crate::features::FeatureKey;

/// Train a nu-SVR on the named keys of a table. Features are min-max
/// normalized from the table itself; targets are the raw MOS values.
pub fn train_svr(table: &TrainingTable, keys: &[FeatureKey], hyper: &SvrHyper) -> Result<SvrModel> {
    table.validate()?;
    let normalizer = Normalizer::fit(table, keys)?;
    let mut rows = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let normalized: Vec<f64> = keys
            .iter()
            .map(|&key| {
                let raw = row
                    .features
                    .get(key)
                    .ok_or(crate::error::Error::MissingFeature(key))?;
                normalizer.apply(key, raw)
            })
            .collect::<Result<_>>()?;
        rows.push(normalized);
    }
    let targets = table.mos();
    svr::train_on_rows(&rows, &targets, keys, normalizer, hyper)
}
