//! Training tables and min-max feature normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureKey, FeatureVector};

/// One scored sequence: its aggregated features and a MOS on the 0-100
/// scale.
#[derive(Debug, Clone)]
pub struct TrainingRow {
    pub sequence_id: String,
    pub features: FeatureVector,
    pub mos: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingTable {
    pub database_id: String,
    pub rows: Vec<TrainingRow>,
}

impl TrainingTable {
    pub fn validate(&self) -> Result<()> {
        for row in &self.rows {
            if !(0.0..=100.0).contains(&row.mos) {
                return Err(Error::InvalidInput(format!(
                    "MOS {} of sequence `{}` outside [0,100]",
                    row.mos, row.sequence_id
                )));
            }
        }
        Ok(())
    }

    pub fn mos(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mos).collect()
    }

    /// Raw column values for a key, erroring on the first row lacking it.
    pub fn column(&self, key: FeatureKey) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| r.features.get(key).ok_or(Error::MissingFeature(key)))
            .collect()
    }
}

/// Per-feature training minima and maxima; prediction-time values clamp
/// into the trained [0,1] box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Normalizer {
    entries: Vec<(FeatureKey, f64, f64)>,
}

impl Normalizer {
    pub fn fit(table: &TrainingTable, keys: &[FeatureKey]) -> Result<Self> {
        if table.rows.is_empty() {
            return Err(Error::InvalidInput(
                "cannot normalize an empty table".into(),
            ));
        }
        let mut entries = Vec::with_capacity(keys.len());
        for &key in keys {
            let column = table.column(key)?;
            let min = column.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = column.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            entries.push((key, min, max));
        }
        Ok(Self { entries })
    }

    /// Map a raw value into [0,1]; constant training columns map to 0.
    pub fn apply(&self, key: FeatureKey, raw: f64) -> Result<f64> {
        let (_, min, max) = self
            .entries
            .iter()
            .find(|(k, _, _)| *k == key)
            .ok_or(Error::MissingFeature(key))?;
        if max > min {
            Ok(((raw - min) / (max - min)).clamp(0.0, 1.0))
        } else {
            Ok(0.0)
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = FeatureKey> + '_ {
        self.entries.iter().map(|(k, _, _)| *k)
    }
}

/// Normalize every feature of a table; returns the normalized table and the
/// fitted normalizer for prediction-time reuse.
pub fn normalize_features(table: &TrainingTable) -> Result<(TrainingTable, Normalizer)> {
    let first = table
        .rows
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot normalize an empty table".into()))?;
    let keys: Vec<FeatureKey> = first.features.keys().collect();
    let normalizer = Normalizer::fit(table, &keys)?;
    let mut rows = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let mut features = FeatureVector::new(row.features.frame_index);
        for (key, value) in row.features.iter() {
            features.push(key, normalizer.apply(key, value)?)?;
        }
        rows.push(TrainingRow {
            sequence_id: row.sequence_id.clone(),
            features,
            mos: row.mos,
        });
    }
    Ok((
        TrainingTable {
            database_id: table.database_id.clone(),
            rows,
        },
        normalizer,
    ))
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use crate::features::{Channel, FeatureName};

    /// Build a table from named columns; keys are synthesized over the
    /// scale axis of a single feature name.
    pub(crate) fn table_from_columns(
        columns: &[(&str, &[f64])],
        mos: &[f64],
    ) -> (TrainingTable, Vec<FeatureKey>) {
        assert!(columns.len() <= 12);
        let keys: Vec<FeatureKey> = (0..columns.len())
            .map(|i| {
                let channel = Channel::ALL[i % 3];
                let scale = (i / 3 + 1) as u8;
                FeatureKey::new(FeatureName::Luma, channel, scale)
            })
            .collect();
        let n = mos.len();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut features = FeatureVector::new(0);
            for (key, (_, col)) in keys.iter().zip(columns) {
                features.push(*key, col[i]).unwrap();
            }
            rows.push(TrainingRow {
                sequence_id: format!("seq{i}"),
                features,
                mos: mos[i],
            });
        }
        (
            TrainingTable {
                database_id: "test-db".into(),
                rows,
            },
            keys,
        )
    }
}
