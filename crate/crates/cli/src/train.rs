//! `vqfuse train`: greedy feature selection per model, regressor fits,
//! combination-weight tuning, model file output.
//!
//! Model 1 is seeded with the six fusion-core features and selects from
//! the rest of the pool on the first training database; model 2 starts
//! from an empty seed and selects on the second. The combination weight is
//! either pinned by the config or grid-searched for the best aggregated
//! rank correlation over both training tables.

use std::path::Path;

use anyhow::{bail, Context, Result};
use vqfuse_core::eadm::compute_eadm;
use vqfuse_core::evaluation::srocc;
use vqfuse_core::features::{aggregate_mean, FeatureKey, FeatureVector, PoolSpec};
use vqfuse_core::fusion::{
    sfms_select, train_svr, tune_beta, FusionModel, Provenance, SvrModel, TrainingRow,
    TrainingTable,
};
use vqfuse_core::manifest::DatabaseManifest;
use vqfuse_core::video::read_frame_pair;

use crate::cache::{cache_path, read_cache, CacheMeta};
use crate::config::RunConfig;
use crate::media::{open_pair, resolve_pool};

fn load_table(
    manifest_path: &Path,
    manifest: &DatabaseManifest,
    pool: &PoolSpec,
    meta: &CacheMeta,
    cache_dir: &Path,
) -> Result<TrainingTable> {
    let mut rows = Vec::with_capacity(manifest.sequences.len());
    for seq in &manifest.sequences {
        let path = cache_path(cache_dir, &manifest.database_id, &seq.sequence_id);
        let frames = read_cache(&path, meta, pool.keys()).with_context(|| {
            format!(
                "no usable cache for `{}`; run `vqfuse extract --manifest {} --cache-dir {}` first",
                seq.sequence_id,
                manifest_path.display(),
                cache_dir.display()
            )
        })?;
        rows.push(TrainingRow {
            sequence_id: seq.sequence_id.clone(),
            features: aggregate_mean(&frames)?,
            mos: manifest.normalized_mos(seq.mos),
        });
    }
    Ok(TrainingTable {
        database_id: manifest.database_id.clone(),
        rows,
    })
}

/// Mean detail-loss score of every sequence in a manifest at the given
/// texture exponent, straight from the media.
fn eadm_column(manifest_path: &Path, manifest: &DatabaseManifest, alpha: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(manifest.sequences.len());
    for seq in &manifest.sequences {
        let (mut reference, mut test) = open_pair(manifest_path, manifest, seq)?;
        let count = reference.frame_count().min(test.frame_count());
        let mut acc = 0.0;
        let mut prev_ref = None;
        for index in 0..count {
            let pair = read_frame_pair(&mut reference, &mut test, index)?;
            acc += compute_eadm(&pair, prev_ref.as_ref(), alpha);
            prev_ref = Some(pair.ref_planes[0].clone());
        }
        out.push(acc / count as f64);
    }
    Ok(out)
}

fn replace_column(table: &TrainingTable, key: FeatureKey, values: &[f64]) -> Result<TrainingTable> {
    let mut rows = Vec::with_capacity(table.rows.len());
    for (row, &value) in table.rows.iter().zip(values) {
        let mut features = FeatureVector::new(row.features.frame_index);
        for (k, v) in row.features.iter() {
            features.push(k, if k == key { value } else { v })?;
        }
        rows.push(TrainingRow {
            sequence_id: row.sequence_id.clone(),
            features,
            mos: row.mos,
        });
    }
    Ok(TrainingTable {
        database_id: table.database_id.clone(),
        rows,
    })
}

pub fn run(
    train1_path: &Path,
    train2_path: &Path,
    pool_path: Option<&Path>,
    cache_dir: &Path,
    config: &RunConfig,
    out: &Path,
) -> Result<()> {
    let manifest1 = DatabaseManifest::load(train1_path)?;
    let manifest2 = DatabaseManifest::load(train2_path)?;
    let pool1 = resolve_pool(pool_path, &manifest1)?;
    let pool2 = resolve_pool(pool_path, &manifest2)?;
    if pool1.version() != pool2.version() {
        bail!(
            "the two training manifests resolve to different pools ({} vs {}); pass an explicit --pool file",
            pool1.version(),
            pool2.version()
        );
    }
    let pool = pool1;
    let meta = CacheMeta {
        pool_version: pool.version().to_string(),
        alpha: config.extraction_alpha(),
        config_hash: config.hash(),
    };
    let mut table1 = load_table(train1_path, &manifest1, &pool, &meta, cache_dir)?;
    let mut table2 = load_table(train2_path, &manifest2, &pool, &meta, cache_dir)?;

    // texture exponent: pinned, or grid-searched on the first training
    // database by single-feature rank correlation, with both tables'
    // detail-loss columns recomputed at the winner
    let alpha = match config.alpha.fixed() {
        Some(a) => a,
        None => {
            let mos1 = table1.mos();
            let mut best = (f64::NEG_INFINITY, config.alpha_grid[0]);
            for &candidate in &config.alpha_grid {
                let column = eadm_column(train1_path, &manifest1, candidate)?;
                let rho = srocc(&column, &mos1)?.value;
                println!("alpha {candidate}: detail-loss SROCC {rho:.4}");
                if rho > best.0 {
                    best = (rho, candidate);
                }
            }
            let alpha = best.1;
            let eadm_key = FeatureKey::eadm();
            table1 = replace_column(
                &table1,
                eadm_key,
                &eadm_column(train1_path, &manifest1, alpha)?,
            )?;
            table2 = replace_column(
                &table2,
                eadm_key,
                &eadm_column(train2_path, &manifest2, alpha)?,
            )?;
            println!("alpha tuned to {alpha}");
            alpha
        }
    };

    let seed1 = PoolSpec::core_six();
    let pool_minus_seed: Vec<FeatureKey> = pool
        .keys()
        .iter()
        .copied()
        .filter(|k| !seed1.contains(k))
        .collect();
    println!(
        "selecting features for model 1 ({} candidates)...",
        pool_minus_seed.len()
    );
    let selected1 = sfms_select(&pool_minus_seed, &seed1, &table1, &config.svr)?;
    println!(
        "model 1 features: {}",
        selected1
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "selecting features for model 2 ({} candidates)...",
        pool.len()
    );
    let selected2 = sfms_select(pool.keys(), &[], &table2, &config.svr)?;
    println!(
        "model 2 features: {}",
        selected2
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );

    let svr1 = train_svr(&table1, &selected1, &config.svr)?;
    let svr2 = train_svr(&table2, &selected2, &config.svr)?;

    let beta = match config.beta.fixed() {
        Some(b) => b,
        None => {
            let predict_all = |model: &SvrModel| -> Result<Vec<Vec<f64>>> {
                [&table1, &table2]
                    .iter()
                    .map(|t| {
                        t.rows
                            .iter()
                            .map(|r| model.predict(&r.features).map_err(Into::into))
                            .collect::<Result<Vec<f64>>>()
                    })
                    .collect()
            };
            let p1 = predict_all(&svr1)?;
            let p2 = predict_all(&svr2)?;
            let mos = vec![table1.mos(), table2.mos()];
            let beta = tune_beta(&p1, &p2, &mos, config.beta_grid_step)?;
            println!("beta tuned to {beta}");
            beta
        }
    };

    let mut model = FusionModel::new(svr1, svr2, beta, alpha)?;
    model.provenance = Provenance {
        config_hash: config.hash(),
        seed: config.seed,
    };
    model.save(out)?;
    println!(
        "model written to {} (config {})",
        out.display(),
        model.provenance.config_hash
    );
    Ok(())
}
