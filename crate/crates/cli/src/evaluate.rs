//! `vqfuse evaluate`: per-database rank correlations with significance
//! verdicts against an anchor, the Fisher-aggregated overall column, and
//! the cross-database pairwise protocol against a comparison baseline.

use std::path::Path;

use anyhow::{bail, Context, Result};
use vqfuse_core::evaluation::{
    accuracy_counts, build_pairwise, build_report, fisher_exact, pairwise_accuracy, MetricSeries,
    PairRecord, PairwiseSummary,
};
use vqfuse_core::features::FeatureKey;
use vqfuse_core::fusion::FusionModel;
use vqfuse_core::manifest::DatabaseManifest;

use crate::cache::{cache_path, read_cache, CacheMeta};
use crate::config::RunConfig;
use crate::media::resolve_pool;

pub const MODEL_METRIC_NAME: &str = "fusion";

pub struct EvaluateArgs<'a> {
    pub model: &'a Path,
    pub manifests: Vec<&'a Path>,
    pub cache_dir: &'a Path,
    pub baselines: Vec<String>,
    /// Metric name the F-tests compare against; default is the model.
    pub anchor: Option<String>,
    /// Baseline for the pairwise protocol; default is the first baseline.
    pub pair_against: Option<String>,
    pub out_dir: &'a Path,
}

struct DatabaseScores {
    database_id: String,
    mos: Vec<f64>,
    model_scores: Vec<f64>,
    baseline_scores: Vec<Vec<f64>>,
}

pub fn run(args: &EvaluateArgs, config: &RunConfig) -> Result<()> {
    let model = FusionModel::load(args.model)?;
    if config.extraction_alpha() != model.alpha {
        bail!(
            "model was trained with alpha {} but the config extracts caches at {}; \
             re-run `vqfuse extract` with a matching alpha",
            model.alpha,
            config.extraction_alpha()
        );
    }
    let baseline_keys: Vec<FeatureKey> = args
        .baselines
        .iter()
        .map(|name| name.parse::<FeatureKey>().map_err(Into::into))
        .collect::<Result<_>>()?;

    let mut databases = Vec::new();
    for manifest_path in &args.manifests {
        let manifest = DatabaseManifest::load(manifest_path)?;
        let pool = resolve_pool(None, &manifest)?;
        let meta = CacheMeta {
            pool_version: pool.version().to_string(),
            alpha: model.alpha,
            config_hash: config.hash(),
        };
        let mut mos = Vec::new();
        let mut model_scores = Vec::new();
        let mut baseline_scores = vec![Vec::new(); baseline_keys.len()];
        for seq in &manifest.sequences {
            let path = cache_path(args.cache_dir, &manifest.database_id, &seq.sequence_id);
            let frames = read_cache(&path, &meta, pool.keys()).with_context(|| {
                format!(
                    "no usable cache for `{}`; run `vqfuse extract --manifest {} --cache-dir {}`",
                    seq.sequence_id,
                    manifest_path.display(),
                    args.cache_dir.display()
                )
            })?;
            // per-frame combination, then the temporal mean
            let mut acc = 0.0;
            for frame in &frames {
                acc += model.predict_frame(frame)?;
            }
            model_scores.push(acc / frames.len() as f64);
            for (key, scores) in baseline_keys.iter().zip(&mut baseline_scores) {
                let mut sum = 0.0;
                for frame in &frames {
                    sum += frame
                        .get(*key)
                        .ok_or_else(|| anyhow::anyhow!("cache lacks baseline feature {key}"))?;
                }
                scores.push(sum / frames.len() as f64);
            }
            mos.push(manifest.normalized_mos(seq.mos));
        }
        databases.push(DatabaseScores {
            database_id: manifest.database_id.clone(),
            mos,
            model_scores,
            baseline_scores,
        });
    }

    // metric table
    let mut metrics: Vec<(String, Vec<MetricSeries>)> = Vec::new();
    metrics.push((
        MODEL_METRIC_NAME.to_string(),
        databases
            .iter()
            .map(|db| MetricSeries::new(&db.database_id, db.model_scores.clone(), db.mos.clone()))
            .collect::<vqfuse_core::Result<_>>()?,
    ));
    for (i, name) in args.baselines.iter().enumerate() {
        metrics.push((
            name.clone(),
            databases
                .iter()
                .map(|db| {
                    MetricSeries::new(
                        &db.database_id,
                        db.baseline_scores[i].clone(),
                        db.mos.clone(),
                    )
                })
                .collect::<vqfuse_core::Result<_>>()?,
        ));
    }
    let anchor = args
        .anchor
        .clone()
        .unwrap_or_else(|| MODEL_METRIC_NAME.to_string());
    let mut report = build_report(&metrics, &anchor)?;

    // pairwise protocol: model vs one baseline over all databases
    let pair_metric = args
        .pair_against
        .clone()
        .or_else(|| args.baselines.first().cloned());
    if let Some(other) = pair_metric {
        let other_scores: Vec<&Vec<f64>> = if other == MODEL_METRIC_NAME {
            databases.iter().map(|db| &db.model_scores).collect()
        } else {
            let idx = args
                .baselines
                .iter()
                .position(|b| *b == other)
                .ok_or_else(|| anyhow::anyhow!("pairwise baseline `{other}` not evaluated"))?;
            databases
                .iter()
                .map(|db| &db.baseline_scores[idx])
                .collect()
        };
        let mut pairs_model: Vec<PairRecord> = Vec::new();
        let mut pairs_other: Vec<PairRecord> = Vec::new();
        for (db, other_db) in databases.iter().zip(other_scores) {
            pairs_model.extend(build_pairwise(&db.mos, &db.model_scores));
            pairs_other.extend(build_pairwise(&db.mos, other_db));
        }
        let acc_model = pairwise_accuracy(&pairs_model);
        let acc_other = pairwise_accuracy(&pairs_other);
        let counts = accuracy_counts(&acc_model, &acc_other);
        report.pairwise = Some(PairwiseSummary {
            metric_a: MODEL_METRIC_NAME.to_string(),
            metric_b: other.clone(),
            pair_count: pairs_model.len() as u64,
            accuracy_a: acc_model.accuracy,
            accuracy_b: acc_other.accuracy,
            ties_a: acc_model.metric_ties,
            ties_b: acc_other.metric_ties,
            counts,
            p_value: fisher_exact(counts),
        });
        std::fs::create_dir_all(args.out_dir)?;
        write_pairs(&args.out_dir.join("pairs_fusion.csv"), &pairs_model, config)?;
        write_pairs(
            &args.out_dir.join(format!("pairs_{}.csv", sanitize(&other))),
            &pairs_other,
            config,
        )?;
    }

    std::fs::create_dir_all(args.out_dir)?;
    let text = format!(
        "# vqfuse v1 config={}\n{}",
        config.hash(),
        report.render_text()
    );
    let csv = format!(
        "# vqfuse v1 config={}\n{}",
        config.hash(),
        report.render_csv()
    );
    std::fs::write(args.out_dir.join("report.txt"), &text)?;
    std::fs::write(args.out_dir.join("report.csv"), &csv)?;
    print!("{text}");
    Ok(())
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect()
}

fn write_pairs(path: &Path, pairs: &[PairRecord], config: &RunConfig) -> Result<()> {
    let mut out = format!(
        "# vqfuse v1 config={}\nmos_diff,metric_diff\n",
        config.hash()
    );
    for p in pairs {
        out.push_str(&format!("{},{}\n", p.mos_diff, p.metric_diff));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a pair dump written by `write_pairs`.
pub fn read_pairs(path: &Path) -> Result<Vec<PairRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("mos_diff") || line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let mos_diff: f64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| anyhow::anyhow!("{}: bad pair line `{line}`", path.display()))?;
        let metric_diff: f64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| anyhow::anyhow!("{}: bad pair line `{line}`", path.display()))?;
        out.push(PairRecord {
            mos_diff,
            metric_diff,
        });
    }
    anyhow::ensure!(!out.is_empty(), "{}: no pairs found", path.display());
    Ok(out)
}
