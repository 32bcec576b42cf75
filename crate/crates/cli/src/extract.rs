//! `vqfuse extract`: compute and cache per-frame features for every
//! sequence of a database manifest. Idempotent: matching cache entries are
//! never recomputed.

use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use vqfuse_core::features::FeatureExtractor;
use vqfuse_core::manifest::DatabaseManifest;
use vqfuse_core::pipeline::extract_sequence;

use crate::cache::{cache_path, is_cached, write_cache, CacheMeta};
use crate::config::RunConfig;
use crate::media::{open_pair, resolve_pool};

pub struct ExtractReport {
    pub recomputed: usize,
    pub cached: usize,
    pub failures: Vec<(String, String)>,
}

pub fn run(
    manifest_path: &Path,
    pool_path: Option<&Path>,
    cache_dir: &Path,
    config: &RunConfig,
) -> Result<ExtractReport> {
    let manifest = DatabaseManifest::load(manifest_path)?;
    let pool = resolve_pool(pool_path, &manifest)?;
    let alpha = config.extraction_alpha();
    if config.alpha.is_tune() {
        eprintln!(
            "note: alpha is \"tune\"; extracting the detail-loss feature at the default {alpha}"
        );
    }
    let meta = CacheMeta {
        pool_version: pool.version().to_string(),
        alpha,
        config_hash: config.hash(),
    };
    let extractor = FeatureExtractor::new(pool.clone(), alpha);

    let results: Vec<(String, Result<bool>)> = manifest
        .sequences
        .par_iter()
        .map(|seq| {
            let path = cache_path(cache_dir, &manifest.database_id, &seq.sequence_id);
            if is_cached(&path, &meta, pool.keys()) {
                return (seq.sequence_id.clone(), Ok(false));
            }
            let outcome = (|| -> Result<bool> {
                let (mut reference, mut test) = open_pair(manifest_path, &manifest, seq)?;
                let frames = extract_sequence(&mut reference, &mut test, &extractor)
                    .with_context(|| format!("extracting {}", seq.sequence_id))?;
                write_cache(&path, &meta, pool.keys(), &frames)?;
                Ok(true)
            })();
            (seq.sequence_id.clone(), outcome)
        })
        .collect();

    let mut report = ExtractReport {
        recomputed: 0,
        cached: 0,
        failures: Vec::new(),
    };
    for (sequence_id, outcome) in results {
        match outcome {
            Ok(true) => report.recomputed += 1,
            Ok(false) => report.cached += 1,
            Err(e) => report.failures.push((sequence_id, format!("{e:#}"))),
        }
    }
    println!(
        "extract {}: {} sequences recomputed, {} cached, {} failed (config {})",
        manifest.database_id,
        report.recomputed,
        report.cached,
        report.failures.len(),
        meta.config_hash
    );
    for (seq, err) in &report.failures {
        eprintln!("error: {seq}: {err}");
    }
    Ok(report)
}
