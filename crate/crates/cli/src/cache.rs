//! Per-sequence feature cache: one CSV per sequence with a versioned
//! header. A cache entry is reusable only when pool version, extractor
//! version, texture exponent and column list all match exactly; the config
//! hash of the run that wrote the file is recorded but is provenance, not
//! part of the key (extraction output does not depend on the training
//! parameters).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use vqfuse_core::features::{FeatureKey, FeatureVector, EXTRACTOR_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub struct CacheMeta {
    pub pool_version: String,
    pub alpha: f64,
    pub config_hash: String,
}

impl CacheMeta {
    fn key_line(&self) -> String {
        format!(
            "# vqfuse-cache v1 pool={} extractor={} alpha={}",
            self.pool_version, EXTRACTOR_VERSION, self.alpha
        )
    }

    fn provenance_line(&self) -> String {
        format!("# written-by config={}", self.config_hash)
    }
}

fn column_line(keys: &[FeatureKey]) -> String {
    std::iter::once("frame".to_string())
        .chain(keys.iter().map(|k| k.to_string()))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn cache_path(cache_dir: &Path, database_id: &str, sequence_id: &str) -> PathBuf {
    cache_dir
        .join(database_id)
        .join(format!("{sequence_id}.csv"))
}

/// True when the file exists and its key line and column list match.
pub fn is_cached(path: &Path, meta: &CacheMeta, keys: &[FeatureKey]) -> bool {
    let Ok(text) = std::fs::read_to_string(path) else {
        return false;
    };
    let mut lines = text.lines();
    if lines.next() != Some(meta.key_line().as_str()) {
        return false;
    }
    let _provenance = lines.next();
    lines.next() == Some(column_line(keys).as_str())
}

pub fn write_cache(
    path: &Path,
    meta: &CacheMeta,
    keys: &[FeatureKey],
    frames: &[FeatureVector],
) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = meta.key_line();
    out.push('\n');
    out.push_str(&meta.provenance_line());
    out.push('\n');
    out.push_str(&column_line(keys));
    out.push('\n');
    for frame in frames {
        out.push_str(&frame.frame_index.to_string());
        for key in keys {
            let v = frame
                .get(*key)
                .with_context(|| format!("frame {} missing {key}", frame.frame_index))?;
            out.push(',');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a cache file back; the key line and column list must match.
pub fn read_cache(
    path: &Path,
    meta: &CacheMeta,
    keys: &[FeatureKey],
) -> Result<Vec<FeatureVector>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading cache {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != meta.key_line() {
        bail!(
            "cache {} was written with different versions\n  found:    {}\n  expected: {}\nre-run `vqfuse extract` for this configuration",
            path.display(),
            header,
            meta.key_line()
        );
    }
    let _provenance = lines.next();
    let columns = lines.next().unwrap_or_default();
    if columns != column_line(keys) {
        bail!(
            "cache {} holds a different feature pool; re-run `vqfuse extract`",
            path.display()
        );
    }
    let mut frames = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let frame_index: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .with_context(|| format!("{}:{}: bad frame index", path.display(), lineno + 4))?;
        let mut vector = FeatureVector::new(frame_index);
        for key in keys {
            let field = fields.next().with_context(|| {
                format!("{}:{}: missing column {key}", path.display(), lineno + 4)
            })?;
            let value: f64 = field.parse().with_context(|| {
                format!("{}:{}: bad value for {key}", path.display(), lineno + 4)
            })?;
            vector.push(*key, value)?;
        }
        frames.push(vector);
    }
    if frames.is_empty() {
        bail!("cache {} holds no frames", path.display());
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vqfuse_core::features::PoolSpec;

    fn meta() -> CacheMeta {
        CacheMeta {
            pool_version: "pool-v1".into(),
            alpha: 0.3,
            config_hash: "abc".into(),
        }
    }

    fn sample_frames(keys: &[FeatureKey]) -> Vec<FeatureVector> {
        (0..3)
            .map(|i| {
                let mut v = FeatureVector::new(i);
                for (j, key) in keys.iter().enumerate() {
                    v.push(*key, (i * 10 + j) as f64 / 3.0 + 0.123456789012345)
                        .unwrap();
                }
                v
            })
            .collect()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let keys: Vec<FeatureKey> = PoolSpec::core_six();
        let frames = sample_frames(&keys);
        let path = cache_path(dir.path(), "db", "seq");
        write_cache(&path, &meta(), &keys, &frames).unwrap();
        assert!(is_cached(&path, &meta(), &keys));
        let back = read_cache(&path, &meta(), &keys).unwrap();
        assert_eq!(back.len(), frames.len());
        for (a, b) in back.iter().zip(&frames) {
            for key in &keys {
                assert_eq!(
                    a.get(*key).unwrap().to_bits(),
                    b.get(*key).unwrap().to_bits()
                );
            }
        }
    }

    #[test]
    fn alpha_mismatch_is_not_a_hit() {
        let dir = tempfile::tempdir().unwrap();
        let keys = PoolSpec::core_six();
        let frames = sample_frames(&keys);
        let path = cache_path(dir.path(), "db", "seq");
        write_cache(&path, &meta(), &keys, &frames).unwrap();
        let other = CacheMeta {
            alpha: 0.5,
            ..meta()
        };
        assert!(!is_cached(&path, &other, &keys));
        assert!(read_cache(&path, &other, &keys).is_err());
    }

    #[test]
    fn config_hash_is_provenance_not_key() {
        let dir = tempfile::tempdir().unwrap();
        let keys = PoolSpec::core_six();
        let frames = sample_frames(&keys);
        let path = cache_path(dir.path(), "db", "seq");
        write_cache(&path, &meta(), &keys, &frames).unwrap();
        let other = CacheMeta {
            config_hash: "different".into(),
            ..meta()
        };
        assert!(is_cached(&path, &other, &keys));
        assert!(read_cache(&path, &other, &keys).is_ok());
    }

    #[test]
    fn key_list_mismatch_is_not_a_hit() {
        let dir = tempfile::tempdir().unwrap();
        let keys = PoolSpec::core_six();
        let frames = sample_frames(&keys);
        let path = cache_path(dir.path(), "db", "seq");
        write_cache(&path, &meta(), &keys, &frames).unwrap();
        assert!(!is_cached(&path, &meta(), &keys[..4]));
    }
}
