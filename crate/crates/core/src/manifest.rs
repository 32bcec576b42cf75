//! Database manifests: one structured-text file per subjective database,
//! listing sources, test sequences, geometry and raw subjective scores.
//! Media paths are relative to the manifest file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::video::VideoSpec;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceRecord {
    pub source_id: String,
    pub path: PathBuf,
    pub spec: VideoSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub sequence_id: String,
    pub source_id: String,
    pub path: PathBuf,
    /// Stored geometry when the test sequence was re-sampled; it is
    /// bilinearly upsampled back to source geometry before scoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resampled_from: Option<(usize, usize)>,
    /// Raw subjective score on this database's scale.
    pub mos: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatabaseManifest {
    pub schema_version: u32,
    pub database_id: String,
    /// Bounds of the raw MOS scale; scores are mapped to [0,100] with them.
    pub mos_min: f64,
    pub mos_max: f64,
    pub sources: Vec<SourceRecord>,
    pub sequences: Vec<SequenceRecord>,
}

impl DatabaseManifest {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: self.schema_version,
                expected: MANIFEST_SCHEMA_VERSION,
            });
        }
        if self.mos_max <= self.mos_min || !(self.mos_max - self.mos_min).is_finite() {
            return Err(Error::Config(format!(
                "manifest `{}`: MOS bounds invalid ({} .. {})",
                self.database_id, self.mos_min, self.mos_max
            )));
        }
        let mut source_ids = std::collections::BTreeSet::new();
        for source in &self.sources {
            source.spec.validate_source()?;
            if !source_ids.insert(source.source_id.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate source id `{}`",
                    source.source_id
                )));
            }
        }
        let mut sequence_ids = std::collections::BTreeSet::new();
        for seq in &self.sequences {
            if !sequence_ids.insert(seq.sequence_id.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate sequence id `{}`",
                    seq.sequence_id
                )));
            }
            if !source_ids.contains(seq.source_id.as_str()) {
                return Err(Error::Config(format!(
                    "sequence `{}` references unknown source `{}`",
                    seq.sequence_id, seq.source_id
                )));
            }
            if let Some((w, h)) = seq.resampled_from {
                if w % 2 != 0 || h % 2 != 0 || w < 16 || h < 16 {
                    return Err(Error::Config(format!(
                        "sequence `{}`: invalid re-sampled geometry {w}x{h}",
                        seq.sequence_id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self, source_id: &str) -> Result<&SourceRecord> {
        self.sources
            .iter()
            .find(|s| s.source_id == source_id)
            .ok_or_else(|| Error::Config(format!("unknown source `{source_id}`")))
    }

    /// Spec of a test sequence as stored on disk (source spec, possibly at
    /// re-sampled geometry).
    pub fn storage_spec(&self, seq: &SequenceRecord) -> Result<VideoSpec> {
        let source = self.source(&seq.source_id)?;
        let mut spec = source.spec;
        if let Some((w, h)) = seq.resampled_from {
            spec.width = w;
            spec.height = h;
        }
        Ok(spec)
    }

    /// Map a raw score onto [0,100] using the declared bounds.
    pub fn normalized_mos(&self, raw: f64) -> f64 {
        ((raw - self.mos_min) / (self.mos_max - self.mos_min) * 100.0).clamp(0.0, 100.0)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialization cannot fail");
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path)?;
        let manifest: DatabaseManifest = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("manifest parse: {e}")))?;
        manifest.validate()?;
        Ok(manifest)
    }
}

/// Resolve a manifest-relative media path against the manifest's directory.
pub fn resolve_media_path(manifest_path: &Path, media: &Path) -> PathBuf {
    if media.is_absolute() {
        media.to_path_buf()
    } else {
        manifest_path.parent().unwrap_or(Path::new(".")).join(media)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DatabaseManifest {
        DatabaseManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            database_id: "demo".into(),
            mos_min: 1.0,
            mos_max: 5.0,
            sources: vec![SourceRecord {
                source_id: "src1".into(),
                path: "src1.yuv".into(),
                spec: VideoSpec::new(96, 96, 30.0, 8, 6),
            }],
            sequences: vec![SequenceRecord {
                sequence_id: "src1_blur1".into(),
                source_id: "src1".into(),
                path: "src1_blur1.yuv".into(),
                resampled_from: None,
                mos: 4.0,
            }],
        }
    }

    #[test]
    fn valid_manifest_round_trips() {
        let m = sample();
        m.validate().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.json");
        m.save(&path).unwrap();
        let loaded = DatabaseManifest::load(&path).unwrap();
        assert_eq!(loaded.database_id, "demo");
        assert_eq!(loaded.sequences.len(), 1);
    }

    #[test]
    fn mos_normalization_uses_declared_bounds() {
        let m = sample();
        assert_eq!(m.normalized_mos(1.0), 0.0);
        assert_eq!(m.normalized_mos(5.0), 100.0);
        assert_eq!(m.normalized_mos(3.0), 50.0);
    }

    #[test]
    fn dangling_source_reference_is_rejected() {
        let mut m = sample();
        m.sequences[0].source_id = "missing".into();
        assert!(matches!(m.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_mos_bounds_are_rejected() {
        let mut m = sample();
        m.mos_max = m.mos_min;
        assert!(m.validate().is_err());
    }

    #[test]
    fn resampled_spec_overrides_geometry() {
        let mut m = sample();
        m.sequences[0].resampled_from = Some((48, 48));
        m.validate().unwrap();
        let spec = m.storage_spec(&m.sequences[0]).unwrap();
        assert_eq!((spec.width, spec.height), (48, 48));
    }

    #[test]
    fn relative_paths_resolve_against_the_manifest_dir() {
        let resolved = resolve_media_path(
            Path::new("/data/db/manifest.json"),
            Path::new("clips/a.yuv"),
        );
        assert_eq!(resolved, PathBuf::from("/data/db/clips/a.yuv"));
    }
}
