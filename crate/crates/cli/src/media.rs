//! Shared glue between manifests and sequence handles.

use std::path::Path;

use anyhow::{Context, Result};
use vqfuse_core::features::PoolSpec;
use vqfuse_core::manifest::{resolve_media_path, DatabaseManifest, SequenceRecord};
use vqfuse_core::video::{open_sequence, SequenceHandle};

/// Open the reference/test handles for one manifest sequence; re-sampled
/// test content is set up to be upsampled back to source geometry.
pub fn open_pair(
    manifest_path: &Path,
    manifest: &DatabaseManifest,
    seq: &SequenceRecord,
) -> Result<(SequenceHandle, SequenceHandle)> {
    let source = manifest.source(&seq.source_id)?;
    let ref_path = resolve_media_path(manifest_path, &source.path);
    let test_path = resolve_media_path(manifest_path, &seq.path);
    let reference = open_sequence(&ref_path, source.spec)
        .with_context(|| format!("opening reference {}", ref_path.display()))?;
    let storage = manifest.storage_spec(seq)?;
    let mut test = open_sequence(&test_path, storage)
        .with_context(|| format!("opening test {}", test_path.display()))?;
    if seq.resampled_from.is_some() {
        test = test.with_upsample_to(source.spec.width, source.spec.height);
    }
    for warning in reference.warnings().iter().chain(test.warnings()) {
        eprintln!("warning: {}: {warning}", seq.sequence_id);
    }
    Ok((reference, test))
}

/// The pool a run uses: an explicit pool file, or the full pool restricted
/// to what the manifest's source geometry supports.
pub fn resolve_pool(pool_path: Option<&Path>, manifest: &DatabaseManifest) -> Result<PoolSpec> {
    match pool_path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading pool file {}", p.display()))?;
            Ok(PoolSpec::parse(&text)?)
        }
        None => {
            let w = manifest
                .sources
                .iter()
                .map(|s| s.spec.width)
                .min()
                .unwrap_or(0);
            let h = manifest
                .sources
                .iter()
                .map(|s| s.spec.height)
                .min()
                .unwrap_or(0);
            anyhow::ensure!(
                w > 0 && h > 0,
                "manifest `{}` has no sources",
                manifest.database_id
            );
            Ok(PoolSpec::full().restricted_to_geometry(w, h))
        }
    }
}
