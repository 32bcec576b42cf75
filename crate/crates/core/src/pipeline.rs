//! Sequence-level orchestration: extract every frame of a sequence pair,
//! frame-parallel within bounded read-ahead chunks.

use rayon::prelude::*;

use crate::error::Result;
use crate::features::{FeatureExtractor, FeatureVector, PoolSpec};
use crate::fusion::FusionModel;
use crate::video::{read_frame_pair, FramePair, SequenceHandle};

/// Extract features for every frame of the pair of sequences. Frames are
/// decoded sequentially but scored in parallel, one chunk at a time, so
/// memory stays bounded on long sequences. Output order is frame order and
/// the values are independent of the thread count.
pub fn extract_sequence(
    reference: &mut SequenceHandle,
    test: &mut SequenceHandle,
    extractor: &FeatureExtractor,
) -> Result<Vec<FeatureVector>> {
    let count = reference.frame_count().min(test.frame_count());
    let chunk = (rayon::current_num_threads() * 2).max(4);
    let mut results = Vec::with_capacity(count);
    let mut carry: Option<FramePair> = None;
    let mut start = 0;
    while start < count {
        let end = (start + chunk).min(count);
        let pairs: Vec<FramePair> = (start..end)
            .map(|i| read_frame_pair(reference, test, i))
            .collect::<Result<_>>()?;
        let outputs: Vec<FeatureVector> = (0..pairs.len())
            .into_par_iter()
            .map(|k| {
                let prev = if k == 0 {
                    carry.as_ref()
                } else {
                    Some(&pairs[k - 1])
                };
                extractor.extract(&pairs[k], prev)
            })
            .collect::<Result<_>>()?;
        results.extend(outputs);
        carry = pairs.into_iter().next_back();
        start = end;
    }
    Ok(results)
}

/// Score a sequence pair with a trained model: per-frame quality values and
/// their mean.
pub fn predict_sequence(
    reference: &mut SequenceHandle,
    test: &mut SequenceHandle,
    model: &FusionModel,
) -> Result<(Vec<f64>, f64)> {
    let pool = PoolSpec::from_keys("model-keys", model.required_keys())?;
    let extractor = FeatureExtractor::new(pool, model.alpha);
    let frames = extract_sequence(reference, test, &extractor)?;
    let mut per_frame = Vec::with_capacity(frames.len());
    for frame in &frames {
        per_frame.push(model.predict_frame(frame)?);
    }
    let mean = per_frame.iter().sum::<f64>() / per_frame.len().max(1) as f64;
    Ok((per_frame, mean))
}
