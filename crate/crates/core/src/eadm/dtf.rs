//! Dynamic texture field: the motion-compensated residual of consecutive
//! reference frames, decomposed to the detail-loss metric's wavelet levels.

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::transforms::{displaced_frame, dwt2d_level, lucas_kanade_flow, WaveletFamily};

use super::adm::ADM_LEVELS;

/// Per-level dynamic texture maps. `levels[i]` matches the geometry of the
/// approximation band at level `i+1` of the detail-loss decomposition; all
/// entries are nonnegative.
#[derive(Debug, Clone)]
pub struct DtfPyramid {
    /// Undected residual |current - displaced previous| at full resolution.
    pub full: Plane,
    pub levels: Vec<Plane>,
    pub alpha: f64,
}

/// Original and modified contrast-masking thresholds per decomposition
/// level.
#[derive(Debug, Clone)]
pub struct MaskingThresholds {
    pub mt: Vec<Plane>,
    pub mt_new: Vec<Plane>,
}

/// Divisor applied to a masking threshold where the texture field is `d`.
#[inline]
pub(crate) fn masking_divisor(d: f64, alpha: f64) -> f64 {
    (1.0 + d).powf(alpha)
}

/// Estimate motion between consecutive reference luma frames, warp the
/// previous frame onto the current one, and decompose the absolute residual
/// through the approximation chain of the detail-loss wavelet.
pub fn compute_dtf(curr_ref: &Plane, prev_ref: &Plane, alpha: f64) -> DtfPyramid {
    debug_assert!(alpha > 0.0, "texture exponent must be positive");
    let flow = lucas_kanade_flow(prev_ref, curr_ref);
    let displaced = displaced_frame(prev_ref, &flow);
    let full = curr_ref.zip_map(&displaced, |o, o_df| (o - o_df).abs());

    let mut levels = Vec::with_capacity(ADM_LEVELS);
    let mut current = full.clone();
    for _ in 0..ADM_LEVELS {
        let level = dwt2d_level(&current, WaveletFamily::Cdf97);
        // the 9/7 lowpass has small negative lobes; the field is a magnitude
        current = level.approx.map(|v| v.max(0.0));
        levels.push(current.clone());
    }
    DtfPyramid {
        full,
        levels,
        alpha,
    }
}

/// A zero texture field (used for the first frame of a sequence).
pub fn dtf_zero(width: usize, height: usize, alpha: f64) -> DtfPyramid {
    let full = Plane::new(width, height);
    let mut levels = Vec::with_capacity(ADM_LEVELS);
    let (mut w, mut h) = (width, height);
    for _ in 0..ADM_LEVELS {
        w = w.div_ceil(2);
        h = h.div_ceil(2);
        levels.push(Plane::new(w, h));
    }
    DtfPyramid {
        full,
        levels,
        alpha,
    }
}

/// Elementwise threshold modification: each threshold is divided by
/// `(1 + DTF)^alpha`, so thresholds only ever shrink and stay put exactly
/// where the texture field is zero.
pub fn modify_masking_thresholds(mt: &[Plane], dtf: &DtfPyramid) -> Result<MaskingThresholds> {
    if mt.len() != dtf.levels.len() {
        return Err(Error::Dimension(format!(
            "threshold levels ({}) do not match texture levels ({})",
            mt.len(),
            dtf.levels.len()
        )));
    }
    let mut mt_new = Vec::with_capacity(mt.len());
    for (level, (m, d)) in mt.iter().zip(&dtf.levels).enumerate() {
        if !m.same_geometry(d) {
            return Err(Error::Dimension(format!(
                "level {} geometry mismatch: thresholds {}x{}, texture {}x{}",
                level + 1,
                m.width(),
                m.height(),
                d.width(),
                d.height()
            )));
        }
        mt_new.push(m.zip_map(d, |mt_v, d_v| mt_v / masking_divisor(d_v, dtf.alpha)));
    }
    Ok(MaskingThresholds {
        mt: mt.to_vec(),
        mt_new,
    })
}
