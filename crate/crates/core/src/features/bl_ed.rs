//! Blurring and edge artefact features over the three high-frequency
//! wavelet subbands.
//!
//! Per subband pixel, the reference and test absolute coefficients of the
//! H, V and D bands are summed. The blurring feature is the positive part
//! of the reference excess (high-frequency energy lost in the test); the
//! edge feature is the mirrored positive part (energy the test added).
//! Frame values are means over subband pixels.

use crate::plane::Plane;
use crate::transforms::{dwt2d_level, WaveletFamily};

pub struct BlEd {
    pub bl: f64,
    pub ed: f64,
}

pub fn compute_bl_ed(reference: &Plane, test: &Plane) -> BlEd {
    assert!(reference.same_geometry(test));
    let r = dwt2d_level(reference, WaveletFamily::Haar);
    let t = dwt2d_level(test, WaveletFamily::Haar);
    // iterate the common floor geometry; for odd inputs the approximation
    // bands carry one extra row/column the detail bands lack
    let w = reference.width() / 2;
    let h = reference.height() / 2;
    if w == 0 || h == 0 {
        return BlEd { bl: 0.0, ed: 0.0 };
    }
    let mut bl_sum = 0.0;
    let mut ed_sum = 0.0;
    for y in 0..h {
        for x in 0..w {
            let ref_hf =
                r.detail_h.at(x, y).abs() + r.detail_v.at(x, y).abs() + r.detail_d.at(x, y).abs();
            let test_hf =
                t.detail_h.at(x, y).abs() + t.detail_v.at(x, y).abs() + t.detail_d.at(x, y).abs();
            bl_sum += (ref_hf - test_hf).max(0.0);
            ed_sum += (test_hf - ref_hf).max(0.0);
        }
    }
    let n = (w * h) as f64;
    BlEd {
        bl: bl_sum / n,
        ed: ed_sum / n,
    }
}
