//! Detail-loss metric with dynamic-texture-aware contrast masking.
//!
//! On static content (or without a previous frame) the score reduces
//! exactly to the plain detail-loss metric. With motion, the texture field
//! of the reference lowers the masking thresholds so detail losses inside
//! dynamic texture are penalized less.

mod adm;
mod dtf;

pub use adm::adm_score;
pub use dtf::{compute_dtf, dtf_zero, modify_masking_thresholds, DtfPyramid, MaskingThresholds};

use crate::plane::Plane;
use crate::video::FramePair;

/// Texture exponent used when no explicit configuration is given; tunable
/// per model via the training harness.
pub const DEFAULT_ALPHA: f64 = 0.3;

/// Detail-loss score of the pair's luma planes with texture-modified
/// masking. `prev_ref` is the previous reference luma frame; without it the
/// texture field is zero and the plain metric is computed.
pub fn compute_eadm(pair: &FramePair, prev_ref: Option<&Plane>, alpha: f64) -> f64 {
    let curr_ref = &pair.ref_planes[0];
    let dtf = prev_ref.map(|prev| compute_dtf(curr_ref, prev, alpha));
    adm_score(curr_ref, &pair.test_planes[0], dtf.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::blur_plane as blur_passes;
    use crate::video::FramePair;

    fn texture(x: f64, y: f64, t: f64) -> f64 {
        0.5 + 0.25 * (((x + 2.0 * t) / 13.0).sin() * ((y + t) / 11.0).cos())
            + 0.15 * ((x / 23.0 + y / 17.0).sin())
    }

    fn plane(w: usize, h: usize, t: f64) -> Plane {
        Plane::from_fn(w, h, |x, y| texture(x as f64, y as f64, t))
    }

    fn pair(reference: &Plane, test: &Plane) -> FramePair {
        let cw = reference.width() / 2;
        let ch = reference.height() / 2;
        FramePair::new(
            [
                reference.clone(),
                Plane::constant(cw, ch, 0.5),
                Plane::constant(cw, ch, 0.5),
            ],
            [
                test.clone(),
                Plane::constant(cw, ch, 0.5),
                Plane::constant(cw, ch, 0.5),
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn identity_is_one_even_with_motion() {
        let prev = plane(64, 64, 0.0);
        let curr = plane(64, 64, 3.0);
        let p = pair(&curr, &curr);
        assert_eq!(compute_eadm(&p, Some(&prev), 0.3), 1.0);
        assert_eq!(compute_eadm(&p, None, 0.3), 1.0);
    }

    #[test]
    fn static_scene_reduces_to_plain_metric() {
        let frame = plane(64, 64, 0.0);
        let degraded = blur_passes(&frame, 3);
        let p = pair(&frame, &degraded);
        let plain = adm_score(&frame, &degraded, None);
        // previous frame identical: texture field is exactly zero
        let with_motion = compute_eadm(&p, Some(&frame), 0.3);
        assert!((with_motion - plain).abs() < 1e-12);
    }

    #[test]
    fn alpha_is_irrelevant_on_static_content() {
        let frame = plane(64, 64, 0.0);
        let degraded = blur_passes(&frame, 2);
        let p = pair(&frame, &degraded);
        let a = compute_eadm(&p, Some(&frame), 0.1);
        let b = compute_eadm(&p, Some(&frame), 1.7);
        assert_eq!(a, b);
    }

    #[test]
    fn blur_staircase_decreases_with_motion_present() {
        let prev = plane(96, 96, 0.0);
        let curr = plane(96, 96, 1.0);
        let mut last = f64::INFINITY;
        for passes in [1usize, 3, 6, 10, 16] {
            let degraded = blur_passes(&curr, passes);
            let p = pair(&curr, &degraded);
            let score = compute_eadm(&p, Some(&prev), 0.3);
            assert!(score < last, "score {score} at {passes} passes");
            last = score;
        }
    }

    #[test]
    fn texture_relaxation_never_lowers_the_score() {
        // shrinking thresholds can only admit more restored detail
        let prev = plane(96, 96, 0.0);
        let curr = plane(96, 96, 1.5);
        let degraded = blur_passes(&curr, 4);
        let dtf = compute_dtf(&curr, &prev, 0.8);
        let plain = adm_score(&curr, &degraded, None);
        let modified = adm_score(&curr, &degraded, Some(&dtf));
        assert!(modified >= plain, "modified {modified} < plain {plain}");
    }
}
