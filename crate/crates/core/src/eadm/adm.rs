//! Detail-loss scoring pipeline.
//!
//! Four CDF 9/7 decomposition levels; per level the test coefficients are
//! decoupled into a restored part (detail the test retains, clipped to the
//! reference and direction-checked) and an additive part. Restored detail
//! is weighted by the contrast-sensitivity factors of the 9/7 basis,
//! thresholded by a contrast-masking map built from the additive
//! impairment, cube-pooled over the frame center and compared against the
//! pooled reference detail. The dynamic texture field, when present,
//! divides the masking thresholds elementwise before thresholding; a zero
//! field leaves the pipeline bit-identical to the unmodified metric.

use crate::plane::Plane;
use crate::transforms::{dwt2d_level, DwtLevel, WaveletFamily};

use super::dtf::{masking_divisor, DtfPyramid};

pub(crate) const ADM_LEVELS: usize = 4;

const COS_1DEG_SQ: f64 = 0.9996954135095479; // cos(pi/180)^2

/// Basis-function amplitudes of the 9/7 wavelet per level and orientation
/// (approximation, horizontal, diagonal, vertical); the contrast
/// sensitivity factor of a band is the reciprocal of its amplitude.
const BASIS_AMPLITUDES: [[f64; 4]; 4] = [
    [0.62171, 0.67234, 0.72709, 0.67234],
    [0.34537, 0.41317, 0.49428, 0.41317],
    [0.18004, 0.22727, 0.28688, 0.22727],
    [0.091401, 0.11792, 0.15214, 0.11792],
];

#[derive(Clone, Copy)]
enum Band {
    H,
    V,
    D,
}

fn csf_factor(level: usize, band: Band) -> f64 {
    let col = match band {
        Band::H => 1,
        Band::D => 2,
        Band::V => 3,
    };
    1.0 / BASIS_AMPLITUDES[level - 1][col]
}

struct DetailBands {
    h: Plane,
    v: Plane,
    d: Plane,
}

/// Split test detail into restored and additive parts. Coefficients are
/// clipped onto the reference (gain in [0,1]); where the local (H, V)
/// direction of test and reference agree within one degree the full test
/// coefficients count as restored.
fn decouple(o: &DwtLevel, t: &DwtLevel, w: usize, h: usize) -> (DetailBands, DetailBands) {
    let mut rst = DetailBands {
        h: Plane::new(w, h),
        v: Plane::new(w, h),
        d: Plane::new(w, h),
    };
    let mut add = DetailBands {
        h: Plane::new(w, h),
        v: Plane::new(w, h),
        d: Plane::new(w, h),
    };
    for y in 0..h {
        for x in 0..w {
            let oh = o.detail_h.at(x, y);
            let ov = o.detail_v.at(x, y);
            let od = o.detail_d.at(x, y);
            let th = t.detail_h.at(x, y);
            let tv = t.detail_v.at(x, y);
            let td = t.detail_d.at(x, y);

            let gain = |num: f64, den: f64| {
                if den != 0.0 {
                    (num / den).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            };
            let mut rh = gain(th, oh) * oh;
            let mut rv = gain(tv, ov) * ov;
            let mut rd = gain(td, od) * od;

            let ot_dp = oh * th + ov * tv;
            let o_mag_sq = oh * oh + ov * ov;
            let t_mag_sq = th * th + tv * tv;
            if ot_dp >= 0.0 && ot_dp * ot_dp >= COS_1DEG_SQ * o_mag_sq * t_mag_sq {
                rh = th;
                rv = tv;
                rd = td;
            }

            rst.h.set(x, y, rh);
            rst.v.set(x, y, rv);
            rst.d.set(x, y, rd);
            add.h.set(x, y, th - rh);
            add.v.set(x, y, tv - rv);
            add.d.set(x, y, td - rd);
        }
    }
    (rst, add)
}

/// Contrast-masking map: neighborhood mass of the sensitivity-weighted
/// additive impairment, summed over the three bands. 3x3 window with the
/// center sample weighted 1/15 and neighbors 1/30, borders replicated.
fn masking_threshold(add: &DetailBands, level: usize, w: usize, h: usize) -> Plane {
    let fh = csf_factor(level, Band::H);
    let fv = csf_factor(level, Band::V);
    let fd = csf_factor(level, Band::D);
    let mut mt = Plane::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -1i32..=1 {
                for dx in -1i32..=1 {
                    let weight = if dx == 0 && dy == 0 {
                        1.0 / 15.0
                    } else {
                        1.0 / 30.0
                    };
                    let sx = (x as i32 + dx).clamp(0, w as i32 - 1) as usize;
                    let sy = (y as i32 + dy).clamp(0, h as i32 - 1) as usize;
                    acc += weight
                        * (fh * add.h.at(sx, sy).abs()
                            + fv * add.v.at(sx, sy).abs()
                            + fd * add.d.at(sx, sy).abs());
                }
            }
            mt.set(x, y, acc);
        }
    }
    mt
}

/// Detail-loss score in [0,1]; 1 means all reference detail is restored.
/// `dtf` relaxes the masking thresholds on dynamic texture; `None` (or an
/// all-zero field) gives the unmodified metric.
pub fn adm_score(ref_plane: &Plane, test_plane: &Plane, dtf: Option<&DtfPyramid>) -> f64 {
    assert!(
        ref_plane.same_geometry(test_plane),
        "detail-loss inputs must share geometry"
    );
    assert!(
        ref_plane.width().min(ref_plane.height()) >= 1 << ADM_LEVELS,
        "frame too small for a {ADM_LEVELS}-level decomposition"
    );

    let mut num_total = 0.0;
    let mut den_total = 0.0;
    let mut o_approx = ref_plane.clone();
    let mut t_approx = test_plane.clone();

    for level in 1..=ADM_LEVELS {
        let o = dwt2d_level(&o_approx, WaveletFamily::Cdf97);
        let t = dwt2d_level(&t_approx, WaveletFamily::Cdf97);
        // all bands share this floor geometry; approximation bands may
        // carry one extra row/column on odd parents
        let w = o_approx.width() / 2;
        let h = o_approx.height() / 2;

        let (rst, add) = decouple(&o, &t, w, h);
        let mt = masking_threshold(&add, level, w, h);

        // pool over the frame center
        let bx = w / 10;
        let by = h / 10;
        let (x0, x1) = if w > 2 * bx { (bx, w - bx) } else { (0, w) };
        let (y0, y1) = if h > 2 * by { (by, h - by) } else { (0, h) };

        for (band, rst_band, o_band) in [
            (Band::H, &rst.h, &o.detail_h),
            (Band::V, &rst.v, &o.detail_v),
            (Band::D, &rst.d, &o.detail_d),
        ] {
            let f = csf_factor(level, band);
            let mut num = 0.0;
            let mut den = 0.0;
            for y in y0..y1 {
                for x in x0..x1 {
                    let mut threshold = mt.at(x, y);
                    if let Some(dtf) = dtf {
                        threshold /= masking_divisor(dtf.levels[level - 1].at(x, y), dtf.alpha);
                    }
                    let restored = ((f * rst_band.at(x, y)).abs() - threshold).max(0.0);
                    num += restored * restored * restored;
                    let reference = (f * o_band.at(x, y)).abs();
                    den += reference * reference * reference;
                }
            }
            num_total += num.cbrt();
            den_total += den.cbrt();
        }

        o_approx = o.approx;
        t_approx = t.approx;
    }

    if den_total < 1e-30 {
        1.0 // no detail to lose
    } else {
        (num_total / den_total).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texture(x: f64, y: f64) -> f64 {
        0.5 + 0.2 * ((x / 5.0).sin() * (y / 7.0).cos())
            + 0.15 * ((x / 13.0 + y / 11.0).sin())
            + 0.1 * ((x / 3.0).cos())
    }

    #[test]
    fn identity_scores_exactly_one() {
        let p = Plane::from_fn(64, 64, |x, y| texture(x as f64, y as f64));
        assert_eq!(adm_score(&p, &p, None), 1.0);
    }

    #[test]
    fn constant_frames_have_no_detail_to_lose() {
        let a = Plane::constant(32, 32, 0.5);
        let b = Plane::constant(32, 32, 0.4);
        assert_eq!(adm_score(&a, &b, None), 1.0);
    }

    #[test]
    fn blur_staircase_is_strictly_decreasing() {
        let p = Plane::from_fn(96, 96, |x, y| texture(x as f64, y as f64));
        let mut last = f64::INFINITY;
        for passes in [1usize, 2, 4, 8, 16] {
            let blurred = crate::synth::blur_plane(&p, passes);
            let score = adm_score(&p, &blurred, None);
            assert!(
                score < last,
                "score {score} not below {last} at {passes} passes"
            );
            assert!((0.0..=1.0).contains(&score));
            last = score;
        }
    }
}
