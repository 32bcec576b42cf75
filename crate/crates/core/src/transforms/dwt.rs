//! 2-D discrete wavelet transforms.
//!
//! Two analysis families are provided: orthonormal Haar, used for the
//! feature-pool pyramid and subband energy features because it conserves
//! energy exactly on even-sized planes, and CDF 9/7 (JPEG 2000 irreversible
//! analysis filters, unit-gain lowpass) used by the detail-loss metric.
//!
//! Band naming: `detail_h` is highpass along x / lowpass along y,
//! `detail_v` is the transpose case, `detail_d` is highpass along both.

use crate::error::{Error, Result};
use crate::plane::Plane;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WaveletFamily {
    Haar,
    Cdf97,
}

/// One decomposition level: the approximation band plus three detail bands.
#[derive(Debug, Clone)]
pub struct DwtLevel {
    pub approx: Plane,
    pub detail_h: Plane,
    pub detail_v: Plane,
    pub detail_d: Plane,
    /// 1-based decomposition level.
    pub scale: u8,
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

// JPEG 2000 irreversible 9/7 analysis filters. The lowpass taps sum to 1
// (constant signals pass through unscaled), the highpass taps sum to 0.
const CDF97_LOW: [f64; 9] = [
    0.026748757410810,
    -0.016864118442875,
    -0.078223266528990,
    0.266864118442875,
    0.602949018236360,
    0.266864118442875,
    -0.078223266528990,
    -0.016864118442875,
    0.026748757410810,
];
const CDF97_HIGH: [f64; 7] = [
    0.091271763114250,
    -0.057543526228500,
    -0.591271763114250,
    1.115_087_052_457,
    -0.591271763114250,
    -0.057543526228500,
    0.091271763114250,
];

/// Whole-sample symmetric extension index.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    // period of the reflected signal is 2n-2 (n > 1)
    if n == 1 {
        return 0;
    }
    let p = 2 * n - 2;
    i = i.rem_euclid(p);
    if i >= n {
        i = p - i;
    }
    i as usize
}

/// One 1-D analysis step. Returns (lowpass, highpass) with lengths
/// ceil(n/2) and floor(n/2).
fn analyze_1d(input: &[f64], family: WaveletFamily, low: &mut Vec<f64>, high: &mut Vec<f64>) {
    let n = input.len();
    low.clear();
    high.clear();
    match family {
        WaveletFamily::Haar => {
            let pairs = n / 2;
            for k in 0..pairs {
                let a = input[2 * k];
                let b = input[2 * k + 1];
                low.push((a + b) * FRAC_1_SQRT_2);
                high.push((a - b) * FRAC_1_SQRT_2);
            }
            if n % 2 == 1 {
                // duplicate the trailing sample (half-sample extension)
                low.push(input[n - 1] * 2.0 * FRAC_1_SQRT_2);
            }
        }
        WaveletFamily::Cdf97 => {
            let half_low = n.div_ceil(2);
            let half_high = n / 2;
            for k in 0..half_low {
                let center = 2 * k as isize;
                let mut acc = 0.0;
                for (j, &tap) in CDF97_LOW.iter().enumerate() {
                    let idx = center + j as isize - 4;
                    acc += tap * input[reflect(idx, n)];
                }
                low.push(acc);
            }
            for k in 0..half_high {
                let center = 2 * k as isize + 1;
                let mut acc = 0.0;
                for (j, &tap) in CDF97_HIGH.iter().enumerate() {
                    let idx = center + j as isize - 3;
                    acc += tap * input[reflect(idx, n)];
                }
                high.push(acc);
            }
        }
    }
}

/// Single-level 2-D analysis: rows first, then columns.
pub fn dwt2d_level(plane: &Plane, family: WaveletFamily) -> DwtLevel {
    let w = plane.width();
    let h = plane.height();
    let lw = w.div_ceil(2);
    let hw = w / 2;
    let lh = h.div_ceil(2);
    let hh = h / 2;

    // Row pass.
    let mut row_low = Plane::new(lw, h);
    let mut row_high = Plane::new(hw, h);
    let mut lbuf = Vec::with_capacity(lw);
    let mut hbuf = Vec::with_capacity(hw);
    for y in 0..h {
        analyze_1d(plane.row(y), family, &mut lbuf, &mut hbuf);
        for (x, &v) in lbuf.iter().enumerate() {
            row_low.set(x, y, v);
        }
        for (x, &v) in hbuf.iter().enumerate() {
            row_high.set(x, y, v);
        }
    }

    // Column pass.
    let mut col = Vec::with_capacity(h);
    let mut approx = Plane::new(lw, lh);
    let mut detail_v = Plane::new(lw, hh);
    for x in 0..lw {
        col.clear();
        for y in 0..h {
            col.push(row_low.at(x, y));
        }
        analyze_1d(&col, family, &mut lbuf, &mut hbuf);
        for (y, &v) in lbuf.iter().enumerate() {
            approx.set(x, y, v);
        }
        for (y, &v) in hbuf.iter().enumerate() {
            detail_v.set(x, y, v);
        }
    }
    let mut detail_h = Plane::new(hw, lh);
    let mut detail_d = Plane::new(hw, hh);
    for x in 0..hw {
        col.clear();
        for y in 0..h {
            col.push(row_high.at(x, y));
        }
        analyze_1d(&col, family, &mut lbuf, &mut hbuf);
        for (y, &v) in lbuf.iter().enumerate() {
            detail_h.set(x, y, v);
        }
        for (y, &v) in hbuf.iter().enumerate() {
            detail_d.set(x, y, v);
        }
    }

    DwtLevel {
        approx,
        detail_h,
        detail_v,
        detail_d,
        scale: 1,
    }
}

/// Multi-level decomposition; level λ is computed from the approximation
/// band of level λ-1.
pub fn dwt2d(plane: &Plane, levels: u8, family: WaveletFamily) -> Result<Vec<DwtLevel>> {
    if !(1..=4).contains(&levels) {
        return Err(Error::InvalidInput(format!(
            "decomposition levels must be in 1..=4, got {levels}"
        )));
    }
    let min_dim = plane.width().min(plane.height());
    if min_dim < (1usize << levels) {
        return Err(Error::Dimension(format!(
            "plane {}x{} too small for {} levels (needs >= {} per side)",
            plane.width(),
            plane.height(),
            levels,
            1usize << levels
        )));
    }
    let mut out = Vec::with_capacity(levels as usize);
    let mut current = plane.clone();
    for level in 1..=levels {
        let mut decomp = dwt2d_level(&current, family);
        decomp.scale = level;
        current = decomp.approx.clone();
        out.push(decomp);
    }
    Ok(out)
}

impl DwtLevel {
    /// Sum of squared coefficients over all four subbands.
    pub fn energy(&self) -> f64 {
        self.approx.energy()
            + self.detail_h.energy()
            + self.detail_v.energy()
            + self.detail_d.energy()
    }
}
