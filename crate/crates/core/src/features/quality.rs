//! Fidelity indices computed on co-registered planes of normalized
//! intensity. Callers hand in the pyramid level they want; these kernels do
//! not build pyramids themselves.

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Peak signal-to-noise ratio in dB on `[0,1]` intensities, capped at 60 dB
/// once the MSE falls below 1e-6.
pub fn compute_psnr(reference: &Plane, test: &Plane) -> f64 {
    assert!(reference.same_geometry(test));
    let n = reference.data().len() as f64;
    let mse: f64 = reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    if mse < 1e-6 {
        60.0
    } else {
        10.0 * (1.0 / mse).log10()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsimMode {
    Single,
    Multiscale,
}

const SSIM_C1: f64 = 0.01 * 0.01;
const SSIM_C2: f64 = 0.03 * 0.03;
const MS_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

fn gaussian_taps(len: usize, sigma: f64) -> Vec<f64> {
    let half = (len / 2) as isize;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| {
            let d = i as isize - half;
            (-(d * d) as f64 / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Separable weighted filter, valid region only.
fn blur_valid(plane: &Plane, taps: &[f64]) -> Plane {
    let k = taps.len();
    let w = plane.width();
    let h = plane.height();
    debug_assert!(k <= w && k <= h);
    let mut horiz = Plane::new(w - k + 1, h);
    for y in 0..h {
        let row = plane.row(y);
        for x in 0..=w - k {
            let mut acc = 0.0;
            for (j, &t) in taps.iter().enumerate() {
                acc += t * row[x + j];
            }
            horiz.set(x, y, acc);
        }
    }
    let mut out = Plane::new(w - k + 1, h - k + 1);
    for x in 0..horiz.width() {
        for y in 0..=h - k {
            let mut acc = 0.0;
            for (j, &t) in taps.iter().enumerate() {
                acc += t * horiz.at(x, y + j);
            }
            out.set(x, y, acc);
        }
    }
    out
}

fn odd_window(limit: usize, preferred: usize) -> usize {
    let mut k = preferred.min(limit);
    if k.is_multiple_of(2) {
        k -= 1;
    }
    k.max(1)
}

/// Mean SSIM and mean contrast-structure term over the valid window grid.
fn ssim_components(reference: &Plane, test: &Plane) -> (f64, f64) {
    let k = odd_window(reference.width().min(reference.height()), 11);
    let taps = gaussian_taps(k, 1.5);
    let mu_x = blur_valid(reference, &taps);
    let mu_y = blur_valid(test, &taps);
    let xx = blur_valid(&reference.zip_map(reference, |a, b| a * b), &taps);
    let yy = blur_valid(&test.zip_map(test, |a, b| a * b), &taps);
    let xy = blur_valid(&reference.zip_map(test, |a, b| a * b), &taps);

    let mut ssim_acc = 0.0;
    let mut cs_acc = 0.0;
    let n = mu_x.data().len();
    for i in 0..n {
        let mx = mu_x.data()[i];
        let my = mu_y.data()[i];
        let sx = xx.data()[i] - mx * mx;
        let sy = yy.data()[i] - my * my;
        let sxy = xy.data()[i] - mx * my;
        let cs = (2.0 * sxy + SSIM_C2) / (sx + sy + SSIM_C2);
        let lum = (2.0 * mx * my + SSIM_C1) / (mx * mx + my * my + SSIM_C1);
        ssim_acc += lum * cs;
        cs_acc += cs;
    }
    (ssim_acc / n as f64, cs_acc / n as f64)
}

fn downsample_2x2_mean(plane: &Plane) -> Plane {
    let w = plane.width() / 2;
    let h = plane.height() / 2;
    Plane::from_fn(w, h, |x, y| {
        0.25 * (plane.at(2 * x, 2 * y)
            + plane.at(2 * x + 1, 2 * y)
            + plane.at(2 * x, 2 * y + 1)
            + plane.at(2 * x + 1, 2 * y + 1))
    })
}

/// SSIM (the published constants, 11x11 Gaussian window shrunk on small
/// planes) or its five-scale multiscale variant.
pub fn compute_ssim(reference: &Plane, test: &Plane, mode: SsimMode) -> Result<f64> {
    assert!(reference.same_geometry(test));
    match mode {
        SsimMode::Single => Ok(ssim_components(reference, test).0),
        SsimMode::Multiscale => {
            if reference.width().min(reference.height()) < 32 {
                return Err(Error::Dimension(format!(
                    "multiscale SSIM needs at least 32 px per side, got {}x{}",
                    reference.width(),
                    reference.height()
                )));
            }
            let mut a = reference.clone();
            let mut b = test.clone();
            let mut result = 1.0;
            for (i, &weight) in MS_WEIGHTS.iter().enumerate() {
                let (ssim, cs) = ssim_components(&a, &b);
                if i + 1 == MS_WEIGHTS.len() {
                    result *= ssim.max(0.0).powf(weight);
                } else {
                    // negative structure terms zero the product
                    result *= cs.max(0.0).powf(weight);
                    a = downsample_2x2_mean(&a);
                    b = downsample_2x2_mean(&b);
                }
            }
            Ok(result)
        }
    }
}

/// Variance floor below which a window is treated as informationless.
const VIF_VAR_EPS: f64 = 1e-12;
/// Additive observation-noise variance of the information model, the
/// customary value of 2 on the 8-bit scale mapped to `[0,1]` intensities.
const VIF_NOISE: f64 = 2.0 / (255.0 * 255.0);

/// Single-scale visual-information ratio under the local Gaussian model:
/// information preserved in the test signal over information present in the
/// reference. Constant references carry no information and score 1 by
/// convention.
pub fn compute_vif_scale(reference: &Plane, test: &Plane) -> f64 {
    assert!(reference.same_geometry(test));
    let k = odd_window(reference.width().min(reference.height()), 9);
    let taps = gaussian_taps(k, 1.8);
    let mu_x = blur_valid(reference, &taps);
    let mu_y = blur_valid(test, &taps);
    let xx = blur_valid(&reference.zip_map(reference, |a, b| a * b), &taps);
    let yy = blur_valid(&test.zip_map(test, |a, b| a * b), &taps);
    let xy = blur_valid(&reference.zip_map(test, |a, b| a * b), &taps);

    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..mu_x.data().len() {
        let mx = mu_x.data()[i];
        let my = mu_y.data()[i];
        let sx = (xx.data()[i] - mx * mx).max(0.0);
        let sy = (yy.data()[i] - my * my).max(0.0);
        let sxy = xy.data()[i] - mx * my;
        let (g, sv) = if sx > VIF_VAR_EPS {
            let g = sxy / sx;
            if g < 0.0 {
                (0.0, sy)
            } else {
                (g, (sy - g * sxy).max(0.0))
            }
        } else {
            (0.0, sy)
        };
        num += (1.0 + g * g * sx / (sv + VIF_NOISE)).ln();
        den += (1.0 + sx / VIF_NOISE).ln();
    }
    if den <= 0.0 {
        1.0
    } else {
        num / den
    }
}
