//! Multiscale pyramid built from the Haar approximation chain.
//!
//! Scale 1 is the input plane. Each further scale is the orthonormal Haar
//! approximation band of the previous one, rescaled by 1/2 so a constant
//! plane keeps its value at every scale.

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::transforms::dwt::{dwt2d_level, WaveletFamily};

pub fn build_scale_pyramid(plane: &Plane, scales: usize) -> Result<Vec<Plane>> {
    if scales == 0 {
        return Err(Error::InvalidInput(
            "pyramid needs at least one scale".into(),
        ));
    }
    let min_dim = plane.width().min(plane.height());
    if min_dim < (1usize << scales) {
        return Err(Error::Dimension(format!(
            "plane {}x{} too small for a {}-scale pyramid",
            plane.width(),
            plane.height(),
            scales
        )));
    }
    let mut out = Vec::with_capacity(scales);
    out.push(plane.clone());
    for _ in 1..scales {
        let level = dwt2d_level(out.last().unwrap(), WaveletFamily::Haar);
        out.push(level.approx.map(|v| v * 0.5));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn sizes_halve() {
        let plane = Plane::constant(64, 64, 0.0);
        let pyr = build_scale_pyramid(&plane, 4).unwrap();
        let sizes: Vec<(usize, usize)> = pyr.iter().map(|p| (p.width(), p.height())).collect();
        assert_eq!(sizes, vec![(64, 64), (32, 32), (16, 16), (8, 8)]);
    }

    #[test]
    fn constant_value_preserved() {
        let plane = Plane::constant(32, 32, 0.375);
        let pyr = build_scale_pyramid(&plane, 4).unwrap();
        for level in &pyr {
            for &v in level.data() {
                assert!((v - 0.375).abs() < 1e-12);
            }
        }
    }

    // For Haar, the rescaled approximation chain equals block means: scale
    // s is the mean over the corresponding 2^(s-1) square. That closed form
    // is the oracle here, checked on an impulse and on random content.
    fn block_mean_oracle(plane: &Plane, scale: usize) -> Plane {
        let b = 1usize << (scale - 1);
        Plane::from_fn(plane.width() / b, plane.height() / b, |x, y| {
            let mut acc = 0.0;
            for dy in 0..b {
                for dx in 0..b {
                    acc += plane.at(x * b + dx, y * b + dy);
                }
            }
            acc / (b * b) as f64
        })
    }

    #[test]
    fn matches_block_mean_oracle() {
        let mut rng = Rng::new(11);
        let mut plane = Plane::from_fn(32, 32, |_, _| rng.next_f64());
        plane.set(9, 13, 25.0); // impulse on top of noise
        let pyr = build_scale_pyramid(&plane, 4).unwrap();
        for scale in 1..=4 {
            let expect = block_mean_oracle(&plane, scale);
            let got = &pyr[scale - 1];
            assert!(got.same_geometry(&expect));
            for (a, b) in got.data().iter().zip(expect.data()) {
                assert!((a - b).abs() < 1e-12);
            }
            let rel = (got.energy() - expect.energy()).abs() / expect.energy();
            assert!(rel < 1e-12);
        }
    }

    #[test]
    fn rejects_tiny_planes() {
        let plane = Plane::constant(15, 64, 0.0);
        assert!(build_scale_pyramid(&plane, 4).is_err());
    }
}
