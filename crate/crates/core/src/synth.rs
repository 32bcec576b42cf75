//! Procedural video fixtures: deterministic moving-texture sources, graded
//! degradations with a fixed monotone quality proxy, and manifest assembly.
//! Used by the test suites and for demo datasets; everything is a pure
//! function of the seed.

use std::path::Path;

use crate::error::Result;
use crate::manifest::{DatabaseManifest, SequenceRecord, SourceRecord, MANIFEST_SCHEMA_VERSION};
use crate::plane::Plane;
use crate::rng::Rng;
use crate::video::VideoSpec;

/// Drifting plaid texture: a few low-frequency components give motion
/// estimation something to lock onto, mid- and high-frequency components
/// carry the fine detail that compression-like degradations destroy.
pub fn render_source(seed: u64, width: usize, height: usize, frames: usize) -> Vec<[Plane; 3]> {
    let mut rng = Rng::new(seed.wrapping_mul(0x9E37_79B9).wrapping_add(1));
    struct Component {
        fx: f64,
        fy: f64,
        phase: f64,
        vx: f64,
        vy: f64,
        amp: f64,
    }
    let mut components = Vec::new();
    for _ in 0..3 {
        let angle = rng.range_f64(0.0, std::f64::consts::TAU);
        let freq = rng.range_f64(0.04, 0.16);
        components.push(Component {
            fx: freq * angle.cos(),
            fy: freq * angle.sin(),
            phase: rng.range_f64(0.0, std::f64::consts::TAU),
            vx: rng.range_f64(-1.2, 1.2),
            vy: rng.range_f64(-1.2, 1.2),
            amp: rng.range_f64(0.07, 0.11),
        });
    }
    for _ in 0..4 {
        let angle = rng.range_f64(0.0, std::f64::consts::TAU);
        let freq = rng.range_f64(0.3, 0.9);
        components.push(Component {
            fx: freq * angle.cos(),
            fy: freq * angle.sin(),
            phase: rng.range_f64(0.0, std::f64::consts::TAU),
            vx: rng.range_f64(-0.8, 0.8),
            vy: rng.range_f64(-0.8, 0.8),
            amp: rng.range_f64(0.035, 0.06),
        });
    }
    let grad_x = rng.range_f64(-0.1, 0.1);
    let grad_y = rng.range_f64(-0.1, 0.1);
    let cb_phase = rng.range_f64(0.0, std::f64::consts::TAU);
    let cr_phase = rng.range_f64(0.0, std::f64::consts::TAU);
    let chroma_freq = rng.range_f64(0.08, 0.25);

    (0..frames)
        .map(|t| {
            let t = t as f64;
            let y = Plane::from_fn(width, height, |x, yy| {
                let mut v = 0.5
                    + grad_x * (x as f64 / width as f64 - 0.5)
                    + grad_y * (yy as f64 / height as f64 - 0.5);
                for c in &components {
                    v += c.amp
                        * (c.fx * (x as f64 - c.vx * t) + c.fy * (yy as f64 - c.vy * t) + c.phase)
                            .sin();
                }
                v.clamp(0.02, 0.98)
            });
            let cb = Plane::from_fn(width / 2, height / 2, |x, yy| {
                0.5 + 0.12
                    * ((x as f64 * chroma_freq + t * 0.05 + cb_phase).sin()
                        * (yy as f64 * 0.6 * chroma_freq).cos())
            });
            let cr = Plane::from_fn(width / 2, height / 2, |x, yy| {
                0.5 - 0.1
                    * ((yy as f64 * 0.8 * chroma_freq - t * 0.04 + cr_phase).sin()
                        * (x as f64 * 0.5 * chroma_freq).cos())
            });
            [y, cb, cr]
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Degradation {
    /// Binomial smoothing passes.
    Blur(usize),
    /// Quantize intensities to this many levels.
    Banding(u32),
    /// Additive Gaussian noise of this standard deviation.
    Noise(f64),
    /// Downscale by num/den (bilinear) and back up.
    Resample(usize, usize),
}

/// Band-limited analytic texture with crossed oblique components, so even a
/// small window sees two-dimensional structure. Sampling it at shifted
/// coordinates produces exact global translations for motion tests.
pub fn band_texture(x: f64, y: f64) -> f64 {
    use std::f64::consts::TAU;
    let w1 = TAU / 28.0;
    let w2 = TAU / 34.0;
    let w3 = TAU / 40.0;
    let (a1, a2, a3) = (0.18f64, 1.32f64, 2.40f64);
    0.5 + 0.11 * (w1 * (x * a1.cos() + y * a1.sin()) + 0.7).sin()
        + 0.11 * (w2 * (x * a2.cos() + y * a2.sin()) + 2.1).sin()
        + 0.09 * (w3 * (x * a3.cos() + y * a3.sin()) + 4.0).sin()
}

/// Separable binomial smoothing applied `passes` times; a simple, strictly
/// graded blur ladder.
pub fn blur_plane(plane: &Plane, passes: usize) -> Plane {
    let mut out = plane.clone();
    for _ in 0..passes {
        let mut tmp = Plane::new(out.width(), out.height());
        for y in 0..out.height() {
            for x in 0..out.width() {
                let v = 0.25 * out.at_clamped(x as isize - 1, y as isize)
                    + 0.5 * out.at(x, y)
                    + 0.25 * out.at_clamped(x as isize + 1, y as isize);
                tmp.set(x, y, v);
            }
        }
        let mut ver = Plane::new(out.width(), out.height());
        for y in 0..out.height() {
            for x in 0..out.width() {
                let v = 0.25 * tmp.at_clamped(x as isize, y as isize - 1)
                    + 0.5 * tmp.at(x, y)
                    + 0.25 * tmp.at_clamped(x as isize, y as isize + 1);
                ver.set(x, y, v);
            }
        }
        out = ver;
    }
    out
}

/// Apply one degradation to every frame; noise is seeded so the output is
/// deterministic.
pub fn apply_degradation(
    frames: &[[Plane; 3]],
    degradation: Degradation,
    seed: u64,
) -> Vec<[Plane; 3]> {
    let mut rng = Rng::new(seed ^ 0xDEAD_BEEF_CAFE_F00D);
    frames
        .iter()
        .map(|planes| {
            let mut out = planes.clone();
            match degradation {
                Degradation::Blur(passes) => {
                    for p in &mut out {
                        *p = blur_plane(p, passes);
                    }
                }
                Degradation::Banding(levels) => {
                    let q = (levels - 1) as f64;
                    for p in &mut out {
                        *p = p.map(|v| (v * q).round() / q);
                    }
                }
                Degradation::Noise(sigma) => {
                    for p in &mut out {
                        *p = p.map(|v| (v + sigma * rng.next_gaussian()).clamp(0.0, 1.0));
                    }
                }
                Degradation::Resample(num, den) => {
                    for p in &mut out {
                        let dw = (p.width() * num / den).max(4);
                        let dh = (p.height() * num / den).max(4);
                        *p = p
                            .resize_bilinear(dw, dh)
                            .resize_bilinear(p.width(), p.height());
                    }
                }
            }
            out
        })
        .collect()
}

/// The graded degradation ladder: four artefact families with four
/// severities each, plus two near-transparent anchor rungs. The proxy
/// quality values are a fixed monotone function of severity, calibrated so
/// the families interleave like a plausible subjective study: at equal
/// signal fidelity, smoothing is forgiven a little, additive noise is
/// penalized, banding sits in between. Those family offsets are what make
/// single-feature metrics rank the ladder imperfectly.
pub fn degradation_grid() -> Vec<(String, Degradation, f64)> {
    let mut out = vec![
        // hidden reference: quantizing to the 8-bit storage grid leaves the
        // written file identical to the written source
        ("anchor".to_string(), Degradation::Banding(256), 100.0),
        ("mild_noise".to_string(), Degradation::Noise(0.004), 96.0),
        ("mild_band".to_string(), Degradation::Banding(64), 90.0),
    ];
    for (level, (blur, mos)) in [(1usize, 92.0), (2, 70.0), (3, 57.0), (5, 43.0)]
        .iter()
        .enumerate()
    {
        out.push((format!("blur{}", level + 1), Degradation::Blur(*blur), *mos));
    }
    for (level, (levels, mos)) in [(40u32, 70.0), (28, 58.0), (20, 45.0), (14, 32.0)]
        .iter()
        .enumerate()
    {
        out.push((
            format!("band{}", level + 1),
            Degradation::Banding(*levels),
            *mos,
        ));
    }
    for (level, (sigma, mos)) in [(0.006, 73.0), (0.011, 54.0), (0.02, 35.0), (0.035, 13.0)]
        .iter()
        .enumerate()
    {
        out.push((
            format!("noise{}", level + 1),
            Degradation::Noise(*sigma),
            *mos,
        ));
    }
    for (level, (num, den, mos)) in [
        (3usize, 4usize, 90.0),
        (1, 2, 67.0),
        (3, 8, 55.0),
        (1, 4, 32.0),
    ]
    .iter()
    .enumerate()
    {
        out.push((
            format!("resample{}", level + 1),
            Degradation::Resample(*num, *den),
            *mos,
        ));
    }
    out
}

/// Quantize normalized planes to the bit depth and write a headerless
/// planar file.
pub fn write_yuv(path: &Path, frames: &[[Plane; 3]], bit_depth: u8) -> Result<()> {
    let max_code = ((1u32 << bit_depth) - 1) as f64;
    let mut bytes = Vec::new();
    for planes in frames {
        for plane in planes {
            for &v in plane.data() {
                let code = (v * max_code).round().clamp(0.0, max_code);
                if bit_depth > 8 {
                    bytes.extend_from_slice(&(code as u16).to_le_bytes());
                } else {
                    bytes.push(code as u8);
                }
            }
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

pub struct SynthConfig {
    pub database_id: String,
    pub source_seeds: Vec<u64>,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub fps: f64,
}

/// Render sources, degrade them over the full grid, write everything under
/// `dir` and return the manifest (also written as `<database_id>.json`).
/// Raw MOS values are on a 1-5 scale so the 0-100 normalization path is
/// exercised; normalized scores equal the grid's proxy values.
pub fn build_database(dir: &Path, config: &SynthConfig) -> Result<DatabaseManifest> {
    std::fs::create_dir_all(dir)?;
    let grid = degradation_grid();
    let mut sources = Vec::new();
    let mut sequences = Vec::new();
    for &seed in &config.source_seeds {
        let source_id = format!("src{seed}");
        let frames = render_source(seed, config.width, config.height, config.frames);
        let ref_name = format!("{source_id}.yuv");
        write_yuv(&dir.join(&ref_name), &frames, 8)?;
        sources.push(SourceRecord {
            source_id: source_id.clone(),
            path: ref_name.into(),
            spec: VideoSpec::new(config.width, config.height, config.fps, 8, config.frames),
        });
        for (label, degradation, proxy_mos) in &grid {
            let degraded = apply_degradation(&frames, *degradation, seed);
            let seq_id = format!("{source_id}_{label}");
            let file = format!("{seq_id}.yuv");
            write_yuv(&dir.join(&file), &degraded, 8)?;
            sequences.push(SequenceRecord {
                sequence_id: seq_id,
                source_id: source_id.clone(),
                path: file.into(),
                resampled_from: None,
                mos: 1.0 + proxy_mos * 0.04, // raw 1-5 scale
            });
        }
    }
    let manifest = DatabaseManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        database_id: config.database_id.clone(),
        mos_min: 1.0,
        mos_max: 5.0,
        sources,
        sequences,
    };
    manifest.validate()?;
    manifest.save(dir.join(format!("{}.json", config.database_id)))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_deterministic() {
        let a = render_source(7, 32, 32, 3);
        let b = render_source(7, 32, 32, 3);
        assert_eq!(a[2][0], b[2][0]);
        // and content actually moves
        assert_ne!(a[0][0], a[1][0]);
    }

    #[test]
    fn yuv_write_round_trips_through_the_reader() {
        let dir = tempfile::tempdir().unwrap();
        let frames = render_source(3, 32, 32, 2);
        let path = dir.path().join("clip.yuv");
        write_yuv(&path, &frames, 8).unwrap();
        let spec = VideoSpec::new(32, 32, 30.0, 8, 2);
        let mut handle = crate::video::open_sequence(&path, spec).unwrap();
        let decoded = handle.read_frame(0).unwrap();
        // equal up to 8-bit quantization
        for (a, b) in decoded[0].data().iter().zip(frames[0][0].data()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-9);
        }
    }

    #[test]
    fn grid_is_monotone_within_each_family() {
        let grid = degradation_grid();
        for family in ["blur", "band", "noise", "resample"] {
            let moses: Vec<f64> = grid
                .iter()
                .filter(|(label, _, _)| label.starts_with(family))
                .map(|(_, _, m)| *m)
                .collect();
            assert_eq!(moses.len(), 4);
            for w in moses.windows(2) {
                assert!(w[1] < w[0], "{family} proxy not strictly decreasing");
            }
        }
    }

    #[test]
    fn degradations_change_the_signal() {
        let frames = render_source(11, 32, 32, 2);
        for (label, deg, _) in degradation_grid() {
            let out = apply_degradation(&frames, deg, 11);
            assert_ne!(out[0][0], frames[0][0], "{label} left the luma untouched");
        }
    }
}
