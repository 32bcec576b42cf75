//! Shared fixtures for the kernel benchmarks.

use vqfuse_core::plane::Plane;
use vqfuse_core::rng::Rng;
use vqfuse_core::synth::band_texture;

pub fn textured_plane(width: usize, height: usize, phase: f64) -> Plane {
    Plane::from_fn(width, height, |x, y| {
        band_texture(x as f64 + phase, y as f64 + 0.3 * phase)
    })
}

pub fn noisy_plane(width: usize, height: usize, seed: u64) -> Plane {
    let mut rng = Rng::new(seed);
    Plane::from_fn(width, height, |_, _| rng.next_f64())
}
