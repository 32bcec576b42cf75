//! Shared numerical kernels: wavelet transforms, scale pyramids and
//! Lucas-Kanade motion compensation.

mod dwt;
mod flow;
mod pyramid;

pub use dwt::{dwt2d, dwt2d_level, DwtLevel, WaveletFamily};
pub use flow::{displaced_frame, lucas_kanade_flow, FlowField};
pub use pyramid::build_scale_pyramid;
