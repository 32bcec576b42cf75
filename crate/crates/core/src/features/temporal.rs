//! Temporal features: plain frame difference and the motion-compensated
//! residual that backs the temporal-perception feature.

use crate::plane::Plane;
use crate::transforms::{displaced_frame, FlowField};

/// Mean absolute difference between consecutive frames of one sequence.
pub fn compute_ti(curr: &Plane, prev: &Plane) -> f64 {
    assert!(curr.same_geometry(prev));
    let n = curr.data().len() as f64;
    curr.data()
        .iter()
        .zip(prev.data())
        .map(|(&c, &p)| (c - p).abs())
        .sum::<f64>()
        / n
}

/// Absolute residual left after warping the previous frame onto the current
/// one: |curr - prev_warped|.
pub fn motion_compensated_residual(prev: &Plane, curr: &Plane, flow: &FlowField) -> Plane {
    let warped = displaced_frame(prev, flow);
    curr.zip_map(&warped, |c, w| (c - w).abs())
}
