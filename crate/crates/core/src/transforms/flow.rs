//! Dense single-level Lucas-Kanade flow and motion-compensated warping.
//!
//! The estimator solves one linearized system per pixel over a 7x7 window;
//! there is no pyramid and no iterative re-warping, so it is only accurate
//! for small displacements on smooth content, which is all the dynamic
//! texture feature needs. Windows whose structure tensor is close to
//! singular produce zero flow.

use crate::plane::Plane;

/// Per-pixel displacement of content from the previous frame to the current
/// one, in pixels.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub u: Plane,
    pub v: Plane,
}

const WINDOW_RADIUS: usize = 3; // 7x7
/// Smallest structure-tensor eigenvalue (averaged per window sample, in
/// normalized intensity units) below which a window is declared singular.
const EIGENVALUE_THRESHOLD: f64 = 1e-6;

/// Sliding-window sum with windows truncated at the plane borders,
/// separable in x then y.
fn window_sum(src: &Plane, radius: usize) -> Plane {
    let w = src.width();
    let h = src.height();
    let mut horiz = Plane::new(w, h);
    for y in 0..h {
        let row = src.row(y);
        let mut acc: f64 = row.iter().take(radius + 1).sum();
        horiz.set(0, y, acc);
        for x in 1..w {
            if x + radius < w {
                acc += row[x + radius];
            }
            if x > radius {
                acc -= row[x - radius - 1];
            }
            horiz.set(x, y, acc);
        }
    }
    let mut out = Plane::new(w, h);
    for x in 0..w {
        let mut acc = 0.0;
        for y in 0..=radius.min(h - 1) {
            acc += horiz.at(x, y);
        }
        out.set(x, 0, acc);
        for y in 1..h {
            if y + radius < h {
                acc += horiz.at(x, y + radius);
            }
            if y > radius {
                acc -= horiz.at(x, y - radius - 1);
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Count of in-bounds samples of a truncated window centered at each pixel.
fn window_count(w: usize, h: usize, radius: usize) -> Plane {
    let ones = Plane::constant(w, h, 1.0);
    window_sum(&ones, radius)
}

pub fn lucas_kanade_flow(prev: &Plane, curr: &Plane) -> FlowField {
    assert!(prev.same_geometry(curr), "flow inputs must share geometry");
    let w = prev.width();
    let h = prev.height();

    // Spatial gradients averaged over both frames, temporal difference.
    let mut ix = Plane::new(w, h);
    let mut iy = Plane::new(w, h);
    let mut it = Plane::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let xi = x as isize;
            let yi = y as isize;
            let gx = (prev.at_clamped(xi + 1, yi) - prev.at_clamped(xi - 1, yi)
                + curr.at_clamped(xi + 1, yi)
                - curr.at_clamped(xi - 1, yi))
                / 4.0;
            let gy = (prev.at_clamped(xi, yi + 1) - prev.at_clamped(xi, yi - 1)
                + curr.at_clamped(xi, yi + 1)
                - curr.at_clamped(xi, yi - 1))
                / 4.0;
            ix.set(x, y, gx);
            iy.set(x, y, gy);
            it.set(x, y, curr.at(x, y) - prev.at(x, y));
        }
    }

    let sxx = window_sum(&ix.zip_map(&ix, |a, b| a * b), WINDOW_RADIUS);
    let sxy = window_sum(&ix.zip_map(&iy, |a, b| a * b), WINDOW_RADIUS);
    let syy = window_sum(&iy.zip_map(&iy, |a, b| a * b), WINDOW_RADIUS);
    let sxt = window_sum(&ix.zip_map(&it, |a, b| a * b), WINDOW_RADIUS);
    let syt = window_sum(&iy.zip_map(&it, |a, b| a * b), WINDOW_RADIUS);
    let counts = window_count(w, h, WINDOW_RADIUS);

    let mut u = Plane::new(w, h);
    let mut v = Plane::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let a = sxx.at(x, y);
            let b = sxy.at(x, y);
            let c = syy.at(x, y);
            let n = counts.at(x, y);
            let trace = a + c;
            let det = a * c - b * b;
            let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
            let lambda_min = 0.5 * (trace - disc);
            if lambda_min < EIGENVALUE_THRESHOLD * n {
                continue; // singular window: flow stays zero
            }
            let bx = sxt.at(x, y);
            let by = syt.at(x, y);
            // d = -G^{-1} b; d is the content displacement prev -> curr
            u.set(x, y, (-c * bx + b * by) / det);
            v.set(x, y, (b * bx - a * by) / det);
        }
    }
    FlowField { u, v }
}

/// Warp `prev` by the flow field: output(x, y) = prev(x - u, y - v),
/// bilinear, with out-of-bounds samples clamped to the border. With the
/// estimator above, the result approximates the current frame.
pub fn displaced_frame(prev: &Plane, flow: &FlowField) -> Plane {
    assert!(
        prev.same_geometry(&flow.u) && prev.same_geometry(&flow.v),
        "flow geometry must match the frame"
    );
    Plane::from_fn(prev.width(), prev.height(), |x, y| {
        let sx = x as f64 - flow.u.at(x, y);
        let sy = y as f64 - flow.v.at(x, y);
        prev.sample_bilinear(sx, sy)
    })
}

impl FlowField {
    pub fn zero(width: usize, height: usize) -> Self {
        Self {
            u: Plane::new(width, height),
            v: Plane::new(width, height),
        }
    }

    /// Resample the field to another geometry, scaling displacement
    /// magnitudes to the destination pixel grid.
    pub fn resize(&self, dw: usize, dh: usize) -> FlowField {
        let fx = dw as f64 / self.u.width() as f64;
        let fy = dh as f64 / self.u.height() as f64;
        FlowField {
            u: self.u.resize_bilinear(dw, dh).map(|d| d * fx),
            v: self.v.resize_bilinear(dw, dh).map(|d| d * fy),
        }
    }
}
