//! Reference-side content features: spatial information and colorfulness.

use crate::plane::Plane;

/// Standard deviation of the Sobel gradient magnitude over the plane
/// interior (the one-pixel border is excluded).
pub fn spatial_information(plane: &Plane) -> f64 {
    let w = plane.width();
    let h = plane.height();
    if w < 3 || h < 3 {
        return 0.0;
    }
    let mut mags = Vec::with_capacity((w - 2) * (h - 2));
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let p = |dx: isize, dy: isize| {
                plane.at((x as isize + dx) as usize, (y as isize + dy) as usize)
            };
            let gx = -p(-1, -1) + p(1, -1) - 2.0 * p(-1, 0) + 2.0 * p(1, 0) - p(-1, 1) + p(1, 1);
            let gy = -p(-1, -1) - 2.0 * p(0, -1) - p(1, -1) + p(-1, 1) + 2.0 * p(0, 1) + p(1, 1);
            mags.push((gx * gx + gy * gy).sqrt());
        }
    }
    let n = mags.len() as f64;
    let mean = mags.iter().sum::<f64>() / n;
    (mags.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / n).sqrt()
}

/// Colorfulness from the two chroma planes, centered at the neutral value
/// 0.5: spread of the opponent components plus a weighted distance of their
/// mean from neutral. A pure gray frame scores exactly 0.
pub fn colorfulness(cb: &Plane, cr: &Plane) -> f64 {
    assert!(cb.same_geometry(cr));
    let n = cb.data().len() as f64;
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut sum_a2 = 0.0;
    let mut sum_b2 = 0.0;
    for (&pb, &pr) in cb.data().iter().zip(cr.data()) {
        let a = pb - 0.5;
        let b = pr - 0.5;
        sum_a += a;
        sum_b += b;
        sum_a2 += a * a;
        sum_b2 += b * b;
    }
    let mu_a = sum_a / n;
    let mu_b = sum_b / n;
    let var_a = (sum_a2 / n - mu_a * mu_a).max(0.0);
    let var_b = (sum_b2 / n - mu_b * mu_b).max(0.0);
    (var_a + var_b).sqrt() + 0.3 * (mu_a * mu_a + mu_b * mu_b).sqrt()
}
