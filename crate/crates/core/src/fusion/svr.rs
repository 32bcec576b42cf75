//! nu-SVR with an RBF kernel, trained by sequential minimal optimization.
//!
//! The regression problem over l rows is solved as the standard dual over
//! 2l variables (one pair of boxed multipliers per row) with per-sign
//! equality constraints, second-order working-set selection restricted to
//! same-sign pairs, and the usual split intercept estimate. Everything is
//! deterministic for a fixed row order: ties in the selection take the
//! later index, exactly like the reference solver lineage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureKey, FeatureVector};

use super::normalize::Normalizer;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SvrHyper {
    /// Upper bound on the margin-error fraction / lower bound on the
    /// support-vector fraction.
    pub nu: f64,
    /// Box constraint.
    pub c: f64,
    /// RBF width; `None` means 1/(number of features).
    pub gamma: Option<f64>,
}

impl Default for SvrHyper {
    fn default() -> Self {
        Self {
            nu: 0.9,
            c: 4.0,
            gamma: None,
        }
    }
}

impl SvrHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "nu must be in (0,1], got {}",
                self.nu
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "gamma must be positive, got {g}"
                )));
            }
        }
        Ok(())
    }
}

/// A trained regressor: support rows in normalized feature space, their
/// signed coefficients and the intercept.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvrModel {
    pub feature_keys: Vec<FeatureKey>,
    pub normalizer: Normalizer,
    pub nu: f64,
    pub c: f64,
    pub gamma: f64,
    pub support_vectors: Vec<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let mut dist = 0.0;
    for (&x, &z) in a.iter().zip(b) {
        let d = x - z;
        dist += d * d;
    }
    (-gamma * dist).exp()
}

const SOLVER_EPS: f64 = 1e-6;
const TAU: f64 = 1e-12;
const MAX_ITER: usize = 2_000_000;

/// Dual solver state over 2l variables; index i < l carries sign +1 and
/// maps to row i, index i + l carries sign -1 and maps to the same row.
struct NuSolver<'a> {
    l: usize,
    kernel: &'a [f64], // l x l Gram matrix
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
}

impl<'a> NuSolver<'a> {
    #[inline]
    fn sign(&self, i: usize) -> f64 {
        if i < self.l {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    fn q(&self, i: usize, j: usize) -> f64 {
        self.sign(i) * self.sign(j) * self.kernel[(i % self.l) * self.l + (j % self.l)]
    }

    #[inline]
    fn is_upper(&self, i: usize) -> bool {
        self.alpha[i] >= self.c
    }

    #[inline]
    fn is_lower(&self, i: usize) -> bool {
        self.alpha[i] <= 0.0
    }

    /// Second-order working-set selection within each sign class. Returns
    /// None when the maximal violation is below tolerance.
    fn select(&self) -> Option<(usize, usize)> {
        let n = 2 * self.l;
        let mut gmax_p = f64::NEG_INFINITY;
        let mut gmax_p_idx = None;
        let mut gmax_n = f64::NEG_INFINITY;
        let mut gmax_n_idx = None;
        for t in 0..n {
            if t < self.l {
                if !self.is_upper(t) && -self.grad[t] >= gmax_p {
                    gmax_p = -self.grad[t];
                    gmax_p_idx = Some(t);
                }
            } else if !self.is_lower(t) && self.grad[t] >= gmax_n {
                gmax_n = self.grad[t];
                gmax_n_idx = Some(t);
            }
        }

        let mut gmax_p2 = f64::NEG_INFINITY;
        let mut gmax_n2 = f64::NEG_INFINITY;
        let mut best = None;
        let mut obj_min = f64::INFINITY;
        for j in 0..n {
            if j < self.l {
                if self.is_lower(j) {
                    continue;
                }
                if self.grad[j] >= gmax_p2 {
                    gmax_p2 = self.grad[j];
                }
                if let Some(ip) = gmax_p_idx {
                    let grad_diff = gmax_p + self.grad[j];
                    if grad_diff > 0.0 {
                        let quad = (self.q(ip, ip) + self.q(j, j) - 2.0 * self.q(ip, j)).max(TAU);
                        let obj = -(grad_diff * grad_diff) / quad;
                        if obj <= obj_min {
                            obj_min = obj;
                            best = Some((ip, j));
                        }
                    }
                }
            } else {
                if self.is_upper(j) {
                    continue;
                }
                if -self.grad[j] >= gmax_n2 {
                    gmax_n2 = -self.grad[j];
                }
                if let Some(inn) = gmax_n_idx {
                    let grad_diff = gmax_n - self.grad[j];
                    if grad_diff > 0.0 {
                        let quad =
                            (self.q(inn, inn) + self.q(j, j) - 2.0 * self.q(inn, j)).max(TAU);
                        let obj = -(grad_diff * grad_diff) / quad;
                        if obj <= obj_min {
                            obj_min = obj;
                            best = Some((inn, j));
                        }
                    }
                }
            }
        }

        if (gmax_p + gmax_p2).max(gmax_n + gmax_n2) < SOLVER_EPS {
            return None;
        }
        best
    }

    /// Minimize over the chosen same-sign pair, keeping the pair sum fixed
    /// and both variables inside the box.
    fn update(&mut self, i: usize, j: usize) {
        let quad = (self.q(i, i) + self.q(j, j) - 2.0 * self.q(i, j)).max(TAU);
        let delta = (self.grad[i] - self.grad[j]) / quad;
        let sum = self.alpha[i] + self.alpha[j];
        let old_i = self.alpha[i];
        let old_j = self.alpha[j];
        self.alpha[i] -= delta;
        self.alpha[j] += delta;

        if sum > self.c {
            if self.alpha[i] > self.c {
                self.alpha[i] = self.c;
                self.alpha[j] = sum - self.c;
            }
        } else if self.alpha[j] < 0.0 {
            self.alpha[j] = 0.0;
            self.alpha[i] = sum;
        }
        if sum > self.c {
            if self.alpha[j] > self.c {
                self.alpha[j] = self.c;
                self.alpha[i] = sum - self.c;
            }
        } else if self.alpha[i] < 0.0 {
            self.alpha[i] = 0.0;
            self.alpha[j] = sum;
        }

        let di = self.alpha[i] - old_i;
        let dj = self.alpha[j] - old_j;
        for t in 0..2 * self.l {
            self.grad[t] += self.q(t, i) * di + self.q(t, j) * dj;
        }
    }

    /// Split intercept: average the gradient over the free variables of
    /// each sign class (or bracket it when a class has none).
    fn rho(&self) -> f64 {
        let mut r = [0.0; 2];
        for (cls, r_out) in r.iter_mut().enumerate() {
            let range = if cls == 0 {
                0..self.l
            } else {
                self.l..2 * self.l
            };
            let mut ub = f64::INFINITY;
            let mut lb = f64::NEG_INFINITY;
            let mut free_sum = 0.0;
            let mut free_count = 0usize;
            for i in range {
                if self.is_upper(i) {
                    lb = lb.max(self.grad[i]);
                } else if self.is_lower(i) {
                    ub = ub.min(self.grad[i]);
                } else {
                    free_sum += self.grad[i];
                    free_count += 1;
                }
            }
            *r_out = if free_count > 0 {
                free_sum / free_count as f64
            } else {
                (ub + lb) / 2.0
            };
        }
        (r[0] - r[1]) / 2.0
    }
}

/// Solve the dual; returns the signed row coefficients and the intercept.
fn solve(kernel: &[f64], targets: &[f64], hyper: &SvrHyper) -> Result<(Vec<f64>, f64)> {
    let l = targets.len();
    let c = hyper.c;
    let mut alpha = vec![0.0; 2 * l];
    let mut budget = c * hyper.nu * l as f64 / 2.0;
    for i in 0..l {
        let a = budget.min(c);
        alpha[i] = a;
        alpha[i + l] = a;
        budget -= a;
    }
    // linear term: -y for the + class, +y for the - class
    let p: Vec<f64> = (0..2 * l)
        .map(|i| if i < l { -targets[i] } else { targets[i - l] })
        .collect();

    let mut solver = NuSolver {
        l,
        kernel,
        c,
        alpha,
        grad: p.clone(),
    };
    for t in 0..2 * l {
        let mut acc = solver.grad[t];
        for j in 0..2 * l {
            if solver.alpha[j] != 0.0 {
                acc += solver.q(t, j) * solver.alpha[j];
            }
        }
        solver.grad[t] = acc;
    }

    let mut converged = false;
    for _ in 0..MAX_ITER {
        match solver.select() {
            Some((i, j)) => solver.update(i, j),
            None => {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::Training { cap: MAX_ITER });
    }
    let rho = solver.rho();
    let coeffs: Vec<f64> = (0..l)
        .map(|i| solver.alpha[i] - solver.alpha[i + l])
        .collect();
    Ok((coeffs, -rho))
}

/// Fit on normalized feature rows (the caller applies the normalizer).
pub(crate) fn train_on_rows(
    rows: &[Vec<f64>],
    targets: &[f64],
    keys: &[FeatureKey],
    normalizer: Normalizer,
    hyper: &SvrHyper,
) -> Result<SvrModel> {
    hyper.validate()?;
    let l = rows.len();
    if l < 8 {
        return Err(Error::InvalidInput(format!(
            "SVR training needs at least 8 rows, got {l}"
        )));
    }
    let gamma = hyper.gamma.unwrap_or(1.0 / keys.len() as f64);
    let mut kernel = vec![0.0; l * l];
    for i in 0..l {
        for j in 0..=i {
            let k = rbf(gamma, &rows[i], &rows[j]);
            kernel[i * l + j] = k;
            kernel[j * l + i] = k;
        }
    }
    let (coeffs, bias) = solve(&kernel, targets, hyper)?;
    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for (row, &coef) in rows.iter().zip(&coeffs) {
        if coef != 0.0 {
            support_vectors.push(row.clone());
            coefficients.push(coef);
        }
    }
    Ok(SvrModel {
        feature_keys: keys.to_vec(),
        normalizer,
        nu: hyper.nu,
        c: hyper.c,
        gamma,
        support_vectors,
        coefficients,
        bias,
    })
}

impl SvrModel {
    /// Kernel expansion on a normalized row, clipped to the score scale.
    pub fn predict_normalized(&self, row: &[f64]) -> f64 {
        let mut acc = self.bias;
        for (sv, &coef) in self.support_vectors.iter().zip(&self.coefficients) {
            acc += coef * rbf(self.gamma, sv, row);
        }
        acc.clamp(0.0, 100.0)
    }

    /// Normalize the named features of `vector` and predict.
    pub fn predict(&self, vector: &FeatureVector) -> Result<f64> {
        let row = self.normalized_row(vector)?;
        Ok(self.predict_normalized(&row))
    }

    pub fn normalized_row(&self, vector: &FeatureVector) -> Result<Vec<f64>> {
        self.feature_keys
            .iter()
            .map(|&key| {
                let raw = vector.get(key).ok_or(Error::MissingFeature(key))?;
                self.normalizer.apply(key, raw)
            })
            .collect()
    }
}
