//! Four-parameter logistic regression of subjective scores onto a metric,
//! with a linear fallback for degenerate inputs.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum FitKind {
    /// b1 / (1 + exp(-b2 (m - b3))) + b4
    Logistic([f64; 4]),
    Linear {
        slope: f64,
        intercept: f64,
    },
}

#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub kind: FitKind,
    /// True when the linear fit was used (non-convergence or lower SSE).
    pub fallback_linear: bool,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl LogisticFit {
    pub fn predict(&self, metric: f64) -> f64 {
        match self.kind {
            FitKind::Logistic([b1, b2, b3, b4]) => b1 / (1.0 + (-b2 * (metric - b3)).exp()) + b4,
            FitKind::Linear { slope, intercept } => slope * metric + intercept,
        }
    }

    pub fn rss(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn linear_fit(metric: &[f64], mos: &[f64]) -> (f64, f64) {
    let mx = mean(metric);
    let my = mean(mos);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in metric.iter().zip(mos) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        (0.0, my)
    } else {
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    }
}

/// Solve a 4x4 system in place with partial pivoting; returns None when the
/// matrix is numerically singular.
#[allow(clippy::needless_range_loop)] // rows of `a` alias during elimination
fn solve4(a: &mut [[f64; 4]; 4], b: &mut [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

fn logistic_sse(metric: &[f64], mos: &[f64], b: &[f64; 4]) -> f64 {
    metric
        .iter()
        .zip(mos)
        .map(|(&m, &y)| {
            let f = b[0] / (1.0 + (-b[1] * (m - b[2])).exp()) + b[3];
            (y - f) * (y - f)
        })
        .sum()
}

/// Damped least squares on the 4-parameter logistic with the customary
/// initialization: b1 = range(MOS), b2 = 1/std(metric), b3 = median(metric),
/// b4 = min(MOS). Returns None when the data admit no stable fit.
fn levenberg_marquardt(metric: &[f64], mos: &[f64]) -> Option<[f64; 4]> {
    let n = metric.len();
    let min_mos = mos.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_mos = mos.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let std_metric = {
        let m = mean(metric);
        (metric.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / n as f64).sqrt()
    };
    if std_metric < 1e-12 {
        return None;
    }
    let mut b = [max_mos - min_mos, 1.0 / std_metric, median(metric), min_mos];
    if b[0] < 1e-9 {
        b[0] = 1.0;
    }
    let mut lambda = 1e-3;
    let mut sse = logistic_sse(metric, mos, &b);

    for _ in 0..400 {
        // accumulate J^T J and J^T r
        let mut jtj = [[0.0; 4]; 4];
        let mut jtr = [0.0; 4];
        for (&m, &y) in metric.iter().zip(mos) {
            let e = (-b[1] * (m - b[2])).exp();
            let s = 1.0 / (1.0 + e);
            let f = b[0] * s + b[3];
            let r = y - f;
            let ds = s * (1.0 - s);
            let j = [s, b[0] * ds * (m - b[2]), -b[0] * ds * b[1], 1.0];
            for p in 0..4 {
                for q in 0..4 {
                    jtj[p][q] += j[p] * j[q];
                }
                jtr[p] += j[p] * r;
            }
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj;
            for (p, row) in a.iter_mut().enumerate() {
                row[p] += lambda * jtj[p][p].max(1e-12);
            }
            let mut rhs = jtr;
            let step = solve4(&mut a, &mut rhs)?;
            let candidate = [
                b[0] + step[0],
                b[1] + step[1],
                b[2] + step[2],
                b[3] + step[3],
            ];
            let candidate_sse = logistic_sse(metric, mos, &candidate);
            if candidate_sse.is_finite() && candidate_sse < sse {
                let rel = (sse - candidate_sse) / sse.max(1e-30);
                b = candidate;
                sse = candidate_sse;
                lambda = (lambda * 0.5).max(1e-12);
                improved = true;
                if rel < 1e-14 || sse < 1e-24 {
                    return Some(b);
                }
                break;
            }
            lambda *= 4.0;
            if lambda > 1e12 {
                return Some(b); // stalled; current point is the answer
            }
        }
        if !improved {
            break;
        }
    }
    Some(b)
}

/// Fit MOS as a function of the metric. The logistic model is preferred;
/// the linear fit takes over (with `fallback_linear` set) when the
/// optimizer fails or the straight line explains the data at least as well.
pub fn fit_logistic(metric: &[f64], mos: &[f64]) -> Result<LogisticFit> {
    if metric.len() != mos.len() {
        return Err(Error::InvalidInput("metric/MOS length mismatch".into()));
    }
    if metric.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "logistic fit needs at least 5 points, got {}",
            metric.len()
        )));
    }
    if metric.iter().chain(mos).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "non-finite sample in logistic fit".into(),
        ));
    }

    let (slope, intercept) = linear_fit(metric, mos);
    let linear_sse: f64 = metric
        .iter()
        .zip(mos)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();

    let logistic = levenberg_marquardt(metric, mos);
    let (kind, fallback) = match logistic {
        Some(b) if logistic_sse(metric, mos, &b) < linear_sse => (FitKind::Logistic(b), false),
        _ => (FitKind::Linear { slope, intercept }, true),
    };

    let fit = LogisticFit {
        kind,
        fallback_linear: fallback,
        fitted: Vec::new(),
        residuals: Vec::new(),
    };
    let fitted: Vec<f64> = metric.iter().map(|&m| fit.predict(m)).collect();
    let residuals: Vec<f64> = mos.iter().zip(&fitted).map(|(&y, &f)| y - f).collect();
    Ok(LogisticFit {
        fitted,
        residuals,
        ..fit
    })
}
