//! Spearman rank-order correlation with tie-averaged ranks.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Srocc {
    pub value: f64,
    /// Set when either input is constant; the value is then defined as 0.
    pub degenerate: bool,
}

/// Fractional ranks (1-based); tied values share the average of the ranks
/// they span.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j share the average rank
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        None
    } else {
        Some(sxy / (sxx * syy).sqrt())
    }
}

/// Pearson correlation of the tie-averaged ranks of `x` and `y`.
pub fn srocc(x: &[f64], y: &[f64]) -> Result<Srocc> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "rank correlation needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput(
            "rank correlation needs at least 2 samples".into(),
        ));
    }
    if let Some(bad) = x.iter().chain(y).find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite sample {bad}")));
    }
    let rx = fractional_ranks(x);
    let ry = fractional_ranks(y);
    match pearson(&rx, &ry) {
        Some(value) => Ok(Srocc {
            value,
            degenerate: false,
        }),
        None => Ok(Srocc {
            value: 0.0,
            degenerate: true,
        }),
    }
}
