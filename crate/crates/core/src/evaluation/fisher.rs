//! Fisher-z aggregation of correlation coefficients across databases.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherAggregate {
    pub value: f64,
    /// How many inputs sat at |r| >= 1 and were clamped to ±0.999999.
    pub clamped: usize,
}

/// z-transform each coefficient, average, transform back.
pub fn fisher_aggregate(coefficients: &[f64]) -> Result<FisherAggregate> {
    if coefficients.is_empty() {
        return Err(Error::InvalidInput(
            "cannot aggregate an empty coefficient list".into(),
        ));
    }
    let mut clamped = 0;
    let mut sum_z = 0.0;
    for &r in coefficients {
        if !r.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite correlation {r}")));
        }
        let r = if r.abs() >= 1.0 {
            clamped += 1;
            0.999999_f64.copysign(r)
        } else {
            r
        };
        sum_z += r.atanh();
    }
    let value = (sum_z / coefficients.len() as f64).tanh();
    Ok(FisherAggregate { value, clamped })
}
