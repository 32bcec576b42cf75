//! Two-sided variance-ratio test on logistic-fit residuals.

use super::special::f_cdf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FTest {
    /// +1: first residual set has significantly smaller variance, -1 the
    /// opposite, 0 no significant difference.
    pub verdict: i8,
    /// Too few samples to test; verdict forced to 0.
    pub insufficient: bool,
    pub f_ratio: f64,
}

/// Compare residual variances of two metrics fitted on the same database.
/// Degrees of freedom are n-4 per side (four-parameter fits). Two-sided at
/// the given confidence (0.95 in the standard protocol).
pub fn f_test_residuals(res_a: &[f64], res_b: &[f64], confidence: f64) -> FTest {
    assert_eq!(
        res_a.len(),
        res_b.len(),
        "residual vectors must come from the same database"
    );
    let n = res_a.len();
    if n < 5 {
        return FTest {
            verdict: 0,
            insufficient: true,
            f_ratio: f64::NAN,
        };
    }
    let df = (n - 4) as f64;
    let var = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>() / df;
    let va = var(res_a);
    let vb = var(res_b);
    if va <= 0.0 && vb <= 0.0 {
        return FTest {
            verdict: 0,
            insufficient: false,
            f_ratio: 1.0,
        };
    }
    if vb <= 0.0 {
        return FTest {
            verdict: -1,
            insufficient: false,
            f_ratio: f64::INFINITY,
        };
    }
    if va <= 0.0 {
        return FTest {
            verdict: 1,
            insufficient: false,
            f_ratio: 0.0,
        };
    }
    let f = va / vb;
    let p_low = f_cdf(f, df, df);
    let tail = (1.0 - confidence) / 2.0;
    let verdict = if p_low < tail {
        1 // variance of A significantly smaller
    } else if p_low > 1.0 - tail {
        -1
    } else {
        0
    };
    FTest {
        verdict,
        insufficient: false,
        f_ratio: f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn equal_residuals_are_indistinguishable() {
        let r: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let t = f_test_residuals(&r, &r, 0.95);
        assert_eq!(t.verdict, 0);
        assert_eq!(t.f_ratio, 1.0);
    }

    #[test]
    fn hundredfold_smaller_variance_wins() {
        let mut rng = Rng::new(2);
        let base: Vec<f64> = (0..50).map(|_| rng.next_gaussian()).collect();
        let small: Vec<f64> = base.iter().map(|v| 0.01 * v).collect();
        // F = 1e-4 with 46/46 df sits far below the 2.5% quantile
        // (published tables give F_{0.025}(46,46) ~ 0.55)
        let t = f_test_residuals(&small, &base, 0.95);
        assert_eq!(t.verdict, 1);
        assert!((t.f_ratio - 1e-4).abs() < 1e-9);
    }

    #[test]
    fn antisymmetric_verdicts() {
        let mut rng = Rng::new(5);
        for scale in [1.0, 0.8, 0.5, 0.2, 0.05] {
            let a: Vec<f64> = (0..40).map(|_| rng.next_gaussian()).collect();
            let b: Vec<f64> = (0..40).map(|_| rng.next_gaussian() * scale).collect();
            let ab = f_test_residuals(&a, &b, 0.95);
            let ba = f_test_residuals(&b, &a, 0.95);
            assert_eq!(ab.verdict, -ba.verdict, "scale {scale}");
        }
    }

    #[test]
    fn short_vectors_are_flagged() {
        let t = f_test_residuals(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0], 0.95);
        assert!(t.insufficient);
        assert_eq!(t.verdict, 0);
    }
}
