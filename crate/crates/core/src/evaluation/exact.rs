//! Fisher's exact test for 2x2 contingency tables, two-sided, computed with
//! log-gamma arithmetic so counts in the hundreds of thousands are fine.

use super::special::ln_choose;

/// Two-sided exact hypergeometric p-value. Any zero margin makes every
/// table with those margins identical, so p = 1.
pub fn fisher_exact(table: [[u64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = table;
    let r1 = a + b;
    let r2 = c + d;
    let c1 = a + c;
    let c2 = b + d;
    let n = r1 + r2;
    if r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0 {
        return 1.0;
    }

    // support of the first cell given the margins
    let a_min = c1.saturating_sub(r2);
    let a_max = c1.min(r1);
    let ln_denom = ln_choose(n, c1);
    let ln_prob = |x: u64| ln_choose(r1, x) + ln_choose(r2, c1 - x) - ln_denom;

    let ln_observed = ln_prob(a);
    // R's convention: sum every table no more probable than the observed
    // one, with a tiny relative slack for floating-point equality
    let cutoff = ln_observed + 1e-7;
    let mut p = 0.0;
    for x in a_min..=a_max {
        let lp = ln_prob(x);
        if lp <= cutoff {
            p += lp.exp();
        }
    }
    p.min(1.0)
}
