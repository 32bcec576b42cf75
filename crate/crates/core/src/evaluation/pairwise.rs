//! Cross-database pairwise-difference protocol: every intra-database
//! sequence pair, oriented so the subjective difference is nonnegative.

/// One oriented pair: MOS difference (>= 0 by construction) and the metric
/// difference taken in the same order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRecord {
    pub mos_diff: f64,
    pub metric_diff: f64,
}

/// All C(n,2) pairs of one database. Orientation: the higher-MOS sequence
/// comes first; exact MOS ties keep the higher index first so the rule is
/// deterministic and independent of the metric under test.
pub fn build_pairwise(mos: &[f64], metric: &[f64]) -> Vec<PairRecord> {
    assert_eq!(mos.len(), metric.len());
    let n = mos.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (hi, lo) = if mos[j] >= mos[i] { (j, i) } else { (i, j) };
            out.push(PairRecord {
                mos_diff: mos[hi] - mos[lo],
                metric_diff: metric[hi] - metric[lo],
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseAccuracy {
    /// Fraction of pairs the metric orders like the subjective scores
    /// (metric ties count as agreement).
    pub accuracy: f64,
    pub correct: u64,
    pub incorrect: u64,
    /// Pairs with an exactly zero metric difference, recorded separately so
    /// alternative tie rules can be recomputed.
    pub metric_ties: u64,
}

/// Classification agreement of one metric over an oriented pair set: a pair
/// is correct iff the metric difference is >= 0.
pub fn pairwise_accuracy(pairs: &[PairRecord]) -> PairwiseAccuracy {
    assert!(
        !pairs.is_empty(),
        "pairwise accuracy needs at least one pair"
    );
    let mut correct = 0u64;
    let mut ties = 0u64;
    for p in pairs {
        debug_assert!(p.mos_diff >= 0.0);
        if p.metric_diff >= 0.0 {
            correct += 1;
            if p.metric_diff == 0.0 {
                ties += 1;
            }
        }
    }
    let total = pairs.len() as u64;
    PairwiseAccuracy {
        accuracy: correct as f64 / total as f64,
        correct,
        incorrect: total - correct,
        metric_ties: ties,
    }
}

/// 2x2 correct/incorrect contingency table for two metrics over the same
/// pair set, ready for the exact test.
pub fn accuracy_counts(a: &PairwiseAccuracy, b: &PairwiseAccuracy) -> [[u64; 2]; 2] {
    [[a.correct, a.incorrect], [b.correct, b.incorrect]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_equal_to_mos_is_fully_correct() {
        let mos = [10.0, 40.0, 25.0, 90.0];
        let pairs = build_pairwise(&mos, &mos);
        assert_eq!(pairs.len(), 6);
        let acc = pairwise_accuracy(&pairs);
        assert_eq!(acc.accuracy, 1.0);
        assert_eq!(acc.incorrect, 0);
    }

    #[test]
    fn inverted_metric_is_fully_wrong_without_ties() {
        let mos = [10.0, 40.0, 25.0, 90.0];
        let metric: Vec<f64> = mos.iter().map(|v| -v).collect();
        let pairs = build_pairwise(&mos, &metric);
        let acc = pairwise_accuracy(&pairs);
        assert_eq!(acc.accuracy, 0.0);
    }

    #[test]
    fn mos_differences_are_nonnegative() {
        let mos = [3.0, 1.0, 2.0, 2.0];
        let metric = [0.1, 0.2, 0.3, 0.4];
        for p in build_pairwise(&mos, &metric) {
            assert!(p.mos_diff >= 0.0);
        }
    }

    #[test]
    fn pair_count_is_n_choose_2() {
        let mos: Vec<f64> = (0..17).map(|i| i as f64).collect();
        assert_eq!(build_pairwise(&mos, &mos).len(), 17 * 16 / 2);
    }

    #[test]
    fn counts_table_layout() {
        let a = PairwiseAccuracy {
            accuracy: 0.75,
            correct: 3,
            incorrect: 1,
            metric_ties: 0,
        };
        let b = PairwiseAccuracy {
            accuracy: 0.5,
            correct: 2,
            incorrect: 2,
            metric_ties: 1,
        };
        assert_eq!(accuracy_counts(&a, &b), [[3, 1], [2, 2]]);
    }
}
