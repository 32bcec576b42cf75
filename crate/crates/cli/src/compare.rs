//! `vqfuse compare-pairs`: pairwise classification accuracy of two metrics
//! from their pair dumps, with an exact significance test.

use std::path::Path;

use anyhow::{ensure, Result};
use vqfuse_core::evaluation::{accuracy_counts, fisher_exact, pairwise_accuracy};

use crate::evaluate::read_pairs;

pub fn run(pairs_a: &Path, pairs_b: &Path, label_a: &str, label_b: &str) -> Result<()> {
    let a = read_pairs(pairs_a)?;
    let b = read_pairs(pairs_b)?;
    ensure!(
        a.len() == b.len(),
        "pair dumps differ in length ({} vs {}); they must come from the same manifests",
        a.len(),
        b.len()
    );
    for (i, (pa, pb)) in a.iter().zip(&b).enumerate() {
        ensure!(
            (pa.mos_diff - pb.mos_diff).abs() < 1e-9,
            "pair {i}: subjective differences disagree ({} vs {})",
            pa.mos_diff,
            pb.mos_diff
        );
    }
    let acc_a = pairwise_accuracy(&a);
    let acc_b = pairwise_accuracy(&b);
    let counts = accuracy_counts(&acc_a, &acc_b);
    let p = fisher_exact(counts);
    println!("pairs: {}", a.len());
    println!(
        "{label_a}: accuracy {:.4} ({} correct, {} incorrect, {} ties)",
        acc_a.accuracy, acc_a.correct, acc_a.incorrect, acc_a.metric_ties
    );
    println!(
        "{label_b}: accuracy {:.4} ({} correct, {} incorrect, {} ties)",
        acc_b.accuracy, acc_b.correct, acc_b.incorrect, acc_b.metric_ties
    );
    println!("counts table: {counts:?}");
    println!("two-sided exact test p = {p:e}");
    Ok(())
}
