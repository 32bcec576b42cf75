//! Report assembly: one row per metric, one column per database, with
//! significance verdicts against an anchor metric and the Fisher-aggregated
//! overall correlation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::fisher::fisher_aggregate;
use super::ftest::f_test_residuals;
use super::logistic::fit_logistic;
use super::srocc::srocc;

/// Aligned metric scores and subjective scores for one database.
#[derive(Debug, Clone)]
pub struct MetricSeries {
    pub database_id: String,
    pub scores: Vec<f64>,
    pub mos: Vec<f64>,
}

impl MetricSeries {
    pub fn new(database_id: impl Into<String>, scores: Vec<f64>, mos: Vec<f64>) -> Result<Self> {
        if scores.len() != mos.len() {
            return Err(Error::InvalidInput("score/MOS length mismatch".into()));
        }
        if scores.len() < 4 {
            return Err(Error::InvalidInput(format!(
                "a database needs at least 4 scored sequences, got {}",
                scores.len()
            )));
        }
        if scores.iter().chain(&mos).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite score or MOS".into()));
        }
        Ok(Self {
            database_id: database_id.into(),
            scores,
            mos,
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReportCell {
    pub srocc: f64,
    /// None for the anchor metric itself.
    pub verdict: Option<i8>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub metric: String,
    pub cells: Vec<ReportCell>,
    pub overall: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseSummary {
    pub metric_a: String,
    pub metric_b: String,
    pub pair_count: u64,
    pub accuracy_a: f64,
    pub accuracy_b: f64,
    pub ties_a: u64,
    pub ties_b: u64,
    pub counts: [[u64; 2]; 2],
    pub p_value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub databases: Vec<String>,
    pub anchor: String,
    pub rows: Vec<ReportRow>,
    pub pairwise: Option<PairwiseSummary>,
}

/// Build the correlation table. `metrics` supplies, per metric, one series
/// per database (all metrics must cover the same databases in the same
/// order); `anchor` names the metric the F-tests compare against.
pub fn build_report(metrics: &[(String, Vec<MetricSeries>)], anchor: &str) -> Result<EvalReport> {
    let (_, anchor_series) = metrics
        .iter()
        .find(|(name, _)| name == anchor)
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "anchor metric `{anchor}` not among the evaluated metrics"
            ))
        })?;
    let databases: Vec<String> = anchor_series
        .iter()
        .map(|s| s.database_id.clone())
        .collect();
    for (name, series) in metrics {
        let ids: Vec<&str> = series.iter().map(|s| s.database_id.as_str()).collect();
        if ids != databases.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(format!(
                "metric `{name}` does not cover the same databases as the anchor"
            )));
        }
    }

    // residuals of the anchor per database, shared by every row
    let anchor_residuals: Vec<Vec<f64>> = anchor_series
        .iter()
        .map(|s| fit_logistic(&s.scores, &s.mos).map(|f| f.residuals))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(metrics.len());
    for (name, series) in metrics {
        let mut cells = Vec::with_capacity(series.len());
        let mut sroccs = Vec::with_capacity(series.len());
        for (db_idx, s) in series.iter().enumerate() {
            let rho = srocc(&s.scores, &s.mos)?.value;
            sroccs.push(rho);
            let verdict = if name == anchor {
                None
            } else {
                let fit = fit_logistic(&s.scores, &s.mos)?;
                Some(f_test_residuals(&fit.residuals, &anchor_residuals[db_idx], 0.95).verdict)
            };
            cells.push(ReportCell {
                srocc: rho,
                verdict,
            });
        }
        let overall = fisher_aggregate(&sroccs)?.value;
        rows.push(ReportRow {
            metric: name.clone(),
            cells,
            overall,
        });
    }
    Ok(EvalReport {
        databases,
        anchor: anchor.to_string(),
        rows,
        pairwise: None,
    })
}

impl EvalReport {
    /// Fixed-width table: per database `srocc (verdict)`, then the overall
    /// aggregate of the row.
    pub fn render_text(&self) -> String {
        let name_w = self
            .rows
            .iter()
            .map(|r| r.metric.len())
            .chain(["SROCC (F-test)".len()])
            .max()
            .unwrap_or(14);
        let mut out = String::new();
        out.push_str(&format!("{:<name_w$} |", "SROCC (F-test)"));
        for db in &self.databases {
            out.push_str(&format!(" {db:>11}"));
        }
        out.push_str(" | Overall\n");
        let sep_len = name_w + 2 + 12 * self.databases.len() + 10;
        out.push_str(&"-".repeat(sep_len));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:<name_w$} |", row.metric));
            for cell in &row.cells {
                match cell.verdict {
                    Some(v) => out.push_str(&format!(" {:>6.4} ({v:+})", cell.srocc)),
                    None => out.push_str(&format!(" {:>6.4}     ", cell.srocc)),
                }
            }
            out.push_str(&format!(" | {:>7.4}\n", row.overall));
        }
        if let Some(p) = &self.pairwise {
            out.push('\n');
            out.push_str(&format!(
                "pairwise ({} pairs): {} accuracy {:.4} ({} ties), {} accuracy {:.4} ({} ties), exact-test p = {:e}\n",
                p.pair_count, p.metric_a, p.accuracy_a, p.ties_a, p.metric_b, p.accuracy_b, p.ties_b, p.p_value
            ));
        }
        out
    }

    /// CSV rendering: metric, then srocc and verdict per database, then the
    /// overall column.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("metric");
        for db in &self.databases {
            out.push_str(&format!(",{db}_srocc,{db}_ftest"));
        }
        out.push_str(",overall\n");
        for row in &self.rows {
            out.push_str(&row.metric);
            for cell in &row.cells {
                match cell.verdict {
                    Some(v) => out.push_str(&format!(",{},{v}", cell.srocc)),
                    None => out.push_str(&format!(",{},", cell.srocc)),
                }
            }
            out.push_str(&format!(",{}\n", row.overall));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn series(db: &str, rng: &mut Rng, quality: f64) -> MetricSeries {
        let mos: Vec<f64> = (0..12).map(|i| 20.0 + 6.0 * i as f64).collect();
        let scores: Vec<f64> = mos
            .iter()
            .map(|&m| quality * m + (1.0 - quality) * rng.range_f64(0.0, 100.0))
            .collect();
        MetricSeries::new(db, scores, mos).unwrap()
    }

    #[test]
    fn anchor_against_itself_is_all_zero_verdicts() {
        let mut rng = Rng::new(77);
        let metrics = vec![(
            "anchor".to_string(),
            vec![series("db1", &mut rng, 0.9), series("db2", &mut rng, 0.9)],
        )];
        let report = build_report(&metrics, "anchor").unwrap();
        for cell in &report.rows[0].cells {
            assert_eq!(cell.verdict, None);
        }
        // explicit self-comparison: residual ratio 1 -> verdict 0
        let s = series("db", &mut rng, 0.5);
        let fit = crate::evaluation::fit_logistic(&s.scores, &s.mos).unwrap();
        let t = f_test_residuals(&fit.residuals, &fit.residuals, 0.95);
        assert_eq!(t.verdict, 0);
    }

    #[test]
    fn overall_is_the_fisher_aggregate_of_the_row() {
        let mut rng = Rng::new(3);
        let metrics = vec![
            (
                "m".to_string(),
                vec![series("a", &mut rng, 0.95), series("b", &mut rng, 0.7)],
            ),
            (
                "anchor".to_string(),
                vec![series("a", &mut rng, 0.8), series("b", &mut rng, 0.8)],
            ),
        ];
        let report = build_report(&metrics, "anchor").unwrap();
        for row in &report.rows {
            let sroccs: Vec<f64> = row.cells.iter().map(|c| c.srocc).collect();
            let want = fisher_aggregate(&sroccs).unwrap().value;
            assert!((row.overall - want).abs() < 1e-12);
            let min = sroccs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = sroccs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(row.overall >= min - 1e-12 && row.overall <= max + 1e-12);
        }
    }

    #[test]
    fn near_perfect_metric_beats_noise_everywhere() {
        let mut rng = Rng::new(11);
        let dbs = ["a", "b", "c"];
        let good: Vec<MetricSeries> = dbs.iter().map(|db| series(db, &mut rng, 0.999)).collect();
        let noise: Vec<MetricSeries> = dbs.iter().map(|db| series(db, &mut rng, 0.0)).collect();
        let metrics = vec![("good".to_string(), good), ("noise".to_string(), noise)];
        let report = build_report(&metrics, "noise").unwrap();
        for cell in &report.rows[0].cells {
            assert_eq!(cell.verdict, Some(1), "good metric should win the F-test");
        }
    }

    #[test]
    fn mismatched_databases_are_rejected() {
        let mut rng = Rng::new(4);
        let metrics = vec![
            ("m".to_string(), vec![series("a", &mut rng, 0.9)]),
            ("anchor".to_string(), vec![series("b", &mut rng, 0.9)]),
        ];
        assert!(build_report(&metrics, "anchor").is_err());
    }
}
