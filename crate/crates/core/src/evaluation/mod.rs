//! Statistical evaluation protocol: rank correlation, correlation
//! aggregation, logistic fitting with residual F-tests, pairwise
//! classification accuracy and Fisher's exact test.

mod exact;
mod fisher;
mod ftest;
mod logistic;
mod pairwise;
mod report;
mod special;
mod srocc;

pub use exact::fisher_exact;
pub use fisher::{fisher_aggregate, FisherAggregate};
pub use ftest::{f_test_residuals, FTest};
pub use logistic::{fit_logistic, FitKind, LogisticFit};
pub use pairwise::{
    accuracy_counts, build_pairwise, pairwise_accuracy, PairRecord, PairwiseAccuracy,
};
pub use report::{build_report, EvalReport, MetricSeries, PairwiseSummary, ReportCell, ReportRow};
pub use special::{f_cdf, ln_gamma};
pub use srocc::{fractional_ranks, srocc, Srocc};
