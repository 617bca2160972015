//! Evaluation machinery: stratified splits, ranking metrics, and
//! multiple-comparison statistics.

mod metrics;
mod split;
mod srange;
mod tukey;

pub use metrics::{auroc, average_precision, f1_at_threshold};
pub use split::{stratified_holdout, stratified_kfold};
pub use srange::{studentized_range_cdf, studentized_range_quantile};
pub use tukey::{tukey_hsd, PairComparison, TukeyResult};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Per-(configuration, split) metric values, the unit record every
/// aggregation consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub config: String,
    pub split: String,
    pub auroc: f64,
    pub auprc: f64,
    pub f1: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("test fraction must be strictly between 0 and 1")]
    BadFraction,
    #[error("split would leave a class with no train or no test rows")]
    DegenerateSplit,
    #[error("k must be at least 2")]
    BadK,
    #[error("every class needs at least k members")]
    TooFewPerClass,
    #[error("metric requires both classes present")]
    SingleClass,
    #[error("metric requires at least one positive")]
    NoPositives,
    #[error("tukey hsd needs at least two groups")]
    TooFewGroups,
    #[error("tukey hsd needs at least two values per group")]
    TooFewValues,
}
