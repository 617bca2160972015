//! Embedded random forest classifier over count-feature matrices.
//!
//! Deterministic end to end: tree `t` of a forest draws its bootstrap
//! sample and every per-node feature subsample from `Pcg32::new(seed, t)`,
//! so training is reproducible bit-for-bit regardless of how trees are
//! scheduled across threads.

mod tree;

pub use tree::{DecisionTree, Node};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::featurize::FeatureMatrix;
use crate::pcg::Pcg32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxFeatures {
    /// floor(sqrt(column count)), at least 1.
    Sqrt,
    /// Every column at every node.
    All,
    Fixed(usize),
}

impl MaxFeatures {
    fn resolve(&self, n_cols: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => ((n_cols as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::All => n_cols.max(1),
            MaxFeatures::Fixed(k) => (*k).clamp(1, n_cols.max(1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_features: MaxFeatures,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_features: MaxFeatures::Sqrt,
            min_samples_leaf: 1,
            min_samples_split: 2,
            max_depth: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("training requires both classes present")]
    SingleClass,
    #[error("training requires at least two rows")]
    EmptyMatrix,
    #[error("input width {got} does not match trained width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("bad forest file: {0}")]
    BadForestFile(String),
}

/// Trained forest. Serializes to a versioned JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub params: ForestParams,
    pub n_features: usize,
}

const FOREST_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ForestFile {
    version: u32,
    forest: Forest,
}

impl Forest {
    /// Mean over trees of the reached leaf's positive fraction, for each
    /// of the selected rows. Output is always within [0, 1].
    pub fn predict_proba(&self, x: &FeatureMatrix, rows: &[usize]) -> Result<Vec<f64>, ModelError> {
        if x.n_cols != self.n_features {
            return Err(ModelError::WidthMismatch {
                expected: self.n_features,
                got: x.n_cols,
            });
        }
        let inv = 1.0 / self.trees.len() as f64;
        Ok(rows
            .iter()
            .map(|&row| {
                let features = x.row(row);
                let sum: f64 = self.trees.iter().map(|t| t.predict_row(features)).sum();
                sum * inv
            })
            .collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ForestFile {
            version: FOREST_FORMAT_VERSION,
            forest: self.clone(),
        })
        .expect("forest serialization")
    }

    pub fn from_json(text: &str) -> Result<Forest, ModelError> {
        let file: ForestFile =
            serde_json::from_str(text).map_err(|e| ModelError::BadForestFile(e.to_string()))?;
        if file.version != FOREST_FORMAT_VERSION {
            return Err(ModelError::BadForestFile(format!(
                "unsupported version {}",
                file.version
            )));
        }
        Ok(file.forest)
    }
}

/// Fit a forest on the selected rows of a feature matrix.
///
/// Each tree draws a bootstrap sample (with replacement, same size as the
/// training set) and grows with Gini-impurity splits over
/// `max_features`-sized feature subsamples drawn without replacement at
/// every node. Thresholds sit at midpoints of consecutive distinct values;
/// gain ties break toward the lower feature index, then lower threshold.
pub fn train_forest(
    x: &FeatureMatrix,
    rows: &[usize],
    params: &ForestParams,
) -> Result<Forest, ModelError> {
    if rows.len() < 2 {
        return Err(ModelError::EmptyMatrix);
    }
    let labels: Vec<u8> = rows.iter().map(|&r| x.labels[r]).collect();
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(ModelError::SingleClass);
    }
    assert!(params.n_trees >= 1, "n_trees must be at least 1");

    let n_candidates = params.max_features.resolve(x.n_cols);
    let trees: Vec<DecisionTree> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = Pcg32::new(params.seed, t as u64);
            let bootstrap: Vec<u32> = (0..rows.len())
                .map(|_| rows[rng.next_bounded(rows.len() as u32) as usize] as u32)
                .collect();
            tree::grow(x, &bootstrap, params, n_candidates, &mut rng)
        })
        .collect();

    Ok(Forest {
        trees,
        params: params.clone(),
        n_features: x.n_cols,
    })
}
