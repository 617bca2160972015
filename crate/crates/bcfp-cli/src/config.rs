//! TOML experiment configuration.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use bcfp_core::featurize::{FeatureScheme, FingerprintKind, Pooling};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub grid: GridConfig,
    pub split: SplitConfig,
    #[serde(default)]
    pub forest: ForestConfig,
    pub output: OutputConfig,
    #[serde(default)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Cleaned dataset CSV (see the `clean` subcommand).
    pub path: PathBuf,
    #[serde(default = "default_smiles_col")]
    pub smiles_col: String,
    #[serde(default = "default_label_col")]
    pub label_col: String,
}

fn default_smiles_col() -> String {
    "smiles".to_string()
}

fn default_label_col() -> String {
    "label".to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Scheme kinds: any of "ecfp", "bcfp", "concat", "hybrid".
    pub schemes: Vec<String>,
    /// Radii, each in 0..=3.
    pub radii: Vec<u8>,
    /// "folded" or "sortslice".
    pub pooling: String,
    #[serde(default = "default_fold_dim")]
    pub fold_dim: usize,
    #[serde(default = "default_slice_k")]
    pub slice_k: usize,
    #[serde(default)]
    pub oov: bool,
}

fn default_fold_dim() -> usize {
    2048
}

fn default_slice_k() -> usize {
    1024
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum SplitConfig {
    Holdout {
        #[serde(default = "default_test_fraction")]
        test_fraction: f64,
        /// Number of independent seeded splits.
        seeds: usize,
        #[serde(default)]
        seed_start: u64,
    },
    Kfold {
        k: usize,
        repeats: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_test_fraction() -> f64 {
    0.2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestConfig {
    #[serde(default = "default_n_trees")]
    pub n_trees: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_n_trees() -> usize {
    100
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: default_n_trees(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok((config, text))
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.schemes.is_empty() || self.grid.radii.is_empty() {
            bail!("grid needs at least one scheme and one radius");
        }
        for r in &self.grid.radii {
            if *r > 3 {
                bail!("radius {r} out of range (0..=3)");
            }
        }
        for s in &self.grid.schemes {
            if FingerprintKind::parse(s).is_none() {
                bail!("unknown scheme {s:?} (expected ecfp|bcfp|concat|hybrid)");
            }
        }
        if !matches!(self.grid.pooling.as_str(), "folded" | "sortslice") {
            bail!("unknown pooling {:?}", self.grid.pooling);
        }
        match &self.split {
            SplitConfig::Holdout {
                test_fraction,
                seeds,
                ..
            } => {
                if !(*test_fraction > 0.0 && *test_fraction < 1.0) {
                    bail!("test_fraction must be in (0, 1)");
                }
                if *seeds == 0 {
                    bail!("holdout needs at least one seed");
                }
            }
            SplitConfig::Kfold { k, repeats, .. } => {
                if *k < 2 {
                    bail!("kfold needs k >= 2");
                }
                if *repeats == 0 {
                    bail!("kfold needs at least one repeat");
                }
            }
        }
        // config ids must be unique within the run
        let mut seen = HashSet::new();
        for scheme in self.schemes() {
            if !seen.insert(scheme.id()) {
                bail!("duplicate configuration {}", scheme.id());
            }
        }
        Ok(())
    }

    /// The scheme grid in deterministic (radius, kind) order.
    pub fn schemes(&self) -> Vec<FeatureScheme> {
        let pooling = match self.grid.pooling.as_str() {
            "folded" => Pooling::Folded {
                dim: self.grid.fold_dim,
            },
            _ => Pooling::SortSlice {
                k: self.grid.slice_k,
                oov: self.grid.oov,
            },
        };
        let mut out = Vec::new();
        for &radius in &self.grid.radii {
            for kind_name in &self.grid.schemes {
                let kind = FingerprintKind::parse(kind_name).expect("validated scheme");
                out.push(FeatureScheme::new(kind, radius, pooling));
            }
        }
        out
    }
}
