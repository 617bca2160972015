//! Experiment grid execution with key-multiset caching, incremental
//! record output, and manifest-based resumption.
//!
//! Randomness derivation: splits depend on (labels, split seed) only, so
//! every configuration sees the same partitions, the paired-replicate
//! design. Each (configuration, split) job trains its forest with a seed
//! derived as FNV-1a over (forest seed, configuration id, split id), and
//! tree t of that forest uses PCG32 stream t.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use bcfp_core::dataset::DatasetRecord;
use bcfp_core::eval::{
    auroc, average_precision, f1_at_threshold, stratified_holdout, stratified_kfold, MetricRecord,
};
use bcfp_core::featurize::{block_keys, build_features_from_keys, BlockKind, FeatureScheme};
use bcfp_core::fingerprint::KeyMultiset;
use bcfp_core::model::{train_forest, ForestParams};
use bcfp_core::smiles::{parse_smiles_with, Molecule, ParseOptions};

use crate::config::{ExperimentConfig, ForestConfig, SplitConfig};

/// Parsed molecules aligned with labels.
pub struct PreparedDataset {
    pub molecules: Vec<Molecule>,
    pub labels: Vec<u8>,
}

/// Parse every record with the pipeline options. Records come from a
/// cleaned dataset, so failures abort with context.
pub fn prepare(records: &[DatasetRecord]) -> Result<PreparedDataset> {
    let opts = ParseOptions::pipeline();
    let molecules: Vec<Molecule> = records
        .par_iter()
        .map(|rec| {
            parse_smiles_with(&rec.smiles, &opts)
                .map_err(|e| anyhow::anyhow!("row {}: {e} ({})", rec.row_id, rec.smiles))
        })
        .collect::<Result<_>>()?;
    let labels = records.iter().map(|r| r.label).collect();
    Ok(PreparedDataset { molecules, labels })
}

#[derive(Debug, Clone)]
pub struct SplitJob {
    pub id: String,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Materialize the split plan. Split ids are stable across runs.
pub fn make_splits(split: &SplitConfig, labels: &[u8]) -> Result<Vec<SplitJob>> {
    match split {
        SplitConfig::Holdout {
            test_fraction,
            seeds,
            seed_start,
        } => (0..*seeds)
            .map(|i| {
                let seed = seed_start + i as u64;
                let (train, test) = stratified_holdout(labels, *test_fraction, seed)
                    .with_context(|| format!("holdout split seed {seed}"))?;
                Ok(SplitJob {
                    id: format!("seed{seed:03}"),
                    train,
                    test,
                })
            })
            .collect(),
        SplitConfig::Kfold { k, repeats, seed } => {
            let folds = stratified_kfold(labels, *k, *seed, *repeats).context("kfold split")?;
            Ok(folds
                .into_iter()
                .enumerate()
                .map(|(i, (train, test))| SplitJob {
                    id: format!("rep{:02}-fold{:02}", i / k, i % k),
                    train,
                    test,
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRecord {
    pub config: String,
    pub split: String,
    pub error: String,
}

pub struct RunOutcome {
    pub records: Vec<MetricRecord>,
    pub failures: Vec<FailureRecord>,
}

/// Forest seed for one (configuration, split) job.
fn job_seed(base: u64, config_id: &str, split_id: &str) -> u64 {
    let mut bytes = Vec::with_capacity(config_id.len() + split_id.len() + 9);
    bytes.extend_from_slice(&base.to_le_bytes());
    bytes.extend_from_slice(config_id.as_bytes());
    bytes.push(0);
    bytes.extend_from_slice(split_id.as_bytes());
    bcfp_core::hash64(&bytes)
}

/// Execute every (scheme, split) pair not already in `done`. Completed
/// records stream into `on_record` as they finish (any order); the
/// returned list is sorted by (config, split).
pub fn run_grid(
    schemes: &[FeatureScheme],
    splits: &[SplitJob],
    data: &PreparedDataset,
    forest: &ForestConfig,
    done: &HashSet<(String, String)>,
    on_record: impl Fn(&MetricRecord) + Sync,
) -> RunOutcome {
    // every distinct (block, radius) once
    let mut needed: Vec<(BlockKind, u8)> = schemes.iter().flat_map(|s| s.blocks()).collect();
    needed.sort_by_key(|&(kind, r)| (kind.as_str(), r));
    needed.dedup();
    let key_cache: HashMap<(BlockKind, u8), Arc<Vec<KeyMultiset>>> = needed
        .into_iter()
        .map(|(kind, radius)| {
            (
                (kind, radius),
                Arc::new(block_keys(&data.molecules, kind, radius)),
            )
        })
        .collect();

    let jobs: Vec<(&FeatureScheme, &SplitJob)> = schemes
        .iter()
        .flat_map(|s| splits.iter().map(move |split| (s, split)))
        .filter(|(s, split)| !done.contains(&(s.id(), split.id.clone())))
        .collect();

    let results = Mutex::new((Vec::new(), Vec::new()));
    jobs.par_iter().for_each(|(scheme, split)| {
        match run_job(scheme, split, data, forest, &key_cache) {
            Ok(record) => {
                on_record(&record);
                results.lock().unwrap().0.push(record);
            }
            Err(e) => {
                results.lock().unwrap().1.push(FailureRecord {
                    config: scheme.id(),
                    split: split.id.clone(),
                    error: format!("{e:#}"),
                });
            }
        }
    });

    let (mut records, mut failures) = results.into_inner().unwrap();
    records.sort_by(|a, b| {
        (a.config.as_str(), a.split.as_str()).cmp(&(b.config.as_str(), b.split.as_str()))
    });
    failures.sort_by(|a, b| {
        (a.config.as_str(), a.split.as_str()).cmp(&(b.config.as_str(), b.split.as_str()))
    });
    RunOutcome { records, failures }
}

fn run_job(
    scheme: &FeatureScheme,
    split: &SplitJob,
    data: &PreparedDataset,
    forest: &ForestConfig,
    key_cache: &HashMap<(BlockKind, u8), Arc<Vec<KeyMultiset>>>,
) -> Result<MetricRecord> {
    let blocks = scheme.blocks();
    let key_refs: Vec<&[KeyMultiset]> = blocks.iter().map(|b| key_cache[b].as_slice()).collect();
    let matrix = build_features_from_keys(&key_refs, &data.labels, scheme, &split.train)?;

    let params = ForestParams {
        n_trees: forest.n_trees,
        seed: job_seed(forest.seed, &scheme.id(), &split.id),
        ..ForestParams::default()
    };
    let model = train_forest(&matrix, &split.train, &params)?;
    let scores = model.predict_proba(&matrix, &split.test)?;
    let test_labels: Vec<u8> = split.test.iter().map(|&i| data.labels[i]).collect();

    Ok(MetricRecord {
        config: scheme.id(),
        split: split.id.clone(),
        auroc: auroc(&scores, &test_labels)?,
        auprc: average_precision(&scores, &test_labels)?,
        f1: f1_at_threshold(&scores, &test_labels, 0.5),
    })
}

/// End-to-end convenience used by the acceptance suite: clean records in,
/// sorted metric records out.
pub fn run_experiment(config: &ExperimentConfig, records: &[DatasetRecord]) -> Result<RunOutcome> {
    let data = prepare(records)?;
    let splits = make_splits(&config.split, &data.labels)?;
    let schemes = config.schemes();
    Ok(run_grid(
        &schemes,
        &splits,
        &data,
        &config.forest,
        &HashSet::new(),
        |_| {},
    ))
}

// ---------------------------------------------------------------------
// record/manifest files
// ---------------------------------------------------------------------

pub const RECORDS_FILE: &str = "records.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub artifact_version: String,
    /// FNV-1a of the configuration file text.
    pub config_hash: String,
    /// FNV-1a of the dataset file bytes.
    pub input_digest: String,
    pub n_records: usize,
    pub timings_ms: Timings,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Timings {
    pub parse_ms: u64,
    pub run_ms: u64,
    pub total_ms: u64,
}

impl RunManifest {
    pub fn identity_matches(&self, other: &RunManifest) -> bool {
        self.config_hash == other.config_hash && self.input_digest == other.input_digest
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    format!("{:016x}", bcfp_core::hash64(bytes))
}

pub fn write_records_csv<W: std::io::Write>(mut w: W, records: &[MetricRecord]) -> Result<()> {
    writeln!(w, "config,split,auroc,auprc,f1")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.config, r.split, r.auroc, r.auprc, r.f1
        )?;
    }
    Ok(())
}

pub fn read_records_csv(path: &std::path::Path) -> Result<Vec<MetricRecord>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading records {}", path.display()))?;
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let record: MetricRecord = row?;
        out.push(record);
    }
    Ok(out)
}

/// Timing helper.
pub fn ms_since(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}
