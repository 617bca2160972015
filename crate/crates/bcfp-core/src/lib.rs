//! Molecular fingerprint toolkit built around bond-centered circular
//! substructures and their combinations with the classic atom-centered
//! variant, plus everything needed to benchmark them on binary
//! classification datasets: a SMILES parser, count-vector featurization
//! (hash folding and frequency-ranked vocabularies), an embedded random
//! forest, and split/metric/multiple-comparison statistics.
//!
//! The crate is organized along the pipeline:
//!
//! * [`smiles`]: parsing and perception of molecular graphs, plus a
//!   relabeling-invariant graph hash used for deduplication.
//! * [`dataset`]: CSV ingestion and dataset cleanup.
//! * [`fingerprint`]: substructure key generation (atom- and
//!   bond-centered, radii 0–3).
//! * [`featurize`]: fixed-length count vectors and feature matrices.
//! * [`model`]: random forest training and probability prediction.
//! * [`eval`]: stratified splits, AUROC/AUPRC/F1, and Tukey HSD.
//!
//! Everything is deterministic by construction: hashing is pinned to
//! FNV-1a, randomness to PCG32 with explicit (seed, stream) derivations,
//! and all neighbor aggregations are order-independent.

pub mod dataset;
pub mod element;
pub mod eval;
pub mod featurize;
pub mod fingerprint;
pub mod model;
pub mod pcg;
pub mod smiles;
pub mod synth;

pub use dataset::{clean_dataset, CleanReport, CleanedDataset, DatasetRecord};
pub use featurize::{FeatureMatrix, FeatureScheme, FingerprintKind, Pooling, SortSliceVocabulary};
pub use fingerprint::{bcfp_keys, ecfp_keys, hash64, KeyMultiset};
pub use model::{train_forest, Forest, ForestParams};
pub use smiles::{canonical_hash, parse_smiles, parse_smiles_with, Molecule, ParseOptions};
