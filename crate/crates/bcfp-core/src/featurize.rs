//! Fixed-length count vectors from key multisets, and feature-matrix
//! assembly for the four descriptor schemes.
//!
//! Two pooling strategies are supported. Hash folding maps every key to
//! `key mod dim`, accumulating counts (collisions and all). Sort&Slice
//! ranks keys seen in the training rows by molecule frequency (presence,
//! not summed counts), keeps the top K as explicit coordinates, and can
//! append a single out-of-vocabulary coordinate that accumulates the
//! counts of everything else, including keys never seen at fit time.

use std::collections::HashMap;
use std::io::{self, Read, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::fingerprint::{bcfp_keys, ecfp_keys, KeyMultiset};
use crate::smiles::Molecule;

#[derive(Debug, Error, PartialEq)]
pub enum FeaturizeError {
    #[error("fold dimension must be positive")]
    ZeroDimension,
    #[error("sort&slice fitting requires a non-empty training set")]
    EmptyTrain,
    #[error("slice size K must be positive")]
    ZeroSliceSize,
    #[error("labels length {labels} does not match row count {rows}")]
    LabelMismatch { labels: usize, rows: usize },
    #[error("bad matrix file: {0}")]
    BadMatrixFile(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<io::Error> for FeaturizeError {
    fn from(e: io::Error) -> Self {
        FeaturizeError::Io(e.to_string())
    }
}

/// Fold a key multiset into `dim` coordinates by `key mod dim`.
/// The coordinate sum always equals the multiset total.
pub fn fold_counts(keys: &KeyMultiset, dim: usize) -> Result<Vec<u32>, FeaturizeError> {
    if dim == 0 {
        return Err(FeaturizeError::ZeroDimension);
    }
    let mut counts = vec![0u32; dim];
    for (key, count) in keys.iter() {
        counts[(key % dim as u64) as usize] += count;
    }
    Ok(counts)
}

/// Frequency-ranked key vocabulary fitted on training rows only.
#[derive(Debug, Clone, PartialEq)]
pub struct SortSliceVocabulary {
    /// Retained keys, ordered by (molecule frequency desc, key asc).
    pub retained: Vec<u64>,
    pub oov_enabled: bool,
    /// Training molecule frequency per retained key.
    pub fit_stats: Vec<u32>,
    index: HashMap<u64, usize>,
}

impl SortSliceVocabulary {
    /// Output vector length: K retained coordinates plus the OOV bucket.
    pub fn width(&self) -> usize {
        self.retained.len() + usize::from(self.oov_enabled)
    }
}

/// Rank keys by the number of training multisets containing them
/// (presence, not summed counts) and keep the top K, ties broken by
/// ascending key value. Fewer than K distinct keys retains all.
pub fn fit_sortslice(
    train: &[&KeyMultiset],
    k: usize,
    oov: bool,
) -> Result<SortSliceVocabulary, FeaturizeError> {
    if train.is_empty() {
        return Err(FeaturizeError::EmptyTrain);
    }
    if k == 0 {
        return Err(FeaturizeError::ZeroSliceSize);
    }
    let mut freq: HashMap<u64, u32> = HashMap::new();
    for keys in train {
        for (key, _) in keys.iter() {
            *freq.entry(key).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(u64, u32)> = freq.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);

    let retained: Vec<u64> = ranked.iter().map(|&(key, _)| key).collect();
    let fit_stats: Vec<u32> = ranked.iter().map(|&(_, f)| f).collect();
    let index = retained
        .iter()
        .enumerate()
        .map(|(i, &key)| (key, i))
        .collect();
    Ok(SortSliceVocabulary {
        retained,
        oov_enabled: oov,
        fit_stats,
        index,
    })
}

/// Transform one molecule's keys against a fitted vocabulary.
/// Coordinate i holds the count of retained key i; with OOV enabled the
/// final coordinate accumulates the counts of every other key.
pub fn transform_sortslice(keys: &KeyMultiset, vocab: &SortSliceVocabulary) -> Vec<u32> {
    let mut out = vec![0u32; vocab.width()];
    for (key, count) in keys.iter() {
        match vocab.index.get(&key) {
            Some(&i) => out[i] += count,
            None if vocab.oov_enabled => *out.last_mut().unwrap() += count,
            None => {}
        }
    }
    out
}

/// Descriptor families from the evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FingerprintKind {
    Ecfp,
    Bcfp,
    /// Atom block and bond block at the same radius.
    Concat,
    /// Atom block at r, bond block at r−1; defined as `Concat` at r=0.
    Hybrid,
}

impl FingerprintKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FingerprintKind::Ecfp => "ecfp",
            FingerprintKind::Bcfp => "bcfp",
            FingerprintKind::Concat => "concat",
            FingerprintKind::Hybrid => "hybrid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ecfp" => Some(FingerprintKind::Ecfp),
            "bcfp" => Some(FingerprintKind::Bcfp),
            "concat" => Some(FingerprintKind::Concat),
            "hybrid" => Some(FingerprintKind::Hybrid),
            _ => None,
        }
    }
}

/// Which fingerprint a block is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Ecfp,
    Bcfp,
}

impl BlockKind {
    pub fn keys(&self, mol: &Molecule, radius: u8) -> KeyMultiset {
        match self {
            BlockKind::Ecfp => ecfp_keys(mol, radius),
            BlockKind::Bcfp => bcfp_keys(mol, radius),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BlockKind::Ecfp => "ecfp",
            BlockKind::Bcfp => "bcfp",
        }
    }
}

/// Pooling applied independently to each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pooling {
    Folded { dim: usize },
    SortSlice { k: usize, oov: bool },
}

impl Pooling {
    pub fn id(&self) -> String {
        match self {
            Pooling::Folded { dim } => format!("fold{dim}"),
            Pooling::SortSlice { k, oov: false } => format!("ss{k}"),
            Pooling::SortSlice { k, oov: true } => format!("ss{k}+oov"),
        }
    }
}

/// A descriptor configuration: scheme kind, radius, and pooling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureScheme {
    pub kind: FingerprintKind,
    pub radius: u8,
    pub pooling: Pooling,
}

impl FeatureScheme {
    pub fn new(kind: FingerprintKind, radius: u8, pooling: Pooling) -> Self {
        FeatureScheme {
            kind,
            radius,
            pooling,
        }
    }

    /// Stable identifier, unique within a grid.
    pub fn id(&self) -> String {
        format!(
            "{}-r{}-{}",
            self.kind.as_str(),
            self.radius,
            self.pooling.id()
        )
    }

    /// The (fingerprint, radius) blocks this scheme concatenates.
    /// Hybrid at r=0 resolves to concat at r=0.
    pub fn blocks(&self) -> Vec<(BlockKind, u8)> {
        let r = self.radius;
        match self.kind {
            FingerprintKind::Ecfp => vec![(BlockKind::Ecfp, r)],
            FingerprintKind::Bcfp => vec![(BlockKind::Bcfp, r)],
            FingerprintKind::Concat => vec![(BlockKind::Ecfp, r), (BlockKind::Bcfp, r)],
            FingerprintKind::Hybrid => {
                if r == 0 {
                    vec![(BlockKind::Ecfp, 0), (BlockKind::Bcfp, 0)]
                } else {
                    vec![(BlockKind::Ecfp, r), (BlockKind::Bcfp, r - 1)]
                }
            }
        }
    }
}

/// Provenance of one column block of a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    pub kind: BlockKind,
    pub radius: u8,
    pub pooling: Pooling,
    pub width: usize,
    /// Rows the block's vocabulary was fitted on (sort&slice only).
    pub fit_rows: Option<Vec<usize>>,
}

impl FeatureBlock {
    pub fn id(&self) -> String {
        format!(
            "{}-r{}-{}",
            self.kind.as_str(),
            self.radius,
            self.pooling.id()
        )
    }
}

/// Dense count-feature rows aligned with labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    counts: Vec<u32>,
    pub labels: Vec<u8>,
    pub blocks: Vec<FeatureBlock>,
}

impl FeatureMatrix {
    /// Build a matrix from explicit rows (mainly for tests).
    pub fn from_rows(rows: Vec<Vec<u32>>, labels: Vec<u8>) -> Result<Self, FeaturizeError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        if labels.len() != n_rows {
            return Err(FeaturizeError::LabelMismatch {
                labels: labels.len(),
                rows: n_rows,
            });
        }
        let mut counts = Vec::with_capacity(n_rows * n_cols);
        for row in &rows {
            assert_eq!(row.len(), n_cols, "ragged rows");
            counts.extend_from_slice(row);
        }
        Ok(FeatureMatrix {
            n_rows,
            n_cols,
            counts,
            labels,
            blocks: Vec::new(),
        })
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// CSV export; the header encodes each column's block provenance.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), FeaturizeError> {
        let mut header = vec!["label".to_string()];
        if self.blocks.is_empty() {
            header.extend((0..self.n_cols).map(|i| format!("c{i:04}")));
        } else {
            for block in &self.blocks {
                let id = block.id();
                header.extend((0..block.width).map(|i| format!("{id}_{i:04}")));
            }
        }
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.n_rows {
            let mut line = String::with_capacity(self.n_cols * 2 + 2);
            line.push_str(&self.labels[i].to_string());
            for v in self.row(i) {
                line.push(',');
                line.push_str(&v.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Compact binary export: magic `BCFPMAT1`, u64 row count, u64 column
    /// count, then row-major little-endian u32 counts.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<(), FeaturizeError> {
        w.write_all(b"BCFPMAT1")?;
        w.write_all(&(self.n_rows as u64).to_le_bytes())?;
        w.write_all(&(self.n_cols as u64).to_le_bytes())?;
        for v in &self.counts {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Read a matrix written by [`FeatureMatrix::write_binary`]. Labels
    /// and block provenance are not part of the format.
    pub fn read_binary<R: Read>(mut r: R) -> Result<Self, FeaturizeError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != b"BCFPMAT1" {
            return Err(FeaturizeError::BadMatrixFile(format!(
                "bad magic {:?}",
                String::from_utf8_lossy(&magic)
            )));
        }
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let n_rows = u64::from_le_bytes(buf8) as usize;
        r.read_exact(&mut buf8)?;
        let n_cols = u64::from_le_bytes(buf8) as usize;
        let mut counts = vec![0u32; n_rows * n_cols];
        let mut buf4 = [0u8; 4];
        for v in counts.iter_mut() {
            r.read_exact(&mut buf4)?;
            *v = u32::from_le_bytes(buf4);
        }
        Ok(FeatureMatrix {
            n_rows,
            n_cols,
            counts,
            labels: vec![0; n_rows],
            blocks: Vec::new(),
        })
    }
}

/// Compute per-molecule key multisets for one block.
pub fn block_keys(mols: &[Molecule], kind: BlockKind, radius: u8) -> Vec<KeyMultiset> {
    mols.par_iter().map(|m| kind.keys(m, radius)).collect()
}

/// Assemble a feature matrix for `scheme` over all molecules. Sort&Slice
/// vocabularies are fitted on `train_rows` only; folding needs no fit.
pub fn build_features(
    mols: &[Molecule],
    labels: &[u8],
    scheme: &FeatureScheme,
    train_rows: &[usize],
) -> Result<FeatureMatrix, FeaturizeError> {
    let blocks = scheme.blocks();
    let keys: Vec<Vec<KeyMultiset>> = blocks
        .iter()
        .map(|&(kind, radius)| block_keys(mols, kind, radius))
        .collect();
    let key_refs: Vec<&[KeyMultiset]> = keys.iter().map(|k| k.as_slice()).collect();
    build_features_from_keys(&key_refs, labels, scheme, train_rows)
}

/// Same as [`build_features`], but over precomputed per-block key
/// multisets (one slice per scheme block, each aligned with rows).
pub fn build_features_from_keys(
    block_key_sets: &[&[KeyMultiset]],
    labels: &[u8],
    scheme: &FeatureScheme,
    train_rows: &[usize],
) -> Result<FeatureMatrix, FeaturizeError> {
    let blocks = scheme.blocks();
    assert_eq!(
        block_key_sets.len(),
        blocks.len(),
        "one key set per scheme block"
    );
    let n_rows = block_key_sets.first().map_or(0, |k| k.len());
    if labels.len() != n_rows {
        return Err(FeaturizeError::LabelMismatch {
            labels: labels.len(),
            rows: n_rows,
        });
    }

    let mut block_infos = Vec::with_capacity(blocks.len());
    let mut block_columns: Vec<Vec<Vec<u32>>> = Vec::with_capacity(blocks.len());

    for (&(kind, radius), keys) in blocks.iter().zip(block_key_sets) {
        let (rows, width, fit_rows) = match scheme.pooling {
            Pooling::Folded { dim } => {
                let rows: Vec<Vec<u32>> = keys
                    .par_iter()
                    .map(|k| fold_counts(k, dim))
                    .collect::<Result<_, _>>()?;
                (rows, dim, None)
            }
            Pooling::SortSlice { k, oov } => {
                let train_keys: Vec<&KeyMultiset> = train_rows.iter().map(|&i| &keys[i]).collect();
                let vocab = fit_sortslice(&train_keys, k, oov)?;
                let rows: Vec<Vec<u32>> = keys
                    .par_iter()
                    .map(|keys| transform_sortslice(keys, &vocab))
                    .collect();
                (rows, vocab.width(), Some(train_rows.to_vec()))
            }
        };
        block_infos.push(FeatureBlock {
            kind,
            radius,
            pooling: scheme.pooling,
            width,
            fit_rows,
        });
        block_columns.push(rows);
    }

    let n_cols: usize = block_infos.iter().map(|b| b.width).sum();
    let mut counts = Vec::with_capacity(n_rows * n_cols);
    for i in 0..n_rows {
        for rows in &block_columns {
            counts.extend_from_slice(&rows[i]);
        }
    }

    Ok(FeatureMatrix {
        n_rows,
        n_cols,
        counts,
        labels: labels.to_vec(),
        blocks: block_infos,
    })
}
