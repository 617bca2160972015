//! Dataset ingestion and cleanup: CSV reading with configurable columns,
//! invalid-SMILES removal, and graph-level deduplication.

use std::collections::HashMap;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::smiles::{canonical_hash, parse_smiles_with, ParseOptions};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetRecord {
    pub smiles: String,
    /// Binary class label.
    pub label: u8,
    /// Source row index (0-based, excluding the header).
    pub row_id: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedRow {
    pub row_id: usize,
    pub reason: String,
}

/// Cleanup outcome: what was dropped and why, plus any label conflicts
/// observed among duplicate graphs (first record wins).
#[derive(Debug, Clone, Default)]
pub struct CleanReport {
    pub input_rows: usize,
    pub invalid: Vec<DroppedRow>,
    pub duplicates: Vec<DroppedRow>,
    /// (kept row, conflicting row) pairs with differing labels.
    pub label_conflicts: Vec<(usize, usize)>,
}

impl CleanReport {
    pub fn kept(&self) -> usize {
        self.input_rows - self.invalid.len() - self.duplicates.len()
    }
}

#[derive(Debug, Clone)]
pub struct CleanedDataset {
    pub records: Vec<DatasetRecord>,
    pub report: CleanReport,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("row {row}: label {value:?} is not binary (expected 0 or 1)")]
    BadLabel { row: usize, value: String },
    #[error("no rows survived cleanup")]
    EmptyDataset,
}

/// Read (smiles, label) records from a CSV file with the given column
/// names.
pub fn read_csv(
    path: &Path,
    smiles_col: &str,
    label_col: &str,
) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let smiles_idx = headers
        .iter()
        .position(|h| h == smiles_col)
        .ok_or_else(|| DatasetError::MissingColumn(smiles_col.to_string()))?;
    let label_idx = headers
        .iter()
        .position(|h| h == label_col)
        .ok_or_else(|| DatasetError::MissingColumn(label_col.to_string()))?;

    let mut records = Vec::new();
    for (row_id, row) in reader.records().enumerate() {
        let row = row?;
        let smiles = row.get(smiles_idx).unwrap_or("").to_string();
        let raw_label = row.get(label_idx).unwrap_or("").trim();
        let label = match raw_label {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(DatasetError::BadLabel {
                    row: row_id,
                    value: other.to_string(),
                })
            }
        };
        records.push(DatasetRecord {
            smiles,
            label,
            row_id,
        });
    }
    Ok(records)
}

/// Drop rows whose SMILES fail to parse, then deduplicate by the
/// relabeling-invariant graph hash, keeping the first occurrence. Label
/// conflicts among duplicates are reported, not resolved.
///
/// Parsing uses the pipeline options (ring normalization on) so Kekulé
/// and aromatic spellings of the same ring system deduplicate together.
pub fn clean_dataset(records: &[DatasetRecord]) -> Result<CleanedDataset, DatasetError> {
    clean_dataset_with(records, &ParseOptions::pipeline())
}

pub fn clean_dataset_with(
    records: &[DatasetRecord],
    opts: &ParseOptions,
) -> Result<CleanedDataset, DatasetError> {
    let parsed: Vec<Result<u64, String>> = records
        .par_iter()
        .map(|rec| {
            parse_smiles_with(&rec.smiles, opts)
                .map(|mol| canonical_hash(&mol))
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut report = CleanReport {
        input_rows: records.len(),
        ..CleanReport::default()
    };
    let mut kept: Vec<DatasetRecord> = Vec::new();
    let mut seen: HashMap<u64, (usize, u8)> = HashMap::new(); // hash -> (kept row_id, label)

    for (rec, result) in records.iter().zip(parsed) {
        match result {
            Err(reason) => report.invalid.push(DroppedRow {
                row_id: rec.row_id,
                reason,
            }),
            Ok(hash) => match seen.get(&hash) {
                Some(&(first_row, first_label)) => {
                    report.duplicates.push(DroppedRow {
                        row_id: rec.row_id,
                        reason: format!("duplicate of row {first_row}"),
                    });
                    if first_label != rec.label {
                        report.label_conflicts.push((first_row, rec.row_id));
                    }
                }
                None => {
                    seen.insert(hash, (rec.row_id, rec.label));
                    kept.push(rec.clone());
                }
            },
        }
    }

    if kept.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    Ok(CleanedDataset {
        records: kept,
        report,
    })
}

/// Write a cleaned dataset as a two-column `smiles,label` CSV.
pub fn write_cleaned_csv<W: io::Write>(
    w: W,
    records: &[DatasetRecord],
) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["smiles", "label"])?;
    for rec in records {
        writer.write_record([rec.smiles.as_str(), if rec.label == 1 { "1" } else { "0" }])?;
    }
    writer.flush()?;
    Ok(())
}

/// Write the drop report as a `row_id,reason` CSV.
pub fn write_report_csv<W: io::Write>(w: W, report: &CleanReport) -> Result<(), DatasetError> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["row_id", "reason"])?;
    let mut rows: Vec<&DroppedRow> = report.invalid.iter().chain(&report.duplicates).collect();
    rows.sort_by_key(|r| r.row_id);
    for row in rows {
        writer.write_record([row.row_id.to_string(), row.reason.clone()])?;
    }
    for &(kept_row, other_row) in &report.label_conflicts {
        writer.write_record([
            other_row.to_string(),
            format!("label conflict with kept row {kept_row}"),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
