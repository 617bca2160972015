//! `bcfp`: fingerprint benchmark toolkit front end.
//!
//! Subcommands: `clean` (dataset cleanup), `run` (experiment grid),
//! `report` (summary, Tukey HSD, box plots), `dump-keys` (per-molecule
//! key multisets as JSON lines).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 partial
//! failures during a run.

/// Write a line to stdout, ending the process quietly when the consumer
/// closed the pipe (`bcfp ... | head`).
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if writeln!(std::io::stdout(), $($arg)*).is_err() {
            std::process::exit(0);
        }
    }};
}

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use bcfp_core::dataset::{self};
use bcfp_core::featurize::BlockKind;
use bcfp_core::smiles::{parse_smiles_with, ParseOptions};

use bcfp_cli::config::ExperimentConfig;
use bcfp_cli::report;
use bcfp_cli::runner::{self, RunManifest, Timings, FAILURES_FILE, MANIFEST_FILE, RECORDS_FILE};

#[derive(Parser)]
#[command(
    name = "bcfp",
    version,
    about = "molecular fingerprint benchmark toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and deduplicate a raw dataset CSV.
    Clean {
        /// Input CSV with SMILES and binary labels.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "smiles")]
        smiles_col: String,
        #[arg(long, default_value = "p_np")]
        label_col: String,
        /// Output directory for the cleaned CSV and drop report.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Keep Kekulé and aromatic ring spellings distinct.
        #[arg(long)]
        no_normalize: bool,
    },
    /// Execute an experiment grid from a TOML configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize metric records: table, Tukey HSD CSVs, box plot SVGs.
    Report {
        /// records.csv produced by `run`.
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print per-molecule key multisets as JSON lines.
    DumpKeys {
        /// Dataset CSV (cleaned or raw).
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "smiles")]
        smiles_col: String,
        #[arg(long, default_value = "label")]
        label_col: String,
        /// "ecfp" or "bcfp".
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 1)]
        radius: u8,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap routes --help and --version through the error path
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let outcome = match cli.command {
        Command::Clean {
            dataset,
            smiles_col,
            label_col,
            out,
            no_normalize,
        } => cmd_clean(&dataset, &smiles_col, &label_col, &out, no_normalize),
        Command::Run { config, jobs, out } => cmd_run(&config, jobs, out.as_deref()),
        Command::Report {
            records,
            alpha,
            out,
        } => cmd_report(&records, alpha, &out),
        Command::DumpKeys {
            dataset,
            smiles_col,
            label_col,
            scheme,
            radius,
        } => cmd_dump_keys(&dataset, &smiles_col, &label_col, &scheme, radius),
    };

    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn cmd_clean(
    dataset: &Path,
    smiles_col: &str,
    label_col: &str,
    out: &Path,
    no_normalize: bool,
) -> Result<ExitCode> {
    let records = dataset::read_csv(dataset, smiles_col, label_col)?;
    let opts = if no_normalize {
        ParseOptions::default()
    } else {
        ParseOptions::pipeline()
    };
    let cleaned = dataset::clean_dataset_with(&records, &opts)?;

    fs::create_dir_all(out)?;
    let cleaned_path = out.join("clean.csv");
    let report_path = out.join("clean_report.csv");
    dataset::write_cleaned_csv(fs::File::create(&cleaned_path)?, &cleaned.records)?;
    dataset::write_report_csv(fs::File::create(&report_path)?, &cleaned.report)?;

    let report = &cleaned.report;
    outln!("input rows:      {}", report.input_rows);
    outln!("invalid smiles:  {}", report.invalid.len());
    outln!("duplicates:      {}", report.duplicates.len());
    outln!("label conflicts: {}", report.label_conflicts.len());
    outln!("kept:            {}", report.kept());
    outln!("cleaned dataset: {}", cleaned_path.display());
    outln!("drop report:     {}", report_path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(
    config_path: &Path,
    jobs: Option<usize>,
    out_override: Option<&Path>,
) -> Result<ExitCode> {
    let total_start = Instant::now();
    let (mut config, config_text) = ExperimentConfig::load(config_path)?;
    if let Some(out) = out_override {
        config.output.dir = out.to_path_buf();
    }
    if let Some(jobs) = jobs.or(config.jobs) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }

    let dataset_bytes = fs::read(&config.dataset.path)
        .with_context(|| format!("reading dataset {}", config.dataset.path.display()))?;
    let records = dataset::read_csv(
        &config.dataset.path,
        &config.dataset.smiles_col,
        &config.dataset.label_col,
    )?;

    let out_dir = config.output.dir.clone();
    fs::create_dir_all(&out_dir)?;
    let records_path = out_dir.join(RECORDS_FILE);
    let manifest_path = out_dir.join(MANIFEST_FILE);

    let identity = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: runner::digest_hex(config_text.as_bytes()),
        input_digest: runner::digest_hex(&dataset_bytes),
        n_records: 0,
        timings_ms: Timings::default(),
    };

    // resume only when the previous manifest matches this config and input
    let mut done: HashSet<(String, String)> = HashSet::new();
    let mut existing = Vec::new();
    if records_path.exists() && manifest_path.exists() {
        let previous: Option<RunManifest> =
            serde_json::from_str(&fs::read_to_string(&manifest_path)?).ok();
        match previous {
            Some(p) if p.identity_matches(&identity) => {
                existing = runner::read_records_csv(&records_path)?;
                done = existing
                    .iter()
                    .map(|r| (r.config.clone(), r.split.clone()))
                    .collect();
                if !done.is_empty() {
                    outln!("resuming: {} records already present", done.len());
                }
            }
            _ => {
                outln!("config or input changed; starting fresh");
            }
        }
    }

    let parse_start = Instant::now();
    let data = runner::prepare(&records)?;
    let parse_ms = runner::ms_since(parse_start);

    let splits = runner::make_splits(&config.split, &data.labels)?;
    let schemes = config.schemes();
    outln!(
        "grid: {} configurations x {} splits ({} jobs pending)",
        schemes.len(),
        splits.len(),
        schemes.len() * splits.len() - done.len()
    );

    // stream finished records so interrupted runs can resume
    let partial_path = out_dir.join("records.partial.csv");
    let partial = Mutex::new(std::io::BufWriter::new(fs::File::create(&partial_path)?));
    let run_start = Instant::now();
    let outcome = runner::run_grid(&schemes, &splits, &data, &config.forest, &done, |record| {
        let mut w = partial.lock().unwrap();
        let _ = writeln!(
            w,
            "{},{},{},{},{}",
            record.config, record.split, record.auroc, record.auprc, record.f1
        );
        let _ = w.flush();
    });
    let run_ms = runner::ms_since(run_start);

    // canonical sorted output
    let mut all_records = existing;
    all_records.extend(outcome.records.clone());
    all_records.sort_by(|a, b| {
        (a.config.as_str(), a.split.as_str()).cmp(&(b.config.as_str(), b.split.as_str()))
    });
    let mut w = std::io::BufWriter::new(fs::File::create(&records_path)?);
    runner::write_records_csv(&mut w, &all_records)?;
    w.flush()?;
    drop(partial);
    let _ = fs::remove_file(&partial_path);

    let manifest = RunManifest {
        n_records: all_records.len(),
        timings_ms: Timings {
            parse_ms,
            run_ms,
            total_ms: runner::ms_since(total_start),
        },
        ..identity
    };
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;

    outln!(
        "wrote {} records to {}",
        all_records.len(),
        records_path.display()
    );

    if !outcome.failures.is_empty() {
        let failures_path = out_dir.join(FAILURES_FILE);
        let mut w = std::io::BufWriter::new(fs::File::create(&failures_path)?);
        writeln!(w, "config,split,error")?;
        for f in &outcome.failures {
            writeln!(w, "{},{},{:?}", f.config, f.split, f.error)?;
        }
        w.flush()?;
        eprintln!(
            "{} job(s) failed; see {}",
            outcome.failures.len(),
            failures_path.display()
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(records_path: &Path, alpha: f64, out: &Path) -> Result<ExitCode> {
    let records = runner::read_records_csv(records_path)?;
    if records.is_empty() {
        anyhow::bail!("no records in {}", records_path.display());
    }
    let report = report::build_report(&records, alpha)?;

    {
        use std::io::Write as _;
        if write!(std::io::stdout(), "{}", report.summary).is_err() {
            std::process::exit(0);
        }
    }
    if let Some(warning) = &report.warning {
        eprintln!("warning: {warning}");
    }
    if report.tukey_skipped {
        outln!("tukey hsd skipped: fewer than two configurations");
    }

    fs::create_dir_all(out)?;
    for (name, contents) in &report.files {
        let path = out.join(name);
        fs::write(&path, contents)?;
        outln!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dump_keys(
    dataset: &Path,
    smiles_col: &str,
    label_col: &str,
    scheme: &str,
    radius: u8,
) -> Result<ExitCode> {
    let kind = match scheme {
        "ecfp" => BlockKind::Ecfp,
        "bcfp" => BlockKind::Bcfp,
        other => anyhow::bail!("unknown scheme {other:?} (expected ecfp|bcfp)"),
    };
    if radius > 3 {
        anyhow::bail!("radius {radius} out of range (0..=3)");
    }
    let records = dataset::read_csv(dataset, smiles_col, label_col)?;
    let opts = ParseOptions::pipeline();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for rec in &records {
        let mol = match parse_smiles_with(&rec.smiles, &opts) {
            Ok(mol) => mol,
            Err(e) => {
                eprintln!("row {}: {e}", rec.row_id);
                continue;
            }
        };
        let keys = kind.keys(&mol, radius);
        let entries: Vec<serde_json::Value> = keys
            .iter()
            .map(|(key, count)| serde_json::json!({ "key": key, "count": count }))
            .collect();
        let line = serde_json::json!({
            "smiles": rec.smiles,
            "scheme": scheme,
            "radius": radius,
            "keys": entries,
        });
        if let Err(e) = writeln!(out, "{line}") {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                return Ok(ExitCode::SUCCESS);
            }
            return Err(e.into());
        }
    }
    Ok(ExitCode::SUCCESS)
}
