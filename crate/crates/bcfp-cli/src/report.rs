//! Aggregation of metric records: summary table, Tukey HSD CSVs, and
//! box plot SVGs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Result;

use bcfp_core::eval::{tukey_hsd, MetricRecord, TukeyResult};

use crate::svg::render_box_plot;

pub const METRICS: [&str; 3] = ["auroc", "auprc", "f1"];

fn metric_of(record: &MetricRecord, metric: &str) -> f64 {
    match metric {
        "auroc" => record.auroc,
        "auprc" => record.auprc,
        _ => record.f1,
    }
}

/// Records grouped per configuration, ordered by (radius, kind, id) when
/// the id follows the `kind-rN-pooling` convention, alphabetically
/// otherwise.
pub struct GroupedRecords {
    pub configs: Vec<String>,
    pub by_config: BTreeMap<String, Vec<MetricRecord>>,
}

fn config_sort_key(id: &str) -> (u8, usize, String) {
    let mut parts = id.split('-');
    let kind = parts.next().unwrap_or("");
    let radius = parts
        .next()
        .and_then(|p| p.strip_prefix('r'))
        .and_then(|r| r.parse::<u8>().ok());
    let kind_rank = ["ecfp", "bcfp", "concat", "hybrid"]
        .iter()
        .position(|&k| k == kind);
    match (radius, kind_rank) {
        (Some(r), Some(k)) => (r, k, id.to_string()),
        _ => (u8::MAX, usize::MAX, id.to_string()),
    }
}

pub fn group_records(records: &[MetricRecord]) -> GroupedRecords {
    let mut by_config: BTreeMap<String, Vec<MetricRecord>> = BTreeMap::new();
    for r in records {
        by_config
            .entry(r.config.clone())
            .or_default()
            .push(r.clone());
    }
    let mut configs: Vec<String> = by_config.keys().cloned().collect();
    configs.sort_by_key(|id| config_sort_key(id));
    GroupedRecords { configs, by_config }
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Render the per-configuration summary: `mean±std` per metric, three
/// decimals, best and worst mean marked per metric. Also returns a
/// warning when configurations have unequal record counts.
pub fn summary_table(grouped: &GroupedRecords) -> (String, Option<String>) {
    let mut means: BTreeMap<(&str, &str), (f64, f64)> = BTreeMap::new();
    for config in &grouped.configs {
        let records = &grouped.by_config[config];
        for metric in METRICS {
            let values: Vec<f64> = records.iter().map(|r| metric_of(r, metric)).collect();
            means.insert((config.as_str(), metric), mean_std(&values));
        }
    }

    let mut best: BTreeMap<&str, &str> = BTreeMap::new();
    let mut worst: BTreeMap<&str, &str> = BTreeMap::new();
    for metric in METRICS {
        let mut ranked: Vec<(&str, f64)> = grouped
            .configs
            .iter()
            .map(|c| (c.as_str(), means[&(c.as_str(), metric)].0))
            .collect();
        ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if let (Some(lo), Some(hi)) = (ranked.first(), ranked.last()) {
            worst.insert(metric, lo.0);
            best.insert(metric, hi.0);
        }
    }

    let width = grouped
        .configs
        .iter()
        .map(|c| c.len())
        .max()
        .unwrap_or(6)
        .max(6);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:width$}  {:>6}  {:>15}  {:>15}  {:>15}",
        "config", "n", "auroc", "auprc", "f1"
    );
    for config in &grouped.configs {
        let n = grouped.by_config[config].len();
        let _ = write!(out, "{config:width$}  {n:>6}");
        for metric in METRICS {
            let (mean, std) = means[&(config.as_str(), metric)];
            let mark = if best[metric] == config.as_str() {
                "*"
            } else if worst[metric] == config.as_str() {
                "!"
            } else {
                " "
            };
            let _ = write!(out, "  {:>14}{mark}", format!("{mean:.3}±{std:.3}"));
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "(* best mean, ! worst mean per metric)");

    let counts: Vec<usize> = grouped
        .configs
        .iter()
        .map(|c| grouped.by_config[c].len())
        .collect();
    let warning = if counts.iter().any(|&c| c != counts[0]) {
        Some("grid incomplete: configurations have unequal record counts".to_string())
    } else {
        None
    };
    (out, warning)
}

/// Tukey HSD across configurations for one metric. `None` when fewer
/// than two configurations are present.
pub fn tukey_for_metric(
    grouped: &GroupedRecords,
    metric: &str,
    alpha: f64,
) -> Option<(Vec<String>, TukeyResult)> {
    if grouped.configs.len() < 2 {
        return None;
    }
    let groups: Vec<Vec<f64>> = grouped
        .configs
        .iter()
        .map(|c| {
            grouped.by_config[c]
                .iter()
                .map(|r| metric_of(r, metric))
                .collect()
        })
        .collect();
    let result = tukey_hsd(&groups, alpha).ok()?;
    Some((grouped.configs.clone(), result))
}

/// Pairwise comparison CSV: metric,config_a,config_b,diff,q,p,significant.
pub fn tukey_csv(metric: &str, configs: &[String], result: &TukeyResult) -> String {
    let mut out = String::from("metric,config_a,config_b,diff,q,p,significant\n");
    for pair in &result.pairs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            metric,
            configs[pair.a],
            configs[pair.b],
            pair.mean_diff,
            pair.q,
            pair.p,
            pair.significant
        );
    }
    out
}

/// Box plot SVG for one metric, one box per configuration.
pub fn metric_box_plot(grouped: &GroupedRecords, metric: &str) -> String {
    let groups: Vec<(String, Vec<f64>)> = grouped
        .configs
        .iter()
        .map(|c| {
            (
                c.clone(),
                grouped.by_config[c]
                    .iter()
                    .map(|r| metric_of(r, metric))
                    .collect(),
            )
        })
        .collect();
    render_box_plot(&groups, &format!("{} by configuration", metric), metric)
}

/// Full report bundle written by `bcfp report`.
pub struct ReportFiles {
    pub summary: String,
    pub warning: Option<String>,
    /// (file name, contents) pairs.
    pub files: Vec<(String, String)>,
    pub tukey_skipped: bool,
}

pub fn build_report(records: &[MetricRecord], alpha: f64) -> Result<ReportFiles> {
    let grouped = group_records(records);
    let (summary, warning) = summary_table(&grouped);
    let mut files = Vec::new();
    let mut tukey_skipped = true;
    for metric in METRICS {
        if let Some((configs, result)) = tukey_for_metric(&grouped, metric, alpha) {
            files.push((
                format!("tukey_{metric}.csv"),
                tukey_csv(metric, &configs, &result),
            ));
            tukey_skipped = false;
        }
        files.push((
            format!("box_{metric}.svg"),
            metric_box_plot(&grouped, metric),
        ));
    }
    Ok(ReportFiles {
        summary,
        warning,
        files,
        tukey_skipped,
    })
}
