//! Run artifacts on disk: per-replication and truth CSVs, summaries,
//! long-format plot data, and run metadata.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! re-reading a CSV reproduces the exact values and re-running with the
//! same seed reproduces the exact bytes.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::RNG_NAME;

use super::config::{Cell, ExperimentConfig};
use super::runner::{ReplicationRow, RunOutput, TruthRow};
use super::summary::SummaryRow;

pub const REPLICATIONS_FILE: &str = "replications.csv";
pub const TRUTH_FILE: &str = "truth.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PLOT_DATA_FILE: &str = "plot_data.csv";
pub const METADATA_FILE: &str = "run_metadata.json";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes every artifact of a run into the config's output directory.
pub fn write_run_output(cfg: &ExperimentConfig, out: &RunOutput) -> Result<()> {
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir)?;
    write_replications_csv(&out.replications, &dir.join(REPLICATIONS_FILE))?;
    write_truth_csv(&out.truths, &dir.join(TRUTH_FILE))?;
    write_summary_csv(&out.summaries, &dir.join(SUMMARY_FILE))?;
    write_plot_data_csv(&out.summaries, &dir.join(PLOT_DATA_FILE))?;
    write_metadata(cfg, &dir.join(METADATA_FILE))?;
    Ok(())
}

pub fn write_replications_csv(rows: &[ReplicationRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "graph_kind",
        "graph_param",
        "beta",
        "gamma",
        "replication",
        "design",
        "estimator",
        "estimate",
        "defined",
    ])?;
    for r in rows {
        w.write_record([
            r.cell.graph_kind.to_string(),
            r.cell.graph_param.to_string(),
            r.cell.beta.to_string(),
            r.cell.gamma.to_string(),
            r.replication.to_string(),
            r.design.clone(),
            r.estimator.clone(),
            fmt_opt(r.estimate),
            r.estimate.is_some().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number {field:?}"),
    })
}

fn intern_kind(kind: &str, line: usize) -> Result<&'static str> {
    match kind {
        "small_world" => Ok("small_world"),
        "dcbm" => Ok("dcbm"),
        other => Err(Error::Parse {
            line,
            message: format!("unknown graph kind {other:?}"),
        }),
    }
}

pub fn read_replications_csv(path: &Path) -> Result<Vec<ReplicationRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record?;
        if record.len() != 9 {
            return Err(Error::Parse {
                line,
                message: "expected 9 columns".into(),
            });
        }
        let estimate = if record[8].trim() == "true" {
            Some(parse_f64(&record[7], line)?)
        } else {
            None
        };
        rows.push(ReplicationRow {
            cell: Cell {
                graph_kind: intern_kind(&record[0], line)?,
                graph_param: parse_f64(&record[1], line)?,
                beta: parse_f64(&record[2], line)?,
                gamma: parse_f64(&record[3], line)?,
            },
            replication: record[4].parse().map_err(|_| Error::Parse {
                line,
                message: "invalid replication".into(),
            })?,
            design: record[5].to_string(),
            estimator: record[6].to_string(),
            estimate,
        });
    }
    Ok(rows)
}

pub fn write_truth_csv(rows: &[TruthRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "graph_kind",
        "graph_param",
        "beta",
        "gamma",
        "ate",
        "se",
        "replications",
    ])?;
    for r in rows {
        w.write_record([
            r.cell.graph_kind.to_string(),
            r.cell.graph_param.to_string(),
            r.cell.beta.to_string(),
            r.cell.gamma.to_string(),
            r.ate.to_string(),
            r.se.to_string(),
            r.replications.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_truth_csv(path: &Path) -> Result<Vec<TruthRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record?;
        if record.len() != 7 {
            return Err(Error::Parse {
                line,
                message: "expected 7 columns".into(),
            });
        }
        rows.push(TruthRow {
            cell: Cell {
                graph_kind: intern_kind(&record[0], line)?,
                graph_param: parse_f64(&record[1], line)?,
                beta: parse_f64(&record[2], line)?,
                gamma: parse_f64(&record[3], line)?,
            },
            ate: parse_f64(&record[4], line)?,
            se: parse_f64(&record[5], line)?,
            replications: record[6].parse().map_err(|_| Error::Parse {
                line,
                message: "invalid replications".into(),
            })?,
        });
    }
    Ok(rows)
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "graph_kind",
        "graph_param",
        "beta",
        "gamma",
        "design",
        "estimator",
        "truth",
        "truth_se",
        "n_replications",
        "n_undefined",
        "mean_estimate",
        "bias",
        "relative_bias",
        "variance",
        "rmse",
        "pct_change_rmse",
    ])?;
    for r in rows {
        w.write_record([
            r.graph_kind.clone(),
            r.graph_param.to_string(),
            r.beta.to_string(),
            r.gamma.to_string(),
            r.design.clone(),
            r.estimator.clone(),
            r.truth.to_string(),
            r.truth_se.to_string(),
            r.n_replications.to_string(),
            r.n_undefined.to_string(),
            fmt_opt(r.mean_estimate),
            fmt_opt(r.bias),
            fmt_opt(r.relative_bias),
            fmt_opt(r.variance),
            fmt_opt(r.rmse),
            fmt_opt(r.pct_change_rmse),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format plot data keyed by `(graph_param, beta, gamma, design,
/// estimator)` with one row per metric.
pub fn write_plot_data_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "graph_kind",
        "graph_param",
        "beta",
        "gamma",
        "design",
        "estimator",
        "metric",
        "value",
    ])?;
    for r in rows {
        let metrics: [(&str, Option<f64>); 7] = [
            ("truth", Some(r.truth)),
            ("mean_estimate", r.mean_estimate),
            ("bias", r.bias),
            ("relative_bias", r.relative_bias),
            ("variance", r.variance),
            ("rmse", r.rmse),
            ("pct_change_rmse", r.pct_change_rmse),
        ];
        for (metric, value) in metrics {
            let Some(value) = value else { continue };
            w.write_record([
                r.graph_kind.clone(),
                r.graph_param.to_string(),
                r.beta.to_string(),
                r.gamma.to_string(),
                r.design.clone(),
                r.estimator.clone(),
                metric.to_string(),
                value.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_metadata(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let meta = serde_json::json!({
        "artifact": "netexp",
        "version": env!("CARGO_PKG_VERSION"),
        "rng": RNG_NAME,
        "base_seed": cfg.base_seed,
        "replications": cfg.replications,
        "truth_replications": cfg.truth_replications(),
        "cells": cfg.cells().len(),
        "designs": cfg.designs.iter().map(|d| d.name.clone()).collect::<Vec<_>>(),
        "estimators": cfg.estimator_instances().iter().map(|e| e.label()).collect::<Vec<_>>(),
        "config": serde_json::to_value(cfg).expect("config serializes"),
    });
    fs::write(
        path,
        serde_json::to_string_pretty(&meta).expect("metadata serializes"),
    )?;
    Ok(())
}

/// Recovers the configuration echoed into a run's metadata file.
pub fn read_metadata_config(dir: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(dir.join(METADATA_FILE))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad metadata: {e}")))?;
    serde_json::from_value(value["config"].clone())
        .map_err(|e| Error::Config(format!("bad config echo in metadata: {e}")))
}

/// Recomputes summaries and plot data from a results directory containing
/// `replications.csv`, `truth.csv`, and `run_metadata.json`. Returns the
/// summary rows.
pub fn report_from_dir(dir: &Path) -> Result<Vec<SummaryRow>> {
    let cfg = read_metadata_config(dir)?;
    let replications = read_replications_csv(&dir.join(REPLICATIONS_FILE))?;
    let truths = read_truth_csv(&dir.join(TRUTH_FILE))?;
    let summaries = super::summary::summarize(cfg.baseline_design_name(), &replications, &truths)?;
    write_summary_csv(&summaries, &dir.join(SUMMARY_FILE))?;
    write_plot_data_csv(&summaries, &dir.join(PLOT_DATA_FILE))?;
    Ok(summaries)
}
