//! Aggregation of per-replication estimates into bias/RMSE summaries.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::runner::{ReplicationRow, TruthRow};

/// Summary of one (cell, design, estimator) series.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub graph_kind: String,
    pub graph_param: f64,
    pub beta: f64,
    pub gamma: f64,
    pub design: String,
    pub estimator: String,
    pub truth: f64,
    pub truth_se: f64,
    pub n_replications: usize,
    pub n_undefined: usize,
    /// The remaining fields are `None` when every replication was undefined.
    pub mean_estimate: Option<f64>,
    pub bias: Option<f64>,
    /// Emitted only when the truth is nonzero.
    pub relative_bias: Option<f64>,
    /// Population variance of the defined estimates, so that
    /// `rmse^2 = bias^2 + variance` holds exactly.
    pub variance: Option<f64>,
    pub rmse: Option<f64>,
    /// Percent change in RMSE against the baseline series of the same cell.
    pub pct_change_rmse: Option<f64>,
}

fn float_key(v: f64) -> u64 {
    v.to_bits()
}

type SeriesKey = (String, u64, u64, u64, String, String);

fn series_key(row: &ReplicationRow) -> SeriesKey {
    (
        row.cell.graph_kind.to_string(),
        float_key(row.cell.graph_param),
        float_key(row.cell.beta),
        float_key(row.cell.gamma),
        row.design.clone(),
        row.estimator.clone(),
    )
}

/// Aggregates replication rows against the truth table.
///
/// Undefined replications are counted and excluded from the moments. Bias
/// is `mean - truth`; RMSE is the root of the mean squared error about the
/// truth; the percent-change column compares each series' RMSE with the
/// baseline series (`baseline_design` + plain difference in means) of the
/// same cell.
pub fn summarize(
    baseline_design: Option<&str>,
    replications: &[ReplicationRow],
    truths: &[TruthRow],
) -> Result<Vec<SummaryRow>> {
    let truth_by_cell: BTreeMap<(String, u64, u64, u64), &TruthRow> = truths
        .iter()
        .map(|t| {
            (
                (
                    t.cell.graph_kind.to_string(),
                    float_key(t.cell.graph_param),
                    float_key(t.cell.beta),
                    float_key(t.cell.gamma),
                ),
                t,
            )
        })
        .collect();

    let mut series: BTreeMap<SeriesKey, Vec<Option<f64>>> = BTreeMap::new();
    let mut order: Vec<SeriesKey> = Vec::new();
    for row in replications {
        let key = series_key(row);
        if !series.contains_key(&key) {
            order.push(key.clone());
        }
        series.entry(key).or_default().push(row.estimate);
    }

    let mut rows = Vec::with_capacity(order.len());
    for key in &order {
        let estimates = &series[key];
        let (graph_kind, p_bits, b_bits, g_bits, design, estimator) = key.clone();
        let cell_key = (graph_kind.clone(), p_bits, b_bits, g_bits);
        let truth = truth_by_cell.get(&cell_key).ok_or_else(|| {
            Error::Config(format!(
                "no truth row for cell {graph_kind} p={} beta={} gamma={}",
                f64::from_bits(p_bits),
                f64::from_bits(b_bits),
                f64::from_bits(g_bits)
            ))
        })?;

        let defined: Vec<f64> = estimates.iter().filter_map(|e| *e).collect();
        let n_total = estimates.len();
        let n_undefined = n_total - defined.len();

        let (mean_estimate, bias, relative_bias, variance, rmse) = if defined.is_empty() {
            (None, None, None, None, None)
        } else {
            let m = defined.iter().sum::<f64>() / defined.len() as f64;
            let bias = m - truth.ate;
            let variance =
                defined.iter().map(|e| (e - m).powi(2)).sum::<f64>() / defined.len() as f64;
            let mse =
                defined.iter().map(|e| (e - truth.ate).powi(2)).sum::<f64>() / defined.len() as f64;
            let rel = (truth.ate != 0.0).then(|| bias / truth.ate);
            (Some(m), Some(bias), rel, Some(variance), Some(mse.sqrt()))
        };

        rows.push(SummaryRow {
            graph_kind,
            graph_param: f64::from_bits(p_bits),
            beta: f64::from_bits(b_bits),
            gamma: f64::from_bits(g_bits),
            design,
            estimator,
            truth: truth.ate,
            truth_se: truth.se,
            n_replications: n_total,
            n_undefined,
            mean_estimate,
            bias,
            relative_bias,
            variance,
            rmse,
            pct_change_rmse: None,
        });
    }

    // Percent change in RMSE against the baseline series of each cell.
    if let Some(baseline_design) = baseline_design {
        let baseline_rmse: BTreeMap<(String, u64, u64, u64), f64> = rows
            .iter()
            .filter(|r| r.design == baseline_design && r.estimator == "diff_in_means")
            .filter_map(|r| {
                r.rmse.map(|rmse| {
                    (
                        (
                            r.graph_kind.clone(),
                            float_key(r.graph_param),
                            float_key(r.beta),
                            float_key(r.gamma),
                        ),
                        rmse,
                    )
                })
            })
            .collect();
        for row in &mut rows {
            let key = (
                row.graph_kind.clone(),
                float_key(row.graph_param),
                float_key(row.beta),
                float_key(row.gamma),
            );
            if let (Some(rmse), Some(&base)) = (row.rmse, baseline_rmse.get(&key)) {
                if base > 0.0 {
                    row.pct_change_rmse = Some(100.0 * (rmse / base - 1.0));
                }
            }
        }
    }

    Ok(rows)
}
