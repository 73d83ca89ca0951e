//! Experiment configuration: a TOML document describing the full grid.
//!
//! Unknown keys are rejected. See `examples/headline.toml` in the
//! repository root for a complete config.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DcbmSpec, GraphGenSpec, SmallWorldSpec};
use crate::outcomes::LinkFunction;

/// How undefined estimates (an empty effective group) are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndefinedPolicy {
    /// Record the replication as undefined and exclude it from summaries
    /// (the count is always reported).
    #[default]
    Exclude,
    /// Redraw the assignment (keeping the replication's outcome noise)
    /// until every estimator is defined, up to a bounded retry count.
    Rerandomize,
}

/// Whether a fresh graph is generated for every replication or one graph
/// is drawn per cell and conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMode {
    #[default]
    PerReplication,
    Fixed,
}

/// Graph model and its sweep parameter grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphConfig {
    SmallWorld {
        n: usize,
        k: usize,
        /// Rewiring-probability grid; one cell per value.
        p_rewire: Vec<f64>,
    },
    Dcbm {
        n: usize,
        communities: usize,
        /// Within-community edge-proportion grid; one cell per value.
        p_within: Vec<f64>,
        degree_mean: f64,
        degree_variance: f64,
    },
}

impl GraphConfig {
    pub fn kind_label(&self) -> &'static str {
        match self {
            GraphConfig::SmallWorld { .. } => "small_world",
            GraphConfig::Dcbm { .. } => "dcbm",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            GraphConfig::SmallWorld { n, .. } | GraphConfig::Dcbm { n, .. } => *n,
        }
    }

    pub fn params(&self) -> &[f64] {
        match self {
            GraphConfig::SmallWorld { p_rewire, .. } => p_rewire,
            GraphConfig::Dcbm { p_within, .. } => p_within,
        }
    }

    /// The generator spec for one value of the sweep parameter.
    pub fn gen_spec(&self, param: f64) -> GraphGenSpec {
        match self {
            GraphConfig::SmallWorld { n, k, .. } => GraphGenSpec::SmallWorld(SmallWorldSpec {
                n: *n,
                k: *k,
                p_rewire: param,
            }),
            GraphConfig::Dcbm {
                n,
                communities,
                degree_mean,
                degree_variance,
                ..
            } => GraphGenSpec::Dcbm(DcbmSpec {
                n: *n,
                communities: *communities,
                p_within: param,
                degree_mean: *degree_mean,
                degree_variance: *degree_variance,
            }),
        }
    }
}

/// How cluster designs obtain their vertex partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClusteringConfig {
    EpsilonNet { epsilon: usize },
    Singleton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    Independent,
    GraphCluster,
    BalancedGraphCluster,
    HolePunched,
}

/// One randomization design to evaluate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    /// Label used in output tables.
    pub name: String,
    pub kind: DesignKind,
    /// Treatment probability; required except for the balanced design.
    #[serde(default)]
    pub q: Option<f64>,
    /// Keep probability for the hole-punched design.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Optional per-cluster treatment probabilities (hole-punched only).
    #[serde(default)]
    pub cluster_q: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Probit,
    Identity,
    IdentityNoiseless,
}

impl LinkKind {
    pub fn link_function(self) -> LinkFunction {
        match self {
            LinkKind::Probit => LinkFunction::ProbitThreshold,
            LinkKind::Identity => LinkFunction::Identity { noise: true },
            LinkKind::IdentityNoiseless => LinkFunction::Identity { noise: false },
        }
    }
}

/// Outcome-process parameter grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseConfig {
    pub alpha: f64,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub steps: usize,
    pub link: LinkKind,
}

/// Exposure-model settings for the neighborhood estimators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExposureConfig {
    /// Fractional-neighborhood thresholds; one estimator instance per value.
    pub lambdas: Vec<f64>,
}

impl Default for ExposureConfig {
    fn default() -> Self {
        ExposureConfig {
            lambdas: vec![0.75],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    DiffInMeans,
    ExposureDiffInMeans,
    Hajek,
    HorvitzThompson,
}

impl EstimatorKind {
    pub fn uses_exposure(self) -> bool {
        !matches!(self, EstimatorKind::DiffInMeans)
    }

    pub fn uses_weights(self) -> bool {
        matches!(self, EstimatorKind::Hajek | EstimatorKind::HorvitzThompson)
    }

    fn base_label(self) -> &'static str {
        match self {
            EstimatorKind::DiffInMeans => "diff_in_means",
            EstimatorKind::ExposureDiffInMeans => "exposure_diff_in_means",
            EstimatorKind::Hajek => "hajek",
            EstimatorKind::HorvitzThompson => "horvitz_thompson",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory receiving replications.csv, truth.csv, summary.csv,
    /// plot_data.csv, and run_metadata.json.
    pub dir: PathBuf,
}

/// A fully specified experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base_seed: u64,
    /// Estimator replications per cell and design.
    pub replications: usize,
    /// Ground-truth replications per cell; defaults to `replications`,
    /// which pairs truth runs with estimator runs on shared noise streams.
    #[serde(default)]
    pub truth_replications: Option<usize>,
    #[serde(default)]
    pub undefined_policy: UndefinedPolicy,
    #[serde(default)]
    pub graph_mode: GraphMode,
    /// Design whose difference-in-means RMSE anchors the percent-change
    /// column; defaults to the first independent design.
    #[serde(default)]
    pub baseline_design: Option<String>,
    pub graph: GraphConfig,
    pub clustering: ClusteringConfig,
    pub designs: Vec<DesignConfig>,
    pub response: ResponseConfig,
    #[serde(default)]
    pub exposure: ExposureConfig,
    pub estimators: Vec<EstimatorKind>,
    pub output: OutputConfig,
}

/// One point of the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub graph_kind: &'static str,
    pub graph_param: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Cell {
    /// Canonical key identifying the cell in seed derivation and sorting.
    pub fn key(&self) -> String {
        format!(
            "{}|p={}|beta={}|gamma={}",
            self.graph_kind, self.graph_param, self.beta, self.gamma
        )
    }

    pub fn sort_key(&self) -> (f64, f64, f64) {
        (self.graph_param, self.beta, self.gamma)
    }
}

/// One estimator instance as it appears in output tables: the plain
/// difference in means, or an exposure-based estimator at a given lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorInstance {
    DiffInMeans,
    Exposure { kind: EstimatorKind, lambda: f64 },
}

impl EstimatorInstance {
    pub fn label(&self) -> String {
        match self {
            EstimatorInstance::DiffInMeans => "diff_in_means".into(),
            EstimatorInstance::Exposure { kind, lambda } => {
                format!("{}({})", kind.base_label(), lambda)
            }
        }
    }
}

fn check_grid(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{name} grid must not be empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!(
            "{name} grid contains a non-finite value"
        )));
    }
    for (i, a) in values.iter().enumerate() {
        if values[i + 1..].contains(a) {
            return Err(Error::Config(format!(
                "{name} grid contains duplicate value {a}"
            )));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn truth_replications(&self) -> usize {
        self.truth_replications.unwrap_or(self.replications)
    }

    /// The grid cells in canonical order (sweep parameter, beta, gamma).
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &p in self.graph.params() {
            for &beta in &self.response.beta {
                for &gamma in &self.response.gamma {
                    cells.push(Cell {
                        graph_kind: self.graph.kind_label(),
                        graph_param: p,
                        beta,
                        gamma,
                    });
                }
            }
        }
        cells.sort_by(|a, b| {
            let (ap, ab, ag) = a.sort_key();
            let (bp, bb, bg) = b.sort_key();
            ap.total_cmp(&bp)
                .then(ab.total_cmp(&bb))
                .then(ag.total_cmp(&bg))
        });
        cells
    }

    /// Estimator instances in output order.
    pub fn estimator_instances(&self) -> Vec<EstimatorInstance> {
        let mut out = Vec::new();
        for &kind in &self.estimators {
            if kind.uses_exposure() {
                for &lambda in &self.exposure.lambdas {
                    out.push(EstimatorInstance::Exposure { kind, lambda });
                }
            } else {
                out.push(EstimatorInstance::DiffInMeans);
            }
        }
        out
    }

    /// The design anchoring percent-change-in-RMSE columns, if any.
    pub fn baseline_design_name(&self) -> Option<&str> {
        if let Some(name) = &self.baseline_design {
            return Some(name);
        }
        self.designs
            .iter()
            .find(|d| d.kind == DesignKind::Independent)
            .map(|d| d.name.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.truth_replications() < 1 {
            return Err(Error::Config(
                "truth_replications must be at least 1".into(),
            ));
        }

        check_grid("graph parameter", self.graph.params())?;
        for &p in self.graph.params() {
            match self.graph.gen_spec(p) {
                GraphGenSpec::SmallWorld(s) => s.validate()?,
                GraphGenSpec::Dcbm(s) => s.validate()?,
            }
        }

        if let ClusteringConfig::EpsilonNet { epsilon } = self.clustering {
            if epsilon < 1 {
                return Err(Error::Config("epsilon must be at least 1".into()));
            }
        }

        if self.designs.is_empty() {
            return Err(Error::Config("at least one design is required".into()));
        }
        for (i, d) in self.designs.iter().enumerate() {
            if d.name.trim().is_empty() {
                return Err(Error::Config(format!("design {i} has an empty name")));
            }
            if self.designs[i + 1..]
                .iter()
                .any(|other| other.name == d.name)
            {
                return Err(Error::Config(format!("duplicate design name {:?}", d.name)));
            }
            match d.kind {
                DesignKind::BalancedGraphCluster => {
                    if d.q.is_some() {
                        return Err(Error::Config(format!(
                            "design {:?}: the balanced design has no treatment probability",
                            d.name
                        )));
                    }
                }
                _ => {
                    let q = d
                        .q
                        .ok_or_else(|| Error::Config(format!("design {:?} requires q", d.name)))?;
                    if !(q > 0.0 && q < 1.0) {
                        return Err(Error::Config(format!(
                            "design {:?}: q must lie in (0, 1)",
                            d.name
                        )));
                    }
                }
            }
            if d.kind == DesignKind::HolePunched {
                let eta = d
                    .eta
                    .ok_or_else(|| Error::Config(format!("design {:?} requires eta", d.name)))?;
                if !(0.0..=1.0).contains(&eta) {
                    return Err(Error::Config(format!(
                        "design {:?}: eta must lie in [0, 1]",
                        d.name
                    )));
                }
            } else if d.eta.is_some() {
                return Err(Error::Config(format!(
                    "design {:?}: eta only applies to hole-punched designs",
                    d.name
                )));
            }
            if d.cluster_q.is_some() && d.kind != DesignKind::HolePunched {
                return Err(Error::Config(format!(
                    "design {:?}: cluster_q only applies to hole-punched designs",
                    d.name
                )));
            }
            if d.kind != DesignKind::Independent
                && matches!(self.clustering, ClusteringConfig::Singleton)
                && d.kind == DesignKind::BalancedGraphCluster
                && self.graph.n() % 2 != 0
            {
                return Err(Error::Config(format!(
                    "design {:?}: balanced singleton design needs an even vertex count",
                    d.name
                )));
            }
        }

        check_grid("beta", &self.response.beta)?;
        check_grid("gamma", &self.response.gamma)?;
        if self.response.steps < 1 {
            return Err(Error::Config(
                "the outcome process needs at least one step".into(),
            ));
        }
        if !self.response.alpha.is_finite() {
            return Err(Error::Config("alpha must be finite".into()));
        }

        if self.estimators.is_empty() {
            return Err(Error::Config("at least one estimator is required".into()));
        }
        let needs_exposure = self.estimators.iter().any(|e| e.uses_exposure());
        if needs_exposure {
            check_grid("lambda", &self.exposure.lambdas)?;
            if self
                .exposure
                .lambdas
                .iter()
                .any(|l| !(0.0..=1.0).contains(l))
            {
                return Err(Error::Config("lambdas must lie in [0, 1]".into()));
            }
        }

        // Weighted estimators require exact exposure probabilities, which
        // are available in closed form only for independent and
        // graph-cluster designs; other designs fall back to the
        // enumeration oracle and fail cleanly when it is infeasible.
        let weighted = self.estimators.iter().any(|e| e.uses_weights());
        if weighted {
            for d in &self.designs {
                let enumerable = match d.kind {
                    DesignKind::Independent | DesignKind::GraphCluster => true,
                    DesignKind::BalancedGraphCluster | DesignKind::HolePunched => {
                        !matches!(self.clustering, ClusteringConfig::Singleton)
                            || self.graph.n() <= 20
                    }
                };
                if !enumerable {
                    return Err(Error::Config(format!(
                        "design {:?}: weighted estimators under this design need the \
                         enumeration oracle, which is infeasible at this size",
                        d.name
                    )));
                }
            }
        }

        if let Some(name) = &self.baseline_design {
            if !self.designs.iter().any(|d| &d.name == name) {
                return Err(Error::Config(format!(
                    "baseline design {name:?} is not among the configured designs"
                )));
            }
        }

        if self.output.dir.as_os_str().is_empty() {
            return Err(Error::Config("output.dir must not be empty".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = r#"
base_seed = 42
replications = 10
estimators = ["diff_in_means", "exposure_diff_in_means", "hajek"]

[graph]
kind = "small_world"
n = 50
k = 4
p_rewire = [0.1]

[clustering]
method = "epsilon_net"
epsilon = 2

[[designs]]
name = "gcr"
kind = "graph_cluster"
q = 0.5

[[designs]]
name = "ind"
kind = "independent"
q = 0.5

[response]
alpha = -1.5
beta = [0.5]
gamma = [0.5]
steps = 3
link = "probit"

[exposure]
lambdas = [0.75]

[output]
dir = "results"
"#;

    #[test]
    fn sample_config_parses_and_validates() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.cells().len(), 1);
        assert_eq!(cfg.estimator_instances().len(), 3);
        assert_eq!(cfg.baseline_design_name(), Some("ind"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = SAMPLE.replace("base_seed = 42", "base_seed = 42\nbogus_key = 1");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.replications = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.designs[0].q = Some(1.5);
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.response.beta = vec![0.5, 0.5];
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.baseline_design = Some("nope".into());
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.designs[1].name = "gcr".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn cells_are_sorted_canonically() {
        let mut cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        if let GraphConfig::SmallWorld { p_rewire, .. } = &mut cfg.graph {
            *p_rewire = vec![0.5, 0.0];
        }
        cfg.response.beta = vec![1.0, 0.0];
        cfg.response.gamma = vec![0.75, 0.25];
        let cells = cfg.cells();
        assert_eq!(cells.len(), 8);
        let mut sorted = cells.clone();
        sorted.sort_by(|a, b| {
            let (ap, ab, ag) = a.sort_key();
            let (bp, bb, bg) = b.sort_key();
            ap.total_cmp(&bp)
                .then(ab.total_cmp(&bb))
                .then(ag.total_cmp(&bg))
        });
        assert_eq!(cells, sorted);
        assert_eq!(cells[0].graph_param, 0.0);
        assert_eq!(cells[0].beta, 0.0);
        assert_eq!(cells[0].gamma, 0.25);
    }

    #[test]
    fn estimator_labels_carry_lambda() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let labels: Vec<String> = cfg
            .estimator_instances()
            .iter()
            .map(|e| e.label())
            .collect();
        assert_eq!(
            labels,
            vec![
                "diff_in_means",
                "exposure_diff_in_means(0.75)",
                "hajek(0.75)"
            ]
        );
    }
}
