//! Experiment execution: replication loops, seeding, and truth runs.
//!
//! Every random stream is derived from `(base_seed, key, replication,
//! role)`, never from scheduler state, so results are byte-identical for
//! any worker count. Outcome-noise streams are keyed only by replication
//! index: all designs of a cell, and the paired ground-truth runs, replay
//! the same noise (common random numbers).

use rayon::prelude::*;

use crate::clustering::{epsilon_net_clustering, Clustering};
use crate::design::{draw_assignment, Assignment, Design};
use crate::error::{Error, Result};
use crate::estimators::{diff_in_means, exposure_diff_in_means, hajek, horvitz_thompson};
use crate::exposure::{
    effective_indicator, exposure_prob_brute_force, exposure_prob_cluster,
    exposure_prob_independent, ExposureProbabilities, ExposureSpec, Side,
};
use crate::graph::Graph;
use crate::outcomes::{simulate_with_noise, NoiseGrid, ResponseModel};
use crate::rng::{stream, StreamRole};

use super::config::{
    Cell, ClusteringConfig, DesignConfig, DesignKind, EstimatorInstance, EstimatorKind,
    ExperimentConfig, GraphMode, UndefinedPolicy,
};
use super::summary::{summarize, SummaryRow};

/// Bounded retries for the rerandomize policy.
const MAX_RERANDOMIZE: usize = 100;

/// Environment variable capping worker parallelism.
pub const WORKERS_ENV: &str = "NETEXP_WORKERS";

/// One estimator evaluation on one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRow {
    pub cell: Cell,
    pub replication: usize,
    pub design: String,
    pub estimator: String,
    pub estimate: Option<f64>,
}

/// Ground truth for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow {
    pub cell: Cell,
    pub ate: f64,
    pub se: f64,
    pub replications: usize,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub replications: Vec<ReplicationRow>,
    pub truths: Vec<TruthRow>,
    pub summaries: Vec<SummaryRow>,
}

/// Reads the worker cap from the environment.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w > 0)
}

/// Runs the full experiment with the environment-configured worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    run_experiment_with_workers(cfg, workers_from_env())
}

/// Runs the full experiment on a dedicated thread pool of `workers`
/// threads (or rayon's default when `None`).
pub fn run_experiment_with_workers(
    cfg: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<RunOutput> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("failed to build worker pool: {e}")))?;
    pool.install(|| run_inner(cfg))
}

/// Computes only the ground-truth table.
pub fn compute_truth(cfg: &ExperimentConfig) -> Result<Vec<TruthRow>> {
    cfg.validate()?;
    let cells = cfg.cells();
    cells.par_iter().map(|cell| cell_truth(cfg, cell)).collect()
}

fn run_inner(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let cells = cfg.cells();

    let truths: Vec<TruthRow> = cells
        .par_iter()
        .map(|cell| cell_truth(cfg, cell))
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.replications).map(move |r| (c, r)))
        .collect();
    let nested: Vec<Vec<ReplicationRow>> = tasks
        .par_iter()
        .map(|&(c, r)| run_replication(cfg, &cells[c], r))
        .collect::<Result<_>>()?;
    let replications: Vec<ReplicationRow> = nested.into_iter().flatten().collect();

    let summaries = summarize(cfg.baseline_design_name(), &replications, &truths)?;
    Ok(RunOutput {
        replications,
        truths,
        summaries,
    })
}

fn graph_key(cfg: &ExperimentConfig, cell: &Cell) -> String {
    // Keyed by the generator parameters only, so cells sharing a sweep
    // value also share graphs at equal replication index.
    format!("graph|{}", toml_free_label(cfg, cell))
}

fn toml_free_label(cfg: &ExperimentConfig, cell: &Cell) -> String {
    match &cfg.graph {
        super::config::GraphConfig::SmallWorld { n, k, .. } => {
            format!("small_world|n={n}|k={k}|p={}", cell.graph_param)
        }
        super::config::GraphConfig::Dcbm {
            n,
            communities,
            degree_mean,
            degree_variance,
            ..
        } => {
            format!(
                "dcbm|n={n}|comm={communities}|p={}|mean={degree_mean}|var={degree_variance}",
                cell.graph_param
            )
        }
    }
}

fn assignment_key(cell: &Cell, design: &DesignConfig) -> String {
    format!("assign|{}|design={}", cell.key(), design.name)
}

fn generate_graph(cfg: &ExperimentConfig, cell: &Cell, replication: usize) -> Result<Graph> {
    let rep = match cfg.graph_mode {
        GraphMode::PerReplication => replication,
        GraphMode::Fixed => 0,
    };
    let mut rng = stream(
        cfg.base_seed,
        &graph_key(cfg, cell),
        rep as u64,
        StreamRole::Graph,
    );
    cfg.graph.gen_spec(cell.graph_param).generate(&mut rng)
}

fn response_model(cfg: &ExperimentConfig, cell: &Cell) -> ResponseModel {
    ResponseModel {
        alpha: cfg.response.alpha,
        beta: cell.beta,
        gamma: cell.gamma,
        steps: cfg.response.steps,
        link: cfg.response.link.link_function(),
    }
}

fn noise_for(
    cfg: &ExperimentConfig,
    n: usize,
    replication: usize,
    role: StreamRole,
) -> Option<NoiseGrid> {
    let model_link = cfg.response.link.link_function();
    model_link.needs_noise().then(|| {
        let mut rng = stream(cfg.base_seed, "", replication as u64, role);
        NoiseGrid::sample(n, cfg.response.steps, &mut rng)
    })
}

/// Ground truth for one cell: paired global-treatment / global-control
/// simulations. When the truth replication count equals the estimator
/// replication count, truth runs share the per-replication graph and noise
/// streams with the estimator runs; otherwise they draw noise from the
/// dedicated truth role.
fn cell_truth(cfg: &ExperimentConfig, cell: &Cell) -> Result<TruthRow> {
    let reps = cfg.truth_replications();
    let paired = reps == cfg.replications;
    let model = response_model(cfg, cell);
    let diffs: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let graph = generate_graph(cfg, cell, r)?;
            let n = graph.vertex_count();
            let role = if paired {
                StreamRole::OutcomeNoise
            } else {
                StreamRole::Truth
            };
            let noise = noise_for(cfg, n, r, role);
            let ones = vec![1u8; n];
            let zeros = vec![0u8; n];
            let y1 = simulate_with_noise(&graph, &ones, &model, noise.as_ref());
            let y0 = simulate_with_noise(&graph, &zeros, &model, noise.as_ref());
            Ok(y1.mean_final() - y0.mean_final())
        })
        .collect::<Result<_>>()?;
    let (ate, se) = crate::outcomes::mean_and_standard_error(&diffs);
    Ok(TruthRow {
        cell: cell.clone(),
        ate,
        se,
        replications: reps,
    })
}

fn instantiate_design(
    cfg: &ExperimentConfig,
    design: &DesignConfig,
    graph: &Graph,
    rng: &mut rand_chacha::ChaCha12Rng,
) -> Result<(Design, Option<Clustering>)> {
    let n = graph.vertex_count();
    if design.kind == DesignKind::Independent {
        return Ok((Design::independent(n, design.q.unwrap())?, None));
    }
    let clustering = match cfg.clustering {
        ClusteringConfig::EpsilonNet { epsilon } => epsilon_net_clustering(graph, epsilon, rng),
        ClusteringConfig::Singleton => Clustering::singleton(n),
    };
    let design = match design.kind {
        DesignKind::Independent => unreachable!(),
        DesignKind::GraphCluster => Design::graph_cluster(clustering.clone(), design.q.unwrap())?,
        DesignKind::BalancedGraphCluster => Design::balanced_graph_cluster(clustering.clone())?,
        DesignKind::HolePunched => Design::hole_punched(
            clustering.clone(),
            design.q.unwrap(),
            design.cluster_q.clone(),
            design.eta.unwrap(),
        )?,
    };
    Ok((design, Some(clustering)))
}

/// Exposure probabilities for weighted estimators under a design:
/// closed form for independent assignment, the convolution dynamic program
/// under graph cluster randomization, and the enumeration oracle otherwise.
fn exposure_probabilities(
    graph: &Graph,
    design: &Design,
    spec: &ExposureSpec,
) -> Result<ExposureProbabilities> {
    match design {
        Design::Independent { q, .. } => exposure_prob_independent(graph, spec, *q),
        Design::GraphCluster { clustering, q } => {
            exposure_prob_cluster(graph, clustering, spec, *q)
        }
        Design::BalancedGraphCluster { .. } | Design::HolePunched { .. } => {
            exposure_prob_brute_force(graph, design, spec)
        }
    }
}

struct ExposureBundle {
    lambda: f64,
    ind1: Vec<bool>,
    ind0: Vec<bool>,
    pi: Option<ExposureProbabilities>,
}

fn run_replication(
    cfg: &ExperimentConfig,
    cell: &Cell,
    replication: usize,
) -> Result<Vec<ReplicationRow>> {
    let graph = generate_graph(cfg, cell, replication)?;
    let n = graph.vertex_count();
    let model = response_model(cfg, cell);
    let noise = noise_for(cfg, n, replication, StreamRole::OutcomeNoise);
    let instances = cfg.estimator_instances();
    let needs_weights = cfg.estimators.iter().any(|e| e.uses_weights());

    let mut rows = Vec::with_capacity(cfg.designs.len() * instances.len());
    for design_cfg in &cfg.designs {
        let mut rng = stream(
            cfg.base_seed,
            &assignment_key(cell, design_cfg),
            replication as u64,
            StreamRole::Assignment,
        );
        let (design, clustering) = instantiate_design(cfg, design_cfg, &graph, &mut rng)?;

        let mut attempt = 0;
        let estimates = loop {
            let assignment = draw_assignment(&design, &mut rng);
            let trajectory = simulate_with_noise(&graph, &assignment.z, &model, noise.as_ref());
            let y = trajectory.final_outcomes();

            let bundles = exposure_bundles(
                cfg,
                &graph,
                &design,
                clustering.as_ref(),
                &assignment,
                needs_weights,
            )?;
            let estimates = evaluate_instances(&instances, &graph, &assignment, y, &bundles)?;

            let any_undefined = estimates.iter().any(|e| e.is_none());
            if any_undefined
                && cfg.undefined_policy == UndefinedPolicy::Rerandomize
                && attempt < MAX_RERANDOMIZE
            {
                attempt += 1;
                continue;
            }
            break estimates;
        };

        for (instance, estimate) in instances.iter().zip(estimates) {
            rows.push(ReplicationRow {
                cell: cell.clone(),
                replication,
                design: design_cfg.name.clone(),
                estimator: instance.label(),
                estimate,
            });
        }
    }
    Ok(rows)
}

fn exposure_bundles(
    cfg: &ExperimentConfig,
    graph: &Graph,
    design: &Design,
    clustering: Option<&Clustering>,
    assignment: &Assignment,
    needs_weights: bool,
) -> Result<Vec<ExposureBundle>> {
    if !cfg.estimators.iter().any(|e| e.uses_exposure()) {
        return Ok(Vec::new());
    }
    let n = graph.vertex_count();
    cfg.exposure
        .lambdas
        .iter()
        .map(|&lambda| {
            let spec = ExposureSpec::Fntr { lambda };
            let flag = |side: Side| -> Vec<bool> {
                (0..n)
                    .map(|i| effective_indicator(&spec, graph, clustering, &assignment.z, side, i))
                    .collect()
            };
            let pi = if needs_weights {
                Some(exposure_probabilities(graph, design, &spec)?)
            } else {
                None
            };
            Ok(ExposureBundle {
                lambda,
                ind1: flag(Side::Treatment),
                ind0: flag(Side::Control),
                pi,
            })
        })
        .collect()
}

fn evaluate_instances(
    instances: &[EstimatorInstance],
    graph: &Graph,
    assignment: &Assignment,
    y: &[f64],
    bundles: &[ExposureBundle],
) -> Result<Vec<Option<f64>>> {
    instances
        .iter()
        .map(|instance| match instance {
            EstimatorInstance::DiffInMeans => Ok(diff_in_means(y, &assignment.z).estimate),
            EstimatorInstance::Exposure { kind, lambda } => {
                let bundle = bundles
                    .iter()
                    .find(|b| b.lambda == *lambda)
                    .expect("bundle exists for every configured lambda");
                match kind {
                    EstimatorKind::ExposureDiffInMeans => {
                        Ok(exposure_diff_in_means(y, &bundle.ind1, &bundle.ind0).estimate)
                    }
                    EstimatorKind::Hajek => {
                        let pi = bundle.pi.as_ref().expect("weights computed");
                        Ok(hajek(y, &bundle.ind1, &bundle.ind0, pi)?.estimate)
                    }
                    EstimatorKind::HorvitzThompson => {
                        let pi = bundle.pi.as_ref().expect("weights computed");
                        Ok(horvitz_thompson(
                            y,
                            &bundle.ind1,
                            &bundle.ind0,
                            pi,
                            graph.vertex_count(),
                        )?
                        .estimate)
                    }
                    EstimatorKind::DiffInMeans => unreachable!(),
                }
            }
        })
        .collect()
}
