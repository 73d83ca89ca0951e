//! Closed-form linear-outcome oracle and brute-force estimand evaluation.
//!
//! For linear outcome models `E[Y_i(z)] = a_i + sum_j B_ij z_j` the true
//! average treatment effect and the design-conditioned estimands have exact
//! expressions; this module provides them, the construction of the linear
//! model implied by the identity-link outcome process, relative-bias
//! formulas, and an exhaustive-enumeration estimand evaluator for arbitrary
//! small designs and exposure conditions.

use crate::clustering::Clustering;
use crate::design::{enumerate_assignments, Design};
use crate::error::{Error, Result};
use crate::exposure::{effective_indicator, ExposureSpec, Side, ENUMERATION_LIMIT};
use crate::graph::Graph;

/// Linear outcome model: `E[Y_i(z)] = intercept_i + sum_j coefficients[i][j] * z_j`.
#[derive(Debug, Clone)]
pub struct LinearOutcomeModel {
    pub intercept: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
}

impl LinearOutcomeModel {
    pub fn n(&self) -> usize {
        self.intercept.len()
    }

    /// Expected outcomes under assignment `z`.
    pub fn mean_outcomes(&self, z: &[u8]) -> Vec<f64> {
        assert_eq!(z.len(), self.n());
        self.intercept
            .iter()
            .zip(&self.coefficients)
            .map(|(a, row)| {
                a + row
                    .iter()
                    .zip(z)
                    .map(|(b, &zj)| b * f64::from(zj))
                    .sum::<f64>()
            })
            .collect()
    }
}

/// Applies the peer operator `gamma * D^{-1} A` to each row-vector of `m`
/// (rows of isolated vertices map to zero).
fn peer_apply_matrix(g: &Graph, gamma: f64, m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        let nb = g.neighbors(i);
        if nb.is_empty() {
            continue;
        }
        let scale = gamma / nb.len() as f64;
        for &j in nb {
            for c in 0..n {
                out[i][c] += scale * m[j][c];
            }
        }
    }
    out
}

fn peer_apply_vector(g: &Graph, gamma: f64, v: &[f64]) -> Vec<f64> {
    let n = g.vertex_count();
    (0..n)
        .map(|i| {
            let nb = g.neighbors(i);
            if nb.is_empty() {
                0.0
            } else {
                gamma / nb.len() as f64 * nb.iter().map(|&j| v[j]).sum::<f64>()
            }
        })
        .collect()
}

/// The linear outcome model realized by `steps` iterations of the
/// identity-link process: with peer operator `P = gamma * D^{-1} A`,
/// `B = beta * sum_{q=0}^{steps-1} P^q` and
/// `a = alpha * (sum_{q=0}^{steps-1} P^q) 1 + P^steps * E[Y_0]`.
///
/// Powers are accumulated by repeated sparse application, so `gamma = 1`
/// and isolated vertices need no special casing.
pub fn linear_in_means_model(
    g: &Graph,
    alpha: f64,
    beta: f64,
    gamma: f64,
    steps: usize,
    ey0: &[f64],
) -> LinearOutcomeModel {
    assert!(steps >= 1, "the process needs at least one time step");
    let n = g.vertex_count();
    assert_eq!(ey0.len(), n);

    let mut power: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(i == j)).collect())
        .collect();
    let mut series = power.clone();
    for _ in 1..steps {
        power = peer_apply_matrix(g, gamma, &power);
        for i in 0..n {
            for j in 0..n {
                series[i][j] += power[i][j];
            }
        }
    }

    let coefficients: Vec<Vec<f64>> = series
        .iter()
        .map(|row| row.iter().map(|s| beta * s).collect())
        .collect();

    let mut tail = ey0.to_vec();
    for _ in 0..steps {
        tail = peer_apply_vector(g, gamma, &tail);
    }
    let intercept: Vec<f64> = series
        .iter()
        .zip(&tail)
        .map(|(row, t)| alpha * row.iter().sum::<f64>() + t)
        .collect();

    LinearOutcomeModel {
        intercept,
        coefficients,
    }
}

/// True average treatment effect of the linear model: `(1/N) sum_ij B_ij`.
pub fn true_ate_linear(model: &LinearOutcomeModel) -> f64 {
    let n = model.n();
    model
        .coefficients
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .sum::<f64>()
        / n as f64
}

/// Design selector for the closed-form difference-in-means estimands.
#[derive(Debug, Clone, Copy)]
pub enum EstimandDesign<'a> {
    /// Independent Bernoulli assignment.
    Independent,
    /// Graph cluster randomization with iid Bernoulli cluster assignment.
    GraphCluster(&'a Clustering),
    /// Balanced graph cluster randomization (half the clusters treated);
    /// the closed form requires equal cluster sizes.
    BalancedGraphCluster(&'a Clustering),
    /// Balanced independent assignment (every vertex its own cluster).
    BalancedIndependent,
}

/// Closed-form value of the individualistic difference-in-means estimand
/// `tau_ITR(1, 0)` under the given design:
///
/// * independent: `(1/N) sum_i B_ii`
/// * graph cluster: `(1/N) sum_ij B_ij 1[C(i) = C(j)]`
/// * balanced graph cluster:
///   `(1/N) sum_ij B_ij (1[C(i) = C(j)] - 1[C(i) != C(j)] / (N_C - 1))`
/// * balanced independent: the cluster count equals `N` in the above.
pub fn estimand_itr(model: &LinearOutcomeModel, design: EstimandDesign) -> Result<f64> {
    let n = model.n();
    let b = &model.coefficients;
    match design {
        EstimandDesign::Independent => Ok((0..n).map(|i| b[i][i]).sum::<f64>() / n as f64),
        EstimandDesign::GraphCluster(clustering) => {
            check_clustering(clustering, n)?;
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if clustering.cluster_of(i) == clustering.cluster_of(j) {
                        acc += b[i][j];
                    }
                }
            }
            Ok(acc / n as f64)
        }
        EstimandDesign::BalancedGraphCluster(clustering) => {
            check_clustering(clustering, n)?;
            let nc = clustering.n_clusters();
            if nc % 2 != 0 {
                return Err(Error::EstimandScope(format!(
                    "balanced design requires an even cluster count, got {nc}"
                )));
            }
            let sizes = clustering.cluster_sizes();
            if sizes.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::EstimandScope(
                    "the balanced closed form requires equal cluster sizes".into(),
                ));
            }
            let cross = -1.0 / (nc - 1) as f64;
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if clustering.cluster_of(i) == clustering.cluster_of(j) {
                        acc += b[i][j];
                    } else {
                        acc += b[i][j] * cross;
                    }
                }
            }
            Ok(acc / n as f64)
        }
        EstimandDesign::BalancedIndependent => {
            if n < 2 {
                return Err(Error::EstimandScope(
                    "balanced independent assignment needs at least two vertices".into(),
                ));
            }
            let cross = -1.0 / (n - 1) as f64;
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += if i == j { b[i][j] } else { b[i][j] * cross };
                }
            }
            Ok(acc / n as f64)
        }
    }
}

fn check_clustering(clustering: &Clustering, n: usize) -> Result<()> {
    if clustering.len() != n {
        return Err(Error::InvalidClustering(format!(
            "clustering covers {} vertices, model has {n}",
            clustering.len()
        )));
    }
    Ok(())
}

/// Relative bias of the cluster-randomized estimand:
/// `sum(within-cluster B) / sum(B) - 1`, multiplied by
/// `1 + 1 / (N_C - 1)` for the balanced design. Errors when the true
/// effect `sum(B)` is zero, where relative bias is undefined.
pub fn relative_bias(
    model: &LinearOutcomeModel,
    clustering: &Clustering,
    balanced: bool,
) -> Result<f64> {
    let n = model.n();
    check_clustering(clustering, n)?;
    let b = &model.coefficients;
    let mut within = 0.0;
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += b[i][j];
            if clustering.cluster_of(i) == clustering.cluster_of(j) {
                within += b[i][j];
            }
        }
    }
    if total == 0.0 {
        return Err(Error::EstimandScope(
            "relative bias is undefined when the true effect is zero".into(),
        ));
    }
    let base = within / total - 1.0;
    if balanced {
        let nc = clustering.n_clusters();
        if nc < 2 {
            return Err(Error::EstimandScope(
                "balanced relative bias requires at least two clusters".into(),
            ));
        }
        Ok((1.0 + 1.0 / (nc - 1) as f64) * base)
    } else {
        Ok(base)
    }
}

/// Exhaustive-enumeration evaluation of the effective-treatment estimand
/// for one side of the contrast.
#[derive(Debug, Clone)]
pub struct BruteForceEstimand {
    /// `mu^d_g(side)`: the population mean of the per-vertex conditional
    /// expectations.
    pub mu: f64,
    /// `E^d[Y_i | g_i(Z) = g_i(side)]` per vertex.
    pub conditional_means: Vec<f64>,
    /// Per-vertex bias contributions
    /// `E^d[Y_i - Y_i(side-global) | g_i(Z) = g_i(side)]`.
    pub bias_contributions: Vec<f64>,
}

/// Computes `mu^d_g(side)` exactly by enumerating the design's support.
///
/// `mean_outcomes` must return the per-vertex expected outcomes for an
/// assignment; for linear models this is exact, for stochastic processes
/// callers may pass a high-replication Monte Carlo average. A vertex whose
/// exposure condition has probability zero under the design is an error.
pub fn estimand_brute_force<F>(
    g: &Graph,
    design: &Design,
    spec: &ExposureSpec,
    mean_outcomes: F,
    side: Side,
) -> Result<BruteForceEstimand>
where
    F: Fn(&[u8]) -> Vec<f64>,
{
    spec.validate()?;
    let n = g.vertex_count();
    if design.n() != n {
        return Err(Error::InconsistentAssignment(format!(
            "design covers {} vertices, graph has {n}",
            design.n()
        )));
    }
    let clustering = design.clustering();
    let support = enumerate_assignments(design, ENUMERATION_LIMIT)?;

    let mut weighted = vec![0.0; n];
    let mut mass = vec![0.0; n];
    for (assignment, prob) in &support {
        if *prob == 0.0 {
            continue;
        }
        let means = mean_outcomes(&assignment.z);
        debug_assert_eq!(means.len(), n);
        for i in 0..n {
            if effective_indicator(spec, g, clustering, &assignment.z, side, i) {
                weighted[i] += prob * means[i];
                mass[i] += prob;
            }
        }
    }

    let global = vec![side.bit(); n];
    let global_means = mean_outcomes(&global);

    let mut conditional_means = Vec::with_capacity(n);
    let mut bias_contributions = Vec::with_capacity(n);
    for i in 0..n {
        if mass[i] <= 0.0 {
            return Err(Error::ZeroExposureProbability { vertex: i });
        }
        let cond = weighted[i] / mass[i];
        conditional_means.push(cond);
        bias_contributions.push(cond - global_means[i]);
    }
    let mu = conditional_means.iter().sum::<f64>() / n as f64;
    Ok(BruteForceEstimand {
        mu,
        conditional_means,
        bias_contributions,
    })
}

/// Difference of the two one-sided brute-force estimands:
/// `tau^d_g(1, 0) = mu^d_g(1) - mu^d_g(0)`.
pub fn estimand_brute_force_contrast<F>(
    g: &Graph,
    design: &Design,
    spec: &ExposureSpec,
    mean_outcomes: F,
) -> Result<f64>
where
    F: Fn(&[u8]) -> Vec<f64> + Copy,
{
    let treated = estimand_brute_force(g, design, spec, mean_outcomes, Side::Treatment)?;
    let control = estimand_brute_force(g, design, spec, mean_outcomes, Side::Control)?;
    Ok(treated.mu - control.mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcomes::{simulate_with_noise, LinkFunction, ResponseModel};
    use crate::rng::{stream, StreamRole};
    use rand::Rng;

    fn test_rng(tag: u64) -> rand_chacha::ChaCha12Rng {
        stream(tag, "theory-tests", 0, StreamRole::Graph)
    }

    fn path_graph(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn random_graph(n: usize, p: f64, tag: u64) -> Graph {
        let mut rng = test_rng(tag);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random_bool(p) {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn single_step_model_is_direct_effect_only() {
        let g = path_graph(4);
        let m = linear_in_means_model(&g, 0.7, 1.3, 0.9, 1, &[0.0; 4]);
        for i in 0..4 {
            assert!((m.intercept[i] - 0.7).abs() < 1e-15);
            for j in 0..4 {
                let expected = if i == j { 1.3 } else { 0.0 };
                assert!((m.coefficients[i][j] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn two_step_model_adds_scaled_peer_operator() {
        let g = path_graph(3); // degrees 1, 2, 1
        let (beta, gamma) = (0.5, 0.8);
        let m = linear_in_means_model(&g, 0.0, beta, gamma, 2, &[0.0; 3]);
        // B = beta * (I + gamma * D^{-1} A).
        let expected = [
            [beta, beta * gamma, 0.0],
            [beta * gamma / 2.0, beta, beta * gamma / 2.0],
            [0.0, beta * gamma, beta],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.coefficients[i][j] - expected[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn closed_form_matches_recurrence_iteration() {
        // Iterating E[Y_t] = alpha + beta z + P E[Y_{t-1}] must equal a + B z,
        // including gamma = 1 and graphs with isolated vertices.
        for (tag, gamma) in [(1u64, 0.5), (2, 1.0), (3, 1.7)] {
            let mut rng = test_rng(100 + tag);
            let g = {
                let mut edges = Vec::new();
                for i in 0..8usize {
                    for j in (i + 1)..8 {
                        if rng.random_bool(0.3) {
                            edges.push((i, j));
                        }
                    }
                }
                Graph::from_edges(9, &edges).unwrap() // vertex 8 isolated
            };
            let n = g.vertex_count();
            let (alpha, beta, steps) = (-0.4, 0.9, 4);
            let ey0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let z: Vec<u8> = (0..n).map(|_| rng.random_bool(0.5) as u8).collect();

            let model = linear_in_means_model(&g, alpha, beta, gamma, steps, &ey0);
            let closed = model.mean_outcomes(&z);

            let mut expect = ey0.clone();
            for _ in 0..steps {
                let peer = peer_apply_vector(&g, gamma, &expect);
                expect = (0..n)
                    .map(|i| alpha + beta * f64::from(z[i]) + peer[i])
                    .collect();
            }
            for i in 0..n {
                assert!(
                    (closed[i] - expect[i]).abs() <= 1e-10,
                    "gamma {gamma} vertex {i}: {} vs {}",
                    closed[i],
                    expect[i]
                );
            }
        }
    }

    #[test]
    fn gamma_one_intercept_is_t_alpha_without_isolates() {
        let g = path_graph(5);
        let m = linear_in_means_model(&g, 0.3, 0.0, 1.0, 4, &[0.0; 5]);
        for a in &m.intercept {
            assert!((a - 4.0 * 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn true_ate_cases() {
        let identity = LinearOutcomeModel {
            intercept: vec![0.0; 4],
            coefficients: (0..4)
                .map(|i| (0..4).map(|j| f64::from(i == j)).collect())
                .collect(),
        };
        assert!((true_ate_linear(&identity) - 1.0).abs() < 1e-15);

        let zero = LinearOutcomeModel {
            intercept: vec![0.0; 3],
            coefficients: vec![vec![0.0; 3]; 3],
        };
        assert_eq!(true_ate_linear(&zero), 0.0);

        // B = beta (I + gamma P) with row-stochastic P: tau = beta (1 + gamma).
        let g = random_graph(12, 0.5, 7);
        assert!((0..12).all(|v| g.degree(v) > 0));
        let m = linear_in_means_model(&g, 0.0, 0.6, 0.4, 2, &[0.0; 12]);
        assert!((true_ate_linear(&m) - 0.6 * 1.4).abs() < 1e-12);
    }

    fn random_nonneg_model(n: usize, tag: u64) -> LinearOutcomeModel {
        let mut rng = test_rng(1000 + tag);
        LinearOutcomeModel {
            intercept: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            coefficients: (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(0.0..1.0)).collect())
                .collect(),
        }
    }

    #[test]
    fn estimand_itr_degenerate_clusterings() {
        let m = random_nonneg_model(6, 1);
        let singleton = Clustering::singleton(6);
        let ind = estimand_itr(&m, EstimandDesign::Independent).unwrap();
        let gcr = estimand_itr(&m, EstimandDesign::GraphCluster(&singleton)).unwrap();
        assert!((ind - gcr).abs() < 1e-14);

        let one = Clustering::single_block(6);
        let gcr = estimand_itr(&m, EstimandDesign::GraphCluster(&one)).unwrap();
        assert!((gcr - true_ate_linear(&m)).abs() < 1e-12);
    }

    #[test]
    fn cluster_randomization_never_increases_estimand_bias() {
        for tag in 0..40u64 {
            let mut rng = test_rng(2000 + tag);
            let n = rng.random_range(2..25usize);
            let m = random_nonneg_model(n, 50 + tag);
            let assignment: Vec<usize> = {
                let k = rng.random_range(1..=n);
                let mut a: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
                // densify ids
                let mut map = std::collections::HashMap::new();
                for v in a.iter_mut() {
                    let next = map.len();
                    *v = *map.entry(*v).or_insert(next);
                }
                a
            };
            let clustering = Clustering::new(assignment).unwrap();
            let tau = true_ate_linear(&m);
            let gcr = estimand_itr(&m, EstimandDesign::GraphCluster(&clustering)).unwrap();
            let ind = estimand_itr(&m, EstimandDesign::Independent).unwrap();
            assert!(tau - gcr >= -1e-12);
            assert!((tau - gcr) <= (tau - ind) + 1e-12);
        }
    }

    #[test]
    fn balanced_estimand_matches_design_enumeration() {
        // tau_bal = mu(1) - mu(0) with expectations under the balanced design,
        // evaluated through the brute-force enumerator with the ITR condition.
        let n = 8;
        let g = random_graph(n, 0.4, 9);
        let m = random_nonneg_model(n, 77);
        let clustering = Clustering::new(vec![0, 0, 1, 1, 2, 2, 3, 3]).unwrap();
        let design = Design::balanced_graph_cluster(clustering.clone()).unwrap();
        let enumerated =
            estimand_brute_force_contrast(&g, &design, &ExposureSpec::Itr, |z| m.mean_outcomes(z))
                .unwrap();
        let formula = estimand_itr(&m, EstimandDesign::BalancedGraphCluster(&clustering)).unwrap();
        assert!(
            (enumerated - formula).abs() <= 1e-12,
            "{enumerated} vs {formula}"
        );
    }

    #[test]
    fn balanced_estimand_rejects_unequal_sizes() {
        let m = random_nonneg_model(5, 3);
        let clustering = Clustering::new(vec![0, 0, 0, 1, 1]).unwrap();
        assert!(matches!(
            estimand_itr(&m, EstimandDesign::BalancedGraphCluster(&clustering)),
            Err(Error::EstimandScope(_))
        ));
    }

    #[test]
    fn relative_bias_cases() {
        let m = random_nonneg_model(10, 4);
        let one = Clustering::single_block(10);
        assert!(relative_bias(&m, &one, false).unwrap().abs() < 1e-14);

        let identity = LinearOutcomeModel {
            intercept: vec![0.0; 6],
            coefficients: (0..6)
                .map(|i| (0..6).map(|j| f64::from(i == j)).collect())
                .collect(),
        };
        let clustering = Clustering::new(vec![0, 0, 1, 1, 2, 2]).unwrap();
        assert!(relative_bias(&identity, &clustering, false).unwrap().abs() < 1e-14);

        let zero = LinearOutcomeModel {
            intercept: vec![0.0; 2],
            coefficients: vec![vec![0.0; 2]; 2],
        };
        let c2 = Clustering::new(vec![0, 1]).unwrap();
        assert!(relative_bias(&zero, &c2, false).is_err());
    }

    #[test]
    fn balanced_factor_vanishes_for_many_clusters() {
        // (1 + 1/(N_C - 1)) -> 1, within 1.5% at N_C = 100.
        let n = 200;
        let m = random_nonneg_model(n, 5);
        let assignment: Vec<usize> = (0..n).map(|v| v / 2).collect();
        let clustering = Clustering::new(assignment).unwrap();
        assert_eq!(clustering.n_clusters(), 100);
        let unbalanced = relative_bias(&m, &clustering, false).unwrap();
        let balanced = relative_bias(&m, &clustering, true).unwrap();
        assert!((balanced / unbalanced - 1.0).abs() < 0.015);
    }

    #[test]
    fn brute_force_reproduces_itr_cluster_estimand() {
        let n = 9;
        let g = random_graph(n, 0.4, 11);
        let m = random_nonneg_model(n, 21);
        let clustering = Clustering::new(vec![0, 0, 0, 1, 1, 2, 2, 2, 2]).unwrap();
        let design = Design::graph_cluster(clustering.clone(), 0.5).unwrap();
        let enumerated =
            estimand_brute_force_contrast(&g, &design, &ExposureSpec::Itr, |z| m.mean_outcomes(z))
                .unwrap();
        let formula = estimand_itr(&m, EstimandDesign::GraphCluster(&clustering)).unwrap();
        assert!((enumerated - formula).abs() <= 1e-12);
    }

    #[test]
    fn itr_condition_means_conditioning_only_on_own_assignment() {
        let n = 6;
        let g = random_graph(n, 0.5, 13);
        let m = random_nonneg_model(n, 31);
        let design = Design::independent(n, 0.4).unwrap();
        let got = estimand_brute_force(
            &g,
            &design,
            &ExposureSpec::Itr,
            |z| m.mean_outcomes(z),
            Side::Treatment,
        )
        .unwrap();
        // Direct conditional: E[Y_i | Z_i = 1] = a_i + B_ii + q * sum_{j != i} B_ij.
        for i in 0..n {
            let direct = m.intercept[i]
                + m.coefficients[i][i]
                + 0.4
                    * (0..n)
                        .filter(|&j| j != i)
                        .map(|j| m.coefficients[i][j])
                        .sum::<f64>();
            assert!((got.conditional_means[i] - direct).abs() < 1e-12);
        }
    }

    /// The lopsided counterexample: ego vertex 0 alone in its cluster, with
    /// neighbor clusters of sizes 10, 1, and 1; the outcome of vertex 0 is
    /// `1{Z_a = 1 and Z_0 = 1}` for the last singleton neighbor `a`.
    fn counterexample_fixture() -> (Graph, Clustering, usize) {
        let edges: Vec<(usize, usize)> = (1..=12).map(|v| (0, v)).collect();
        let g = Graph::from_edges(13, &edges).unwrap();
        let mut assignment = vec![0usize; 13];
        for v in 1..=10 {
            assignment[v] = 1;
        }
        assignment[11] = 2;
        assignment[12] = 3;
        (g, Clustering::new(assignment).unwrap(), 12)
    }

    #[test]
    fn restrictiveness_can_increase_bias_under_cluster_randomization() {
        let (g, clustering, a) = counterexample_fixture();
        let design = Design::graph_cluster(clustering, 0.5).unwrap();
        let outcome = |z: &[u8]| -> Vec<f64> {
            let mut y = vec![0.0; 13];
            y[0] = f64::from(z[0] == 1 && z[a] == 1);
            y
        };
        // Thresholds 3 and 2 of the 12 neighbors.
        let restrictive = ExposureSpec::Fntr { lambda: 0.25 };
        let loose = ExposureSpec::Fntr { lambda: 1.0 / 6.0 };
        let more =
            estimand_brute_force(&g, &design, &restrictive, outcome, Side::Treatment).unwrap();
        let less = estimand_brute_force(&g, &design, &loose, outcome, Side::Treatment).unwrap();
        assert!((more.conditional_means[0] - 0.5).abs() < 1e-12);
        assert!((less.conditional_means[0] - 0.6).abs() < 1e-12);
        // Global treatment sets Y_0 = 1: the restrictive condition is farther off.
        assert!((more.bias_contributions[0] - (-0.5)).abs() < 1e-12);
        assert!((less.bias_contributions[0] - (-0.4)).abs() < 1e-12);
    }

    #[test]
    fn cluster_level_restrictiveness_is_bias_reducing_on_the_same_fixture() {
        let (g, clustering, a) = counterexample_fixture();
        let design = Design::graph_cluster(clustering, 0.5).unwrap();
        let outcome = |z: &[u8]| -> Vec<f64> {
            let mut y = vec![0.0; 13];
            y[0] = f64::from(z[0] == 1 && z[a] == 1);
            y
        };
        // Match set: 3 neighbor clusters; thresholds 1, 2, 3.
        let expected = [4.0 / 7.0, 3.0 / 4.0, 1.0];
        let mut prev_gap = f64::INFINITY;
        for (idx, lambda) in [1.0 / 3.0, 2.0 / 3.0, 1.0].into_iter().enumerate() {
            let spec = ExposureSpec::ClusterFntr { lambda };
            let got = estimand_brute_force(&g, &design, &spec, outcome, Side::Treatment).unwrap();
            assert!(
                (got.conditional_means[0] - expected[idx]).abs() < 1e-12,
                "lambda {lambda}: {}",
                got.conditional_means[0]
            );
            let gap = got.bias_contributions[0].abs();
            assert!(gap <= prev_gap + 1e-12);
            prev_gap = gap;
        }
    }

    #[test]
    fn tighter_thresholds_reduce_bias_under_independent_assignment() {
        // Independent assignment, monotone (nonnegative) linear responses,
        // nested vertex-level thresholds: absolute estimand bias is
        // non-increasing in lambda.
        for tag in 0..10u64 {
            let n = 7;
            let g = random_graph(n, 0.45, 300 + tag);
            let m = random_nonneg_model(n, 400 + tag);
            let design = Design::independent(n, 0.5).unwrap();
            let tau = true_ate_linear(&m);
            let mut prev = f64::INFINITY;
            for lambda in [0.0, 0.5, 1.0] {
                let spec = ExposureSpec::Fntr { lambda };
                let est = estimand_brute_force_contrast(&g, &design, &spec, |z| m.mean_outcomes(z))
                    .unwrap();
                let bias = (est - tau).abs();
                assert!(bias <= prev + 1e-12, "tag {tag}: bias {bias} after {prev}");
                prev = bias;
            }
        }
    }

    #[test]
    fn cluster_counted_restrictiveness_is_bias_reducing_under_cluster_randomization() {
        // Counting matching clusters instead of vertices restores the
        // ordering under graph cluster randomization for monotone
        // responses: tightening the cluster threshold never increases the
        // absolute estimand bias.
        for tag in 0..8u64 {
            let n = 9;
            let g = random_graph(n, 0.45, 600 + tag);
            let m = random_nonneg_model(n, 700 + tag);
            let mut rng = test_rng(800 + tag);
            let k = rng.random_range(2..=5usize);
            let assignment: Vec<usize> = (0..n).map(|v| v % k).collect();
            let clustering = Clustering::new(assignment).unwrap();
            let design = Design::graph_cluster(clustering, 0.5).unwrap();
            let tau = true_ate_linear(&m);
            let mut prev = f64::INFINITY;
            for lambda in [0.0, 0.5, 1.0] {
                let spec = ExposureSpec::ClusterFntr { lambda };
                let est = estimand_brute_force_contrast(&g, &design, &spec, |z| m.mean_outcomes(z))
                    .unwrap();
                let bias = (est - tau).abs();
                assert!(
                    bias <= prev + 1e-12,
                    "tag {tag}: cluster-level bias {bias} after {prev} at lambda {lambda}"
                );
                prev = bias;
            }
        }
    }

    #[test]
    fn linear_model_agrees_with_identity_link_simulation() {
        // The simulated identity-link process without noise is exactly a + Bz.
        let g = random_graph(10, 0.4, 500);
        let (alpha, beta, gamma, steps) = (-0.3, 0.7, 0.6, 3);
        let model = linear_in_means_model(&g, alpha, beta, gamma, steps, &[0.0; 10]);
        let response = ResponseModel {
            alpha,
            beta,
            gamma,
            steps,
            link: LinkFunction::Identity { noise: false },
        };
        let mut rng = test_rng(501);
        let z: Vec<u8> = (0..10).map(|_| rng.random_bool(0.5) as u8).collect();
        let tr = simulate_with_noise(&g, &z, &response, None);
        let closed = model.mean_outcomes(&z);
        for i in 0..10 {
            assert!((tr.final_outcomes()[i] - closed[i]).abs() < 1e-12);
        }
    }
}
