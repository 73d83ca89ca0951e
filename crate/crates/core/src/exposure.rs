//! Effective-treatment (exposure) conditions and their exact probabilities.
//!
//! A vertex is effectively on a side when its own assignment matches that
//! side and at least a threshold number of elements of its match set do
//! too. For vertex-level conditions the match set is the neighborhood and
//! the threshold is `ceil(lambda * degree)`; for the cluster-level
//! condition the match set is the set of clusters containing at least one
//! neighbor, excluding the vertex's own cluster, and a cluster matches when
//! all of its vertices are on the side.
//!
//! Under iid Bernoulli cluster assignment the matching-neighbor count is,
//! conditional on the ego's cluster, a sum of independent cluster-sized
//! Bernoulli contributions; its distribution is computed exactly by
//! iterative convolution.

use std::io::Write;

use crate::clustering::Clustering;
use crate::design::{assignment_probability, enumerate_assignments, Design};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Guard on exhaustive design enumeration.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

/// Which side of the contrast a condition refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Control,
    Treatment,
}

impl Side {
    pub fn bit(self) -> u8 {
        match self {
            Side::Control => 0,
            Side::Treatment => 1,
        }
    }

    /// Marginal probability that a Bernoulli(q) assignment lands on this side.
    pub fn prob(self, q: f64) -> f64 {
        match self {
            Side::Control => 1.0 - q,
            Side::Treatment => q,
        }
    }
}

/// An effective-treatment condition.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ExposureSpec {
    /// Individualistic response: only the ego's assignment matters.
    Itr,
    /// Fractional neighborhood response with threshold fraction `lambda`.
    Fntr { lambda: f64 },
    /// Full neighborhood response (`Fntr` with `lambda = 1`).
    Ntr,
    /// Fractional response counted in whole matching clusters.
    ClusterFntr { lambda: f64 },
}

impl ExposureSpec {
    pub fn is_vertex_level(&self) -> bool {
        !matches!(self, ExposureSpec::ClusterFntr { .. })
    }

    /// The threshold fraction; `Itr` and `Ntr` are the endpoints.
    pub fn lambda(&self) -> f64 {
        match self {
            ExposureSpec::Itr => 0.0,
            ExposureSpec::Ntr => 1.0,
            ExposureSpec::Fntr { lambda } | ExposureSpec::ClusterFntr { lambda } => *lambda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lambda = self.lambda();
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidSpec(format!(
                "exposure fraction must lie in [0, 1], got {lambda}"
            )));
        }
        Ok(())
    }

    /// `ceil(lambda * set_size)` with a tiny guard against upward rounding
    /// noise in the product.
    pub fn threshold(&self, set_size: usize) -> usize {
        let raw = self.lambda() * set_size as f64;
        (raw - 1e-9).ceil().max(0.0) as usize
    }
}

/// Per-vertex probabilities of landing in effective treatment / control.
#[derive(Debug, Clone)]
pub struct ExposureProbabilities {
    pub pi1: Vec<f64>,
    pub pi0: Vec<f64>,
}

impl ExposureProbabilities {
    pub fn on(&self, side: Side) -> &[f64] {
        match side {
            Side::Treatment => &self.pi1,
            Side::Control => &self.pi0,
        }
    }

    /// CSV dump with columns `vertex,pi1,pi0`.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "vertex,pi1,pi0")?;
        for (i, (p1, p0)) in self.pi1.iter().zip(&self.pi0).enumerate() {
            writeln!(writer, "{i},{p1},{p0}")?;
        }
        Ok(())
    }
}

/// The clusters (excluding the ego's own) containing at least one neighbor
/// of `i` -- the match set of the cluster-level condition.
fn neighbor_clusters(g: &Graph, clustering: &Clustering, i: usize) -> Vec<usize> {
    let own = clustering.cluster_of(i);
    let mut clusters: Vec<usize> = g
        .neighbors(i)
        .iter()
        .map(|&j| clustering.cluster_of(j))
        .filter(|&c| c != own)
        .collect();
    clusters.sort_unstable();
    clusters.dedup();
    clusters
}

/// Evaluates the effective-treatment indicator for vertex `i` on a side:
/// the ego's assignment must match the side and at least the threshold
/// number of match-set elements must match it too. Cluster-level specs
/// require a clustering; a cluster matches when every vertex in it is
/// assigned the side.
pub fn effective_indicator(
    spec: &ExposureSpec,
    g: &Graph,
    clustering: Option<&Clustering>,
    z: &[u8],
    side: Side,
    i: usize,
) -> bool {
    assert_eq!(z.len(), g.vertex_count());
    if z[i] != side.bit() {
        return false;
    }
    match spec {
        ExposureSpec::Itr => true,
        ExposureSpec::Fntr { .. } | ExposureSpec::Ntr => {
            let nb = g.neighbors(i);
            let threshold = spec.threshold(nb.len());
            let matching = nb.iter().filter(|&&j| z[j] == side.bit()).count();
            matching >= threshold
        }
        ExposureSpec::ClusterFntr { .. } => {
            let clustering =
                clustering.expect("cluster-level exposure condition requires a clustering");
            let members = clustering.members();
            let match_set = neighbor_clusters(g, clustering, i);
            let threshold = spec.threshold(match_set.len());
            let matching = match_set
                .iter()
                .filter(|&&c| members[c].iter().all(|&v| z[v] == side.bit()))
                .count();
            matching >= threshold
        }
    }
}

/// Distribution of a sum of independent Bernoulli(p) contributions where
/// group `j` adds `sizes[j]` on success: `dist[s] = P(sum = s)`.
fn convolve_group_bernoulli(sizes: &[usize], p: f64) -> Vec<f64> {
    let total: usize = sizes.iter().sum();
    let mut dist = vec![0.0; total + 1];
    dist[0] = 1.0;
    let mut reach = 0usize;
    for &size in sizes {
        if size == 0 {
            continue;
        }
        for s in (0..=reach).rev() {
            let mass = dist[s];
            dist[s + size] += mass * p;
            dist[s] = mass * (1.0 - p);
        }
        reach += size;
    }
    dist
}

fn tail_at_least(dist: &[f64], threshold: usize) -> f64 {
    if threshold >= dist.len() {
        return 0.0;
    }
    dist[threshold..].iter().sum()
}

/// Binomial tail `P(Binomial(k, p) >= threshold)`.
fn binomial_tail(k: usize, p: f64, threshold: usize) -> f64 {
    tail_at_least(&convolve_group_bernoulli(&vec![1; k], p), threshold)
}

/// Exposure probabilities under independent Bernoulli(q) assignment for
/// vertex-level conditions:
/// `pi_i(1) = q * P(Binomial(k_i, q) >= l_i)` and
/// `pi_i(0) = (1 - q) * P(Binomial(k_i, 1 - q) >= l_i)`.
pub fn exposure_prob_independent(
    g: &Graph,
    spec: &ExposureSpec,
    q: f64,
) -> Result<ExposureProbabilities> {
    spec.validate()?;
    if !spec.is_vertex_level() {
        return Err(Error::InvalidSpec(
            "cluster-level exposure probabilities need a cluster design".into(),
        ));
    }
    let n = g.vertex_count();
    let mut pi1 = Vec::with_capacity(n);
    let mut pi0 = Vec::with_capacity(n);
    for i in 0..n {
        let k = g.degree(i);
        let threshold = spec.threshold(k);
        for (side, out) in [(Side::Treatment, &mut pi1), (Side::Control, &mut pi0)] {
            let p_side = side.prob(q);
            out.push(p_side * binomial_tail(k, p_side, threshold));
        }
    }
    Ok(ExposureProbabilities { pi1, pi0 })
}

/// Exact exposure probabilities under graph cluster randomization with iid
/// Bernoulli(q) cluster assignment, via the convolution dynamic program.
///
/// For vertex-level conditions the neighbors in the ego's own cluster match
/// automatically once the ego's cluster is conditioned on the side; the
/// rest contribute cluster-sized Bernoulli terms. For the cluster-level
/// condition the matching-cluster count is Binomial over the match set.
pub fn exposure_prob_cluster(
    g: &Graph,
    clustering: &Clustering,
    spec: &ExposureSpec,
    q: f64,
) -> Result<ExposureProbabilities> {
    spec.validate()?;
    assert_eq!(clustering.len(), g.vertex_count());
    let n = g.vertex_count();
    let mut pi1 = Vec::with_capacity(n);
    let mut pi0 = Vec::with_capacity(n);
    for i in 0..n {
        for (side, out) in [(Side::Treatment, &mut pi1), (Side::Control, &mut pi0)] {
            let p_side = side.prob(q);
            let tail = if spec.is_vertex_level() {
                let own = clustering.cluster_of(i);
                let mut own_count = 0usize;
                let mut group_sizes: Vec<usize> = Vec::new();
                let mut by_cluster: std::collections::HashMap<usize, usize> =
                    std::collections::HashMap::new();
                for &j in g.neighbors(i) {
                    let c = clustering.cluster_of(j);
                    if c == own {
                        own_count += 1;
                    } else {
                        *by_cluster.entry(c).or_default() += 1;
                    }
                }
                group_sizes.extend(by_cluster.values().copied());
                let threshold = spec.threshold(g.degree(i));
                let needed = threshold.saturating_sub(own_count);
                tail_at_least(&convolve_group_bernoulli(&group_sizes, p_side), needed)
            } else {
                let match_set = neighbor_clusters(g, clustering, i);
                let threshold = spec.threshold(match_set.len());
                binomial_tail(match_set.len(), p_side, threshold)
            };
            out.push(p_side * tail);
        }
    }
    Ok(ExposureProbabilities { pi1, pi0 })
}

/// Exact exposure probabilities for any design by exhaustive enumeration of
/// the design's support. Refuses enumerations beyond [`ENUMERATION_LIMIT`].
pub fn exposure_prob_brute_force(
    g: &Graph,
    design: &Design,
    spec: &ExposureSpec,
) -> Result<ExposureProbabilities> {
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
    let mut pi1 = vec![0.0; n];
    let mut pi0 = vec![0.0; n];
    for (assignment, prob) in &support {
        debug_assert!((assignment_probability(design, assignment).unwrap() - prob).abs() < 1e-12);
        for i in 0..n {
            if effective_indicator(spec, g, clustering, &assignment.z, Side::Treatment, i) {
                pi1[i] += prob;
            }
            if effective_indicator(spec, g, clustering, &assignment.z, Side::Control, i) {
                pi0[i] += prob;
            }
        }
    }
    Ok(ExposureProbabilities { pi1, pi0 })
}
