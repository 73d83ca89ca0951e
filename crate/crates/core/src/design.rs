//! Randomization designs and treatment-assignment vectors.
//!
//! Four designs are supported: independent Bernoulli assignment, graph
//! cluster randomization (clusters drawn iid Bernoulli), balanced graph
//! cluster randomization (exactly half the clusters treated), and the
//! hole-punched variant in which each vertex keeps its cluster's assignment
//! with probability `eta` and flips it otherwise.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::clustering::Clustering;
use crate::error::{Error, Result};

/// A randomization design. Construct through the checked constructors.
#[derive(Debug, Clone)]
pub enum Design {
    Independent {
        n: usize,
        q: f64,
    },
    GraphCluster {
        clustering: Clustering,
        q: f64,
    },
    BalancedGraphCluster {
        clustering: Clustering,
    },
    HolePunched {
        clustering: Clustering,
        q: f64,
        /// Optional per-cluster treatment probabilities overriding `q`.
        cluster_q: Option<Vec<f64>>,
        /// Probability that a vertex keeps its cluster's assignment.
        eta: f64,
    },
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidSpec(format!(
            "treatment probability must lie in (0, 1), got {q}"
        )));
    }
    Ok(())
}

impl Design {
    pub fn independent(n: usize, q: f64) -> Result<Design> {
        if n == 0 {
            return Err(Error::InvalidSpec(
                "design needs at least one vertex".into(),
            ));
        }
        check_q(q)?;
        Ok(Design::Independent { n, q })
    }

    pub fn graph_cluster(clustering: Clustering, q: f64) -> Result<Design> {
        check_q(q)?;
        Ok(Design::GraphCluster { clustering, q })
    }

    /// Balanced design: exactly half of the clusters are treated, so the
    /// cluster count must be even.
    pub fn balanced_graph_cluster(clustering: Clustering) -> Result<Design> {
        if clustering.n_clusters() % 2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "balanced design requires an even cluster count, got {}",
                clustering.n_clusters()
            )));
        }
        Ok(Design::BalancedGraphCluster { clustering })
    }

    pub fn hole_punched(
        clustering: Clustering,
        q: f64,
        cluster_q: Option<Vec<f64>>,
        eta: f64,
    ) -> Result<Design> {
        check_q(q)?;
        if let Some(per) = &cluster_q {
            if per.len() != clustering.n_clusters() {
                return Err(Error::InvalidSpec(format!(
                    "per-cluster probabilities have length {} but there are {} clusters",
                    per.len(),
                    clustering.n_clusters()
                )));
            }
            for &qc in per {
                check_q(qc)?;
            }
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidSpec(format!(
                "keep probability eta must lie in [0, 1], got {eta}"
            )));
        }
        Ok(Design::HolePunched {
            clustering,
            q,
            cluster_q,
            eta,
        })
    }

    /// Number of vertices the design assigns.
    pub fn n(&self) -> usize {
        match self {
            Design::Independent { n, .. } => *n,
            Design::GraphCluster { clustering, .. }
            | Design::BalancedGraphCluster { clustering }
            | Design::HolePunched { clustering, .. } => clustering.len(),
        }
    }

    pub fn clustering(&self) -> Option<&Clustering> {
        match self {
            Design::Independent { .. } => None,
            Design::GraphCluster { clustering, .. }
            | Design::BalancedGraphCluster { clustering }
            | Design::HolePunched { clustering, .. } => Some(clustering),
        }
    }

    fn cluster_prob(&self, cluster: usize) -> f64 {
        match self {
            Design::Independent { q, .. } | Design::GraphCluster { q, .. } => *q,
            Design::BalancedGraphCluster { .. } => 0.5,
            Design::HolePunched { q, cluster_q, .. } => {
                cluster_q.as_ref().map_or(*q, |per| per[cluster])
            }
        }
    }
}

/// A drawn treatment vector, retaining the cluster-level vector `w` and the
/// hole-punch switches `x` where the design has them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    /// Per-vertex binary treatment.
    pub z: Vec<u8>,
    /// Per-cluster treatment for cluster designs.
    pub w: Option<Vec<u8>>,
    /// Per-vertex keep/flip switches for the hole-punched design.
    pub x: Option<Vec<u8>>,
}

impl Assignment {
    pub fn treated_count(&self) -> usize {
        self.z.iter().filter(|&&z| z == 1).count()
    }

    /// Writes the text format: line `i` holds `Z_i`.
    pub fn write<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for &z in &self.z {
            writeln!(writer, "{z}")?;
        }
        Ok(())
    }
}

fn vertex_z_from_w(clustering: &Clustering, w: &[u8]) -> Vec<u8> {
    (0..clustering.len())
        .map(|i| w[clustering.cluster_of(i)])
        .collect()
}

/// Draws one assignment from the design.
pub fn draw_assignment<R: Rng>(design: &Design, rng: &mut R) -> Assignment {
    match design {
        Design::Independent { n, q } => {
            let z = (0..*n).map(|_| rng.random_bool(*q) as u8).collect();
            Assignment {
                z,
                w: None,
                x: None,
            }
        }
        Design::GraphCluster { clustering, q } => {
            let w: Vec<u8> = (0..clustering.n_clusters())
                .map(|_| rng.random_bool(*q) as u8)
                .collect();
            Assignment {
                z: vertex_z_from_w(clustering, &w),
                w: Some(w),
                x: None,
            }
        }
        Design::BalancedGraphCluster { clustering } => {
            let nc = clustering.n_clusters();
            let mut ids: Vec<usize> = (0..nc).collect();
            ids.shuffle(rng);
            let mut w = vec![0u8; nc];
            for &c in &ids[..nc / 2] {
                w[c] = 1;
            }
            Assignment {
                z: vertex_z_from_w(clustering, &w),
                w: Some(w),
                x: None,
            }
        }
        Design::HolePunched {
            clustering, eta, ..
        } => {
            let w: Vec<u8> = (0..clustering.n_clusters())
                .map(|c| rng.random_bool(design.cluster_prob(c)) as u8)
                .collect();
            let x: Vec<u8> = (0..clustering.len())
                .map(|_| rng.random_bool(*eta) as u8)
                .collect();
            let z = (0..clustering.len())
                .map(|i| {
                    let wc = w[clustering.cluster_of(i)];
                    x[i] * wc + (1 - x[i]) * (1 - wc)
                })
                .collect();
            Assignment {
                z,
                w: Some(w),
                x: Some(x),
            }
        }
    }
}

fn bernoulli_product(bits: &[u8], probs: impl Fn(usize) -> f64) -> f64 {
    bits.iter()
        .enumerate()
        .map(|(i, &b)| if b == 1 { probs(i) } else { 1.0 - probs(i) })
        .product()
}

/// Exact probability of a drawn assignment under the design: the
/// probability of its cluster vector `w` (and switches `x` where
/// applicable), or of `z` itself under independent assignment.
///
/// Assignments that are structurally incompatible with the design (missing
/// or mismatched `w`/`x`, or `z` not induced by them) are errors; outcomes
/// outside the design's support (an unbalanced `w` under the balanced
/// design) have probability zero.
pub fn assignment_probability(design: &Design, assignment: &Assignment) -> Result<f64> {
    if assignment.z.len() != design.n() {
        return Err(Error::InconsistentAssignment(format!(
            "assignment covers {} vertices, design covers {}",
            assignment.z.len(),
            design.n()
        )));
    }
    if assignment.z.iter().any(|&z| z > 1) {
        return Err(Error::InconsistentAssignment(
            "non-binary entry in z".into(),
        ));
    }
    match design {
        Design::Independent { q, .. } => Ok(bernoulli_product(&assignment.z, |_| *q)),
        Design::GraphCluster { clustering, q } => {
            let w = expect_w(assignment, clustering)?;
            check_z_matches_w(assignment, clustering, w)?;
            Ok(bernoulli_product(w, |_| *q))
        }
        Design::BalancedGraphCluster { clustering } => {
            let w = expect_w(assignment, clustering)?;
            check_z_matches_w(assignment, clustering, w)?;
            let nc = clustering.n_clusters();
            let treated = w.iter().filter(|&&b| b == 1).count();
            if treated != nc / 2 {
                return Ok(0.0);
            }
            Ok(1.0 / binomial(nc, nc / 2))
        }
        Design::HolePunched {
            clustering, eta, ..
        } => {
            let w = expect_w(assignment, clustering)?;
            let x = assignment.x.as_deref().ok_or_else(|| {
                Error::InconsistentAssignment("hole-punched design requires switches x".into())
            })?;
            if x.len() != clustering.len() || x.iter().any(|&b| b > 1) {
                return Err(Error::InconsistentAssignment(
                    "invalid switch vector x".into(),
                ));
            }
            for i in 0..clustering.len() {
                let wc = w[clustering.cluster_of(i)];
                if assignment.z[i] != x[i] * wc + (1 - x[i]) * (1 - wc) {
                    return Err(Error::InconsistentAssignment(format!(
                        "z[{i}] does not match x[i] * w + (1 - x[i]) * (1 - w)"
                    )));
                }
            }
            let pw = bernoulli_product(w, |c| design.cluster_prob(c));
            let px = bernoulli_product(x, |_| *eta);
            Ok(pw * px)
        }
    }
}

fn expect_w<'a>(assignment: &'a Assignment, clustering: &Clustering) -> Result<&'a [u8]> {
    let w = assignment.w.as_deref().ok_or_else(|| {
        Error::InconsistentAssignment("cluster design requires a cluster vector w".into())
    })?;
    if w.len() != clustering.n_clusters() || w.iter().any(|&b| b > 1) {
        return Err(Error::InconsistentAssignment(
            "invalid cluster vector w".into(),
        ));
    }
    Ok(w)
}

fn check_z_matches_w(assignment: &Assignment, clustering: &Clustering, w: &[u8]) -> Result<()> {
    for i in 0..clustering.len() {
        if assignment.z[i] != w[clustering.cluster_of(i)] {
            return Err(Error::InconsistentAssignment(format!(
                "z[{i}] differs from its cluster assignment"
            )));
        }
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Enumerates the design's entire support with exact probabilities.
///
/// Fails if the support exceeds `max_outcomes` (callers typically pass
/// `1 << 20`). Hole-punched designs enumerate `w` and `x` jointly, so they
/// are only feasible for very small instances.
pub fn enumerate_assignments(
    design: &Design,
    max_outcomes: u128,
) -> Result<Vec<(Assignment, f64)>> {
    let guard = |outcomes: u128| -> Result<()> {
        if outcomes > max_outcomes {
            return Err(Error::EnumerationTooLarge {
                outcomes,
                limit: max_outcomes,
            });
        }
        Ok(())
    };
    let mut out = Vec::new();
    match design {
        Design::Independent { n, .. } => {
            let n = *n;
            guard(1u128 << n.min(100))?;
            for mask in 0u64..(1u64 << n) {
                let z: Vec<u8> = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
                let a = Assignment {
                    z,
                    w: None,
                    x: None,
                };
                let p = assignment_probability(design, &a)?;
                out.push((a, p));
            }
        }
        Design::GraphCluster { clustering, .. } | Design::BalancedGraphCluster { clustering } => {
            let nc = clustering.n_clusters();
            guard(1u128 << nc.min(100))?;
            let balanced = matches!(design, Design::BalancedGraphCluster { .. });
            for mask in 0u64..(1u64 << nc) {
                if balanced && (mask.count_ones() as usize) != nc / 2 {
                    continue;
                }
                let w: Vec<u8> = (0..nc).map(|c| ((mask >> c) & 1) as u8).collect();
                let a = Assignment {
                    z: vertex_z_from_w(clustering, &w),
                    w: Some(w),
                    x: None,
                };
                let p = assignment_probability(design, &a)?;
                out.push((a, p));
            }
        }
        Design::HolePunched { clustering, .. } => {
            let nc = clustering.n_clusters();
            let n = clustering.len();
            guard((1u128 << nc.min(100)).saturating_mul(1u128 << n.min(100)))?;
            for wmask in 0u64..(1u64 << nc) {
                let w: Vec<u8> = (0..nc).map(|c| ((wmask >> c) & 1) as u8).collect();
                for xmask in 0u64..(1u64 << n) {
                    let x: Vec<u8> = (0..n).map(|i| ((xmask >> i) & 1) as u8).collect();
                    let z: Vec<u8> = (0..n)
                        .map(|i| {
                            let wc = w[clustering.cluster_of(i)];
                            x[i] * wc + (1 - x[i]) * (1 - wc)
                        })
                        .collect();
                    let a = Assignment {
                        z,
                        w: Some(w.clone()),
                        x: Some(x),
                    };
                    let p = assignment_probability(design, &a)?;
                    out.push((a, p));
                }
            }
        }
    }
    Ok(out)
}
