//! Vertex-to-cluster mappings and epsilon-net construction.
//!
//! An epsilon-net is built by repeatedly picking a random surviving vertex
//! as a net center and removing everything within `epsilon - 1` hops of it;
//! the surviving picks end up pairwise at least `epsilon` hops apart and
//! cover every vertex of their component within `epsilon - 1` hops. Each
//! vertex then joins the cluster of its closest center, ties broken toward
//! the smallest center vertex id. Distances are always measured in the
//! original graph.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{bfs_bounded_into, bfs_distances, Graph, UNREACHED};

/// A partition of vertices into dense cluster ids `0..n_clusters`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<usize>,
    n_clusters: usize,
}

impl Clustering {
    /// Wraps a raw assignment vector, validating that the ids are dense:
    /// every id in `0..max+1` must own at least one vertex.
    pub fn new(assignment: Vec<usize>) -> Result<Clustering> {
        if assignment.is_empty() {
            return Err(Error::InvalidClustering("empty assignment".into()));
        }
        let n_clusters = assignment.iter().max().unwrap() + 1;
        let mut seen = vec![false; n_clusters];
        for &c in &assignment {
            seen[c] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidClustering(format!(
                "cluster id {missing} owns no vertex"
            )));
        }
        Ok(Clustering {
            assignment,
            n_clusters,
        })
    }

    /// The clustering with every vertex in its own cluster.
    pub fn singleton(n: usize) -> Clustering {
        assert!(n >= 1, "singleton clustering needs at least one vertex");
        Clustering {
            assignment: (0..n).collect(),
            n_clusters: n,
        }
    }

    /// One cluster containing every vertex.
    pub fn single_block(n: usize) -> Clustering {
        assert!(n >= 1);
        Clustering {
            assignment: vec![0; n],
            n_clusters: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Vertices of each cluster, by cluster id.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_clusters];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    /// Reads the text format: line `i` holds the cluster id of vertex `i`.
    pub fn read<R: BufRead>(reader: R) -> Result<Clustering> {
        let mut assignment = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let body = line.trim();
            if body.is_empty() {
                continue;
            }
            let c: usize = body.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("invalid cluster id {body:?}"),
            })?;
            assignment.push(c);
        }
        Clustering::new(assignment)
    }

    /// Writes the text format: line `i` holds the cluster id of vertex `i`.
    pub fn write<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for &c in &self.assignment {
            writeln!(writer, "{c}")?;
        }
        Ok(())
    }
}

/// An epsilon-net clustering together with its net centers;
/// `centers[j]` is the center vertex of cluster `j`.
#[derive(Debug, Clone)]
pub struct EpsilonNet {
    pub clustering: Clustering,
    pub centers: Vec<usize>,
}

/// Builds an epsilon-net clustering. Center candidates are visited in a
/// uniformly random order drawn from `rng`. Disconnected graphs are handled
/// per component. Requires `epsilon >= 1`; with `epsilon = 1` the result is
/// exactly the singleton clustering.
pub fn epsilon_net<R: Rng>(g: &Graph, epsilon: usize, rng: &mut R) -> EpsilonNet {
    assert!(epsilon >= 1, "epsilon must be at least 1");
    let n = g.vertex_count();
    assert!(n >= 1, "graph must have at least one vertex");

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut removed = vec![false; n];
    let mut centers = Vec::new();
    let mut dist = vec![UNREACHED; n];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    for &v in &order {
        if removed[v] {
            continue;
        }
        centers.push(v);
        bfs_bounded_into(g, v, epsilon - 1, &mut dist, &mut touched, &mut queue);
        for &u in &touched {
            removed[u] = true;
            dist[u] = UNREACHED;
        }
        touched.clear();
    }
    centers.sort_unstable();

    // Assign each vertex to its closest center; iterating centers in
    // ascending vertex id with strict improvement breaks ties toward the
    // smallest center id.
    let mut best_dist = vec![UNREACHED; n];
    let mut assignment = vec![usize::MAX; n];
    for (cluster_id, &c) in centers.iter().enumerate() {
        bfs_bounded_into(g, c, epsilon - 1, &mut dist, &mut touched, &mut queue);
        for &u in &touched {
            if dist[u] < best_dist[u] {
                best_dist[u] = dist[u];
                assignment[u] = cluster_id;
            }
            dist[u] = UNREACHED;
        }
        touched.clear();
    }
    debug_assert!(assignment.iter().all(|&a| a != usize::MAX));

    EpsilonNet {
        clustering: Clustering {
            assignment,
            n_clusters: centers.len(),
        },
        centers,
    }
}

/// Convenience wrapper returning only the clustering.
pub fn epsilon_net_clustering<R: Rng>(g: &Graph, epsilon: usize, rng: &mut R) -> Clustering {
    epsilon_net(g, epsilon, rng).clustering
}

/// One violated epsilon-net property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetViolation {
    /// Two centers are closer than `epsilon` hops.
    CentersTooClose { a: usize, b: usize, distance: usize },
    /// A vertex is farther than `epsilon - 1` hops from every center.
    VertexUncovered { vertex: usize },
    /// A vertex is not assigned to (the cluster of) a closest center.
    NotClosestCenter {
        vertex: usize,
        assigned_distance: Option<usize>,
        best_distance: usize,
    },
}

/// Result of validating a clustering against the epsilon-net properties.
#[derive(Debug, Clone)]
pub struct NetReport {
    pub violations: Vec<NetViolation>,
}

impl NetReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three net properties for a proposed clustering:
/// (a) centers are pairwise at least `epsilon` hops apart, (b) every vertex
/// is within `epsilon - 1` hops of some center, and (c) every vertex is
/// assigned to the cluster of a closest center. `centers[j]` must be the
/// proposed center of cluster `j`.
pub fn validate_net(
    g: &Graph,
    clustering: &Clustering,
    centers: &[usize],
    epsilon: usize,
) -> NetReport {
    assert!(epsilon >= 1, "epsilon must be at least 1");
    assert_eq!(
        centers.len(),
        clustering.n_clusters(),
        "exactly one center per cluster required"
    );
    assert_eq!(clustering.len(), g.vertex_count());

    let n = g.vertex_count();
    let mut violations = Vec::new();

    // Distances from each center, bounded by epsilon - 1 (sufficient for
    // all three properties).
    let per_center: Vec<std::collections::HashMap<usize, usize>> = centers
        .iter()
        .map(|&c| bfs_distances(g, c, epsilon.max(1) - 1))
        .collect();

    for (ai, &a) in centers.iter().enumerate() {
        for &b in centers.iter().skip(ai + 1) {
            if let Some(&d) = per_center[ai].get(&b) {
                violations.push(NetViolation::CentersTooClose { a, b, distance: d });
            }
        }
    }

    for v in 0..n {
        let best = per_center.iter().filter_map(|m| m.get(&v).copied()).min();
        match best {
            None => violations.push(NetViolation::VertexUncovered { vertex: v }),
            Some(best_distance) => {
                let assigned = per_center[clustering.cluster_of(v)].get(&v).copied();
                if assigned != Some(best_distance) {
                    violations.push(NetViolation::NotClosestCenter {
                        vertex: v,
                        assigned_distance: assigned,
                        best_distance,
                    });
                }
            }
        }
    }

    NetReport { violations }
}
