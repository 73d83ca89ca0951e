//! Undirected simple graphs: adjacency-list storage, random generators,
//! and structural measures.
//!
//! Vertices are dense ids `0..n`. Adjacency lists are kept sorted and
//! deduplicated; the degree of vertex `i` is the length of its list.

use std::collections::HashSet;
use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// An immutable undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph with `n` vertices from an undirected edge list.
    ///
    /// Rejects out-of-range endpoints, self-loops, and duplicate edges
    /// (in either orientation).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut neighbors = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidSpec(format!(
                    "edge ({u}, {v}) has an endpoint outside [0, {n})"
                )));
            }
            if u == v {
                return Err(Error::InvalidSpec(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidSpec(format!("duplicate edge ({u}, {v})")));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Graph { neighbors })
    }

    /// Builds a graph directly from adjacency lists, validating symmetry,
    /// absence of self-loops, and strictly increasing neighbor lists.
    pub fn from_adjacency(neighbors: Vec<Vec<usize>>) -> Result<Graph> {
        let n = neighbors.len();
        for (i, list) in neighbors.iter().enumerate() {
            for window in list.windows(2) {
                if window[0] >= window[1] {
                    return Err(Error::InvalidSpec(format!(
                        "neighbor list of vertex {i} is not strictly increasing"
                    )));
                }
            }
            for &j in list {
                if j >= n {
                    return Err(Error::InvalidSpec(format!(
                        "vertex {i} lists out-of-range neighbor {j}"
                    )));
                }
                if j == i {
                    return Err(Error::InvalidSpec(format!("self-loop at vertex {i}")));
                }
                if neighbors[j].binary_search(&i).is_err() {
                    return Err(Error::InvalidSpec(format!(
                        "asymmetric adjacency: {i} lists {j} but not vice versa"
                    )));
                }
            }
        }
        Ok(Graph { neighbors })
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Parses a plain-text edge list: one `u v` pair per line, 0-based ids,
    /// blank lines and `#` comments ignored. The vertex count is one more
    /// than the largest id seen.
    pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
        let mut edges = Vec::new();
        let mut max_id = None::<usize>;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut parts = body.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize> {
                tok.ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: "expected two vertex ids".into(),
                })?
                .parse()
                .map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid vertex id in {body:?}"),
                })
            };
            let u = parse(parts.next())?;
            let v = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected exactly two vertex ids".into(),
                });
            }
            if u == v {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("self-loop at vertex {u}"),
                });
            }
            if edges
                .iter()
                .any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
            {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate edge ({u}, {v})"),
                });
            }
            max_id = Some(max_id.unwrap_or(0).max(u).max(v));
            edges.push((u, v));
        }
        let n = max_id.map_or(0, |m| m + 1);
        Graph::from_edges(n, &edges)
    }

    /// Writes the edge list as `u v` lines with u < v, sorted.
    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for u in 0..self.vertex_count() {
            for &v in self.neighbors(u) {
                if u < v {
                    writeln!(writer, "{u} {v}")?;
                }
            }
        }
        Ok(())
    }
}

/// Parameters for the small-world (rewired ring lattice) generator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmallWorldSpec {
    /// Vertex count.
    pub n: usize,
    /// Initial degree; must be even and `0 < k < n`.
    pub k: usize,
    /// Probability that each lattice edge is rewired.
    pub p_rewire: f64,
}

impl SmallWorldSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k % 2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "small-world degree k must be positive and even, got {}",
                self.k
            )));
        }
        if self.k >= self.n {
            return Err(Error::InvalidSpec(format!(
                "small-world degree k = {} must be below n = {}",
                self.k, self.n
            )));
        }
        if !(0.0..=1.0).contains(&self.p_rewire) {
            return Err(Error::InvalidSpec(format!(
                "rewiring probability must lie in [0, 1], got {}",
                self.p_rewire
            )));
        }
        Ok(())
    }
}

/// Parameters for the degree-corrected blockmodel generator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DcbmSpec {
    /// Vertex count.
    pub n: usize,
    /// Number of communities; vertices are assigned uniformly at random.
    pub communities: usize,
    /// Expected proportion of edges that fall within a community, in (0, 1].
    pub p_within: f64,
    /// Mean of the discretized log-normal expected-degree distribution.
    pub degree_mean: f64,
    /// Variance of the expected-degree distribution (0 gives constant degrees).
    pub degree_variance: f64,
}

impl DcbmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(
                "blockmodel needs at least 2 vertices".into(),
            ));
        }
        if self.communities == 0 {
            return Err(Error::InvalidSpec(
                "community count must be at least 1".into(),
            ));
        }
        if !(self.p_within > 0.0 && self.p_within <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "within-community edge proportion must lie in (0, 1], got {}",
                self.p_within
            )));
        }
        if !(self.degree_mean > 0.0) {
            return Err(Error::InvalidSpec(
                "expected degree mean must be positive".into(),
            ));
        }
        if self.degree_mean > (self.n - 1) as f64 {
            return Err(Error::InvalidSpec(format!(
                "expected degree {} exceeds n - 1 = {}",
                self.degree_mean,
                self.n - 1
            )));
        }
        if self.degree_variance < 0.0 {
            return Err(Error::InvalidSpec(
                "degree variance must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Which random-graph model to draw from.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum GraphGenSpec {
    SmallWorld(SmallWorldSpec),
    Dcbm(DcbmSpec),
}

impl GraphGenSpec {
    pub fn generate<R: Rng>(&self, rng: &mut R) -> Result<Graph> {
        match self {
            GraphGenSpec::SmallWorld(spec) => generate_small_world(spec, rng),
            GraphGenSpec::Dcbm(spec) => generate_dcbm(spec, rng),
        }
    }
}

/// Attempts to replace one endpoint of a rewired edge before giving up and
/// keeping the original lattice edge.
const REWIRE_ATTEMPTS: usize = 100;

/// Generates a small-world graph: a ring lattice where each vertex is
/// joined to its `k` nearest ring neighbors, with each lattice edge
/// independently rewired to a uniform endpoint with probability `p_rewire`.
///
/// The output always has exactly `n * k / 2` edges; rewiring proposals that
/// would create a self-loop or duplicate edge are resampled, and the
/// original edge is kept if no valid target is found.
pub fn generate_small_world<R: Rng>(spec: &SmallWorldSpec, rng: &mut R) -> Result<Graph> {
    spec.validate()?;
    let (n, k, p) = (spec.n, spec.k, spec.p_rewire);
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::with_capacity(k * 2); n];
    for i in 0..n {
        for d in 1..=k / 2 {
            let j = (i + d) % n;
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    for d in 1..=k / 2 {
        for i in 0..n {
            let j = (i + d) % n;
            if p == 0.0 || !rng.random_bool(p) {
                continue;
            }
            for _ in 0..REWIRE_ATTEMPTS {
                let w = rng.random_range(0..n);
                if w != i && !adj[i].contains(&w) {
                    adj[i].remove(&j);
                    adj[j].remove(&i);
                    adj[i].insert(w);
                    adj[w].insert(i);
                    break;
                }
            }
        }
    }
    let mut neighbors: Vec<Vec<usize>> = adj
        .into_iter()
        .map(|set| set.into_iter().collect())
        .collect();
    for list in &mut neighbors {
        list.sort_unstable();
    }
    Graph::from_adjacency(neighbors)
}

/// Generates a degree-corrected blockmodel graph, discarding the community
/// labels. See [`generate_dcbm_with_communities`].
pub fn generate_dcbm<R: Rng>(spec: &DcbmSpec, rng: &mut R) -> Result<Graph> {
    generate_dcbm_with_communities(spec, rng).map(|(g, _)| g)
}

/// Generates a degree-corrected blockmodel graph and returns the community
/// labels alongside it.
///
/// Expected degrees are drawn from a log-normal matched to
/// `(degree_mean, degree_variance)` by the moment equations and rounded to
/// the nearest integer at least 1. Each pair is connected independently
/// with probability `min(1, theta_i * theta_j * omega / sum(theta))`, where
/// the within- and between-community affinities are solved so the expected
/// within-community edge fraction equals `p_within` while the expected edge
/// total stays at `sum(theta) / 2`. With a single community the affinity
/// normalizes total density instead and `p_within` is moot.
pub fn generate_dcbm_with_communities<R: Rng>(
    spec: &DcbmSpec,
    rng: &mut R,
) -> Result<(Graph, Vec<usize>)> {
    spec.validate()?;
    let n = spec.n;
    let communities: Vec<usize> = (0..n)
        .map(|_| rng.random_range(0..spec.communities))
        .collect();

    let theta = draw_expected_degrees(spec, rng);
    let total: f64 = theta.iter().sum();

    // Ordered-pair sums of theta_i * theta_j, split within/between blocks.
    let mut block_total = vec![0.0f64; spec.communities];
    let mut block_sq = vec![0.0f64; spec.communities];
    for i in 0..n {
        block_total[communities[i]] += theta[i];
        block_sq[communities[i]] += theta[i] * theta[i];
    }
    let s_within: f64 = (0..spec.communities)
        .map(|c| block_total[c] * block_total[c] - block_sq[c])
        .sum();
    let sq_total: f64 = theta.iter().map(|t| t * t).sum();
    let s_between = total * total - sq_total - s_within;

    let (omega_within, omega_between) = if s_between <= 0.0 {
        if s_within <= 0.0 {
            return Err(Error::InvalidSpec(
                "degenerate blockmodel: no vertex pairs to connect".into(),
            ));
        }
        (total * total / s_within, 0.0)
    } else {
        if s_within <= 0.0 {
            return Err(Error::InvalidSpec(
                "no within-community vertex pairs; within-community edge target is infeasible"
                    .into(),
            ));
        }
        (
            total * total * spec.p_within / s_within,
            total * total * (1.0 - spec.p_within) / s_between,
        )
    };

    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let omega = if communities[i] == communities[j] {
                omega_within
            } else {
                omega_between
            };
            let p = (theta[i] * theta[j] * omega / total).min(1.0);
            if p > 0.0 && rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Ok((Graph::from_edges(n, &edges)?, communities))
}

fn draw_expected_degrees<R: Rng>(spec: &DcbmSpec, rng: &mut R) -> Vec<f64> {
    if spec.degree_variance == 0.0 {
        let d = spec.degree_mean.round().max(1.0);
        return vec![d; spec.n];
    }
    let m = spec.degree_mean;
    let sigma_sq = (1.0 + spec.degree_variance / (m * m)).ln();
    let mu = m.ln() - sigma_sq / 2.0;
    let normal = Normal::new(mu, sigma_sq.sqrt()).expect("finite log-normal parameters");
    (0..spec.n)
        .map(|_| {
            let x: f64 = normal.sample(rng);
            x.exp().round().max(1.0)
        })
        .collect()
}

/// Exact hop distances from `source`, up to and including `max_dist`.
/// Vertices farther than the bound (or unreachable) are omitted.
pub fn bfs_distances(g: &Graph, source: usize, max_dist: usize) -> HashMap<usize, usize> {
    assert!(source < g.vertex_count(), "source vertex out of range");
    let mut dist = HashMap::new();
    dist.insert(source, 0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == max_dist {
            continue;
        }
        for &u in g.neighbors(v) {
            if !dist.contains_key(&u) {
                dist.insert(u, d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Sentinel distance for "not reached" in [`bfs_bounded_into`].
pub(crate) const UNREACHED: u32 = u32::MAX;

/// Array-based bounded BFS used in hot paths. `dist` must be an
/// all-`UNREACHED` buffer of length `n`; vertices reached within the bound
/// are written there and pushed to `touched` so the caller can reset.
pub(crate) fn bfs_bounded_into(
    g: &Graph,
    source: usize,
    max_dist: usize,
    dist: &mut [u32],
    touched: &mut Vec<usize>,
    queue: &mut VecDeque<usize>,
) {
    debug_assert!(dist.iter().all(|&d| d == UNREACHED));
    queue.clear();
    dist[source] = 0;
    touched.push(source);
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if d as usize == max_dist {
            continue;
        }
        for &u in g.neighbors(v) {
            if dist[u] == UNREACHED {
                dist[u] = d + 1;
                touched.push(u);
                queue.push_back(u);
            }
        }
    }
}

/// Average local clustering coefficient: the mean over vertices of
/// (triangles through the vertex) / (degree choose 2), taking 0 for
/// vertices of degree below 2.
pub fn clustering_coefficient(g: &Graph) -> f64 {
    let n = g.vertex_count();
    if n == 0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for v in 0..n {
        let nb = g.neighbors(v);
        let k = nb.len();
        if k < 2 {
            continue;
        }
        let mut triangles = 0usize;
        for a in 0..k {
            for b in (a + 1)..k {
                if g.has_edge(nb[a], nb[b]) {
                    triangles += 1;
                }
            }
        }
        acc += triangles as f64 / ((k * (k - 1) / 2) as f64);
    }
    acc / n as f64
}
