//! Dynamic outcome generation.
//!
//! Behaviors evolve in discrete time: starting from `Y_0 = 0`, each step
//! draws a latent utility `alpha + beta * z_i + gamma * mean(neighbors' Y
//! at t - 1) + U_{i,t}` and applies a link function. The probit link emits
//! `1{latent > 0}` with standard normal noise; the identity link emits the
//! latent itself, with or without noise.
//!
//! Noise is materialized as a grid indexed by `(t, vertex)` so that the
//! same draws can be replayed under different assignments or designs
//! (common random numbers).

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::graph::Graph;
use crate::rng::{stream, StreamRole};

/// Link function applied to the latent utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LinkFunction {
    /// Binary response `1{latent > 0}` with standard normal noise.
    ProbitThreshold,
    /// Continuous response equal to the latent utility.
    Identity {
        /// Whether standard normal noise is added to the latent.
        noise: bool,
    },
}

impl LinkFunction {
    pub fn needs_noise(&self) -> bool {
        match self {
            LinkFunction::ProbitThreshold => true,
            LinkFunction::Identity { noise } => *noise,
        }
    }
}

/// Parameters of the outcome process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseModel {
    /// Baseline utility.
    pub alpha: f64,
    /// Direct effect of the vertex's own treatment.
    pub beta: f64,
    /// Peer-effect coefficient on the mean of neighbors' prior behavior.
    pub gamma: f64,
    /// Number of time steps `T >= 1`.
    pub steps: usize,
    pub link: LinkFunction,
}

impl ResponseModel {
    pub fn validate(&self) {
        assert!(self.steps >= 1, "the process needs at least one time step");
    }
}

/// Standard normal noise for steps `1..=T`; `values[t - 1][i]` is the draw
/// for vertex `i` at step `t`. The grid is a pure function of the stream it
/// was drawn from, independent of any treatment assignment.
#[derive(Debug, Clone)]
pub struct NoiseGrid {
    values: Vec<Vec<f64>>,
}

impl NoiseGrid {
    pub fn sample<R: Rng>(n: usize, steps: usize, rng: &mut R) -> NoiseGrid {
        let values = (0..steps)
            .map(|_| {
                (0..n)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        NoiseGrid { values }
    }

    pub fn at(&self, t: usize, vertex: usize) -> f64 {
        self.values[t - 1][vertex]
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }
}

/// Simulated behaviors for `t = 0..=T`; `y[t][i]` is vertex `i` at time `t`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub y: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Behaviors at the final time step.
    pub fn final_outcomes(&self) -> &[f64] {
        self.y
            .last()
            .expect("trajectory has at least the initial row")
    }

    pub fn mean_final(&self) -> f64 {
        let last = self.final_outcomes();
        last.iter().sum::<f64>() / last.len() as f64
    }

    /// CSV dump with columns `t,vertex,y`.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "t,vertex,y")?;
        for (t, row) in self.y.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                writeln!(writer, "{t},{i},{v}")?;
            }
        }
        Ok(())
    }
}

/// Runs the outcome process with an explicit noise grid. The grid is
/// required exactly when the link uses noise, and must cover `steps` steps.
/// Isolated vertices contribute a peer term of zero.
pub fn simulate_with_noise(
    g: &Graph,
    z: &[u8],
    model: &ResponseModel,
    noise: Option<&NoiseGrid>,
) -> Trajectory {
    model.validate();
    let n = g.vertex_count();
    assert_eq!(z.len(), n, "assignment length must match vertex count");
    if model.link.needs_noise() {
        let grid = noise.expect("link function requires a noise grid");
        assert!(grid.steps() >= model.steps, "noise grid too short");
    }

    let mut y = Vec::with_capacity(model.steps + 1);
    y.push(vec![0.0; n]);
    for t in 1..=model.steps {
        let prev = &y[t - 1];
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let peer = peer_mean(g, prev, i);
            let mut latent = model.alpha + model.beta * f64::from(z[i]) + model.gamma * peer;
            if model.link.needs_noise() {
                latent += noise.unwrap().at(t, i);
            }
            row.push(match model.link {
                LinkFunction::ProbitThreshold => f64::from(latent > 0.0),
                LinkFunction::Identity { .. } => latent,
            });
        }
        y.push(row);
    }
    Trajectory { y }
}

fn peer_mean(g: &Graph, prev: &[f64], i: usize) -> f64 {
    let nb = g.neighbors(i);
    if nb.is_empty() {
        return 0.0;
    }
    nb.iter().map(|&j| prev[j]).sum::<f64>() / nb.len() as f64
}

/// Runs the outcome process, drawing any required noise from `rng`.
pub fn simulate<R: Rng>(g: &Graph, z: &[u8], model: &ResponseModel, rng: &mut R) -> Trajectory {
    let noise = model
        .link
        .needs_noise()
        .then(|| NoiseGrid::sample(g.vertex_count(), model.steps, rng));
    simulate_with_noise(g, z, model, noise.as_ref())
}

/// Estimates the true average treatment effect by simulating the process
/// under global treatment and global control, pairing the two runs of each
/// replication on a common noise grid.
///
/// Returns the estimate and its Monte Carlo standard error (0 when
/// `replications == 1` or the process is deterministic).
pub fn true_ate_monte_carlo(
    g: &Graph,
    model: &ResponseModel,
    replications: usize,
    seed: u64,
) -> (f64, f64) {
    assert!(replications >= 1);
    let n = g.vertex_count();
    let ones = vec![1u8; n];
    let zeros = vec![0u8; n];
    let mut diffs = Vec::with_capacity(replications);
    for rep in 0..replications {
        let mut rng = stream(seed, "true-ate", rep as u64, StreamRole::Truth);
        let noise = model
            .link
            .needs_noise()
            .then(|| NoiseGrid::sample(n, model.steps, &mut rng));
        let y1 = simulate_with_noise(g, &ones, model, noise.as_ref());
        let y0 = simulate_with_noise(g, &zeros, model, noise.as_ref());
        diffs.push(y1.mean_final() - y0.mean_final());
    }
    mean_and_standard_error(&diffs)
}

pub(crate) fn mean_and_standard_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
