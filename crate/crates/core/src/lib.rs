//! Simulation laboratory and estimation library for randomized experiments
//! on networks under interference.
//!
//! The crate follows the phases of a network experiment:
//!
//! * [`graph`] -- network initialization: small-world and degree-corrected
//!   blockmodel generators, BFS, clustering coefficient, edge-list files.
//! * [`clustering`] -- epsilon-net and singleton vertex partitions.
//! * [`design`] -- treatment randomization: independent, graph-cluster,
//!   balanced graph-cluster, and hole-punched designs, with exact
//!   assignment probabilities and support enumeration.
//! * [`outcomes`] -- the dynamic peer-effect outcome process (probit or
//!   identity link) and Monte Carlo ground truth.
//! * [`exposure`] -- effective-treatment conditions and exact exposure
//!   probabilities (closed forms, a convolution dynamic program for
//!   cluster randomization, and a brute-force oracle).
//! * [`estimators`] -- difference-in-means, exposure-restricted means,
//!   Hajek, and Horvitz--Thompson estimators.
//! * [`theory`] -- closed-form linear-outcome estimands, relative bias,
//!   and exhaustive-enumeration estimand evaluation.
//! * [`harness`] -- the configuration-driven Monte Carlo experiment
//!   driver behind the `netexp` command-line interface.
//!
//! One pass through the experiment phases:
//!
//! ```
//! use netexp::rng::{stream, StreamRole};
//! use netexp::{clustering, design, estimators, graph, outcomes};
//!
//! let spec = graph::SmallWorldSpec { n: 100, k: 4, p_rewire: 0.05 };
//! let mut rng = stream(7, "docs", 0, StreamRole::Graph);
//! let g = graph::generate_small_world(&spec, &mut rng).unwrap();
//!
//! let net = clustering::epsilon_net(&g, 3, &mut rng);
//! let d = design::Design::graph_cluster(net.clustering, 0.5).unwrap();
//! let assignment = design::draw_assignment(&d, &mut rng);
//!
//! let model = outcomes::ResponseModel {
//!     alpha: -1.5,
//!     beta: 0.75,
//!     gamma: 0.5,
//!     steps: 3,
//!     link: outcomes::LinkFunction::ProbitThreshold,
//! };
//! let trajectory = outcomes::simulate(&g, &assignment.z, &model, &mut rng);
//!
//! let estimate = estimators::diff_in_means(trajectory.final_outcomes(), &assignment.z);
//! assert!(estimate.estimate.is_some());
//! ```

pub mod clustering;
pub mod design;
pub mod error;
pub mod estimators;
pub mod exposure;
pub mod graph;
pub mod harness;
pub mod outcomes;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
