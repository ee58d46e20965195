//! Graphons as a computational object.
//!
//! Step and kernel graphons, the cut norm and cut distance, homomorphism
//! densities, W-random and graphex samplers, blockmodel and spectral
//! estimators, and neighborhood-smoothing completion of sparsely observed
//! networks.

pub mod completion;
pub mod cutmetric;
pub mod density;
pub mod error;
pub mod graph;
pub mod graphons;
pub mod io;
pub mod prob;
pub mod rng;
pub mod estimation;
pub mod samplers;

pub use cutmetric::{cut_distance, cut_distance_labeled, cut_norm_exact, cut_norm_heuristic, CutResult, DistanceMode};
pub use density::{hom_density, subgraph_density_empirical, Motif};
pub use error::{Error, Result};
pub use graph::LabeledGraph;
pub use graphons::{discretize, empirical_graphon, Graphon, KernelGraphon, StepGraphon};
pub use prob::{mse_vs_truth, ProbMatrix};
pub use samplers::{sample_dense, sample_graphex, sample_sbm, sample_sparse, BlockModel, Latents, SampleTrace};
