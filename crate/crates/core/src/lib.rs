//! Cut densities of weighted graphs and their testability.
//!
//! The crate computes homomorphism densities, balanced multiway cut
//! densities and ground-state energies by exact enumeration, the cut-norm
//! and related distances, a continuous relaxation of the balanced cut
//! problem, and random-sampling and Wigner-noise experiments around them.
//!
//! Exact routines are exponential and check their input size against
//! [`Guards`] first. Randomized routines take a [`SeededRng`] and give the
//! same result for any number of worker threads.

pub mod densities;
mod enumerate;
pub mod error;
pub mod graph;
pub mod guards;
pub mod homomorphism;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod qp;
pub mod rng;
pub mod sampling;

pub use densities::{Balance, EnergySpec, Functional, Optimum};
pub use error::{Error, Result};
pub use graph::{Partition, QuotientGraph, StepfunctionGraphon, WeightedGraph};
pub use guards::Guards;
pub use homomorphism::{DensityKind, SimpleGraph};
pub use linalg::Matrix;
pub use metrics::{CutNorm, QuotientSet};
pub use noise::{NoiseDistribution, NoiseSpec, NoisySequenceSpec};
pub use qp::{QpProblem, SolveOptions, SolveReport};
pub use rng::SeededRng;
pub use sampling::{Parameter, TestabilityReport};
