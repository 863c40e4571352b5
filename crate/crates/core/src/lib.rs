//! Certified lower bounds for Quantum Max Cut and the antiferromagnetic
//! Heisenberg model.
//!
//! The crate relaxes the ground-state problem to a conic program over
//! pairwise swap expectations `x_ij = <SWAP_ij>`, constrained so that every
//! few-qubit marginal is consistent with some quantum state. Modules:
//!
//! - [`graph`]: interaction graphs, lattice generators, file formats;
//! - [`conic`]: a self-contained SOC/SDP interior-point solver;
//! - [`model`]: the relaxations themselves;
//! - [`symmetry`]: symmetric-group irreps, Weingarten calculus and
//!   positivity oracles for unitary-invariant operators;
//! - [`exact`]: exact diagonalization for small instances;
//! - [`rounding`]: product/singlet rounding and its guarantee;
//! - [`analysis`]: approximation-ratio LP and parameter studies.

pub mod analysis;
pub mod conic;
pub mod error;
pub mod exact;
pub mod graph;
pub mod model;
pub mod rounding;
pub mod symmetry;

pub use conic::{solve, Cone, ConicProgram, ConicSolution, Method, SolveOptions, SparseMatrix, Status};
pub use error::{Error, Result};
pub use graph::{Edge, Graph, ScalingConvention};
pub use exact::{BlochAssignment, EdMethod, EdOptions};
pub use model::{ModelOptions, Relaxation, RelaxSolution, SubsetPolicy};
pub use rounding::{RoundOptions, RoundingResult};
