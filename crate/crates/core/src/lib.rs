//! Finitely additive set functions (charges) on finite set algebras, and a
//! constructive, certificate-producing Komlós-type extraction for sequences
//! of charges.
//!
//! The crate is organized bottom-up:
//!
//! - [`set_algebra`]: ground sets, atom partitions, events, partitions and
//!   finite product spaces.
//! - [`charge`]: the lattice `ba(A)` at finite scale, with norms, meets,
//!   restrictions, outer measure and decompositions.
//! - [`komlos`]: convexify, truncate and restrict a sequence until it
//!   converges in variation norm, with per-step certificates.
//! - [`vector_charge`]: charges valued in a finite `L^1` space.
//! - [`slln`]: λ-convergence, the Cesàro strong-law harness, and scenario
//!   generators (empirical distributions, posterior disagreement).
//! - [`scenario`]: declarative JSON scenarios, reports and demos.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod charge;
pub mod error;
pub mod generators;
pub mod komlos;
pub mod scalar;
pub mod scenario;
pub mod set_algebra;
pub mod slln;
pub mod vector_charge;

pub use charge::{Charge, ProbabilityCharge, Tolerances};
pub use error::{Error, Result};
pub use set_algebra::{EventSet, Partition, ProductStructure, RawSubset, SetAlgebra};
