//! Computations around squared Dehn twists on symplectic four-manifolds.
//!
//! - [`lattice`]: intersection lattices of blown-up planes, Picard-Lefschetz
//!   reflections, exceptional classes and roots.
//! - [`weyl`]: reflection-group closures and orbits.
//! - [`quantum`]: truncated quantum homology of monotone del Pezzo surfaces
//!   and the Frobenius obstruction for squared twists.
//! - [`monodromy`]: Hurwitz moves on ordered tuples of vanishing cycles.
//! - [`local_model`]: the model Dehn twist on `T*S^2` and its deformation.
//! - [`ci`]: invariants and verdicts for complete-intersection surfaces.

pub mod ci;
pub mod error;
pub mod lattice;
pub mod local_model;
pub mod monodromy;
pub mod quantum;
pub mod scalar;
pub mod weyl;

pub use error::{Error, Result};
pub use lattice::{BlowupLattice, ClassPredicate, ClassSet, HomologyClass};
pub use weyl::{Capped, IntMatrix};
