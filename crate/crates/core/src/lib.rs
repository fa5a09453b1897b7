//! Separative valuation algebras.
//!
//! The crate provides domain lattices, a generic valuation-algebra contract,
//! the quotient extension Ψ⁰ with partial projection, conditionals, the
//! compositional operator, and three instances: probability potentials
//! (regular), Gaussian potentials (cancellative) and belief functions
//! (separative only). A randomized law harness checks the algebraic
//! identities on each instance.

pub mod algebra;
pub mod belief;
pub mod composition;
pub mod conditional;
pub mod error;
pub mod gaussian;
pub mod generators;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod potential;
pub mod quotient;
pub mod report;

pub use algebra::{GroupTag, Instance, Valuation, DEFAULT_TOL};
pub use error::{Error, Result};
pub use lattice::{Domain, Partition, VarSet};
