//! Exact computer algebra for lattice-graded Lie algebras whose homogeneous
//! components are at most one-dimensional.
//!
//! The crate constructs the classical examples (the Witt algebra and its
//! generalizations W_l and W_π, the loop algebras A₁⁽¹⁾ and A₂⁽²⁾), verifies
//! structure constants exactly over ℚ or ℚ(i), and classifies an algebra
//! given by its structure constants on a finite box of degrees.

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod error;
pub mod jordan;
pub mod json;
pub mod lattice;
pub mod local_lie;
pub mod matrix;
pub mod scalar;
pub mod scalar_lie;
pub mod structure;
pub mod symbols;

pub use error::{Error, Result};
pub use lattice::{apply_map, symplectic_form, AdditiveMap, GradingGroup, LatticeBox, LatticePoint};
pub use matrix::{nullspace, ExactMatrix};
pub use scalar::{Field, Rational, Scalar};
pub use structure::{GradedProduct, ScalarStructure};
