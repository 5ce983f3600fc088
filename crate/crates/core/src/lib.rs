//! Bayesian retrodiction for classical and quantum channels.
//!
//! The crate covers Bayes inversion of stochastic matrices, the Petz recovery
//! map and its dilation form, Cartan analysis of two-qubit unitaries
//! (generalized-thermal classification and product preservation), and
//! tabletop-reversibility decisions for dilated channels.

pub mod channel;
pub mod classical;
pub mod error;
pub mod io;
pub mod linalg;
pub mod reversibility;
pub mod sample;
pub mod tolerance;
pub mod twoqubit;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityOperator, HermitianOperator, UnitaryOperator, C64};
pub use tolerance::Tolerances;
