//! Frequency-space toolkit for Barron and Fourier-Lebesgue regularity of
//! many-body Schrodinger operators.

pub mod bounds;
pub mod cli;
pub mod operators;
pub mod solver_verify;
pub mod error;
pub mod grid;
pub mod potentials;
pub mod spaces;
pub mod special;

pub use error::{Error, Result};
