//! Finite-difference laboratory for second-order operators on [0, 1] with
//! dynamic (Wentzell) boundary conditions, plus an exact Fourier-mode model
//! on the unit disk.

pub mod convergence;
pub mod decomposition;
pub mod dense;
pub mod disk;
pub mod error;
pub mod interval;
pub mod operator;
pub mod perturbation;
pub mod probes;
pub mod reference;

pub use error::{Error, Result};
