//! Finite-difference model of a second-order system on `[0, 1]` with
//! boundary feedback.

mod linop;
mod model;
mod poly;
mod problem;

pub use linop::{BoundaryVector, GridFunction, LinOp, Space};
pub use model::{build_model, DiscreteModel, DomainBasis, Grid};
pub use poly::{Poly, PolyMatrix, Scalar};
pub use problem::{CoefficientSpec, IntervalSpec, WentzellProblem, DEFAULT_A_MIN};
