use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dense::{Matrix, C64};
use crate::error::{Error, Result};

/// Which discrete space a vector lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    FullGrid,
    InteriorGrid,
    Boundary,
    ModeSpace,
    /// Interior grid values stacked on top of boundary values.
    Product,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Space::FullGrid => "FullGrid",
            Space::InteriorGrid => "InteriorGrid",
            Space::Boundary => "Boundary",
            Space::ModeSpace => "ModeSpace",
            Space::Product => "Product(InteriorGrid, Boundary)",
        };
        f.write_str(name)
    }
}

/// Dense matrix tagged with its domain and codomain.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOp {
    matrix: Matrix,
    domain: Space,
    codomain: Space,
}

impl LinOp {
    pub fn new(matrix: Matrix, domain: Space, codomain: Space) -> Self {
        Self {
            matrix,
            domain,
            codomain,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn domain(&self) -> Space {
        self.domain
    }

    pub fn codomain(&self) -> Space {
        self.codomain
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinOp) -> Result<LinOp> {
        if self.domain != inner.codomain {
            return Err(Error::TagMismatch {
                expected: self.domain,
                found: inner.codomain,
            });
        }
        Ok(LinOp::new(
            self.matrix.matmul(&inner.matrix)?,
            inner.domain,
            self.codomain,
        ))
    }

    fn check_same(&self, other: &LinOp) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::TagMismatch {
                expected: self.domain,
                found: other.domain,
            });
        }
        if self.codomain != other.codomain {
            return Err(Error::TagMismatch {
                expected: self.codomain,
                found: other.codomain,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &LinOp) -> Result<LinOp> {
        self.check_same(other)?;
        Ok(LinOp::new(
            self.matrix.try_add(&other.matrix)?,
            self.domain,
            self.codomain,
        ))
    }

    pub fn sub(&self, other: &LinOp) -> Result<LinOp> {
        self.check_same(other)?;
        Ok(LinOp::new(
            self.matrix.try_sub(&other.matrix)?,
            self.domain,
            self.codomain,
        ))
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.matrix.cols() {
            return Err(Error::BadDimensions(format!(
                "operator on {} expects {} values, got {}",
                self.domain,
                self.matrix.cols(),
                v.len()
            )));
        }
        Ok(self.matrix.mul_vec(v))
    }
}

/// Grid function on all `N` nodes, node-major (`index = node·n + component`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    nodes: usize,
    components: usize,
    values: Vec<C64>,
}

impl GridFunction {
    pub fn new(nodes: usize, components: usize, values: Vec<C64>) -> Result<Self> {
        if values.len() != nodes * components {
            return Err(Error::BadDimensions(format!(
                "grid function needs {} values, got {}",
                nodes * components,
                values.len()
            )));
        }
        Ok(Self {
            nodes,
            components,
            values,
        })
    }

    pub fn from_fn(nodes: usize, components: usize, mut f: impl FnMut(f64, usize) -> C64) -> Self {
        let h = 1.0 / (nodes - 1) as f64;
        let mut values = Vec::with_capacity(nodes * components);
        for i in 0..nodes {
            for c in 0..components {
                values.push(f(i as f64 * h, c));
            }
        }
        Self {
            nodes,
            components,
            values,
        }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, node: usize, component: usize) -> C64 {
        self.values[node * self.components + component]
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Boundary data: components at `s = 0`, then components at `s = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryVector(Vec<C64>);

impl BoundaryVector {
    pub fn new(components: usize, values: Vec<C64>) -> Result<Self> {
        if values.len() != 2 * components {
            return Err(Error::BadDimensions(format!(
                "boundary vector needs {} values, got {}",
                2 * components,
                values.len()
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[C64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_checks_tags() {
        let trace = LinOp::new(Matrix::zeros(2, 5), Space::FullGrid, Space::Boundary);
        let lift = LinOp::new(Matrix::zeros(5, 2), Space::Boundary, Space::FullGrid);
        assert_eq!(trace.compose(&lift).unwrap().domain(), Space::Boundary);
        let err = trace.compose(&trace).unwrap_err();
        assert!(matches!(
            err,
            Error::TagMismatch {
                expected: Space::FullGrid,
                found: Space::Boundary
            }
        ));
    }

    #[test]
    fn boundary_vector_length() {
        assert!(BoundaryVector::new(2, vec![C64::default(); 3]).is_err());
        assert!(BoundaryVector::new(2, vec![C64::default(); 4]).is_ok());
    }
}
