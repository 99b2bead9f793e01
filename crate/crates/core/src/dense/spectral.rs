use serde::{Deserialize, Serialize};

use super::{DenseError, Matrix, C64};

/// Eigenvalues (square input only) and singular values in decreasing order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectralQuantities {
    pub eigenvalues: Option<Vec<C64>>,
    pub singular_values: Option<Vec<f64>>,
}

impl SpectralQuantities {
    /// Largest real part among the eigenvalues.
    pub fn spectral_abscissa(&self) -> Option<f64> {
        self.eigenvalues
            .as_ref()
            .map(|ev| ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
    }
}

fn iteration_cap(n: usize) -> usize {
    200 * (n + 1)
}

/// Singular values only.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>, DenseError> {
    let cap = iteration_cap(a.rows().max(a.cols()));
    match a.to_nalgebra().try_svd(false, false, f64::EPSILON, cap) {
        Some(svd) => {
            let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
            sv.sort_by(|x, y| y.total_cmp(x));
            Ok(sv)
        }
        None => Err(DenseError::NoConvergence {
            what: "singular value decomposition",
            iterations: cap,
            partial: Box::default(),
        }),
    }
}

/// Eigenvalues from the diagonal of a complex Schur form, plus singular values.
pub fn spectral_quantities(a: &Matrix) -> Result<SpectralQuantities, DenseError> {
    let mut out = SpectralQuantities::default();
    let sv_err = match singular_values(a) {
        Ok(sv) => {
            out.singular_values = Some(sv);
            None
        }
        Err(e) => Some(e),
    };
    if a.is_square() {
        let cap = iteration_cap(a.rows());
        match a.to_nalgebra().try_schur(f64::EPSILON, cap) {
            Some(schur) => {
                let (_, t) = schur.unpack();
                out.eigenvalues = Some((0..t.nrows()).map(|i| t[(i, i)]).collect());
            }
            None => {
                return Err(DenseError::NoConvergence {
                    what: "Schur decomposition",
                    iterations: cap,
                    partial: Box::new(out),
                })
            }
        }
    }
    match sv_err {
        Some(DenseError::NoConvergence { what, iterations, .. }) => Err(DenseError::NoConvergence {
            what,
            iterations,
            partial: Box::new(out),
        }),
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::real;
    use std::f64::consts::PI;

    #[test]
    fn second_difference_eigenvalues() {
        let n = 4;
        let a = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                real(-2.0)
            } else if i.abs_diff(j) == 1 {
                real(1.0)
            } else {
                real(0.0)
            }
        });
        let sq = spectral_quantities(&a).unwrap();
        let mut got: Vec<f64> = sq.eigenvalues.unwrap().iter().map(|z| z.re).collect();
        got.sort_by(f64::total_cmp);
        let mut expect: Vec<f64> = (1..=n).map(|k| -2.0 + 2.0 * (k as f64 * PI / 5.0).cos()).collect();
        expect.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g - e).abs() < 1e-12, "{g} vs {e}");
        }
        // Symmetric, so singular values are the absolute eigenvalues.
        let sv = sq.singular_values.unwrap();
        assert!((sv[0] - expect.iter().map(|x| x.abs()).fold(0.0, f64::max)).abs() < 1e-12);
    }

    #[test]
    fn rectangular_has_no_eigenvalues() {
        let a = Matrix::from_real(2, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0]).unwrap();
        let sq = spectral_quantities(&a).unwrap();
        assert!(sq.eigenvalues.is_none());
        assert_eq!(sq.singular_values.unwrap().len(), 2);
    }
}
