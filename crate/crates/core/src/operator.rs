//! Operators with a fast resolvent.
//!
//! Sector scans evaluate thousands of resolvents, so each operator keeps the
//! structure that makes `(λ − A)⁻¹` cheap: a band plus a low-rank term
//! (Woodbury), a diagonal, or, failing both, a dense matrix.

use crate::dense::{singular_values, spectral_quantities, BandLu, DenseError, Lu, Matrix, NormKind, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Kind {
    Dense(Matrix),
    /// `band + u·w` with `band` confined to `kl` sub- and `ku` super-diagonals.
    Banded {
        band: Matrix,
        kl: usize,
        ku: usize,
        u: Matrix,
        w: Matrix,
    },
    Diagonal(Vec<C64>),
}

#[derive(Debug, Clone)]
pub struct Operator {
    name: String,
    kind: Kind,
    /// Absolute accuracy of the entries; shifts with `σ_min(λ − A)` at or
    /// below it count as spectral points.
    spectral_tolerance: Option<f64>,
}

fn pole(lambda: C64, name: &str, e: DenseError) -> Error {
    match e {
        DenseError::SingularMatrix { .. } => Error::SpectrumHit {
            lambda,
            what: name.to_string(),
        },
        other => other.into(),
    }
}

impl Operator {
    pub fn dense(name: impl Into<String>, m: Matrix) -> Self {
        assert!(m.is_square(), "operators are square");
        Self {
            name: name.into(),
            kind: Kind::Dense(m),
            spectral_tolerance: None,
        }
    }

    pub fn diagonal(name: impl Into<String>, d: Vec<C64>) -> Self {
        Self {
            name: name.into(),
            kind: Kind::Diagonal(d),
            spectral_tolerance: None,
        }
    }

    /// Splits `m` into its `(kl, ku)` band and a row-wise low-rank remainder.
    /// Falls back to dense storage when too many rows leave the band.
    pub fn banded(name: impl Into<String>, m: Matrix, kl: usize, ku: usize) -> Self {
        assert!(m.is_square(), "operators are square");
        let dim = m.rows();
        let mut band = m.clone();
        let mut far_rows = Vec::new();
        for i in 0..dim {
            let far: Vec<(usize, C64)> = (0..dim)
                .filter(|&j| (j + kl < i || i + ku < j) && m[(i, j)] != C64::default())
                .map(|j| (j, m[(i, j)]))
                .collect();
            if !far.is_empty() {
                for &(j, _) in &far {
                    band[(i, j)] = C64::default();
                }
                far_rows.push((i, far));
            }
        }
        if far_rows.len() * 8 > dim {
            return Self::dense(name, m);
        }
        let k = far_rows.len();
        let mut u = Matrix::zeros(dim, k);
        let mut w = Matrix::zeros(k, dim);
        for (c, (i, far)) in far_rows.into_iter().enumerate() {
            u[(i, c)] = C64::new(1.0, 0.0);
            for (j, v) in far {
                w[(c, j)] = v;
            }
        }
        Self::band_plus_low_rank(name, band, kl, ku, u, w)
    }

    pub fn band_plus_low_rank(
        name: impl Into<String>,
        band: Matrix,
        kl: usize,
        ku: usize,
        u: Matrix,
        w: Matrix,
    ) -> Self {
        assert!(band.is_square() && u.rows() == band.rows() && w.cols() == band.cols());
        assert_eq!(u.cols(), w.rows(), "low-rank factors must conform");
        Self {
            name: name.into(),
            kind: Kind::Banded { band, kl, ku, u, w },
            spectral_tolerance: None,
        }
    }

    /// Marks the entries as known only to `tolerance` (absolute), e.g. for
    /// matrices assembled from ill-conditioned solves. Pivot tests alone
    /// would miss spectral points blurred by that error.
    pub fn with_spectral_tolerance(mut self, tolerance: f64) -> Self {
        self.spectral_tolerance = Some(tolerance);
        self
    }

    pub fn spectral_tolerance(&self) -> Option<f64> {
        self.spectral_tolerance
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Dense(m) => m.rows(),
            Kind::Banded { band, .. } => band.rows(),
            Kind::Diagonal(d) => d.len(),
        }
    }

    pub fn to_dense(&self) -> Matrix {
        match &self.kind {
            Kind::Dense(m) => m.clone(),
            Kind::Banded { band, u, w, .. } => band + &(u * w),
            Kind::Diagonal(d) => Matrix::from_diagonal(d),
        }
    }

    pub fn is_real(&self) -> bool {
        match &self.kind {
            Kind::Dense(m) => m.is_real(),
            Kind::Banded { band, u, w, .. } => band.is_real() && u.is_real() && w.is_real(),
            Kind::Diagonal(d) => d.iter().all(|z| z.im == 0.0),
        }
    }

    pub fn norm_sup(&self) -> f64 {
        match &self.kind {
            Kind::Diagonal(d) => d.iter().map(|z| z.norm()).fold(0.0, f64::max),
            _ => self.to_dense().norm_sup(),
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        match &self.kind {
            Kind::Diagonal(d) => Ok(d.clone()),
            _ => Ok(spectral_quantities(&self.to_dense())?.eigenvalues.unwrap_or_default()),
        }
    }

    pub fn spectral_abscissa(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// `(λ − A)⁻¹`; a singular shift is reported as [`Error::SpectrumHit`].
    pub fn resolvent(&self, lambda: C64) -> Result<Matrix> {
        if let Some(tol) = self.spectral_tolerance {
            let sv = singular_values(&self.to_dense().shifted_negation(lambda))?;
            if sv.last().is_some_and(|&s| s <= tol) {
                return Err(Error::SpectrumHit {
                    lambda,
                    what: self.name.clone(),
                });
            }
        }
        match &self.kind {
            Kind::Dense(m) => {
                let lu = Lu::factor(&m.shifted_negation(lambda)).map_err(|e| pole(lambda, &self.name, e))?;
                Ok(lu.inverse())
            }
            Kind::Banded { band, kl, ku, u, w } => {
                let lu = BandLu::factor(&band.shifted_negation(lambda), *kl, *ku)
                    .map_err(|e| pole(lambda, &self.name, e))?;
                let inv = lu.inverse();
                if u.cols() == 0 {
                    return Ok(inv);
                }
                // (A − UW)⁻¹ = A⁻¹ + A⁻¹U (I − W A⁻¹U)⁻¹ W A⁻¹
                let au = &inv * u;
                let wa = w * &inv;
                let small = (w * &au).shifted_negation(C64::new(1.0, 0.0));
                let z = Lu::factor(&small)
                    .map_err(|e| pole(lambda, &self.name, e))?
                    .solve(&wa)?;
                Ok(&inv + &(&au * &z))
            }
            Kind::Diagonal(d) => {
                let mut inv = Vec::with_capacity(d.len());
                for &x in d {
                    let gap = lambda - x;
                    if gap.norm() <= 1e-14 * lambda.norm().max(x.norm()) || gap == C64::default() {
                        return Err(Error::SpectrumHit {
                            lambda,
                            what: self.name.clone(),
                        });
                    }
                    inv.push(gap.inv());
                }
                Ok(Matrix::from_diagonal(&inv))
            }
        }
    }

    /// `‖λ (λ − A)⁻¹‖` in the requested norm.
    pub fn scaled_resolvent_norm(&self, lambda: C64, norm: NormKind) -> Result<f64> {
        if let Kind::Diagonal(d) = &self.kind {
            let mut worst: f64 = 0.0;
            for &x in d {
                let gap = lambda - x;
                if gap == C64::default() {
                    return Err(Error::SpectrumHit {
                        lambda,
                        what: self.name.clone(),
                    });
                }
                worst = worst.max(lambda.norm() / gap.norm());
            }
            return Ok(worst);
        }
        Ok(lambda.norm() * self.resolvent(lambda)?.norm(norm))
    }

    /// `A − ω`, same structure.
    pub fn shifted(&self, omega: f64) -> Operator {
        let w = C64::new(omega, 0.0);
        let kind = match &self.kind {
            Kind::Dense(m) => Kind::Dense(m.add_scaled_identity(-w)),
            Kind::Banded { band, kl, ku, u, w: ww } => Kind::Banded {
                band: band.add_scaled_identity(-w),
                kl: *kl,
                ku: *ku,
                u: u.clone(),
                w: ww.clone(),
            },
            Kind::Diagonal(d) => Kind::Diagonal(d.iter().map(|x| x - w).collect()),
        };
        Operator {
            name: self.name.clone(),
            kind,
            spectral_tolerance: self.spectral_tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{c64, real};

    fn tridiagonal_with_corner(n: usize) -> Matrix {
        let mut m = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                real(-2.0)
            } else if i.abs_diff(j) == 1 {
                real(1.0)
            } else {
                real(0.0)
            }
        });
        m[(0, n - 1)] = real(0.5);
        m[(n - 1, 0)] = real(-0.25);
        m
    }

    #[test]
    fn banded_woodbury_matches_dense() {
        let m = tridiagonal_with_corner(30);
        let dense = Operator::dense("d", m.clone());
        let banded = Operator::banded("b", m, 1, 1);
        assert!(matches!(banded.kind, Kind::Banded { .. }));
        for lambda in [c64(1.0, 0.0), c64(-1.0, 3.0), c64(0.2, -0.7)] {
            let a = dense.resolvent(lambda).unwrap();
            let b = banded.resolvent(lambda).unwrap();
            assert!((&a - &b).max_abs() < 1e-12 * a.max_abs());
        }
    }

    #[test]
    fn diagonal_resolvent_and_poles() {
        let op = Operator::diagonal("diag", vec![real(-1.0), real(-4.0)]);
        let r = op.resolvent(real(1.0)).unwrap();
        assert_eq!(r[(0, 0)], real(0.5));
        assert!(matches!(op.resolvent(real(-4.0)), Err(Error::SpectrumHit { .. })));
        let v = op.scaled_resolvent_norm(real(3.0), NormKind::Sup).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
    }

    #[test]
    fn dense_pole_is_spectrum_hit() {
        let op = Operator::dense("n", Matrix::from_real(2, 2, &[-1.0, 1.0, 1.0, -1.0]).unwrap());
        assert!(matches!(op.resolvent(real(0.0)), Err(Error::SpectrumHit { .. })));
    }

    #[test]
    fn blurred_pole_needs_the_spectral_tolerance() {
        let m = Matrix::from_real(2, 2, &[-1.0, 1.0 + 1e-13, 1.0, -1.0]).unwrap();
        assert!(Operator::dense("n", m.clone()).resolvent(real(0.0)).is_ok());
        let op = Operator::dense("n", m).with_spectral_tolerance(1e-11);
        assert!(matches!(op.resolvent(real(0.0)), Err(Error::SpectrumHit { .. })));
        assert!(matches!(
            op.shifted(1.0).resolvent(real(-1.0)),
            Err(Error::SpectrumHit { .. })
        ));
        assert!(op.resolvent(real(1e-6)).is_ok());
    }
}
