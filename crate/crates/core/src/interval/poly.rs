//! Polynomial coefficient functions on [0, 1].
//!
//! Coefficients are polynomials in `s` so they can be evaluated anywhere,
//! not just at grid nodes; the continuum reference solver needs values
//! between nodes.

use serde::{Deserialize, Serialize};

use crate::dense::{Matrix, C64};

/// A real or complex number in configuration files: `1.5` or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn value(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

impl From<C64> for Scalar {
    fn from(z: C64) -> Self {
        if z.im == 0.0 {
            Scalar::Real(z.re)
        } else {
            Scalar::Complex([z.re, z.im])
        }
    }
}

/// Polynomial `Σ c_k s^k` with complex coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PolyRepr {
    Constant(Scalar),
    Coefficients { poly: Vec<Scalar> },
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self.coeffs.as_slice() {
            [] => PolyRepr::Constant(Scalar::Real(0.0)),
            [c] => PolyRepr::Constant((*c).into()),
            cs => PolyRepr::Coefficients {
                poly: cs.iter().map(|&c| c.into()).collect(),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coeffs = match PolyRepr::deserialize(deserializer)? {
            PolyRepr::Constant(c) => vec![c.value()],
            PolyRepr::Coefficients { poly } => poly.into_iter().map(Scalar::value).collect(),
        };
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(serde::de::Error::custom("polynomial coefficient is not finite"));
        }
        Ok(Poly::new(coeffs))
    }
}

impl Poly {
    /// Coefficients in ascending powers of `s`; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::default()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub fn eval(&self, s: f64) -> C64 {
        self.coeffs.iter().rev().fold(C64::default(), |acc, &c| acc * s + c)
    }

    pub fn sum(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let at = |c: &[C64], k: usize| c.get(k).copied().unwrap_or_default();
        Poly::new((0..len).map(|k| at(&self.coeffs, k) + at(&other.coeffs, k)).collect())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Minimum of the real part over `samples + 1` equispaced points.
    pub fn min_real_on_unit(&self, samples: usize) -> (f64, f64) {
        (0..=samples)
            .map(|k| {
                let s = k as f64 / samples as f64;
                (s, self.eval(s).re)
            })
            .fold(
                (0.0, f64::INFINITY),
                |best, cur| if cur.1 < best.1 { cur } else { best },
            )
    }
}

/// `n × n` matrix of polynomials, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Poly::zero(); n * n],
        }
    }

    /// `p(s)·I`.
    pub fn scalar(n: usize, p: Poly) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = p.clone();
        }
        m
    }

    pub fn diagonal(diag: Vec<Poly>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, p) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = p;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(Poly::is_constant)
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(Poly::is_real)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.entry(i, j).is_zero()))
    }

    /// Entrywise sum; `None` on a size mismatch.
    pub fn sum(&self, other: &PolyMatrix) -> Option<PolyMatrix> {
        (self.n == other.n).then(|| PolyMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.sum(b)).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|p| p.scale(s)).collect(),
        }
    }

    pub fn eval(&self, s: f64) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.entry(i, j).eval(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_evaluation() {
        let p = Poly::real(&[1.0, 0.5, 2.0]);
        assert_eq!(p.eval(2.0), C64::new(1.0 + 1.0 + 8.0, 0.0));
        assert!(Poly::real(&[3.0, 0.0]).is_constant());
    }

    #[test]
    fn json_forms() {
        let p: Poly = serde_json::from_str("2.5").unwrap();
        assert_eq!(p, Poly::real(&[2.5]));
        let p: Poly = serde_json::from_str("[1.0, -2.0]").unwrap();
        assert_eq!(p.eval(0.3), C64::new(1.0, -2.0));
        let p: Poly = serde_json::from_str(r#"{"poly": [1, [0, 1]]}"#).unwrap();
        assert_eq!(p.eval(1.0), C64::new(1.0, 1.0));
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Poly>(&back).unwrap(), p);
    }
}
