use serde::{Deserialize, Serialize};

use super::poly::{Poly, PolyMatrix, Scalar};
use crate::dense::{Matrix, C64};
use crate::error::{Error, Result};

/// Second-order system `a f'' + b f' + c f` on `[0, 1]` with values in `ℂⁿ`,
/// boundary feedback `M₀ f'(0) + M₁ f'(1) + N₀ f(0) + N₁ f(1)` and a
/// first-order perturbation `p₁ f' + p₀ f`.
#[derive(Debug, Clone, PartialEq)]
pub struct WentzellProblem {
    pub n: usize,
    /// Diagonal of `a`; each entry must stay real and above `a_min`.
    pub a: Vec<Poly>,
    pub b: PolyMatrix,
    pub c: PolyMatrix,
    pub m0: Matrix,
    pub m1: Matrix,
    pub n0: Matrix,
    pub n1: Matrix,
    pub p1: PolyMatrix,
    pub p0: PolyMatrix,
    pub a_min: f64,
}

pub const DEFAULT_A_MIN: f64 = 1e-6;

fn scaled_blocks(n: usize, top: C64, bottom: C64) -> Matrix {
    Matrix::from_fn(2 * n, n, |i, j| {
        if i == j {
            top
        } else if i == n + j {
            bottom
        } else {
            C64::default()
        }
    })
}

impl WentzellProblem {
    /// `f''` on `[0, 1]` with `n` uncoupled components and no feedback.
    pub fn laplacian_system(n: usize) -> Self {
        Self {
            n,
            a: vec![Poly::real(&[1.0]); n],
            b: PolyMatrix::zeros(n),
            c: PolyMatrix::zeros(n),
            m0: Matrix::zeros(2 * n, n),
            m1: Matrix::zeros(2 * n, n),
            n0: Matrix::zeros(2 * n, n),
            n1: Matrix::zeros(2 * n, n),
            p1: PolyMatrix::zeros(n),
            p0: PolyMatrix::zeros(n),
            a_min: DEFAULT_A_MIN,
        }
    }

    /// Scalar Laplacian with feedback `β ∂f/∂n + γ f` at both ends, the
    /// normal pointing outward (`−f'(0)`, `+f'(1)`).
    pub fn laplacian(beta: f64, gamma: f64) -> Self {
        Self::laplacian_system(1).with_beta_gamma(beta, gamma)
    }

    /// Populates `M₀ = β(−I; 0)`, `M₁ = β(0; I)`, `N₀ = γ(I; 0)`, `N₁ = γ(0; I)`.
    pub fn with_beta_gamma(mut self, beta: f64, gamma: f64) -> Self {
        let n = self.n;
        let (b, g) = (C64::new(beta, 0.0), C64::new(gamma, 0.0));
        self.m0 = scaled_blocks(n, -b, C64::default());
        self.m1 = scaled_blocks(n, C64::default(), b);
        self.n0 = scaled_blocks(n, g, C64::default());
        self.n1 = scaled_blocks(n, C64::default(), g);
        self
    }

    pub fn with_feedback(mut self, m0: Matrix, m1: Matrix, n0: Matrix, n1: Matrix) -> Self {
        self.m0 = m0;
        self.m1 = m1;
        self.n0 = n0;
        self.n1 = n1;
        self
    }

    pub fn with_a(mut self, a: Vec<Poly>) -> Self {
        self.a = a;
        self
    }

    pub fn with_b(mut self, b: PolyMatrix) -> Self {
        self.b = b;
        self
    }

    pub fn with_c(mut self, c: PolyMatrix) -> Self {
        self.c = c;
        self
    }

    pub fn with_perturbation(mut self, p1: PolyMatrix, p0: PolyMatrix) -> Self {
        self.p1 = p1;
        self.p0 = p0;
        self
    }

    /// Same problem with `P = 0`.
    pub fn without_perturbation(&self) -> Self {
        let n = self.n;
        self.clone()
            .with_perturbation(PolyMatrix::zeros(n), PolyMatrix::zeros(n))
    }

    /// Moves `P` into the unperturbed operator and perturbs back by `−P`, so
    /// that `A_m` and `A_m + P` trade places.
    pub fn with_roles_swapped(&self) -> Result<Self> {
        let minus = C64::new(-1.0, 0.0);
        let mismatch = || Error::BadDimensions("perturbation size differs from the drift".into());
        let b = self.b.sum(&self.p1).ok_or_else(mismatch)?;
        let c = self.c.sum(&self.p0).ok_or_else(mismatch)?;
        Ok(Self {
            b,
            c,
            p1: self.p1.scale(minus),
            p0: self.p0.scale(minus),
            ..self.clone()
        })
    }

    /// Checks shapes and that `a` is real with a positive floor on a fine
    /// sampling of `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::BadDimensions("component count must be positive".into()));
        }
        if self.a.len() != n {
            return Err(Error::BadDimensions(format!(
                "a has {} diagonal entries, expected {n}",
                self.a.len()
            )));
        }
        for (name, m) in [("b", &self.b), ("c", &self.c), ("p1", &self.p1), ("p0", &self.p0)] {
            if m.dim() != n {
                return Err(Error::BadDimensions(format!(
                    "{name} is {0}x{0}, expected {n}x{n}",
                    m.dim()
                )));
            }
        }
        for (name, m) in [("M0", &self.m0), ("M1", &self.m1), ("N0", &self.n0), ("N1", &self.n1)] {
            if m.rows() != 2 * n || m.cols() != n {
                return Err(Error::BadDimensions(format!(
                    "{name} is {}x{}, expected {}x{n}",
                    m.rows(),
                    m.cols(),
                    2 * n
                )));
            }
        }
        if self.a_min.is_nan() || self.a_min <= 0.0 {
            return Err(Error::BadParameters(format!(
                "a_min must be positive, got {}",
                self.a_min
            )));
        }
        for (i, ai) in self.a.iter().enumerate() {
            if !ai.is_real() {
                return Err(Error::BadParameters(format!("a_{i} must be real")));
            }
            self.check_positive(i, ai, 1000)?;
        }
        Ok(())
    }

    pub(crate) fn check_positive(&self, i: usize, ai: &Poly, samples: usize) -> Result<()> {
        let (s, v) = ai.min_real_on_unit(samples);
        if v.is_nan() || v < self.a_min {
            return Err(Error::PositivityViolation {
                component: i,
                s,
                value: v,
                a_min: self.a_min,
            });
        }
        Ok(())
    }

    /// Constant `a`, `b = c = 0` and `P = 0`: the discrete identities hold in
    /// exact arithmetic against the continuum ones.
    pub fn is_exact_tier(&self) -> bool {
        self.a.iter().all(Poly::is_constant)
            && self.b.is_zero()
            && self.c.is_zero()
            && self.p1.is_zero()
            && self.p0.is_zero()
    }

    pub fn has_perturbation(&self) -> bool {
        !(self.p1.is_zero() && self.p0.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.b.is_real()
            && self.c.is_real()
            && self.p1.is_real()
            && self.p0.is_real()
            && [&self.m0, &self.m1, &self.n0, &self.n1].iter().all(|m| m.is_real())
    }

    pub fn feedback_has_derivatives(&self) -> bool {
        self.m0.max_abs() > 0.0 || self.m1.max_abs() > 0.0
    }
}

/// Matrix-valued coefficient in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    /// `p(s)·I`.
    Scalar(Poly),
    Diagonal {
        diag: Vec<Poly>,
    },
    Full {
        matrix: Vec<Vec<Poly>>,
    },
}

impl CoefficientSpec {
    fn resolve(&self, n: usize, name: &str) -> Result<PolyMatrix> {
        let m = match self {
            CoefficientSpec::Scalar(p) => PolyMatrix::scalar(n, p.clone()),
            CoefficientSpec::Diagonal { diag } => PolyMatrix::diagonal(diag.clone()),
            CoefficientSpec::Full { matrix } => PolyMatrix::from_rows(matrix.clone())
                .ok_or_else(|| Error::BadDimensions(format!("{name} rows are ragged")))?,
        };
        if m.dim() != n {
            return Err(Error::BadDimensions(format!(
                "{name} has dimension {}, expected {n}",
                m.dim()
            )));
        }
        Ok(m)
    }
}

/// Interval problem as written in a configuration file.
///
/// Feedback is given either by the `beta`/`gamma` shorthand or by explicit
/// `m0`, `m1`, `n0`, `n1` matrices (missing ones are zero); with neither the
/// feedback vanishes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<CoefficientSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<CoefficientSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<CoefficientSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m1: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<CoefficientSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<CoefficientSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_min: Option<f64>,
}

fn boundary_matrix(rows: &[Vec<Scalar>], n: usize, name: &str) -> Result<Matrix> {
    if rows.len() != 2 * n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::BadDimensions(format!("{name} must be {}x{n}", 2 * n)));
    }
    let data = rows.iter().flatten().map(|s| s.value()).collect();
    Ok(Matrix::new(2 * n, n, data)?)
}

impl IntervalSpec {
    pub fn build(&self) -> Result<WentzellProblem> {
        let n = self.n.unwrap_or(1);
        if n == 0 {
            return Err(Error::BadDimensions("n must be positive".into()));
        }
        let mut p = WentzellProblem::laplacian_system(n);
        if let Some(a) = &self.a {
            let m = a.resolve(n, "a")?;
            if !m.is_diagonal() {
                return Err(Error::BadParameters("a must be diagonal".into()));
            }
            p.a = (0..n).map(|i| m.entry(i, i).clone()).collect();
        }
        if let Some(b) = &self.b {
            p.b = b.resolve(n, "b")?;
        }
        if let Some(c) = &self.c {
            p.c = c.resolve(n, "c")?;
        }
        if let Some(p1) = &self.p1 {
            p.p1 = p1.resolve(n, "p1")?;
        }
        if let Some(p0) = &self.p0 {
            p.p0 = p0.resolve(n, "p0")?;
        }
        let shorthand = self.beta.is_some() || self.gamma.is_some();
        let explicit = [&self.m0, &self.m1, &self.n0, &self.n1].iter().any(|m| m.is_some());
        if shorthand && explicit {
            return Err(Error::BadParameters(
                "give either beta/gamma or explicit boundary matrices, not both".into(),
            ));
        }
        if shorthand {
            p = p.with_beta_gamma(self.beta.unwrap_or(0.0), self.gamma.unwrap_or(0.0));
        }
        for (slot, spec, name) in [
            (&mut p.m0, &self.m0, "m0"),
            (&mut p.m1, &self.m1, "m1"),
            (&mut p.n0, &self.n0, "n0"),
            (&mut p.n1, &self.n1, "n1"),
        ] {
            if let Some(rows) = spec {
                *slot = boundary_matrix(rows, n, name)?;
            }
        }
        if let Some(a_min) = self.a_min {
            p.a_min = a_min;
        }
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_gamma_shorthand_layout() {
        let p = WentzellProblem::laplacian(-1.0, 2.0);
        assert_eq!(p.m0.col(0), vec![C64::new(1.0, 0.0), C64::default()]);
        assert_eq!(p.m1.col(0), vec![C64::default(), C64::new(-1.0, 0.0)]);
        assert_eq!(p.n0.col(0), vec![C64::new(2.0, 0.0), C64::default()]);
        assert_eq!(p.n1.col(0), vec![C64::default(), C64::new(2.0, 0.0)]);
    }

    #[test]
    fn rejects_non_positive_a() {
        let p = WentzellProblem::laplacian(-1.0, 0.0).with_a(vec![Poly::real(&[1.0, -2.0])]);
        assert!(matches!(p.validate(), Err(Error::PositivityViolation { .. })));
    }

    #[test]
    fn spec_from_json() {
        let spec: IntervalSpec =
            serde_json::from_str(r#"{"n": 1, "a": {"poly": [1, 0.5]}, "b": 1, "beta": -1, "gamma": 0}"#).unwrap();
        let p = spec.build().unwrap();
        assert!(!p.is_exact_tier());
        assert_eq!(p.a[0].eval(1.0), C64::new(1.5, 0.0));
        assert!(serde_json::from_str::<IntervalSpec>(r#"{"bta": 1}"#).is_err());
    }

    #[test]
    fn explicit_matrices_from_json() {
        let spec: IntervalSpec = serde_json::from_str(r#"{"n": 1, "n0": [[1], [0]], "n1": [[0], [[1, 0]]]}"#).unwrap();
        let p = spec.build().unwrap();
        assert!(!p.feedback_has_derivatives());
        assert_eq!(p.n1[(1, 0)], C64::new(1.0, 0.0));
    }
}
