//! Continuum Dirichlet lifting by shooting.
//!
//! Solves `(λ − a∂² − (b+p₁)∂ − (c+p₀)) f = 0`, `f(0) = x₀`, `f(1) = x₁`
//! for the first-order system `y = (f, f')` with a fine RK4 fundamental
//! matrix. Used as the oracle that discrete liftings and DtN matrices
//! converge to.

use crate::dense::{solve_linear, Lu, Matrix, C64};
use crate::error::{Error, Result};
use crate::interval::{Grid, WentzellProblem};

/// Lifting sampled at grid nodes with exact endpoint derivatives.
#[derive(Debug, Clone)]
pub struct ReferenceLifting {
    pub lambda: C64,
    /// `N·n × 2n`, node-major like the grid functions.
    pub values: Matrix,
    /// `n × 2n` values and derivatives at `s = 0` and `s = 1`.
    pub f0: Matrix,
    pub f1: Matrix,
    pub df0: Matrix,
    pub df1: Matrix,
}

impl ReferenceLifting {
    /// Continuum DtN matrix `M₀ f'(0) + M₁ f'(1) + N₀ f(0) + N₁ f(1)`.
    pub fn dtn(&self, problem: &WentzellProblem) -> Matrix {
        let terms = [
            (&problem.m0, &self.df0),
            (&problem.m1, &self.df1),
            (&problem.n0, &self.f0),
            (&problem.n1, &self.f1),
        ];
        let mut out = Matrix::zeros(2 * problem.n, 2 * problem.n);
        for (m, v) in terms {
            out = &out + &(m * v);
        }
        out
    }
}

fn system_matrix(problem: &WentzellProblem, lambda: C64, s: f64, with_p: bool) -> Matrix {
    let n = problem.n;
    let mut b = problem.b.eval(s);
    let mut c = problem.c.eval(s);
    if with_p {
        b = &b + &problem.p1.eval(s);
        c = &c + &problem.p0.eval(s);
    }
    let mut f = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        f[(i, n + i)] = C64::new(1.0, 0.0);
        let inv_a = problem.a[i].eval(s).inv();
        for j in 0..n {
            let shift = if i == j { lambda } else { C64::default() };
            f[(n + i, j)] = (shift - c[(i, j)]) * inv_a;
            f[(n + i, n + j)] = -b[(i, j)] * inv_a;
        }
    }
    f
}

fn axpy(y: &Matrix, k: &Matrix, dt: f64) -> Matrix {
    y + &k.scale(C64::new(dt, 0.0))
}

/// Lifting of the continuum problem at `λ`, sampled on `grid`.
///
/// `with_perturbation` selects `A_m + P` instead of `A_m`.
pub fn reference_lifting(
    problem: &WentzellProblem,
    grid: &Grid,
    lambda: C64,
    with_perturbation: bool,
) -> Result<ReferenceLifting> {
    problem.validate()?;
    let n = problem.n;
    let cells = grid.nodes - 1;
    let sub = (8192 / cells).max(4);
    let dt = 1.0 / (cells * sub) as f64;
    let rhs = |s: f64, y: &Matrix| &system_matrix(problem, lambda, s, with_perturbation) * y;

    let mut phi = Matrix::identity(2 * n);
    let mut samples = Vec::with_capacity(grid.nodes);
    samples.push(phi.clone());
    for cell in 0..cells {
        for k in 0..sub {
            let s = (cell * sub + k) as f64 * dt;
            let k1 = rhs(s, &phi);
            let k2 = rhs(s + 0.5 * dt, &axpy(&phi, &k1, 0.5 * dt));
            let k3 = rhs(s + 0.5 * dt, &axpy(&phi, &k2, 0.5 * dt));
            let k4 = rhs(s + dt, &axpy(&phi, &k3, dt));
            let incr = &(&k1 + &k4) + &(&k2 + &k3).scale(C64::new(2.0, 0.0));
            phi = axpy(&phi, &incr, dt / 6.0);
        }
        if !phi.is_finite() {
            return Err(Error::InvalidArgument(format!("shooting overflowed for λ = {lambda}")));
        }
        samples.push(phi.clone());
    }

    // f(s) = Φ₁₁(s) X₀ + Φ₁₂(s) V with V fixed by f(1) = X₁.
    let x0 = Matrix::from_fn(
        n,
        2 * n,
        |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::default() },
    );
    let x1 = Matrix::from_fn(
        n,
        2 * n,
        |i, j| if j == n + i { C64::new(1.0, 0.0) } else { C64::default() },
    );
    let end = samples.last().expect("at least one cell");
    let p11 = end.block(0, 0, n, n);
    let p12 = end.block(0, n, n, n);
    Lu::factor(&p12).map_err(|_| Error::ResolventPole {
        lambda,
        what: "continuum Dirichlet problem".into(),
    })?;
    let v = solve_linear(&p12, &(&x1 - &(&p11 * &x0)))?;

    let eval =
        |phi: &Matrix, row: usize| -> Matrix { &(&phi.block(row, 0, n, n) * &x0) + &(&phi.block(row, n, n, n) * &v) };
    let mut values = Matrix::zeros(grid.full_dim(), 2 * n);
    for (i, phi) in samples.iter().enumerate() {
        values.set_block(i * n, 0, &eval(phi, 0));
    }
    // Endpoint values are exact by construction; pin them against roundoff.
    values.set_block(0, 0, &x0);
    values.set_block((grid.nodes - 1) * n, 0, &x1);
    Ok(ReferenceLifting {
        lambda,
        values,
        f0: x0.clone(),
        f1: x1,
        df0: eval(&samples[0], n),
        df1: eval(end, n),
    })
}
