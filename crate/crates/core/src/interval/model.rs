use serde::Serialize;

use super::linop::{GridFunction, LinOp, Space};
use super::poly::PolyMatrix;
use super::problem::WentzellProblem;
use crate::dense::{null_space, Matrix, C64};
use crate::error::{Error, Result};

/// Uniform grid on `[0, 1]` with `nodes` points and `components` unknowns
/// per node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub nodes: usize,
    pub h: f64,
    pub components: usize,
}

impl Grid {
    pub fn new(nodes: usize, components: usize) -> Result<Self> {
        if nodes < 5 {
            return Err(Error::BadDimensions(format!(
                "grid needs at least 5 nodes, got {nodes}"
            )));
        }
        Ok(Self {
            nodes,
            h: 1.0 / (nodes - 1) as f64,
            components,
        })
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 / (self.nodes - 1) as f64
    }

    pub fn full_dim(&self) -> usize {
        self.nodes * self.components
    }

    pub fn interior_dim(&self) -> usize {
        (self.nodes - 2) * self.components
    }

    pub fn boundary_dim(&self) -> usize {
        2 * self.components
    }

    /// Interior unknowns occupy one contiguous range in node-major order.
    pub fn interior_range(&self) -> std::ops::Range<usize> {
        self.components..(self.nodes - 1) * self.components
    }

    pub fn interior_indices(&self) -> Vec<usize> {
        self.interior_range().collect()
    }

    /// Unknowns at `s = 0` followed by those at `s = 1`.
    pub fn boundary_indices(&self) -> Vec<usize> {
        let n = self.components;
        let last = (self.nodes - 1) * n;
        (0..n).chain(last..last + n).collect()
    }
}

/// Second-difference stencil at node `i`, one-sided at the ends.
pub(crate) fn second_difference(i: usize, nodes: usize) -> [(usize, f64); 3] {
    let inv_h2 = ((nodes - 1) * (nodes - 1)) as f64;
    let c = if i == 0 {
        1
    } else if i == nodes - 1 {
        nodes - 2
    } else {
        i
    };
    [(c - 1, inv_h2), (c, -2.0 * inv_h2), (c + 1, inv_h2)]
}

/// First-difference stencil at node `i`: central inside, one-sided 3-point
/// at the ends.
pub(crate) fn first_difference(i: usize, nodes: usize) -> [(usize, f64); 3] {
    let inv_2h = (nodes - 1) as f64 / 2.0;
    if i == 0 {
        [(0, -3.0 * inv_2h), (1, 4.0 * inv_2h), (2, -inv_2h)]
    } else if i == nodes - 1 {
        [
            (nodes - 3, inv_2h),
            (nodes - 2, -4.0 * inv_2h),
            (nodes - 1, 3.0 * inv_2h),
        ]
    } else {
        [(i - 1, -inv_2h), (i, 0.0), (i + 1, inv_2h)]
    }
}

/// Assembles `diag(a) f'' + b f' + c f` on the full grid.
fn assemble(grid: &Grid, a: Option<&[super::poly::Poly]>, b: &PolyMatrix, c: &PolyMatrix) -> Matrix {
    let n = grid.components;
    let nodes = grid.nodes;
    let mut m = Matrix::zeros(grid.full_dim(), grid.full_dim());
    for i in 0..nodes {
        let s = grid.node(i);
        let bi = b.eval(s);
        let ci = c.eval(s);
        if let Some(a) = a {
            for (alpha, ap) in a.iter().enumerate() {
                let av = ap.eval(s);
                for (j, w) in second_difference(i, nodes) {
                    m[(i * n + alpha, j * n + alpha)] += av * w;
                }
            }
        }
        for (j, w) in first_difference(i, nodes) {
            if w == 0.0 {
                continue;
            }
            for alpha in 0..n {
                for beta in 0..n {
                    m[(i * n + alpha, j * n + beta)] += bi[(alpha, beta)] * w;
                }
            }
        }
        for alpha in 0..n {
            for beta in 0..n {
                m[(i * n + alpha, i * n + beta)] += ci[(alpha, beta)];
            }
        }
    }
    m
}

/// Grid, stencil matrices and the problem they came from.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    problem: WentzellProblem,
    grid: Grid,
    am: LinOp,
    pert: LinOp,
    trace: LinOp,
    feedback: LinOp,
    a0: LinOp,
}

/// Discretizes `problem` on `nodes` grid points.
pub fn build_model(problem: &WentzellProblem, nodes: usize) -> Result<DiscreteModel> {
    problem.validate()?;
    let grid = Grid::new(nodes, problem.n)?;
    for (i, ai) in problem.a.iter().enumerate() {
        for k in 0..nodes {
            let s = grid.node(k);
            let v = ai.eval(s).re;
            if v.is_nan() || v < problem.a_min {
                return Err(Error::PositivityViolation {
                    component: i,
                    s,
                    value: v,
                    a_min: problem.a_min,
                });
            }
        }
    }
    let n = problem.n;
    let am = assemble(&grid, Some(&problem.a), &problem.b, &problem.c);
    let pert = assemble(&grid, None, &problem.p1, &problem.p0);

    let bidx = grid.boundary_indices();
    let mut trace = Matrix::zeros(2 * n, grid.full_dim());
    for (r, &j) in bidx.iter().enumerate() {
        trace[(r, j)] = C64::new(1.0, 0.0);
    }

    let mut feedback = Matrix::zeros(2 * n, grid.full_dim());
    let ends = [
        (0usize, &problem.m0, &problem.n0),
        (nodes - 1, &problem.m1, &problem.n1),
    ];
    for (node, mm, nn) in ends {
        for r in 0..2 * n {
            for beta in 0..n {
                for (j, w) in first_difference(node, nodes) {
                    feedback[(r, j * n + beta)] += mm[(r, beta)] * w;
                }
                feedback[(r, node * n + beta)] += nn[(r, beta)];
            }
        }
    }

    let interior = grid.interior_indices();
    let a0 = am.select(&interior, &interior);
    Ok(DiscreteModel {
        problem: problem.clone(),
        grid,
        am: LinOp::new(am, Space::FullGrid, Space::FullGrid),
        pert: LinOp::new(pert, Space::FullGrid, Space::FullGrid),
        trace: LinOp::new(trace, Space::FullGrid, Space::Boundary),
        feedback: LinOp::new(feedback, Space::FullGrid, Space::Boundary),
        a0: LinOp::new(a0, Space::InteriorGrid, Space::InteriorGrid),
    })
}

/// Orthonormal basis of the discrete Wentzell domain.
#[derive(Debug, Clone)]
pub struct DomainBasis {
    /// Columns are full-grid functions.
    pub basis: Matrix,
    /// Largest constraint residual over the basis, relative to `‖Â_m‖∞`.
    pub max_residual: f64,
}

impl DomainBasis {
    pub fn functions(&self, grid: &Grid) -> Vec<GridFunction> {
        (0..self.basis.cols())
            .map(|j| {
                GridFunction::new(grid.nodes, grid.components, self.basis.col(j))
                    .expect("basis columns live on the grid")
            })
            .collect()
    }
}

impl DiscreteModel {
    pub fn problem(&self) -> &WentzellProblem {
        &self.problem
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `Â_m` without the perturbation.
    pub fn am(&self) -> &LinOp {
        &self.am
    }

    pub fn perturbation(&self) -> &LinOp {
        &self.pert
    }

    pub fn trace(&self) -> &LinOp {
        &self.trace
    }

    pub fn feedback(&self) -> &LinOp {
        &self.feedback
    }

    /// Dirichlet realization `Â₀`, the interior block of `Â_m`.
    pub fn a0(&self) -> &LinOp {
        &self.a0
    }

    /// `Â_m + P̂`, the operator whose boundary rows enter the Wentzell
    /// constraint.
    pub fn maximal(&self) -> LinOp {
        self.am.add(&self.pert).expect("same tags")
    }

    /// Interior block of `Â_m + P̂`.
    pub fn a0_perturbed(&self) -> LinOp {
        let idx = self.grid.interior_indices();
        LinOp::new(
            self.maximal().matrix().select(&idx, &idx),
            Space::InteriorGrid,
            Space::InteriorGrid,
        )
    }

    /// Half bandwidth of the full-grid stencil matrices.
    pub fn full_bandwidth(&self) -> usize {
        3 * self.grid.components - 1
    }

    /// Half bandwidth of interior stencil blocks.
    pub fn interior_bandwidth(&self) -> usize {
        2 * self.grid.components - 1
    }

    /// Generator of the dynamic boundary problem: interior rows of
    /// `Â_m + P̂`, boundary rows of `B̂`.
    pub fn wentzell_generator(&self) -> LinOp {
        let mut g = self.maximal().into_matrix();
        let fb = self.feedback.matrix();
        for (r, &row) in self.grid.boundary_indices().iter().enumerate() {
            g.row_mut(row).copy_from_slice(fb.row(r));
        }
        LinOp::new(g, Space::FullGrid, Space::FullGrid)
    }

    /// Rows `(Â_m + P̂)[boundary] − B̂`; the discrete Wentzell domain is their
    /// null space.
    pub fn constraint_rows(&self) -> Matrix {
        let m = self.maximal();
        let rows = m.matrix().select(
            &self.grid.boundary_indices(),
            &(0..self.grid.full_dim()).collect::<Vec<_>>(),
        );
        &rows - self.feedback.matrix()
    }

    /// Null-space basis of the Wentzell constraint.
    pub fn wentzell_domain_basis(&self) -> Result<DomainBasis> {
        let k = self.constraint_rows();
        let ns = null_space(&k, 1e-12);
        let scale = self.am.matrix().norm_sup();
        let res = &k * &ns.basis;
        let max_residual = (0..res.cols())
            .map(|j| {
                let col = res.col(j);
                crate::dense::sup_norm(&col) / (crate::dense::sup_norm(&ns.basis.col(j)) * scale)
            })
            .fold(0.0, f64::max);
        let expected = self.grid.boundary_dim();
        if ns.rank < expected {
            return Err(Error::DegenerateConstraint {
                rank: ns.rank,
                expected,
                basis: ns.basis,
            });
        }
        Ok(DomainBasis {
            basis: ns.basis,
            max_residual,
        })
    }

    /// Derivative part of `B̂` (the `M₀`, `M₁` terms alone).
    pub fn derivative_feedback(&self) -> LinOp {
        let p = &self.problem;
        let n = p.n;
        let nodes = self.grid.nodes;
        let mut fb = Matrix::zeros(2 * n, self.grid.full_dim());
        for (node, mm) in [(0usize, &p.m0), (nodes - 1, &p.m1)] {
            for r in 0..2 * n {
                for beta in 0..n {
                    for (j, w) in first_difference(node, nodes) {
                        fb[(r, j * n + beta)] += mm[(r, beta)] * w;
                    }
                }
            }
        }
        LinOp::new(fb, Space::FullGrid, Space::Boundary)
    }

    /// `[N₀ | N₁]`, the boundary matrix that acts on the trace.
    pub fn trace_coupling(&self) -> Matrix {
        let p = &self.problem;
        let n = p.n;
        let mut c = Matrix::zeros(2 * n, 2 * n);
        c.set_block(0, 0, &p.n0);
        c.set_block(0, n, &p.n1);
        c
    }

    /// Samples a function of `s` at the nodes.
    pub fn sample(&self, f: impl FnMut(f64, usize) -> C64) -> GridFunction {
        GridFunction::from_fn(self.grid.nodes, self.grid.components, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::sup_norm;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn interior_row_stencil() {
        let m = build_model(&WentzellProblem::laplacian_system(1), 5).unwrap();
        let row: Vec<f64> = m.am().matrix().row(1).iter().map(|z| z.re).collect();
        assert_eq!(row, vec![16.0, -32.0, 16.0, 0.0, 0.0]);
    }

    #[test]
    fn trace_extracts_endpoints() {
        let m = build_model(&WentzellProblem::laplacian_system(1), 5).unwrap();
        let f = [2.0, 7.0, 1.0, 3.0, -1.0].map(re);
        assert_eq!(m.trace().apply(&f).unwrap(), vec![re(2.0), re(-1.0)]);
    }

    #[test]
    fn trace_only_feedback_equals_trace() {
        let n0 = Matrix::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let n1 = Matrix::from_real(2, 1, &[0.0, 1.0]).unwrap();
        let p = WentzellProblem::laplacian_system(1).with_feedback(Matrix::zeros(2, 1), Matrix::zeros(2, 1), n0, n1);
        let m = build_model(&p, 9).unwrap();
        assert_eq!(m.feedback().matrix(), m.trace().matrix());
    }

    #[test]
    fn quadratics_and_linears_are_exact() {
        let m = build_model(&WentzellProblem::laplacian_system(1), 11).unwrap();
        let sq = m.sample(|s, _| re(s * s));
        let out = m.am().apply(sq.values()).unwrap();
        assert!(out.iter().all(|z| (z - re(2.0)).norm() < 1e-10));
        let lin = m.sample(|s, _| re(3.0 - 2.0 * s));
        let out = m.am().apply(lin.values()).unwrap();
        assert!(sup_norm(&out) < 1e-10);
    }

    #[test]
    fn outer_normal_sign_convention() {
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 11).unwrap();
        let g = m.wentzell_generator();
        let inv_2h = 5.0;
        let first: Vec<f64> = g.matrix().row(0)[..3].iter().map(|z| z.re).collect();
        assert_eq!(first, vec![-3.0 * inv_2h, 4.0 * inv_2h, -inv_2h]);
        let last: Vec<f64> = g.matrix().row(10)[8..].iter().map(|z| z.re).collect();
        assert_eq!(last, vec![-inv_2h, 4.0 * inv_2h, -3.0 * inv_2h]);
    }

    #[test]
    fn pure_wentzell_generator_has_zero_boundary_rows() {
        let m = build_model(&WentzellProblem::laplacian_system(1), 9).unwrap();
        let g = m.wentzell_generator();
        assert!(g.matrix().row(0).iter().all(|z| *z == C64::default()));
        assert!(g.matrix().row(8).iter().all(|z| *z == C64::default()));
    }

    #[test]
    fn domain_basis_dimension_and_linears() {
        let m = build_model(&WentzellProblem::laplacian_system(1), 21).unwrap();
        let basis = m.wentzell_domain_basis().unwrap();
        assert_eq!(basis.basis.cols(), 19);
        assert!(basis.max_residual <= 1e-12);
        // f(s) = 1 + 2s satisfies the pure Wentzell constraint, so it is
        // reproduced by its projection onto the basis.
        let f = m.sample(|s, _| re(1.0 + 2.0 * s));
        let q = &basis.basis;
        let coeffs = q.adjoint().mul_vec(f.values());
        let proj = q.mul_vec(&coeffs);
        let err: Vec<C64> = proj.iter().zip(f.values()).map(|(a, b)| a - b).collect();
        assert!(sup_norm(&err) < 1e-12);
    }

    #[test]
    fn rejects_small_grids_and_bad_a() {
        assert!(build_model(&WentzellProblem::laplacian_system(1), 4).is_err());
        let mut p = WentzellProblem::laplacian_system(1);
        p.a_min = 2.0;
        assert!(matches!(build_model(&p, 11), Err(Error::PositivityViolation { .. })));
    }
}
