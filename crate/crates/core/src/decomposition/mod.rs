//! Dirichlet maps, Dirichlet-to-Neumann matrices and the operator-matrix
//! picture on interior × boundary coordinates.
//!
//! Every construction uses `M̂ = Â_m + P̂` as the maximal operator, so the
//! Wentzell constraint, the lifting `L̂₀` and `Ĝ` all refer to the same
//! operator. With `P = 0` this is just `Â_m`.

mod checks;
mod dirichlet;

pub use checks::{
    resolvent_block_check, similarity_check, BlockResolventReport, LambdaBlockResidual, SimilarityReport,
    SimilarityTier,
};
pub use dirichlet::{dirichlet_map, dtn_operator, DirichletMap, DtnMatrix, Feedback, FeedbackTag, LiftingOp};

use crate::dense::{Matrix, C64};
use crate::error::Result;
use crate::interval::{DiscreteModel, LinOp, Space};
use crate::operator::Operator;

/// Forward and inverse maps between the full grid and interior × boundary.
#[derive(Debug, Clone)]
pub struct SimilarityPair {
    /// `f ↦ ((f − L̂₀L̂f)|interior, L̂f)`.
    pub t: LinOp,
    /// `(g, x) ↦ zero-extension of g + L̂₀x`.
    pub t_inv: LinOp,
}

/// Ingredients shared by every decomposition check on one model: the
/// lifting at `λ = 0`, `N = B̂L̂₀`, `Ĝ_m` and the interior surrogate `Ĝ₀`.
#[derive(Debug, Clone)]
pub struct Decomposition<'a> {
    model: &'a DiscreteModel,
    lift0: Matrix,
    dtn: Matrix,
    gm: Matrix,
    g0: Matrix,
}

impl<'a> Decomposition<'a> {
    pub fn new(model: &'a DiscreteModel) -> Result<Self> {
        let lift0 = dirichlet_map(model, C64::default(), LiftingOp::AmP)?.map.into_matrix();
        let fb = model.feedback().matrix();
        let dtn = fb * &lift0;
        let grid = model.grid();
        let maximal = model.maximal().into_matrix();

        // Ĝ_m = M̂ − L̂₀B̂(I − L̂₀L̂)
        let proj = model.trace().matrix();
        let complement = &Matrix::identity(grid.full_dim()) - &(&lift0 * proj);
        let gm = &maximal - &(&lift0 * &(fb * &complement));

        let interior = grid.interior_indices();
        let g0 = gm.select(&interior, &interior);
        Ok(Self {
            model,
            lift0,
            dtn,
            gm,
            g0,
        })
    }

    pub fn model(&self) -> &DiscreteModel {
        self.model
    }

    /// `L̂₀`, the lifting at `λ = 0`, `N·n × 2n`.
    pub fn lifting(&self) -> &Matrix {
        &self.lift0
    }

    /// `N = B̂L̂₀`.
    pub fn dtn(&self) -> &Matrix {
        &self.dtn
    }

    pub fn gm(&self) -> LinOp {
        LinOp::new(self.gm.clone(), Space::FullGrid, Space::FullGrid)
    }

    /// `Ĝ₀` on interior unknowns; on zero-trace functions it equals
    /// `M̂ − L̂₀B̂` restricted to interior rows.
    pub fn g0(&self) -> LinOp {
        LinOp::new(self.g0.clone(), Space::InteriorGrid, Space::InteriorGrid)
    }

    /// `Ĝ₀` as banded `M̂[I,I]` plus the rank-`2n` term `−L̂₀[I,:]·B̂[:,I]`.
    pub fn g0_operator(&self) -> Operator {
        let grid = self.model.grid();
        let interior = grid.interior_indices();
        let bw = self.model.interior_bandwidth();
        let band = self.model.maximal().matrix().select(&interior, &interior);
        let cols: Vec<usize> = (0..self.lift0.cols()).collect();
        let u = self.lift0.select(&interior, &cols).scale(C64::new(-1.0, 0.0));
        let rows: Vec<usize> = (0..grid.boundary_dim()).collect();
        let w = self.model.feedback().matrix().select(&rows, &interior);
        Operator::band_plus_low_rank("G0", band, bw, bw, u, w)
    }

    /// `N` as an operator. Its entries come from the `λ = 0` lifting solve,
    /// which loses about `(N−1)²` digits of `ε`, and the derivative feedback
    /// amplifies that by another `N−1`; shifts within that distance of the
    /// spectrum are reported as spectral points.
    pub fn dtn_operator(&self) -> Operator {
        let steps = (self.model.grid().nodes - 1) as f64;
        let tolerance = steps.powi(3) * f64::EPSILON * self.dtn.norm_sup().max(1.0);
        Operator::dense("N", self.dtn.clone()).with_spectral_tolerance(tolerance)
    }

    /// `B̂` restricted to interior columns: `B̂` applied to zero-extensions.
    pub fn feedback_interior(&self) -> Matrix {
        let grid = self.model.grid();
        let rows: Vec<usize> = (0..grid.boundary_dim()).collect();
        self.model.feedback().matrix().select(&rows, &grid.interior_indices())
    }

    /// `L̂₀N` on interior rows.
    pub fn coupling(&self) -> Matrix {
        let grid = self.model.grid();
        let cols: Vec<usize> = (0..grid.boundary_dim()).collect();
        &self.lift0.select(&grid.interior_indices(), &cols) * &self.dtn
    }

    pub fn similarity_pair(&self) -> SimilarityPair {
        let grid = self.model.grid();
        let dim = grid.full_dim();
        let ni = grid.interior_dim();
        let proj = &self.lift0 * self.model.trace().matrix();
        let complement = &Matrix::identity(dim) - &proj;
        let mut t = Matrix::zeros(dim, dim);
        t.set_block(0, 0, &complement.block(grid.interior_range().start, 0, ni, dim));
        t.set_block(ni, 0, self.model.trace().matrix());

        let mut t_inv = Matrix::zeros(dim, dim);
        for (k, i) in grid.interior_range().enumerate() {
            t_inv[(i, k)] = C64::new(1.0, 0.0);
        }
        t_inv.set_block(0, ni, &self.lift0);
        SimilarityPair {
            t: LinOp::new(t, Space::FullGrid, Space::Product),
            t_inv: LinOp::new(t_inv, Space::Product, Space::FullGrid),
        }
    }

    /// `𝒜 = [[Ĝ₀, −L̂₀N], [B̂, N]]` on interior × boundary.
    pub fn operator_matrix(&self) -> LinOp {
        let m = Matrix::block2x2(
            &self.g0,
            &self.coupling().scale(C64::new(-1.0, 0.0)),
            &self.feedback_interior(),
            &self.dtn,
        )
        .expect("conforming blocks");
        LinOp::new(m, Space::Product, Space::Product)
    }

    /// `𝒜₀ = [[Ĝ₀, −L̂₀N], [0, N]]`.
    pub fn reduced_operator_matrix(&self) -> LinOp {
        let nb = self.dtn.rows();
        let ni = self.g0.rows();
        let m = Matrix::block2x2(
            &self.g0,
            &self.coupling().scale(C64::new(-1.0, 0.0)),
            &Matrix::zeros(nb, ni),
            &self.dtn,
        )
        .expect("conforming blocks");
        LinOp::new(m, Space::Product, Space::Product)
    }

    /// Trace residual of `Ĝ_m f − L̂₀Nx` for interior `f`, relative to
    /// `‖M̂‖∞‖f‖∞ + ‖N‖∞‖x‖∞`. Membership in the discrete domain of `𝒜` is
    /// declared below `1e-8`.
    pub fn membership_residual(&self, f: &[C64], x: &[C64]) -> f64 {
        let grid = self.model.grid();
        let mut ext = vec![C64::default(); grid.full_dim()];
        ext[grid.interior_range()].copy_from_slice(f);
        let g = self.gm.mul_vec(&ext);
        let lnx = self.lift0.mul_vec(&self.dtn.mul_vec(x));
        let diff: Vec<C64> = g.iter().zip(&lnx).map(|(a, b)| a - b).collect();
        let tr = self.model.trace().matrix().mul_vec(&diff);
        let scale = self.gm.norm_sup() * crate::dense::sup_norm(f) + self.dtn.norm_sup() * crate::dense::sup_norm(x);
        if scale == 0.0 {
            return 0.0;
        }
        crate::dense::sup_norm(&tr) / scale
    }
}

/// Membership threshold for the discrete domain of `𝒜`.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// `(T, T⁻¹)` for the model.
pub fn similarity_pair(model: &DiscreteModel) -> Result<SimilarityPair> {
    Ok(Decomposition::new(model)?.similarity_pair())
}

/// `Ĝ_m` on the full grid and `Ĝ₀` on the interior.
pub fn build_g(model: &DiscreteModel) -> Result<(LinOp, LinOp)> {
    let d = Decomposition::new(model)?;
    Ok((d.gm(), d.g0()))
}
