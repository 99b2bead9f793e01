use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Decomposition;
use crate::dense::{sup_norm, Lu, Matrix, C64};
use crate::error::{Error, Result};
use crate::interval::DiscreteModel;
use crate::reference::reference_lifting;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityTier {
    /// Constant `a`, `b = c = 0`, `P = 0`.
    Exact,
    General,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimilarityReport {
    pub nodes: usize,
    pub tier: SimilarityTier,
    pub samples: usize,
    pub seed: u64,
    /// `max ‖T M̂f − 𝒜Tf‖∞ / (‖f‖∞‖Â_m‖∞)` over sampled domain functions,
    /// with `T` and `𝒜` built from the discrete lifting.
    pub max_residual: f64,
    /// Same identity with `T` and `𝒜` built from the continuum lifting and
    /// continuum DtN matrix, as a supremum over the whole discrete domain of
    /// the residual relative to `‖L̂f‖∞`.
    pub reference_residual: f64,
    /// The continuum-ingredient residual over the sampled functions only.
    pub sampled_reference_residual: f64,
    /// Largest trace residual of `Ĝ₀f − L̂₀Nx` over the images `Tf`.
    pub max_membership_residual: f64,
    /// Constraint residual of the domain basis itself.
    pub basis_residual: f64,
}

fn diff_sup(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Tests `T(Â_m + P̂)f = 𝒜Tf` on random elements of the discrete Wentzell
/// domain drawn with a seeded generator.
pub fn similarity_check(model: &DiscreteModel, samples: usize, seed: u64) -> Result<SimilarityReport> {
    let d = Decomposition::new(model)?;
    let grid = *model.grid();
    let problem = model.problem();
    let basis = model.wentzell_domain_basis()?;
    let pair = d.similarity_pair();
    let mhat = model.maximal().into_matrix();
    let a = d.operator_matrix();
    let scale = model.am().matrix().norm_sup();
    let trace = model.trace().matrix();
    let ni = grid.interior_dim();
    let interior = grid.interior_indices();
    let nb = grid.boundary_dim();
    let bcols: Vec<usize> = (0..nb).collect();
    let fb = model.feedback().matrix();

    // Continuum ingredients: sampled lifting ℓ and its exact DtN matrix.
    let reference = reference_lifting(problem, &grid, C64::default(), true)?;
    let ell = &reference.values;
    let n_c = reference.dtn(problem);
    let ell_i = ell.select(&interior, &bcols);
    let fb_i = d.feedback_interior();
    let a_c = Matrix::block2x2(
        &(&mhat.select(&interior, &interior) - &(&ell_i * &fb_i)),
        &(&ell_i * &n_c).scale(C64::new(-1.0, 0.0)),
        &fb_i,
        &n_c,
    )?;
    let complement_c = &Matrix::identity(grid.full_dim()) - &(ell * trace);
    let mut t_c = Matrix::zeros(grid.full_dim(), grid.full_dim());
    t_c.set_block(
        0,
        0,
        &complement_c.select(&interior, &(0..grid.full_dim()).collect::<Vec<_>>()),
    );
    t_c.set_block(ni, 0, trace);

    // The continuum-ingredient residual depends on f only through x = L̂f:
    // rows [(M̂ℓ)_I + ℓ_I(N_c − B̂ℓ); B̂ℓ − N_c].
    let b_ell = fb * ell;
    let defect = &n_c - &b_ell;
    let mut residual_op = Matrix::zeros(grid.full_dim(), nb);
    residual_op.set_block(0, 0, &(&(&mhat * ell).select(&interior, &bcols) + &(&ell_i * &defect)));
    residual_op.set_block(ni, 0, &defect.scale(C64::new(-1.0, 0.0)));
    let reference_residual = residual_op.norm_sup();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    let mut sampled_reference: f64 = 0.0;
    let mut membership: f64 = 0.0;
    for _ in 0..samples {
        let coeffs: Vec<C64> = (0..basis.basis.cols())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = basis.basis.mul_vec(&coeffs);
        let mf = mhat.mul_vec(&f);

        let lhs = pair.t.apply(&mf)?;
        let tf = pair.t.apply(&f)?;
        let rhs = a.apply(&tf)?;
        max_residual = max_residual.max(diff_sup(&lhs, &rhs) / (sup_norm(&f) * scale));
        membership = membership.max(d.membership_residual(&tf[..ni], &tf[ni..]));

        let x = trace.mul_vec(&f);
        let xn = sup_norm(&x);
        if xn > 0.0 {
            let lhs_c = t_c.mul_vec(&mf);
            let rhs_c = a_c.mul_vec(&t_c.mul_vec(&f));
            sampled_reference = sampled_reference.max(diff_sup(&lhs_c, &rhs_c) / xn);
        }
    }

    Ok(SimilarityReport {
        nodes: grid.nodes,
        tier: if problem.is_exact_tier() {
            SimilarityTier::Exact
        } else {
            SimilarityTier::General
        },
        samples,
        seed,
        max_residual,
        reference_residual,
        sampled_reference_residual: sampled_reference,
        max_membership_residual: membership,
        basis_residual: basis.max_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaBlockResidual {
    pub lambda: f64,
    /// `‖(λ − Ĝ₀)f + L̂₀Nx − g‖∞` relative to the size of its terms.
    pub interior_residual: f64,
    /// `‖(λ − N)x − y‖∞` relative to the size of its terms.
    pub boundary_residual: f64,
    /// Largest entry of the lower-left block of the assembled resolvent.
    pub lower_left_max: f64,
    /// Relative difference from a direct inverse of `λ − 𝒜₀`.
    pub direct_inverse_difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockResolventReport {
    pub nodes: usize,
    pub entries: Vec<LambdaBlockResidual>,
    pub max_interior_residual: f64,
    pub max_boundary_residual: f64,
}

/// Assembles the block resolvent of `𝒜₀` from `R(λ,Ĝ₀)` and `R(λ,N)` and
/// checks the system it solves for every unit pair `(g, y)`.
pub fn resolvent_block_check(model: &DiscreteModel, lambdas: &[f64]) -> Result<BlockResolventReport> {
    let d = Decomposition::new(model)?;
    let g0 = d.g0_operator();
    let g0_dense = d.g0().into_matrix();
    let n_op = d.dtn_operator();
    let coupling = d.coupling();
    let ni = g0_dense.rows();
    let nb = d.dtn().rows();
    let reduced = d.reduced_operator_matrix().into_matrix();

    let mut entries = Vec::new();
    for &lam in lambdas {
        let lambda = C64::new(lam, 0.0);
        // N first: a singular λ − N is the reportable failure.
        let r_n = n_op.resolvent(lambda)?;
        let r_g = g0.resolvent(lambda).map_err(|e| match e {
            Error::SpectrumHit { lambda, .. } => Error::ResolventPole {
                lambda,
                what: "G0".into(),
            },
            other => other,
        })?;
        let r12 = (&(&r_g * &coupling) * &r_n).scale(C64::new(-1.0, 0.0));

        let mut f = Matrix::zeros(ni, ni + nb);
        f.set_block(0, 0, &r_g);
        f.set_block(0, ni, &r12);
        let mut x = Matrix::zeros(nb, ni + nb);
        x.set_block(0, ni, &r_n);

        let mut rhs_g = Matrix::zeros(ni, ni + nb);
        rhs_g.set_block(0, 0, &Matrix::identity(ni));
        let mut rhs_y = Matrix::zeros(nb, ni + nb);
        rhs_y.set_block(0, ni, &Matrix::identity(nb));

        let interior = &(&(&f.scale(lambda) - &(&g0_dense * &f)) + &(&coupling * &x)) - &rhs_g;
        let interior_scale =
            (lam.abs() + g0_dense.norm_sup()) * f.norm_sup() + coupling.norm_sup() * x.norm_sup() + 1.0;
        let boundary = &(&x.scale(lambda) - &(d.dtn() * &x)) - &rhs_y;
        let boundary_scale = (lam.abs() + d.dtn().norm_sup()) * x.norm_sup() + 1.0;

        let lower_left = x.block(0, 0, nb, ni).max_abs();

        let mut assembled = Matrix::zeros(ni + nb, ni + nb);
        assembled.set_block(0, 0, &f);
        assembled.set_block(ni, 0, &x);
        let direct = Lu::factor(&reduced.shifted_negation(lambda))
            .map_err(|_| Error::ResolventPole {
                lambda,
                what: "reduced operator matrix".into(),
            })?
            .inverse();
        let direct_diff = (&assembled - &direct).max_abs() / direct.max_abs();

        entries.push(LambdaBlockResidual {
            lambda: lam,
            interior_residual: interior.norm_sup() / interior_scale,
            boundary_residual: boundary.norm_sup() / boundary_scale,
            lower_left_max: lower_left,
            direct_inverse_difference: direct_diff,
        });
    }
    let max_interior_residual = entries.iter().map(|e| e.interior_residual).fold(0.0, f64::max);
    let max_boundary_residual = entries.iter().map(|e| e.boundary_residual).fold(0.0, f64::max);
    Ok(BlockResolventReport {
        nodes: model.grid().nodes,
        entries,
        max_interior_residual,
        max_boundary_residual,
    })
}
