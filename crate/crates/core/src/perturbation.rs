//! Dirichlet maps and DtN matrices under a perturbation `P` of the maximal
//! operator, and feedbacks split as `B = B₀ + C·L`.

use serde::{Deserialize, Serialize};

use crate::decomposition::{dirichlet_map, dtn_operator, Feedback, LiftingOp};
use crate::dense::{BandLu, DenseError, Matrix, C64};
use crate::disk::DiskModel;
use crate::error::{Error, Result};
use crate::interval::{build_model, DiscreteModel, LinOp, Space, WentzellProblem};
use crate::probes::{sector_angle_estimate, theorem31_experiment, SectorOptions, Theorem31Options, Verdict};

pub const DEFAULT_IDENTITY_LAMBDAS: [f64; 2] = [5.0, 10.0];

/// Solves `(λ − op) X = rhs` on interior unknowns for an interior block.
fn interior_solve(op: &Matrix, bw: usize, lambda: C64, rhs: &Matrix, what: &str) -> Result<Matrix> {
    let lu = BandLu::factor(&op.shifted_negation(lambda), bw, bw).map_err(|e| match e {
        DenseError::SingularMatrix { .. } => Error::ResolventPole {
            lambda,
            what: what.to_string(),
        },
        other => other.into(),
    })?;
    Ok(lu.solve(rhs)?)
}

fn zero_extend(model: &DiscreteModel, interior: &Matrix) -> Matrix {
    let grid = model.grid();
    let mut full = Matrix::zeros(grid.full_dim(), interior.cols());
    full.set_block(grid.interior_range().start, 0, interior);
    full
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletIdentityReport {
    pub lambda: f64,
    /// `‖L^{A_m+P} − L^{A_m} − R(λ, Â₀+P̂)P̂L^{A_m}‖∞ / scale`.
    pub residual_1: f64,
    /// `‖L^{A_m+P} − L^{A_m} − R(λ, Â₀)P̂L^{A_m+P}‖∞ / scale`.
    pub residual_2: f64,
    /// `‖L^{A_m+P} − L^{A_m}‖∞`.
    pub difference_norm: f64,
    /// `max(‖L^{A_m}‖∞, ‖L^{A_m+P}‖∞)`.
    pub scale: f64,
}

struct Liftings {
    plain: Matrix,
    perturbed: Matrix,
    /// `(P̂L^{A_m})` on interior rows.
    p_plain: Matrix,
    /// `(P̂L^{A_m+P})` on interior rows.
    p_perturbed: Matrix,
}

fn liftings(model: &DiscreteModel, lambda: C64) -> Result<Liftings> {
    let plain = dirichlet_map(model, lambda, LiftingOp::Am)?.map.into_matrix();
    let perturbed = dirichlet_map(model, lambda, LiftingOp::AmP)?.map.into_matrix();
    let grid = model.grid();
    let interior = grid.interior_indices();
    let cols: Vec<usize> = (0..grid.boundary_dim()).collect();
    let p = model.perturbation().matrix();
    Ok(Liftings {
        p_plain: (p * &plain).select(&interior, &cols),
        p_perturbed: (p * &perturbed).select(&interior, &cols),
        plain,
        perturbed,
    })
}

/// Both forms of the perturbation identity for Dirichlet maps.
pub fn dirichlet_identity_check(model: &DiscreteModel, lambda: f64) -> Result<DirichletIdentityReport> {
    let lam = C64::new(lambda, 0.0);
    let l = liftings(model, lam)?;
    let bw = model.interior_bandwidth();
    let first = interior_solve(model.a0_perturbed().matrix(), bw, lam, &l.p_plain, "A0+P")?;
    let second = interior_solve(model.a0().matrix(), bw, lam, &l.p_perturbed, "A0")?;
    let diff = &l.perturbed - &l.plain;
    let scale = l.plain.norm_sup().max(l.perturbed.norm_sup());
    Ok(DirichletIdentityReport {
        lambda,
        residual_1: (&diff - &zero_extend(model, &first)).norm_sup() / scale,
        residual_2: (&diff - &zero_extend(model, &second)).norm_sup() / scale,
        difference_norm: diff.norm_sup(),
        scale,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DtnDifferenceReport {
    pub lambda: f64,
    /// `‖(N_λ − N_λ^P) + B̂R(λ, Â₀)P̂L^{A_m+P}‖∞ / (‖B̂‖∞ · scale of the liftings)`.
    pub residual: f64,
    /// `‖N_λ − N_λ^P‖∞`.
    pub difference_norm: f64,
    /// Both DtN matrices are full `2n × 2n`: no domain defect can show up.
    pub full_domain: bool,
}

pub fn dtn_difference_check(model: &DiscreteModel, lambda: f64) -> Result<DtnDifferenceReport> {
    let lam = C64::new(lambda, 0.0);
    let l = liftings(model, lam)?;
    let fb = model.feedback().matrix();
    let n_plain = fb * &l.plain;
    let n_pert = fb * &l.perturbed;
    let bw = model.interior_bandwidth();
    let correction = fb
        * &zero_extend(
            model,
            &interior_solve(model.a0().matrix(), bw, lam, &l.p_perturbed, "A0")?,
        );
    let diff = &n_plain - &n_pert;
    let scale = fb.norm_sup() * l.plain.norm_sup().max(l.perturbed.norm_sup());
    let nb = model.grid().boundary_dim();
    Ok(DtnDifferenceReport {
        lambda,
        residual: (&diff + &correction).norm_sup() / if scale > 0.0 { scale } else { 1.0 },
        difference_norm: diff.norm_sup(),
        full_domain: n_plain.rows() == nb && n_plain.cols() == nb && n_pert.cols() == nb,
    })
}

/// `B = B₀ + C·L̂` with `B₀` acting on the whole grid function and `C` on
/// its trace.
#[derive(Debug, Clone)]
pub struct SplitFeedback {
    pub b0: LinOp,
    pub c: Matrix,
}

impl SplitFeedback {
    pub fn new(b0: LinOp, c: Matrix) -> Result<Self> {
        if b0.domain() != Space::FullGrid || b0.codomain() != Space::Boundary {
            return Err(Error::TagMismatch {
                expected: Space::Boundary,
                found: b0.codomain(),
            });
        }
        let nb = b0.matrix().rows();
        if c.rows() != nb || c.cols() != nb {
            return Err(Error::BadDimensions(format!(
                "C is {}x{}, boundary space has dimension {nb}",
                c.rows(),
                c.cols()
            )));
        }
        Ok(Self { b0, c })
    }

    /// Derivative terms as `B₀`, `[N₀ | N₁]` as `C`.
    pub fn from_model(model: &DiscreteModel) -> Self {
        Self {
            b0: model.derivative_feedback(),
            c: model.trace_coupling(),
        }
    }

    pub fn composed(&self, trace: &LinOp) -> Result<LinOp> {
        let ct = LinOp::new(self.c.clone(), Space::Boundary, Space::Boundary).compose(trace)?;
        self.b0.add(&ct)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitScenario {
    /// `C` is the small part: compare with feedback `B₀` alone.
    CBounded,
    /// `C` dominates: compare with feedback `C·L` alone.
    CDominant,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitRecord {
    pub scenario: SplitScenario,
    /// `‖N^B − (N^{B₀} + C)‖∞` relative to `‖N^B‖∞`.
    pub additivity_residual: f64,
    /// `‖(B₀ + C·L̂) − B̂‖∞`: the split reproduces the model's feedback.
    pub reconstruction_residual: f64,
    /// The composed feedback acts on every grid function.
    pub defined_everywhere: bool,
    pub angle_full: f64,
    pub angle_comparator: f64,
    pub angle_tolerance: f64,
    pub verdict: Verdict,
}

fn comparator_problem(problem: &WentzellProblem, scenario: SplitScenario) -> WentzellProblem {
    let mut p = problem.clone();
    let zero = Matrix::zeros(2 * p.n, p.n);
    match scenario {
        SplitScenario::CBounded => {
            p.n0 = zero.clone();
            p.n1 = zero;
        }
        SplitScenario::CDominant => {
            p.m0 = zero.clone();
            p.m1 = zero;
        }
    }
    p
}

/// Checks `N^B = N^{B₀} + C` and compares the sector angle of the full
/// Wentzell generator with the one where only the scenario's dominant part
/// of the feedback is kept.
pub fn feedback_split_experiment(
    problem: &WentzellProblem,
    nodes: usize,
    scenario: SplitScenario,
    opts: &Theorem31Options,
) -> Result<SplitRecord> {
    let model = build_model(problem, nodes)?;
    let split = SplitFeedback::from_model(&model);
    let composed = split.composed(model.trace())?;
    let reconstruction_residual = (composed.matrix() - model.feedback().matrix()).norm_sup();
    let zero = C64::default();
    let n_b = dtn_operator(&model, zero, LiftingOp::AmP, &Feedback::Custom(composed.clone()))?.matrix;
    let n_b0 = dtn_operator(&model, zero, LiftingOp::AmP, &Feedback::Custom(split.b0.clone()))?.matrix;
    let additivity = (&n_b - &(&n_b0 + &split.c)).norm_sup() / n_b.norm_sup().max(1.0);

    let full = theorem31_experiment(problem, nodes, opts)?;
    let comparator = theorem31_experiment(&comparator_problem(problem, scenario), nodes, opts)?;
    let (a, b) = (full.angles.wentzell, comparator.angles.wentzell);
    Ok(SplitRecord {
        scenario,
        additivity_residual: additivity,
        reconstruction_residual,
        defined_everywhere: composed.matrix().cols() == model.grid().full_dim(),
        angle_full: a,
        angle_comparator: b,
        angle_tolerance: opts.angle_tolerance,
        verdict: Verdict::from_bool((a - b).abs() <= opts.angle_tolerance && additivity <= 1e-10),
    })
}

/// Disk version: all operators are diagonal over modes.
pub fn disk_split_experiment(
    model: &DiskModel,
    scenario: SplitScenario,
    sector: &SectorOptions,
    angle_tolerance: f64,
) -> Result<SplitRecord> {
    let additivity = model
        .dtn
        .iter()
        .zip(model.dtn_b0.iter().zip(&model.coupling))
        .map(|(n, (b0, c))| (n - (b0 + c)).abs())
        .fold(0.0, f64::max);
    let full = sector_angle_estimate(&model.dtn_operator(), sector)?;
    let comparator = match scenario {
        SplitScenario::CBounded => model.dtn_b0_operator(),
        SplitScenario::CDominant => model.coupling_operator(),
    };
    let comp = sector_angle_estimate(&comparator, sector)?;
    let (a, b) = (full.angle_estimate, comp.angle_estimate);
    Ok(SplitRecord {
        scenario,
        additivity_residual: additivity,
        reconstruction_residual: 0.0,
        defined_everywhere: true,
        angle_full: a,
        angle_comparator: b,
        angle_tolerance,
        verdict: Verdict::from_bool((a - b).abs() <= angle_tolerance && additivity == 0.0),
    })
}
