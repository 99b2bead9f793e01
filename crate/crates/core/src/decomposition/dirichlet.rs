use serde::{Deserialize, Serialize};

use super::Decomposition;
use crate::dense::{BandLu, DenseError, Lu, Matrix, C64};
use crate::error::{Error, Result};
use crate::interval::{DiscreteModel, LinOp, Space};

/// Operator whose kernel defines the lifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LiftingOp {
    #[serde(rename = "A_m")]
    Am,
    #[serde(rename = "A_m+P")]
    AmP,
    #[serde(rename = "G_m")]
    Gm,
}

impl LiftingOp {
    fn label(self) -> &'static str {
        match self {
            LiftingOp::Am => "A_m",
            LiftingOp::AmP => "A_m+P",
            LiftingOp::Gm => "G_m",
        }
    }
}

/// Lifting `L̂_λ`: boundary data ↦ grid function in the kernel of `λ − op`
/// at interior nodes with the prescribed trace.
#[derive(Debug, Clone)]
pub struct DirichletMap {
    pub lambda: C64,
    pub op: LiftingOp,
    /// `Boundary → FullGrid`.
    pub map: LinOp,
    /// `‖((λ − op)·map)[interior]‖∞ / ((|λ| + ‖op‖∞)·‖map‖∞)`.
    pub interior_residual: f64,
}

fn pole(lambda: C64, what: &str) -> impl Fn(DenseError) -> Error + '_ {
    move |e| match e {
        DenseError::SingularMatrix { .. } => Error::ResolventPole {
            lambda,
            what: what.to_string(),
        },
        other => other.into(),
    }
}

pub fn dirichlet_map(model: &DiscreteModel, lambda: C64, op: LiftingOp) -> Result<DirichletMap> {
    let grid = model.grid();
    let interior = grid.interior_indices();
    let boundary = grid.boundary_indices();
    let full = match op {
        LiftingOp::Am => model.am().matrix().clone(),
        LiftingOp::AmP => model.maximal().into_matrix(),
        LiftingOp::Gm => Decomposition::new(model)?.gm().into_matrix(),
    };
    let system = full.select(&interior, &interior).shifted_negation(lambda);
    let rhs = full.select(&interior, &boundary);
    let what = format!("Dirichlet realization of {}", op.label());
    let sol = match op {
        LiftingOp::Gm => Lu::factor(&system).map_err(pole(lambda, &what))?.solve(&rhs)?,
        _ => {
            let bw = model.interior_bandwidth();
            BandLu::factor(&system, bw, bw)
                .map_err(pole(lambda, &what))?
                .solve(&rhs)?
        }
    };
    let nb = grid.boundary_dim();
    let mut map = Matrix::zeros(grid.full_dim(), nb);
    for (r, &i) in boundary.iter().enumerate() {
        map[(i, r)] = C64::new(1.0, 0.0);
    }
    map.set_block(grid.interior_range().start, 0, &sol);

    let applied = &full * &map;
    let mut worst: f64 = 0.0;
    for &i in &interior {
        for j in 0..nb {
            worst = worst.max((lambda * map[(i, j)] - applied[(i, j)]).norm());
        }
    }
    let scale = (lambda.norm() + full.norm_sup()) * map.norm_sup();
    Ok(DirichletMap {
        lambda,
        op,
        map: LinOp::new(map, Space::Boundary, Space::FullGrid),
        interior_residual: if scale > 0.0 { worst / scale } else { worst },
    })
}

/// Boundary operator applied to the lifting.
#[derive(Debug, Clone)]
pub enum Feedback {
    /// The model's `B̂`.
    B,
    /// Derivative part of `B̂` (the `M₀`, `M₁` terms).
    B0,
    /// Any `FullGrid → Boundary` operator.
    Custom(LinOp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeedbackTag {
    B,
    B0,
    Custom,
}

impl Feedback {
    pub fn tag(&self) -> FeedbackTag {
        match self {
            Feedback::B => FeedbackTag::B,
            Feedback::B0 => FeedbackTag::B0,
            Feedback::Custom(_) => FeedbackTag::Custom,
        }
    }

    pub fn resolve(&self, model: &DiscreteModel) -> Result<LinOp> {
        let op = match self {
            Feedback::B => model.feedback().clone(),
            Feedback::B0 => model.derivative_feedback(),
            Feedback::Custom(op) => op.clone(),
        };
        if op.domain() != Space::FullGrid {
            return Err(Error::TagMismatch {
                expected: Space::FullGrid,
                found: op.domain(),
            });
        }
        if op.codomain() != Space::Boundary {
            return Err(Error::TagMismatch {
                expected: Space::Boundary,
                found: op.codomain(),
            });
        }
        Ok(op)
    }
}

#[derive(Debug, Clone)]
pub struct DtnMatrix {
    pub lambda: C64,
    pub op: LiftingOp,
    pub feedback: FeedbackTag,
    pub matrix: Matrix,
}

/// `F·L̂_λ` for the chosen lifting operator and feedback.
pub fn dtn_operator(model: &DiscreteModel, lambda: C64, op: LiftingOp, feedback: &Feedback) -> Result<DtnMatrix> {
    let map = dirichlet_map(model, lambda, op)?;
    let f = feedback.resolve(model)?;
    let matrix = f.compose(&map.map)?.into_matrix();
    Ok(DtnMatrix {
        lambda,
        op,
        feedback: feedback.tag(),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::sup_norm;
    use crate::interval::{build_model, WentzellProblem};

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn constants_and_linears_at_zero() {
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 11).unwrap();
        let l = dirichlet_map(&m, re(0.0), LiftingOp::Am).unwrap();
        let ones = l.map.apply(&[re(1.0), re(1.0)]).unwrap();
        assert!(ones.iter().all(|z| (z - re(1.0)).norm() < 1e-14));
        let e0 = l.map.apply(&[re(1.0), re(0.0)]).unwrap();
        for (i, z) in e0.iter().enumerate() {
            assert!((z - re(1.0 - m.grid().node(i))).norm() < 1e-14);
        }
        assert!(l.interior_residual < 1e-14);
    }

    #[test]
    fn trace_of_lifting_is_identity() {
        let p = WentzellProblem::laplacian(-1.0, 0.0).with_b(crate::interval::PolyMatrix::scalar(
            1,
            crate::interval::Poly::real(&[1.0]),
        ));
        let m = build_model(&p, 21).unwrap();
        for lambda in [re(0.0), re(3.0), C64::new(-2.0, 5.0)] {
            for op in [LiftingOp::Am, LiftingOp::AmP, LiftingOp::Gm] {
                let l = dirichlet_map(&m, lambda, op).unwrap();
                let tl = m.trace().compose(&l.map).unwrap();
                assert!((tl.matrix() - &Matrix::identity(2)).max_abs() == 0.0);
                assert!(l.interior_residual < 1e-10, "{op:?} {lambda}");
            }
        }
    }

    #[test]
    fn canonical_dtn() {
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 11).unwrap();
        let n = dtn_operator(&m, re(0.0), LiftingOp::Am, &Feedback::B).unwrap();
        let expect = Matrix::from_real(2, 2, &[-1.0, 1.0, 1.0, -1.0]).unwrap();
        assert!((&n.matrix - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn trace_feedback_gives_gamma_identity() {
        let m = build_model(&WentzellProblem::laplacian(0.0, 2.5), 11).unwrap();
        let n = dtn_operator(&m, re(1.5), LiftingOp::Am, &Feedback::B).unwrap();
        assert!((&n.matrix - &Matrix::identity(2).scale(re(2.5))).max_abs() < 1e-14);
    }

    #[test]
    fn dirichlet_eigenvalue_is_a_pole() {
        // Eigenvalues of the 3x3 interior block at N = 5 are −16(2 − 2cos(kπ/4)).
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 5).unwrap();
        let mu = -16.0 * (2.0 - 2.0 * (std::f64::consts::PI / 4.0).cos());
        let err = dirichlet_map(&m, re(mu), LiftingOp::Am);
        assert!(matches!(err, Err(Error::ResolventPole { .. })), "{err:?}");
        let ok = dirichlet_map(&m, re(mu + 0.5), LiftingOp::Am).unwrap();
        assert!(sup_norm(ok.map.matrix().as_slice()) > 0.0);
    }
}
