use serde::Serialize;

use crate::convergence::loglog_slope;
use crate::dense::{BandLu, DenseError, NormKind, C64};
use crate::error::{Error, Result};
use crate::interval::{DiscreteModel, LinOp, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelativeBoundVerdict {
    /// Every sampled value vanished.
    Zero,
    /// Values decay with a negative fitted slope.
    Decaying,
    NotDecaying,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelativeBoundReport {
    pub norm: NormKind,
    pub lambdas: Vec<f64>,
    /// `‖B̂R(λ, Â₀)‖` per sample.
    pub values: Vec<f64>,
    /// Log-log slope of the values against `λ`; `None` when fewer than two
    /// values are positive.
    pub slope: Option<f64>,
    /// `lim ‖B̂R(λ, Â₀)‖` suggested by the fit: zero for a negative slope,
    /// otherwise the last value.
    pub extrapolated_bound: f64,
    pub verdict: RelativeBoundVerdict,
}

/// Samples `‖B̂R(λ, Â₀)‖` for a boundary operator `B̂` against the Dirichlet
/// realization; decay toward 0 is the discrete face of relative bound 0.
pub fn relative_bound_probe(
    model: &DiscreteModel,
    feedback: &LinOp,
    lambdas: &[f64],
    norm: NormKind,
) -> Result<RelativeBoundReport> {
    if feedback.domain() != Space::FullGrid || feedback.codomain() != Space::Boundary {
        return Err(Error::TagMismatch {
            expected: Space::FullGrid,
            found: feedback.domain(),
        });
    }
    if lambdas.iter().any(|l| !l.is_finite() || *l <= 0.0) {
        return Err(Error::InvalidArgument("λ samples must be positive and finite".into()));
    }
    let grid = model.grid();
    let rows: Vec<usize> = (0..grid.boundary_dim()).collect();
    // Zero-trace functions see B̂ only through its interior columns.
    let b_i = feedback.matrix().select(&rows, &grid.interior_indices());
    let a0t = model.a0().matrix().transpose();
    let bw = model.interior_bandwidth();
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut values = Vec::with_capacity(sorted.len());
    for &lam in &sorted {
        let lambda = C64::new(lam, 0.0);
        // B̂_I R = ((λ − Â₀)ᵀ⁻¹ B̂_Iᵀ)ᵀ: 2n right-hand sides instead of a full inverse.
        let lu = BandLu::factor(&a0t.shifted_negation(lambda), bw, bw).map_err(|e| match e {
            DenseError::SingularMatrix { .. } => Error::SpectrumHit {
                lambda,
                what: "A0".into(),
            },
            other => other.into(),
        })?;
        let prod = lu.solve(&b_i.transpose())?.transpose();
        values.push(prod.norm(norm));
    }

    let slope = loglog_slope(&sorted, &values);
    let all_zero = values.iter().all(|v| *v == 0.0);
    let verdict = if all_zero {
        RelativeBoundVerdict::Zero
    } else if slope.is_some_and(|p| p < 0.0) {
        RelativeBoundVerdict::Decaying
    } else {
        RelativeBoundVerdict::NotDecaying
    };
    let extrapolated_bound = match verdict {
        RelativeBoundVerdict::Zero | RelativeBoundVerdict::Decaying => 0.0,
        RelativeBoundVerdict::NotDecaying => values.last().copied().unwrap_or(0.0),
    };
    Ok(RelativeBoundReport {
        norm,
        lambdas: sorted,
        values,
        slope,
        extrapolated_bound,
        verdict,
    })
}
