use serde::Serialize;

use crate::decomposition::Decomposition;
use crate::dense::{matrix_exponential, sup_norm, Matrix, C64};
use crate::error::{Error, Result};
use crate::interval::DiscreteModel;

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionEntry {
    pub t: f64,
    /// `‖exp(t𝒜₀)‖∞`.
    pub norm: f64,
    /// Largest entry of the lower-left block of `exp(t𝒜₀)`, relative to `norm`.
    pub lower_left_relative: f64,
    /// `‖[exp(t𝒜₀)]₁₁ − exp(tĜ₀)‖∞` relative to `‖exp(tĜ₀)‖∞`.
    pub interior_block_difference: f64,
    /// `‖[exp(t𝒜₀)]₂₂ − exp(tN)‖∞` relative to `‖exp(tN)‖∞`.
    pub boundary_block_difference: f64,
    /// `‖e^{tĜ}1 − 1‖∞` for the full-grid Wentzell generator, when constants
    /// are stationary.
    pub conservation_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionReport {
    pub nodes: usize,
    pub conservation_applicable: bool,
    pub entries: Vec<EvolutionEntry>,
    pub max_lower_left_relative: f64,
    pub max_block_difference: f64,
    pub max_conservation_error: Option<f64>,
}

fn relative_difference(a: &Matrix, b: &Matrix) -> f64 {
    let scale = b.norm_sup();
    let d = (a - b).norm_sup();
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Constants are stationary for the Wentzell generator when nothing acts on
/// the value itself: no potential, no trace feedback, no perturbation.
fn conserves_constants(model: &DiscreteModel) -> bool {
    let p = model.problem();
    p.c.is_zero() && p.n0.max_abs() == 0.0 && p.n1.max_abs() == 0.0 && !p.has_perturbation()
}

/// Propagates `exp(t𝒜₀)` in interior × boundary coordinates and checks its
/// upper-triangular structure and diagonal blocks.
pub fn evolve_and_structure_check(model: &DiscreteModel, times: &[f64]) -> Result<EvolutionReport> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidArgument(
            "evolution times must be finite and nonnegative".into(),
        ));
    }
    let d = Decomposition::new(model)?;
    let reduced = d.reduced_operator_matrix().into_matrix();
    let g0 = d.g0().into_matrix();
    let n = d.dtn().clone();
    let ni = g0.rows();
    let nb = n.rows();
    let wentzell = model.wentzell_generator().into_matrix();
    let conserve = conserves_constants(model);
    let ones = vec![C64::new(1.0, 0.0); wentzell.rows()];

    let mut entries = Vec::with_capacity(times.len());
    for &t in times {
        let e = matrix_exponential(&reduced, t)?;
        let norm = e.norm_sup();
        let lower_left = e.block(ni, 0, nb, ni).max_abs();
        let eg = matrix_exponential(&g0, t)?;
        let en = matrix_exponential(&n, t)?;
        let conservation_error = if conserve {
            let ew = matrix_exponential(&wentzell, t)?;
            let v = ew.mul_vec(&ones);
            let diff: Vec<C64> = v.iter().map(|z| z - C64::new(1.0, 0.0)).collect();
            Some(sup_norm(&diff))
        } else {
            None
        };
        entries.push(EvolutionEntry {
            t,
            norm,
            lower_left_relative: lower_left / norm,
            interior_block_difference: relative_difference(&e.block(0, 0, ni, ni), &eg),
            boundary_block_difference: relative_difference(&e.block(ni, ni, nb, nb), &en),
            conservation_error,
        });
    }
    let max_lower_left_relative = entries.iter().map(|e| e.lower_left_relative).fold(0.0, f64::max);
    let max_block_difference = entries
        .iter()
        .map(|e| e.interior_block_difference.max(e.boundary_block_difference))
        .fold(0.0, f64::max);
    let max_conservation_error =
        conserve.then(|| entries.iter().filter_map(|e| e.conservation_error).fold(0.0, f64::max));
    Ok(EvolutionReport {
        nodes: model.grid().nodes,
        conservation_applicable: conserve,
        entries,
        max_lower_left_relative,
        max_block_difference,
        max_conservation_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{build_model, WentzellProblem};

    #[test]
    fn identity_at_time_zero() {
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 21).unwrap();
        let r = evolve_and_structure_check(&m, &[0.0]).unwrap();
        let e = &r.entries[0];
        assert_eq!(e.norm, 1.0);
        assert_eq!(e.lower_left_relative, 0.0);
        assert_eq!(e.interior_block_difference, 0.0);
        assert_eq!(e.conservation_error, Some(0.0));
    }

    #[test]
    fn triangular_and_conservative() {
        let m = build_model(&WentzellProblem::laplacian(-1.0, 0.0), 31).unwrap();
        let r = evolve_and_structure_check(&m, &[0.1, 1.0, 10.0]).unwrap();
        assert!(r.max_lower_left_relative <= 1e-12);
        assert!(r.max_block_difference <= 1e-9, "{r:?}");
        assert!(r.max_conservation_error.unwrap() <= 1e-9, "{r:?}");
    }

    #[test]
    fn trace_feedback_breaks_conservation_flag() {
        let m = build_model(&WentzellProblem::laplacian(-1.0, -1.0), 21).unwrap();
        let r = evolve_and_structure_check(&m, &[1.0]).unwrap();
        assert!(!r.conservation_applicable);
        assert_eq!(r.max_conservation_error, None);
    }
}
