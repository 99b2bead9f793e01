use serde::{Deserialize, Serialize};

use super::hille_yosida::{hille_yosida_probe, HilleYosidaReport};
use super::relbound::{relative_bound_probe, RelativeBoundReport, RelativeBoundVerdict};
use super::sector::{sector_angle_estimate, SectorOptions, SectorReport};
use super::Verdict;
use crate::convergence::log_space;
use crate::decomposition::Decomposition;
use crate::dense::NormKind;
use crate::error::{Error, Result};
use crate::interval::{build_model, WentzellProblem};
use crate::operator::Operator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem31Options {
    pub sector: SectorOptions,
    /// Every angle must reach this for a PASS.
    pub min_angle: f64,
    /// Allowed shortfall of the Wentzell angle below the predicted one.
    pub angle_tolerance: f64,
}

impl Default for Theorem31Options {
    fn default() -> Self {
        Self {
            sector: SectorOptions::default(),
            min_angle: 0.1,
            angle_tolerance: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleSummary {
    pub wentzell: f64,
    pub dirichlet: f64,
    pub g0: f64,
    pub dtn: f64,
    /// `min(max(angle Â₀, angle Ĝ₀), angle N)`.
    pub predicted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem31Record {
    pub nodes: usize,
    pub hille_yosida: HilleYosidaReport,
    pub relative_bound: RelativeBoundReport,
    pub angles: AngleSummary,
    pub verdict: Verdict,
    /// First unbounded ray of the Wentzell scan when the verdict is FAIL.
    pub minimizing_ray: Option<f64>,
    pub wentzell: SectorReport,
    pub dirichlet: SectorReport,
    pub g0: SectorReport,
    pub dtn: SectorReport,
}

fn assumption(name: &str, detail: impl Into<String>) -> Error {
    Error::AssumptionFailed {
        name: name.into(),
        detail: detail.into(),
    }
}

/// Compares the sector angle of the Wentzell generator with the angles of
/// its interior and boundary parts after checking the standing hypotheses.
pub fn theorem31_experiment(
    problem: &WentzellProblem,
    nodes: usize,
    opts: &Theorem31Options,
) -> Result<Theorem31Record> {
    let model = build_model(problem, nodes)?;
    let bw = model.interior_bandwidth();
    let full = model.full_bandwidth();

    let a0 = Operator::banded("A0", model.a0_perturbed().into_matrix(), bw, bw);
    let hy = hille_yosida_probe(&a0, &log_space(1.0, 1e6, 30), NormKind::Sup)?;
    if hy.lambda0.is_none() || !hy.m.is_finite() {
        return Err(assumption(
            "(i) weak Hille-Yosida bound for A0",
            format!("no finite bound on the sampled real ray, poles at {:?}", hy.poles),
        ));
    }
    let rb = relative_bound_probe(&model, model.feedback(), &log_space(1e2, 1e6, 9), NormKind::Sup)?;
    if rb.verdict == RelativeBoundVerdict::NotDecaying {
        return Err(assumption(
            "(ii) B relatively A0-bounded with bound 0",
            format!("‖BR(λ,A0)‖ does not decay, fitted slope {:?}", rb.slope),
        ));
    }
    let d = match Decomposition::new(&model) {
        Ok(d) => d,
        Err(Error::ResolventPole { .. }) => {
            return Err(assumption(
                "(iii) Dirichlet map exists",
                "0 is an eigenvalue of the Dirichlet realization",
            ))
        }
        Err(e) => return Err(e),
    };

    let g = Operator::banded("G", model.wentzell_generator().into_matrix(), full, full);
    let wentzell = sector_angle_estimate(&g, &opts.sector)?;
    let dirichlet = sector_angle_estimate(&a0, &opts.sector)?;
    let g0 = sector_angle_estimate(&d.g0_operator(), &opts.sector)?;
    let dtn = sector_angle_estimate(&d.dtn_operator(), &opts.sector)?;

    let predicted = dirichlet.angle_estimate.max(g0.angle_estimate).min(dtn.angle_estimate);
    let all = [
        wentzell.angle_estimate,
        dirichlet.angle_estimate,
        g0.angle_estimate,
        dtn.angle_estimate,
    ];
    let pass = wentzell.angle_estimate >= predicted - opts.angle_tolerance && all.iter().all(|a| *a >= opts.min_angle);
    let verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    Ok(Theorem31Record {
        nodes,
        hille_yosida: hy,
        relative_bound: rb,
        angles: AngleSummary {
            wentzell: wentzell.angle_estimate,
            dirichlet: dirichlet.angle_estimate,
            g0: g0.angle_estimate,
            dtn: dtn.angle_estimate,
            predicted,
        },
        verdict,
        minimizing_ray: if pass { None } else { wentzell.first_unbounded_theta },
        wentzell,
        dirichlet,
        g0,
        dtn,
    })
}
