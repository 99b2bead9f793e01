use serde::{Deserialize, Serialize};

use crate::decomposition::Decomposition;
use crate::dense::{singular_values, Matrix, C64};
use crate::error::{Error, Result};
use crate::interval::{build_model, WentzellProblem};
use crate::operator::Operator;

/// Inner product used for the singular values of the full-grid resolvent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeWeighting {
    /// Plain Euclidean norm of nodal values.
    Unweighted,
    /// Interior nodes weighted by `h`, boundary nodes by 1: a discrete
    /// `L²(0,1) × ℂ²ⁿ`.
    #[default]
    Product,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularValueRow {
    pub nodes: usize,
    pub h: f64,
    /// Leading singular values of `R(λ, Ĝ)`, largest first.
    pub wentzell: Vec<f64>,
    pub dirichlet: Vec<f64>,
    pub dtn: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompactnessReport {
    pub lambda: f64,
    pub k: usize,
    pub weighting: NodeWeighting,
    pub rows: Vec<SingularValueRow>,
    /// Per-index relative change of `σ_k(R(λ, Ĝ))` between the two finest grids.
    pub wentzell_changes: Vec<f64>,
    /// Largest relative change between the two finest grids, per operator.
    pub wentzell_stabilization: Option<f64>,
    pub dirichlet_stabilization: Option<f64>,
    pub dtn_stabilization: Option<f64>,
}

fn leading(values: Vec<f64>, k: usize) -> Vec<f64> {
    values.into_iter().take(k).collect()
}

fn changes(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| if *f == 0.0 { (c - f).abs() } else { ((c - f) / f).abs() })
        .collect()
}

fn pole_error(what: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::SpectrumHit { lambda, .. } => Error::ResolventPole {
            lambda,
            what: what.into(),
        },
        other => other,
    }
}

/// Leading singular values of the resolvents of `Ĝ`, `Â₀` and `N` across
/// grids; decaying values that settle under refinement are the discrete
/// trace of a compact resolvent.
pub fn compactness_proxy(
    problem: &WentzellProblem,
    lambda: f64,
    nodes: &[usize],
    k: usize,
    weighting: NodeWeighting,
) -> Result<CompactnessReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let lam = C64::new(lambda, 0.0);
    let mut rows = Vec::with_capacity(sorted.len());
    for &count in &sorted {
        let model = build_model(problem, count)?;
        let grid = *model.grid();
        let full = model.full_bandwidth();
        let g = Operator::banded("G", model.wentzell_generator().into_matrix(), full, full);
        let mut rg = g.resolvent(lam).map_err(pole_error("Wentzell generator"))?;
        if weighting == NodeWeighting::Product {
            // D^{1/2} R D^{-1/2} with the quadrature weights on the diagonal.
            let boundary = grid.boundary_indices();
            let weight = |i: usize| if boundary.contains(&i) { 1.0 } else { grid.h.sqrt() };
            let w: Vec<f64> = (0..grid.full_dim()).map(weight).collect();
            rg = Matrix::from_fn(rg.rows(), rg.cols(), |i, j| rg[(i, j)] * (w[i] / w[j]));
        }
        let bw = model.interior_bandwidth();
        let a0 = Operator::banded("A0", model.a0().matrix().clone(), bw, bw);
        let ra = a0.resolvent(lam).map_err(pole_error("A0"))?;
        let d = Decomposition::new(&model)?;
        let rn = d.dtn_operator().resolvent(lam).map_err(pole_error("N"))?;
        rows.push(SingularValueRow {
            nodes: count,
            h: grid.h,
            wentzell: leading(singular_values(&rg)?, k),
            dirichlet: leading(singular_values(&ra)?, k),
            dtn: leading(singular_values(&rn)?, k),
        });
    }
    let last_two = (rows.len() >= 2).then(|| (&rows[rows.len() - 2], &rows[rows.len() - 1]));
    let wentzell_changes = last_two.map_or_else(Vec::new, |(c, f)| changes(&c.wentzell, &f.wentzell));
    let worst = |pick: fn(&SingularValueRow) -> &Vec<f64>| {
        last_two.map(|(c, f)| changes(pick(c), pick(f)).into_iter().fold(0.0, f64::max))
    };
    Ok(CompactnessReport {
        lambda,
        k,
        weighting,
        wentzell_stabilization: worst(|r| &r.wentzell),
        dirichlet_stabilization: worst(|r| &r.dirichlet),
        dtn_stabilization: worst(|r| &r.dtn),
        wentzell_changes,
        rows,
    })
}
