//! Laplacian on the unit disk with a Wentzell condition built from the
//! normal derivative, a constant and the Laplace-Beltrami operator of the
//! circle. Harmonic extensions of `e^{ikθ}` are `r^{|k|}e^{ikθ}`, so every
//! boundary operator is diagonal over Fourier modes and is stored as one
//! scalar per mode.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::dense::C64;
use crate::error::{Error, Result};
use crate::operator::Operator;

pub const DEFAULT_MAX_MODE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    #[serde(default = "default_max_mode")]
    pub max_mode: usize,
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub q: f64,
}

fn default_max_mode() -> usize {
    DEFAULT_MAX_MODE
}

#[derive(Debug, Clone, Serialize)]
pub struct DiskModel {
    pub max_mode: usize,
    pub beta: f64,
    pub gamma: f64,
    pub q: f64,
    /// `−K..=K`.
    pub modes: Vec<i64>,
    /// Normal derivative feedback on the harmonic lifting: `β|k|`.
    pub dtn_b0: Vec<f64>,
    /// `−k²`.
    pub beltrami: Vec<f64>,
    /// Trace coupling `−qk² + γ`.
    pub coupling: Vec<f64>,
    /// `β|k| − qk² + γ`.
    pub dtn: Vec<f64>,
    /// `(−Δ_Γ)^{1/2}`: `|k|`.
    pub w: Vec<f64>,
}

pub fn build_disk_model(max_mode: usize, beta: f64, gamma: f64, q: f64) -> Result<DiskModel> {
    if max_mode < 1 {
        return Err(Error::BadParameters(format!(
            "max_mode must be at least 1, got {max_mode}"
        )));
    }
    if !beta.is_finite() || beta >= 0.0 {
        return Err(Error::BadParameters(format!("beta must be negative, got {beta}")));
    }
    if !q.is_finite() || q < 0.0 {
        return Err(Error::BadParameters(format!("q must be nonnegative, got {q}")));
    }
    if !gamma.is_finite() {
        return Err(Error::BadParameters(format!("gamma must be finite, got {gamma}")));
    }
    let k_max = max_mode as i64;
    let modes: Vec<i64> = (-k_max..=k_max).collect();
    let abs: Vec<f64> = modes.iter().map(|k| k.unsigned_abs() as f64).collect();
    let dtn_b0: Vec<f64> = abs.iter().map(|k| beta * k).collect();
    let beltrami: Vec<f64> = abs.iter().map(|k| -k * k).collect();
    let coupling: Vec<f64> = beltrami.iter().map(|b| q * b + gamma).collect();
    let dtn = dtn_b0.iter().zip(&coupling).map(|(d, c)| d + c).collect();
    Ok(DiskModel {
        max_mode,
        beta,
        gamma,
        q,
        modes,
        dtn_b0,
        beltrami,
        coupling,
        dtn,
        w: abs,
    })
}

impl DiskModel {
    pub fn from_spec(spec: &DiskSpec) -> Result<Self> {
        build_disk_model(spec.max_mode, spec.beta, spec.gamma, spec.q)
    }

    /// Position of mode `k` in the per-mode arrays.
    pub fn index(&self, k: i64) -> Option<usize> {
        let km = self.max_mode as i64;
        (-km..=km).contains(&k).then(|| (k + km) as usize)
    }

    fn diagonal(name: &str, values: &[f64]) -> Operator {
        Operator::diagonal(name, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// `N^B` on the mode space.
    pub fn dtn_operator(&self) -> Operator {
        Self::diagonal("N_B", &self.dtn)
    }

    pub fn dtn_b0_operator(&self) -> Operator {
        Self::diagonal("N_B0", &self.dtn_b0)
    }

    pub fn coupling_operator(&self) -> Operator {
        Self::diagonal("C", &self.coupling)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WqIdentityReport {
    pub beta: f64,
    /// `max_k |N^{B₀}(k) − βW(k)|`.
    pub residual: f64,
    /// `β = −1`, where the identity reads `N^{B₀} = −W`.
    pub literal_form: bool,
}

pub fn disk_wq_identity_check(model: &DiskModel) -> WqIdentityReport {
    let residual = model
        .dtn_b0
        .iter()
        .zip(&model.w)
        .map(|(d, w)| (d - model.beta * w).abs())
        .fold(0.0, f64::max);
    WqIdentityReport {
        beta: model.beta,
        residual,
        literal_form: model.beta == -1.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    /// `max_k (|β||k| − ε|C(k)|)`, clipped at 0.
    pub m_epsilon: f64,
    /// Smallest `|k|` attaining the unclipped maximum.
    pub k_star: usize,
    /// `|β|/(εq) + 1`.
    pub k_bound: f64,
    /// The maximum sits on the truncation edge, so it may not be the true one.
    pub at_truncation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiskRelativeBoundReport {
    pub rows: Vec<EpsilonRow>,
    pub conclusive: bool,
}

/// `N^{B₀}` against `C`: for every `ε` the smallest `M_ε` with
/// `|N^{B₀}(k)| ≤ ε|C(k)| + M_ε` over the retained modes.
pub fn disk_relative_bound(model: &DiskModel, epsilons: &[f64]) -> Result<DiskRelativeBoundReport> {
    if model.q == 0.0 {
        return Err(Error::BoundFails(format!(
            "with q = 0 the coupling is the constant {}; |β||k| grows without bound against it",
            model.gamma
        )));
    }
    if epsilons.iter().any(|e| !e.is_finite() || *e <= 0.0) {
        return Err(Error::InvalidArgument("ε values must be positive and finite".into()));
    }
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        // Even in k: scan |k| = 0..=K.
        let (k_star, best) = (0..=model.max_mode)
            .map(|k| {
                let kf = k as f64;
                let c = -model.q * kf * kf + model.gamma;
                (k, model.beta.abs() * kf - eps * c.abs())
            })
            .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        rows.push(EpsilonRow {
            epsilon: eps,
            m_epsilon: best.max(0.0),
            k_star,
            k_bound: model.beta.abs() / (eps * model.q) + 1.0,
            at_truncation: k_star == model.max_mode,
        });
    }
    let conclusive = rows.iter().all(|r| !r.at_truncation && r.m_epsilon.is_finite());
    Ok(DiskRelativeBoundReport { rows, conclusive })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeFactor {
    pub t: f64,
    pub k: usize,
    /// `e^{t N^B(k)}`.
    pub factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiskGenerationReport {
    pub spectral_abscissa: f64,
    pub abscissa_mode: i64,
    /// Real spectrum bounded above: the sector opens to `π/2`.
    pub angle: f64,
    /// `q > 0`; with `q = 0` the feedback is first order and the report
    /// describes a different regime.
    pub dominant_coupling: bool,
    pub factors: Vec<ModeFactor>,
    /// `lim −N^B(k)/k²` estimated at the truncation edge; the tail factors
    /// decay like `e^{−t·rate·k²}`.
    pub decay_rate: f64,
    /// Largest factor at `|k| = K` over positive times.
    pub tail_factor: Option<f64>,
}

pub fn disk_generation_report(model: &DiskModel, times: &[f64]) -> Result<DiskGenerationReport> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidArgument("times must be finite and nonnegative".into()));
    }
    let (pos, abscissa) = model
        .dtn
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let centre = model.max_mode;
    let mut factors = Vec::new();
    for &t in times {
        for k in 0..=model.max_mode {
            factors.push(ModeFactor {
                t,
                k,
                factor: (t * model.dtn[centre + k]).exp(),
            });
        }
    }
    let kf = model.max_mode as f64;
    let tail_factor = factors
        .iter()
        .filter(|f| f.t > 0.0 && f.k == model.max_mode)
        .map(|f| f.factor)
        .reduce(f64::max);
    Ok(DiskGenerationReport {
        spectral_abscissa: abscissa,
        abscissa_mode: model.modes[pos],
        angle: FRAC_PI_2,
        dominant_coupling: model.q > 0.0,
        factors,
        decay_rate: -model.dtn[centre + model.max_mode] / (kf * kf),
        tail_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_formulas() {
        let m = build_disk_model(8, -1.0, 0.0, 1.0).unwrap();
        let i = |k| m.index(k).unwrap();
        assert_eq!(m.dtn_b0[i(0)], 0.0);
        assert_eq!(m.dtn_b0[i(3)], -3.0);
        assert_eq!(m.dtn[i(2)], -6.0);
        assert_eq!(m.dtn[i(-2)], -6.0);
        let g = build_disk_model(4, -1.0, 2.5, 0.0).unwrap();
        assert_eq!(g.coupling[g.index(0).unwrap()], 2.5);
        assert_eq!(g.dtn[g.index(0).unwrap()], 2.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            build_disk_model(0, -1.0, 0.0, 1.0),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            build_disk_model(4, 0.0, 0.0, 1.0),
            Err(Error::BadParameters(_))
        ));
        assert!(matches!(
            build_disk_model(4, -1.0, 0.0, -0.5),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn wq_identity() {
        let m = build_disk_model(1, -1.0, 0.0, 1.0).unwrap();
        let r = disk_wq_identity_check(&m);
        assert_eq!(r.residual, 0.0);
        assert!(r.literal_form);
        let m2 = build_disk_model(16, -2.0, 0.0, 1.0).unwrap();
        assert_eq!(disk_wq_identity_check(&m2).residual, 0.0);
        assert!(m2.dtn_b0.iter().zip(&m2.w).all(|(d, w)| *d == -2.0 * w));
    }

    #[test]
    fn relative_bound_brute_force() {
        let m = build_disk_model(64, -1.0, 0.0, 1.0).unwrap();
        let r = disk_relative_bound(&m, &[1.0]).unwrap();
        assert_eq!(r.rows[0].m_epsilon, 0.0);
        assert!(r.rows[0].k_star <= 1);
        let big = disk_relative_bound(&m, &[1e3]).unwrap();
        assert_eq!(big.rows[0].m_epsilon, 0.0);
        let none = build_disk_model(8, -1.0, -1.0, 0.0).unwrap();
        assert!(matches!(disk_relative_bound(&none, &[1.0]), Err(Error::BoundFails(_))));
    }

    #[test]
    fn generation_factors() {
        let m = build_disk_model(8, -1.0, 0.0, 1.0).unwrap();
        let r = disk_generation_report(&m, &[0.0, 1.0]).unwrap();
        assert!(r.factors.iter().filter(|f| f.t == 0.0).all(|f| f.factor == 1.0));
        let f3 = r.factors.iter().find(|f| f.t == 1.0 && f.k == 3).unwrap();
        assert_eq!(f3.factor, (-12.0f64).exp());
        assert_eq!(r.spectral_abscissa, 0.0);
        assert_eq!(r.abscissa_mode, 0);
    }
}
