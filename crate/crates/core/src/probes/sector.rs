use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::hille_yosida::hille_yosida_probe;
use crate::convergence::log_space;
use crate::dense::{NormKind, C64};
use crate::error::{Error, Result};
use crate::operator::Operator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorOptions {
    /// Shift applied before scanning; defaults to the spectral abscissa + 1.
    pub omega: Option<f64>,
    pub theta_step: f64,
    /// Rays whose supremum exceeds this count as unbounded.
    pub threshold: f64,
    pub norm: NormKind,
    pub r_min: f64,
    /// The radial grid ends at this multiple of `‖A − ω‖∞`.
    pub r_max_factor: f64,
    pub points_per_decade: usize,
    /// Golden-section steps spent around the largest sample of each ray.
    pub refine_iterations: usize,
}

impl Default for SectorOptions {
    fn default() -> Self {
        Self {
            omega: None,
            theta_step: PI / 180.0,
            threshold: 1e3,
            norm: NormKind::Sup,
            r_min: 1e-2,
            r_max_factor: 10.0,
            points_per_decade: 3,
            refine_iterations: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RaySample {
    pub theta_rad: f64,
    /// `sup_r ‖λR(λ, A − ω)‖` at `λ = r·e^{iθ}` (and the mirror ray for
    /// non-real operators); infinite when a pole was hit.
    pub sup_norm: f64,
    pub bounded_flag: bool,
    pub argmax_r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorReport {
    pub operator: String,
    pub norm: NormKind,
    pub omega: f64,
    pub threshold: f64,
    pub lambda0: Option<f64>,
    /// `sup ‖λR(λ, A − ω)‖` along the positive real axis.
    pub m: f64,
    /// Largest `θ − π/2` such that every ray from `π/2` up to `θ` is bounded.
    pub angle_estimate: f64,
    /// First ray found unbounded, if any.
    pub first_unbounded_theta: Option<f64>,
    /// Rays past the first unbounded one where the supremum decreased.
    pub monotonicity_violations: Vec<f64>,
    pub ray_table: Vec<RaySample>,
}

fn ray_value(op: &Operator, r: f64, theta: f64, norm: NormKind, mirror: bool) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for sign in if mirror { &[1.0, -1.0][..] } else { &[1.0][..] } {
        let lambda = C64::from_polar(r, sign * theta);
        let v = match op.scaled_resolvent_norm(lambda, norm) {
            Ok(v) => v,
            Err(Error::SpectrumHit { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        worst = worst.max(v);
    }
    Ok(if worst.is_nan() { f64::INFINITY } else { worst })
}

fn scan_ray(op: &Operator, theta: f64, radii: &[f64], opts: &SectorOptions, mirror: bool) -> Result<RaySample> {
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        values.push(ray_value(op, r, theta, opts.norm, mirror)?);
    }
    let (k, mut best) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
    let mut argmax = radii[k];
    if best.is_finite() && radii.len() >= 3 {
        // Golden-section search in log r on the bracket around the largest sample.
        let lo = radii[k.saturating_sub(1)].ln();
        let hi = radii[(k + 1).min(radii.len() - 1)].ln();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let mut fc = ray_value(op, c.exp(), theta, opts.norm, mirror)?;
        let mut fd = ray_value(op, d.exp(), theta, opts.norm, mirror)?;
        for _ in 0..opts.refine_iterations {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = ray_value(op, c.exp(), theta, opts.norm, mirror)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = ray_value(op, d.exp(), theta, opts.norm, mirror)?;
            }
        }
        for (v, x) in [(fc, c), (fd, d)] {
            if v > best {
                best = v;
                argmax = x.exp();
            }
        }
    }
    Ok(RaySample {
        theta_rad: theta,
        sup_norm: best,
        bounded_flag: best <= opts.threshold,
        argmax_r: argmax,
    })
}

/// The `θ` grid: `π/2`, then steps of `theta_step` up to but excluding `π`.
pub fn theta_grid(step: f64) -> Vec<f64> {
    let count = ((FRAC_PI_2 / step) - 1e-9).ceil() as usize;
    (0..count).map(|k| FRAC_PI_2 + k as f64 * step).collect()
}

/// Scans `‖λR(λ, A − ω)‖` along rays `λ = r·e^{iθ}` for `θ ∈ [π/2, π)`.
pub fn sector_angle_estimate(op: &Operator, opts: &SectorOptions) -> Result<SectorReport> {
    if !(opts.theta_step > 0.0 && opts.theta_step < FRAC_PI_2) {
        return Err(Error::InvalidArgument(format!(
            "theta_step must lie in (0, π/2), got {}",
            opts.theta_step
        )));
    }
    if !(opts.r_min > 0.0 && opts.r_max_factor > 0.0 && opts.threshold > 0.0) || opts.points_per_decade == 0 {
        return Err(Error::InvalidArgument("radial grid parameters must be positive".into()));
    }
    let omega = match opts.omega {
        Some(w) => w,
        None => op.spectral_abscissa()? + 1.0,
    };
    let shifted = op.shifted(omega);
    let r_max = opts.r_max_factor * shifted.norm_sup().max(1.0);
    let decades = (r_max / opts.r_min).log10().max(1.0);
    let count = (decades * opts.points_per_decade as f64).ceil() as usize + 1;
    let radii = log_space(opts.r_min, r_max, count);
    let mirror = !op.is_real();

    let mut real_ray = radii.clone();
    real_ray.push(1e10 * shifted.norm_sup().max(1.0));
    let hy = hille_yosida_probe(&shifted, &real_ray, opts.norm)?;

    let mut table = Vec::new();
    for theta in theta_grid(opts.theta_step) {
        table.push(scan_ray(&shifted, theta, &radii, opts, mirror)?);
    }
    let first_bad = table.iter().position(|r| !r.bounded_flag);
    let angle_estimate = match first_bad {
        Some(0) => 0.0,
        Some(k) => table[k - 1].theta_rad - FRAC_PI_2,
        None => table.last().map_or(0.0, |r| r.theta_rad - FRAC_PI_2),
    };
    let monotonicity_violations = match first_bad {
        Some(k) => table[k..]
            .windows(2)
            .filter(|w| w[1].sup_norm < w[0].sup_norm * (1.0 - 1e-9))
            .map(|w| w[1].theta_rad)
            .collect(),
        None => Vec::new(),
    };
    Ok(SectorReport {
        operator: op.name().to_string(),
        norm: opts.norm,
        omega,
        threshold: opts.threshold,
        lambda0: hy.lambda0,
        m: hy.m,
        angle_estimate,
        first_unbounded_theta: first_bad.map(|k| table[k].theta_rad),
        monotonicity_violations,
        ray_table: table,
    })
}
