use serde::Serialize;

use crate::dense::{NormKind, C64};
use crate::error::{Error, Result};
use crate::operator::Operator;

#[derive(Debug, Clone, Serialize)]
pub struct HilleYosidaSample {
    pub lambda: f64,
    /// `‖λR(λ, A)‖`, absent at a pole.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HilleYosidaReport {
    pub operator: String,
    pub norm: NormKind,
    /// Smallest sample above which every sample is resolvent-regular.
    pub lambda0: Option<f64>,
    /// `sup ‖λR(λ, A)‖` over the samples from `lambda0` on.
    pub m: f64,
    pub samples: Vec<HilleYosidaSample>,
    /// Samples that hit the spectrum.
    pub poles: Vec<f64>,
    /// `|‖λR(λ, A)‖ − 1|` at the largest regular sample.
    pub asymptotic_gap: Option<f64>,
}

/// Samples `‖λR(λ, A)‖` along positive reals.
pub fn hille_yosida_probe(op: &Operator, lambdas: &[f64], norm: NormKind) -> Result<HilleYosidaReport> {
    if lambdas.iter().any(|l| !l.is_finite() || *l <= 0.0) {
        return Err(Error::InvalidArgument("λ samples must be positive and finite".into()));
    }
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut samples = Vec::with_capacity(sorted.len());
    let mut poles = Vec::new();
    for &lam in &sorted {
        match op.scaled_resolvent_norm(C64::new(lam, 0.0), norm) {
            Ok(v) => samples.push(HilleYosidaSample {
                lambda: lam,
                value: Some(v),
            }),
            Err(Error::SpectrumHit { .. }) => {
                poles.push(lam);
                samples.push(HilleYosidaSample {
                    lambda: lam,
                    value: None,
                });
            }
            Err(e) => return Err(e),
        }
    }
    let first_regular_tail = samples.iter().rposition(|s| s.value.is_none()).map_or(0, |k| k + 1);
    let tail = &samples[first_regular_tail..];
    let lambda0 = tail.first().map(|s| s.lambda);
    let m = tail.iter().filter_map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
    let asymptotic_gap = tail.last().and_then(|s| s.value).map(|v| (v - 1.0).abs());
    Ok(HilleYosidaReport {
        operator: op.name().to_string(),
        norm,
        lambda0,
        m: if tail.is_empty() { f64::INFINITY } else { m },
        samples,
        poles,
        asymptotic_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::log_space;
    use crate::dense::Matrix;

    #[test]
    fn scalar_minus_one() {
        let op = Operator::dense("scalar", Matrix::from_real(1, 1, &[-1.0]).unwrap());
        let r = hille_yosida_probe(&op, &log_space(1.0, 1e6, 30), NormKind::Sup).unwrap();
        assert_eq!(r.lambda0, Some(1.0));
        assert!(r.m <= 1.0 && r.m > 1.0 - 1e-5);
        assert!(r.asymptotic_gap.unwrap() < 1e-5);
    }

    #[test]
    fn symmetric_semidefinite_dtn() {
        let op = Operator::dense("N", Matrix::from_real(2, 2, &[-1.0, 1.0, 1.0, -1.0]).unwrap());
        let r = hille_yosida_probe(&op, &log_space(1.0, 1e6, 30), NormKind::Spectral).unwrap();
        // Eigenvalues 0 and −2: λ/(λ − 0) = 1 dominates.
        assert!((r.m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poles_are_skipped() {
        let op = Operator::diagonal("d", vec![C64::new(2.0, 0.0)]);
        let r = hille_yosida_probe(&op, &[1.0, 2.0, 4.0, 8.0], NormKind::Sup).unwrap();
        assert_eq!(r.poles, vec![2.0]);
        assert_eq!(r.lambda0, Some(4.0));
        assert!((r.m - 2.0).abs() < 1e-15);
    }
}
