//! Grid-refinement tables and log-log order fits.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub nodes: usize,
    pub h: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub quantity: String,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub fitted_order: Option<f64>,
}

impl ConvergenceTable {
    pub fn new(quantity: impl Into<String>, rows: Vec<ConvergenceRow>) -> Self {
        let xs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.error).collect();
        Self {
            quantity: quantity.into(),
            fitted_order: loglog_slope(&xs, &ys),
            rows,
        }
    }

    /// Whether the fitted order lies within `tol` of `target`.
    pub fn order_within(&self, target: f64, tol: f64) -> bool {
        self.fitted_order.is_some_and(|p| (p - target).abs() <= tol)
    }
}

/// Least-squares slope of `log y` against `log x`, using only points where
/// both are positive and finite. `None` with fewer than two such points or
/// a degenerate abscissa.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// `count` points spaced evenly in `log` between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}
