//! Convergence studies: per-level error tables and the fitted order.

use crate::engine::{run_fixed_levels, EngineError, Integrand};
use crate::error_model;
use crate::transform::Interval;

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub level: u32,
    pub h: f64,
    pub evals: usize,
    pub value: f64,
    /// |value − exact| when the exact value is known.
    pub abs_error: Option<f64>,
    /// A-priori bound at this level's h when a decay constant is known.
    pub bound: Option<f64>,
}

/// A completed study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of log|error| against log h over the clean-error
    /// window; present when at least two rows fall inside it.
    pub fitted_order: Option<f64>,
}

/// Errors in the window (1e-12, 1e-2) are clean: large enough that rounding
/// noise has not taken over, small enough that the asymptotic regime has.
pub const ERROR_WINDOW: (f64, f64) = (1e-12, 1e-2);

/// Truncation tolerance for studies: tight enough that every level is
/// resolved to its discretization error rather than its truncation error.
const STUDY_TOL: f64 = 1e-15;

/// Fit the convergence order p in error ≈ C·h^p from (h, error) pairs,
/// using only pairs inside [`ERROR_WINDOW`]. Needs at least two such pairs.
pub fn fit_order(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e >= ERROR_WINDOW.0 && *e <= ERROR_WINDOW.1)
        .map(|&(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Run `levels` rows (levels − 1 halvings from h0 = 1), each resolved to
/// full accuracy, and tabulate value, error, and bound per level.
pub fn convergence_study<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    levels: u32,
    exact: Option<f64>,
    decay_c: Option<f64>,
) -> Result<ConvergenceStudy, EngineError> {
    assert!(levels >= 2, "a study needs at least two levels");
    let records = run_fixed_levels(f, iv, STUDY_TOL, 1.0, levels - 1)?;
    let rows: Vec<ConvergenceRow> = records
        .iter()
        .map(|r| ConvergenceRow {
            level: r.level,
            h: r.h,
            evals: r.n_minus + r.n_plus + 1,
            value: r.value,
            abs_error: exact.map(|e| (r.value - e).abs()),
            bound: decay_c.and_then(|c| error_model::global_bound(r.h, c).ok()),
        })
        .collect();
    let fitted_order = exact.and_then(|_| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| r.abs_error.map(|e| (r.h, e)))
            .collect();
        fit_order(&pts)
    });
    Ok(ConvergenceStudy { rows, fitted_order })
}
