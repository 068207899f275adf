//! A-priori error machinery for the transformed trapezoidal rule.
//!
//! For a transformed integrand decaying like e^{−c·e^{|t|}} the global error
//! of the truncated sum at step h admits the computable bound
//!
//!   (h²/3)(1+c)(e^{−4−c/2} + c/4)
//!
//! which splits into a far-field part (indices past k₀, where the
//! double-exponential decay dominates a geometric series) and a near-field
//! part (the remaining indices, bounded by a plain geometric series). The
//! bound carries no truncation index at all: it is independent of how many
//! terms the sum keeps, which is the stability statement the engine's
//! truncation-extension property test exercises operationally.
//!
//! The decay constant c is a user input in most entry points; [`estimate_c`]
//! fits it from samples of the transformed integrand when it is unknown.

use thiserror::Error;

use crate::engine::Integrand;
use crate::transform::{map_affine, node_at, Interval};

/// Domain violations for the bound evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("domain error: {0}")]
    Domain(&'static str),
}

/// Failure modes of the decay-constant fit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least 4 samples in the decay regime, got {got}")]
    TooFewSamples { got: usize },
    #[error("residual {residual:.3} exceeds 0.5: no double-exponential decay")]
    PoorFit { residual: f64 },
}

fn check_h_c(h: f64, c: f64) -> Result<(), BoundError> {
    if !h.is_finite() || h <= 0.0 {
        return Err(BoundError::Domain("step size h must be positive and finite"));
    }
    if !c.is_finite() || c <= 0.0 {
        return Err(BoundError::Domain("decay constant c must be positive and finite"));
    }
    Ok(())
}

/// The global error bound (h²/3)(1+c)(e^{−4−c/2} + c/4).
///
/// Equals [`case1_term`] + [`case2_term`] algebraically.
pub fn global_bound(h: f64, c: f64) -> Result<f64, BoundError> {
    check_h_c(h, c)?;
    Ok(h * h / 3.0 * (1.0 + c) * ((-4.0 - c / 2.0).exp() + 0.25 * c))
}

/// Far-field contribution (e^{−4}(1+c)/3)·e^{−c/2}·h².
///
/// Valid for h below [`h0_limit`], where the geometric-series estimate
/// behind it applies.
pub fn case1_term(h: f64, c: f64) -> Result<f64, BoundError> {
    check_h_c(h, c)?;
    if h > h0_limit(c)? {
        return Err(BoundError::Domain("case-1 estimate needs h <= h0_limit(c)"));
    }
    Ok((-4.0f64).exp() * (1.0 + c) / 3.0 * (-c / 2.0).exp() * h * h)
}

/// Near-field contribution h²(c + c²)/12.
pub fn case2_term(h: f64, c: f64) -> Result<f64, BoundError> {
    check_h_c(h, c)?;
    Ok(h * h * (c + c * c) / 12.0)
}

/// Diagnostic only: the bound read literally as a single product,
/// h²·(e^{−4}(1+c)/3)·e^{−c/2}·(1/12)(c+c²). This form does not reproduce
/// the reference value the canonical sum form reproduces; it is exposed so
/// the two readings can be compared.
pub fn literal_product_form(h: f64, c: f64) -> Result<f64, BoundError> {
    check_h_c(h, c)?;
    Ok(h * h * ((-4.0f64).exp() * (1.0 + c) / 3.0) * (-c / 2.0).exp() * ((c + c * c) / 12.0))
}

/// Envelope (c+c²)·e^{2|t|−c·e^{|t|}} dominating |F″(t)| for transformed
/// integrands in the e^{−c·e^{|t|}} decay class.
pub fn f_second_derivative_envelope(t: f64, c: f64) -> f64 {
    debug_assert!(c > 0.0);
    let ta = t.abs();
    (c + c * c) * (2.0 * ta - c * ta.exp()).exp()
}

/// Smallest integer k with k·h > 8/c, i.e. floor(8/(c·h)) + 1.
///
/// Past this index the double-exponential decay beats the e^{2kh} growth:
/// e^{2kh−c·e^{kh}} < e^{−(c/2)e^{kh}} for every k ≥ k₀.
pub fn k0_threshold(c: f64, h: f64) -> Result<i64, BoundError> {
    check_h_c(h, c)?;
    Ok((8.0 / (c * h)).floor() as i64 + 1)
}

/// The largest step for which e^{−ch/2} ≤ 1 − ch/4 holds, located by
/// bisection to relative 1e-12.
///
/// The inequality holds on (0, h*) and fails beyond; c·h* is the
/// scale-invariant constant ≈ 3.1872.
pub fn h0_limit(c: f64) -> Result<f64, BoundError> {
    check_h_c(1.0, c)?;
    let g = |h: f64| (-c * h / 2.0).exp() - (1.0 - c * h / 4.0);
    let mut lo = 1e-12 / c;
    let mut hi = 8.0 / c;
    debug_assert!(g(lo) <= 0.0 && g(hi) > 0.0);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The (h, c) pair with its derived thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub h: f64,
    pub c: f64,
    /// ceil(8/(c·h)): the index where the error sum splits into its two cases.
    pub k0: i64,
    /// Largest h admissible for the case-1 geometric estimate.
    pub h0_limit: f64,
}

impl BoundParams {
    pub fn new(h: f64, c: f64) -> Result<Self, BoundError> {
        check_h_c(h, c)?;
        Ok(Self {
            h,
            c,
            k0: (8.0 / (c * h)).ceil() as i64,
            h0_limit: h0_limit(c)?,
        })
    }
}

/// Outcome of the decay-constant fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Fitted decay constant.
    pub c: f64,
    /// RMS residual of ln(−ln|F|) − |t| about its mean.
    pub residual: f64,
    /// Samples that fell inside the decay regime.
    pub samples_used: usize,
}

/// Fit c in |F(t)| ≈ e^{−c·e^{|t|}} from (t, |F(t)|) samples.
///
/// Taking logs twice gives ln(−ln|F|) = ln c + |t|, a line of slope one in
/// |t|; the fit constrains the slope to exactly one and least-squares the
/// intercept over samples with |F| ∈ (1e-300, 1e-2) — decayed enough for
/// the model to apply, far from underflow.
pub fn fit_decay(samples: &[(f64, f64)]) -> Result<DecayFit, FitError> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, fv)| fv.is_finite() && *fv > 1e-300 && *fv < 1e-2)
        .map(|&(t, fv)| (t.abs(), (-fv.ln()).ln()))
        .collect();
    if pts.len() < 4 {
        return Err(FitError::TooFewSamples { got: pts.len() });
    }
    let n = pts.len() as f64;
    let intercept = pts.iter().map(|&(x, y)| y - x).sum::<f64>() / n;
    let residual =
        (pts.iter().map(|&(x, y)| (y - x - intercept).powi(2)).sum::<f64>() / n).sqrt();
    if residual > 0.5 {
        return Err(FitError::PoorFit { residual });
    }
    Ok(DecayFit {
        c: intercept.exp(),
        residual,
        samples_used: pts.len(),
    })
}

/// Estimate the decay constant of the transformed integrand f(x(t))·w(t)
/// by sampling it at the given transform-plane points.
pub fn estimate_c<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    t_samples: &[f64],
) -> Result<DecayFit, FitError> {
    let samples: Vec<(f64, f64)> = t_samples
        .iter()
        .filter_map(|&t| {
            let m = map_affine(&node_at(t), iv);
            if m.weight == 0.0 {
                return None;
            }
            let v = f.eval(m.x, m.dist_a, m.dist_b) * m.weight;
            v.is_finite().then_some((t, v.abs()))
        })
        .collect();
    fit_decay(&samples)
}

/// The canonical probe grid for [`estimate_c`]: ±{3.0, 3.25, …, 5.5},
/// deep enough in the tails that polynomial prefactors no longer disturb
/// the fit, shallow enough that nothing has underflowed.
pub fn decay_probe_grid() -> Vec<f64> {
    let mut ts = Vec::with_capacity(22);
    for j in 0..=10 {
        let t = 3.0 + 0.25 * j as f64;
        ts.push(t);
        ts.push(-t);
    }
    ts
}
