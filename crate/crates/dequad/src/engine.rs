//! Truncated trapezoidal summation of the transformed integrand, with
//! automatic truncation-index selection and level-halving refinement.
//!
//! The engine evaluates I_h = h Σ_k f(x_k) w_k over the tanh-sinh nodes,
//! scanning outward from k = 0 until terms fall below a relative threshold
//! (with a backstop where the weight underflows to zero). Halving h reuses
//! every previous evaluation: old nodes land on even indices of the new
//! grid, so each level only evaluates odd multiples of the new step and
//! folds them into the running compensated accumulator. Summation order is
//! fixed (ascending |k|, negative before positive at ties), which makes
//! results bit-reproducible from run to run.

use thiserror::Error;

use crate::error_model;
use crate::kahan::NeumaierSum;
use crate::transform::{map_affine, node, Interval};

/// A real integrand on (a, b).
///
/// Besides the abscissa, the engine hands the integrand numerically stable
/// distances to both endpoints (`dist_a` = x − a, `dist_b` = b − x), exact
/// even where the abscissa itself has rounded onto an endpoint. Integrands
/// singular at an endpoint should be written against those distances.
pub trait Integrand {
    fn eval(&self, x: f64, dist_a: f64, dist_b: f64) -> f64;
}

impl<F: Fn(f64, f64, f64) -> f64> Integrand for F {
    fn eval(&self, x: f64, dist_a: f64, dist_b: f64) -> f64 {
        self(x, dist_a, dist_b)
    }
}

/// Scan failure modes and non-convergence.
#[derive(Debug, Error)]
pub enum EngineError {
    /// The integrand returned NaN or ±∞ at a node the engine generated:
    /// it is singular somewhere the transform does not neutralize.
    #[error("integrand returned a non-finite value at node k={k} (x={x})")]
    NonFiniteIntegrand { k: i64, x: f64 },
    /// The outward scan passed the index limit without meeting the
    /// tolerance; the tolerance is unreachable at this step size.
    #[error("truncation scan exceeded {limit} indices without converging")]
    TruncationOverrun { limit: i64 },
    /// The level loop hit `max_level` before successive values agreed to
    /// tolerance. The best result so far is attached.
    #[error("no convergence after {} levels (best value {}, est. error {:.3e})",
            .0.level, .0.value, .0.est_error)]
    NoConvergence(Box<QuadratureResult>),
}

/// Result of a refinement run.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    /// The approximation at the final level.
    pub value: f64,
    /// Final step size.
    pub h: f64,
    /// Number of halvings applied to `h0`.
    pub level: u32,
    /// Truncation index on the negative side (N⁻).
    pub n_minus: usize,
    /// Truncation index on the positive side (N⁺).
    pub n_plus: usize,
    /// Total node count N = N⁺ + N⁻ + 1.
    pub evals: usize,
    /// Empirical error estimate |I_ℓ − I_{ℓ−1}|.
    pub est_error: f64,
    /// A-priori global bound, present when a decay constant was supplied.
    pub bound: Option<f64>,
}

/// Options for [`integrate`].
#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    /// Convergence tolerance for the successive-level difference.
    pub tol: f64,
    /// Starting step size.
    pub h0: f64,
    /// Maximum number of halvings.
    pub max_level: u32,
    /// Decay constant of the transformed integrand, when known; enables the
    /// a-priori bound on the result.
    pub decay_c: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            h0: 1.0,
            max_level: 12,
            decay_c: None,
        }
    }
}

/// One refinement level as recorded by [`integrate_trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRecord {
    pub level: u32,
    pub h: f64,
    pub n_minus: usize,
    pub n_plus: usize,
    pub value: f64,
    /// |I_ℓ − I_{ℓ−1}|; infinite at level 0.
    pub est_error: f64,
}

/// Consecutive sub-threshold terms required before a side stops.
const CONFIRMATION_TERMS: usize = 3;

/// Hard cap on the scan index; exceeding it raises `TruncationOverrun`.
const INDEX_LIMIT: i64 = 1_000_000;

/// The per-term truncation threshold inside the level loop is
/// `TRUNCATION_SAFETY * tol * (1 + |I|)`. Truncation tails add up to a few
/// first-omitted terms, so the per-term cut must sit below the convergence
/// tolerance for the final value to honor it.
const TRUNCATION_SAFETY: f64 = 0.25;

fn eval_term<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    k: i64,
    h: f64,
) -> Result<Option<f64>, EngineError> {
    let m = map_affine(&node(k, h), iv);
    if m.weight == 0.0 {
        return Ok(None);
    }
    let v = f.eval(m.x, m.dist_a, m.dist_b);
    if !v.is_finite() {
        return Err(EngineError::NonFiniteIntegrand { k, x: m.x });
    }
    Ok(Some(v * m.weight))
}

/// The truncated trapezoidal sum h Σ_{k=−n_minus}^{n_plus} f(x_k) w_k.
///
/// Terms are consumed in the fixed deterministic order (ascending |k|,
/// negative before positive at ties) with compensated accumulation. Nodes
/// whose weight has underflowed to zero contribute nothing and are not
/// evaluated.
pub fn trapezoid_sum<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    h: f64,
    n_minus: usize,
    n_plus: usize,
) -> Result<f64, EngineError> {
    assert!(h > 0.0, "step size must be positive");
    let mut acc = NeumaierSum::new();
    if let Some(t) = eval_term(f, iv, 0, h)? {
        acc.add(t);
    }
    for i in 1..=n_minus.max(n_plus) {
        if i <= n_minus {
            if let Some(t) = eval_term(f, iv, -(i as i64), h)? {
                acc.add(t);
            }
        }
        if i <= n_plus {
            if let Some(t) = eval_term(f, iv, i as i64, h)? {
                acc.add(t);
            }
        }
    }
    Ok(h * acc.value())
}

/// Select per-side truncation indices for the sum at step `h`.
///
/// Scans k outward from 0 in both directions in the canonical order. A
/// direction stops once |h·term_k| < tol·(1 + |partial sum|) for three
/// consecutive k, or when the weight underflows to zero. The returned
/// indices are the last included k on each side; the trailing confirmation
/// terms are excluded.
pub fn choose_truncation<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    h: f64,
    tol: f64,
) -> Result<(usize, usize), EngineError> {
    assert!(h > 0.0, "step size must be positive");
    assert!(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
    let mut partial = NeumaierSum::new();
    if let Some(t) = eval_term(f, iv, 0, h)? {
        partial.add(h * t);
    }
    let mut bound = [0usize; 2]; // [negative, positive]
    let mut small = [0usize; 2];
    let mut done = [false; 2];
    let mut i: i64 = 1;
    while !(done[0] && done[1]) {
        if i > INDEX_LIMIT {
            return Err(EngineError::TruncationOverrun { limit: INDEX_LIMIT });
        }
        for side in 0..2 {
            if done[side] {
                continue;
            }
            let k = if side == 0 { -i } else { i };
            match eval_term(f, iv, k, h)? {
                None => done[side] = true,
                Some(t) => {
                    partial.add(h * t);
                    if (h * t).abs() < tol * (1.0 + partial.value().abs()) {
                        small[side] += 1;
                        if small[side] >= CONFIRMATION_TERMS {
                            done[side] = true;
                        }
                    } else {
                        small[side] = 0;
                        bound[side] = i as usize;
                    }
                }
            }
        }
        i += 1;
    }
    Ok((bound[0], bound[1]))
}

struct Trace {
    records: Vec<LevelRecord>,
    converged: bool,
}

/// Core level loop shared by [`integrate`], [`integrate_trace`] and
/// [`refine_reuse_check`]. When `force_levels` is set the convergence stop
/// is ignored and exactly that many halvings run.
fn run_levels<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    tol: f64,
    h0: f64,
    max_level: u32,
    force_levels: Option<u32>,
) -> Result<Trace, EngineError> {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!(h0 > 0.0, "initial step must be positive");
    let levels = force_levels.unwrap_or(max_level);
    assert!(force_levels.is_some() || max_level >= 1, "need at least one level");

    let mut acc = NeumaierSum::new();
    let mut h = h0;

    let center = eval_term(f, iv, 0, h)?.unwrap_or(0.0);
    acc.add(center);
    let mut threshold = TRUNCATION_SAFETY * tol * (1.0 + (h * center).abs());

    // Newly committed terms of one level, per side, ascending |k|.
    let mut new_neg: Vec<(usize, f64)> = Vec::new();
    let mut new_pos: Vec<(usize, f64)> = Vec::new();

    // Walk one side of the current grid. Even indices up to `inherited` are
    // already in the accumulator; odd ones inside are always committed.
    // Beyond `inherited` every index is new and is committed only up to the
    // last that meets the threshold, so the confirmation tail never widens
    // the node set.
    let scan_side = |f: &F,
                         h: f64,
                         dir: i64,
                         inherited: usize,
                         threshold: f64,
                         out: &mut Vec<(usize, f64)>|
     -> Result<usize, EngineError> {
        out.clear();
        let mut small = 0usize;
        let mut committed_bound = inherited;
        let mut pending: Vec<(usize, f64)> = Vec::new();
        let mut i: usize = 1;
        loop {
            if i as i64 > INDEX_LIMIT {
                return Err(EngineError::TruncationOverrun { limit: INDEX_LIMIT });
            }
            let inside = i <= inherited;
            if inside && i % 2 == 0 {
                i += 1;
                continue;
            }
            let term = match eval_term(f, iv, dir * i as i64, h)? {
                None => break,
                Some(t) => t,
            };
            if inside {
                out.push((i, term));
            } else {
                pending.push((i, term));
            }
            if (h * term).abs() < threshold {
                small += 1;
                if small >= CONFIRMATION_TERMS && i >= inherited {
                    break;
                }
            } else {
                small = 0;
                if i > inherited {
                    committed_bound = i;
                }
            }
            i += 1;
        }
        out.extend(pending.into_iter().filter(|&(k, _)| k <= committed_bound));
        Ok(committed_bound)
    };

    let mut n_plus = scan_side(f, h, 1, 0, threshold, &mut new_pos)?;
    let mut n_minus = scan_side(f, h, -1, 0, threshold, &mut new_neg)?;
    add_canonical(&mut acc, &new_neg, &new_pos);

    let mut value = h * acc.value();
    let mut records = vec![LevelRecord {
        level: 0,
        h,
        n_minus,
        n_plus,
        value,
        est_error: f64::INFINITY,
    }];

    let mut converged = false;
    for level in 1..=levels {
        h *= 0.5;
        let inherited_pos = 2 * n_plus;
        let inherited_neg = 2 * n_minus;
        threshold = TRUNCATION_SAFETY * tol * (1.0 + value.abs());
        n_plus = scan_side(f, h, 1, inherited_pos, threshold, &mut new_pos)?.max(inherited_pos);
        n_minus = scan_side(f, h, -1, inherited_neg, threshold, &mut new_neg)?.max(inherited_neg);
        add_canonical(&mut acc, &new_neg, &new_pos);
        let new_value = h * acc.value();
        let est = (new_value - value).abs();
        value = new_value;
        records.push(LevelRecord {
            level,
            h,
            n_minus,
            n_plus,
            value,
            est_error: est,
        });
        // A tolerance below the value's own rounding floor cannot be
        // certified: successive levels go bit-identical (est = 0) long
        // before the difference actually reaches it.
        let stop = tol * (1.0 + value.abs());
        if force_levels.is_none() && est <= stop && stop >= f64::EPSILON * value.abs() {
            converged = true;
            break;
        }
    }
    Ok(Trace { records, converged })
}

/// Merge the per-side buffers into the accumulator in canonical order.
fn add_canonical(acc: &mut NeumaierSum, neg: &[(usize, f64)], pos: &[(usize, f64)]) {
    let mut in_ = neg.iter().peekable();
    let mut ip = pos.iter().peekable();
    loop {
        match (in_.peek(), ip.peek()) {
            (Some(&&(kn, tn)), Some(&&(kp, _))) if kn <= kp => {
                acc.add(tn);
                in_.next();
            }
            (_, Some(&&(_, tp))) => {
                acc.add(tp);
                ip.next();
            }
            (Some(&&(_, tn)), None) => {
                acc.add(tn);
                in_.next();
            }
            (None, None) => break,
        }
    }
}

fn result_from(trace: &Trace, decay_c: Option<f64>) -> QuadratureResult {
    let last = *trace.records.last().expect("at least one level");
    QuadratureResult {
        value: last.value,
        h: last.h,
        level: last.level,
        n_minus: last.n_minus,
        n_plus: last.n_plus,
        evals: last.n_minus + last.n_plus + 1,
        est_error: last.est_error,
        bound: decay_c.and_then(|c| error_model::global_bound(last.h, c).ok()),
    }
}

/// Integrate `f` over `iv` by level-halving refinement.
///
/// Starts at h = `h0` and halves until successive levels differ by at most
/// tol·(1 + |I|) or `max_level` halvings have run, in which case the best
/// result is attached to [`EngineError::NoConvergence`]. Each level reuses
/// every previous evaluation; only odd multiples of the current step are new.
pub fn integrate<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    opts: &IntegrateOptions,
) -> Result<QuadratureResult, EngineError> {
    integrate_trace(f, iv, opts).map(|(r, _)| r)
}

/// Like [`integrate`], also returning the per-level history.
pub fn integrate_trace<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    opts: &IntegrateOptions,
) -> Result<(QuadratureResult, Vec<LevelRecord>), EngineError> {
    let trace = run_levels(f, iv, opts.tol, opts.h0, opts.max_level, None)?;
    let result = result_from(&trace, opts.decay_c);
    if trace.converged {
        Ok((result, trace.records))
    } else {
        Err(EngineError::NoConvergence(Box::new(result)))
    }
}

/// Run exactly `levels` halvings regardless of convergence and return the
/// per-level history. Used by convergence studies.
pub fn run_fixed_levels<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    tol: f64,
    h0: f64,
    levels: u32,
) -> Result<Vec<LevelRecord>, EngineError> {
    run_levels(f, iv, tol, h0, u32::MAX, Some(levels)).map(|t| t.records)
}

/// Compute the level-`level` sum twice: (a) directly from scratch at h_ℓ
/// over the engine's node range and (b) via the reuse recurrence. The two
/// must agree to a few ulps; this is the testable form of the claim that
/// refinement reuses rather than re-derives previous levels.
pub fn refine_reuse_check<F: Integrand + ?Sized>(
    f: &F,
    iv: Interval,
    h0: f64,
    level: u32,
) -> Result<(f64, f64), EngineError> {
    let tol = IntegrateOptions::default().tol;
    let trace = run_levels(f, iv, tol, h0, u32::MAX, Some(level))?;
    let last = trace.records.last().expect("at least one level");
    let direct = trapezoid_sum(f, iv, last.h, last.n_minus, last.n_plus)?;
    Ok((direct, last.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> Interval {
        Interval::unit()
    }

    fn one(_x: f64, _da: f64, _db: f64) -> f64 {
        1.0
    }

    fn inv_sqrt(_x: f64, da: f64, db: f64) -> f64 {
        1.0 / (da * db).sqrt()
    }

    fn i1(x: f64, _da: f64, _db: f64) -> f64 {
        (20.0 * (x - 1.0)).exp() * (256.0 * x).sin()
    }

    // (20 sin 256 - 256 cos 256 + 256 e^-20)/65936, tools/gen_oracles.py
    const I1_EXACT: f64 = -0.000_148_594_479_678_924_31;

    #[test]
    fn trapezoid_constant_is_two_at_underflow_truncation() {
        // weights underflow around |t| ~ 6.6, i.e. |k| ~ 66 at h = 0.1
        let v = trapezoid_sum(&one, unit(), 0.1, 80, 80).unwrap();
        assert!((v - 2.0).abs() <= 1e-12, "got {v}");
    }

    #[test]
    fn trapezoid_inverse_sqrt_is_pi() {
        let v = trapezoid_sum(&inv_sqrt, unit(), 0.05, 160, 160).unwrap();
        assert!((v - PI).abs() <= 1e-10, "got {v}");
    }

    #[test]
    fn trapezoid_oscillatory_fixture_meets_budget() {
        // h = 1/64 resolves the oscillation; truncation chosen by scan.
        let iv = Interval::new(0.0, 1.0).unwrap();
        let h = 1.0 / 64.0;
        let (nm, np) = choose_truncation(&i1, iv, h, 1e-11).unwrap();
        let n = nm + np + 1;
        let v = trapezoid_sum(&i1, iv, h, nm, np).unwrap();
        assert!(n <= 300, "N = {n}");
        assert!((v - I1_EXACT).abs() <= 1e-10, "err = {:e}", (v - I1_EXACT).abs());
    }

    #[test]
    fn truncation_symmetric_for_even_integrand() {
        let (nm, np) = choose_truncation(&one, unit(), 0.5, 1e-15).unwrap();
        assert_eq!(nm, np);
    }

    #[test]
    fn truncation_range_is_modest_at_quarter_step() {
        let (_, np) = choose_truncation(&one, unit(), 0.25, 1e-15).unwrap();
        assert!(np <= 30, "n_plus = {np}");
        // direct scan oracle: last index whose |h·term| clears the final
        // threshold, found without the engine's bookkeeping
        let mut sum = 0.0;
        for k in -60..=60i64 {
            let m = map_affine(&node(k, 0.25), unit());
            sum += 0.25 * m.weight;
        }
        let tau = 1e-15 * (1.0 + sum.abs());
        let mut oracle = 0;
        for k in 1..=60i64 {
            let m = map_affine(&node(k, 0.25), unit());
            if 0.25 * m.weight >= tau {
                oracle = k as usize;
            }
        }
        assert_eq!(np, oracle);
    }

    #[test]
    fn truncation_sides_are_independent() {
        // ln(1/x) on (0,1) decays much faster toward x=1 than toward x=0
        let f = |_x: f64, da: f64, _db: f64| -> f64 { -f64::ln(da) };
        let iv = Interval::new(0.0, 1.0).unwrap();
        let (nm, np) = choose_truncation(&f, iv, 0.125, 1e-10).unwrap();
        assert_ne!(nm, np);
    }

    #[test]
    fn truncation_extension_does_not_move_the_constant_sum() {
        // widening the scan-chosen range by 10 indices per side changes the
        // sum by far less than tol times the sum itself
        let tol = 1e-10;
        let h = 0.5;
        let (nm, np) = choose_truncation(&one, unit(), h, tol).unwrap();
        let base = trapezoid_sum(&one, unit(), h, nm, np).unwrap();
        let ext = trapezoid_sum(&one, unit(), h, nm + 10, np + 10).unwrap();
        assert!((ext - base).abs() <= tol * base.abs());
    }

    #[test]
    fn integrate_constant_to_tight_tolerance() {
        let opts = IntegrateOptions {
            tol: 1e-12,
            ..Default::default()
        };
        let r = integrate(&one, unit(), &opts).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-12, "got {}", r.value);
        assert!(r.level <= 5, "level = {}", r.level);
        assert_eq!(r.evals, r.n_plus + r.n_minus + 1);
    }

    #[test]
    fn integrate_inverse_sqrt() {
        let opts = IntegrateOptions::default();
        let r = integrate(&inv_sqrt, unit(), &opts).unwrap();
        assert!((r.value - PI).abs() <= 1e-10, "got {}", r.value);
    }

    #[test]
    fn integrate_below_machine_precision_reports_no_convergence() {
        let opts = IntegrateOptions {
            tol: 1e-30,
            ..Default::default()
        };
        match integrate(&one, unit(), &opts) {
            Err(EngineError::NoConvergence(best)) => {
                assert!((best.value - 2.0).abs() < 1e-12);
                assert_eq!(best.level, 12);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn integrate_populates_bound_when_c_given() {
        let opts = IntegrateOptions {
            decay_c: Some(2.0),
            ..Default::default()
        };
        let r = integrate(&one, unit(), &opts).unwrap();
        let b = r.bound.unwrap();
        assert!(b > 0.0 && b.is_finite());
    }

    #[test]
    fn non_finite_integrand_is_an_error_not_a_skip() {
        let f = |x: f64, _da: f64, _db: f64| -> f64 { 1.0 / x };
        match trapezoid_sum(&f, unit(), 0.5, 3, 3) {
            Err(EngineError::NonFiniteIntegrand { k: 0, .. }) => {}
            other => panic!("expected NonFiniteIntegrand at k=0, got {other:?}"),
        }
    }

    #[test]
    fn overrun_when_tolerance_unreachable_at_tiny_step() {
        match choose_truncation(&one, unit(), 1e-6, 1e-15) {
            Err(EngineError::TruncationOverrun { .. }) => {}
            other => panic!("expected TruncationOverrun, got {other:?}"),
        }
    }

    #[test]
    fn reuse_matches_direct_bit_exactly_at_level_zero() {
        let (direct, reused) = refine_reuse_check(&one, unit(), 1.0, 0).unwrap();
        assert_eq!(direct.to_bits(), reused.to_bits());
    }

    #[test]
    fn reuse_identity_constant_level_three() {
        let (direct, reused) = refine_reuse_check(&one, unit(), 1.0, 3).unwrap();
        let ulp = direct.abs() * f64::EPSILON;
        assert!((direct - reused).abs() <= 8.0 * ulp);
    }

    #[test]
    fn reuse_identity_oscillatory_level_four() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let (direct, reused) = refine_reuse_check(&i1, iv, 1.0, 4).unwrap();
        let ulp = direct.abs() * f64::EPSILON;
        assert!(
            (direct - reused).abs() <= 8.0 * ulp,
            "direct={direct:e} reused={reused:e}"
        );
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let opts = IntegrateOptions::default();
        let iv = Interval::new(0.0, 1.0).unwrap();
        let a = integrate(&i1, iv, &IntegrateOptions { tol: 1e-8, ..opts.clone() }).unwrap();
        let b = integrate(&i1, iv, &IntegrateOptions { tol: 1e-8, ..opts }).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evals, b.evals);
    }
}
