//! Tanh-sinh (double-exponential) quadrature for finite intervals.
//!
//! The change of variable x = tanh(π/2 · sinh t) turns an integral over a
//! finite interval into one over the whole real line whose integrand decays
//! like e^{−c·e^{|t|}}, where the plain trapezoidal rule converges at
//! spectacular rates and endpoint singularities are absorbed by the weight
//! function. This crate provides:
//!
//! - [`transform`]: the transform, its derivative, node/weight generation,
//!   and the affine map onto a general interval, in endpoint-stable form;
//! - [`engine`]: the truncated trapezoidal sum, automatic truncation-index
//!   selection, and level-halving refinement that reuses every previous
//!   integrand evaluation;
//! - [`error_model`]: the a-priori O(h²) global error bound, its two
//!   constituent estimates, the k₀/h₀ thresholds behind them, and a fitting
//!   routine for the decay constant c;
//! - [`expr`]: a tiny expression parser/evaluator so integrands can be
//!   supplied as text;
//! - [`reference`]: reference integrals with frozen high-precision values;
//! - [`study`]: convergence tables and order fitting.
//!
//! ```
//! use dequad::{integrate, Interval, IntegrateOptions};
//!
//! // ∫_-1^1 dx/sqrt(1-x^2) = pi, singular at both endpoints
//! let f = |_x: f64, da: f64, db: f64| 1.0 / (da * db).sqrt();
//! let r = integrate(&f, Interval::unit(), &IntegrateOptions::default()).unwrap();
//! assert!((r.value - std::f64::consts::PI).abs() < 1e-10);
//! ```

pub mod engine;
pub mod error_model;
pub mod expr;
pub mod kahan;
pub mod reference;
pub mod study;
pub mod transform;

pub use engine::{
    choose_truncation, integrate, integrate_trace, refine_reuse_check, trapezoid_sum,
    EngineError, Integrand, IntegrateOptions, LevelRecord, QuadratureResult,
};
pub use error_model::{
    case1_term, case2_term, decay_probe_grid, estimate_c, f_second_derivative_envelope,
    fit_decay, global_bound, h0_limit, k0_threshold, BoundError, BoundParams, DecayFit,
    FitError,
};
pub use expr::{parse, Ast, ParseError};
pub use study::{convergence_study, fit_order, ConvergenceRow, ConvergenceStudy};
pub use transform::{map_affine, node, phi, phi_prime, Interval, MappedNode, TransformNode};
