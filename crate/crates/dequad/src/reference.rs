//! Reference integrals with high-precision closed-form values.
//!
//! These drive the oracle tests and the convergence studies. Each entry
//! carries both a textual expression (for the CLI front-end) and a native
//! integrand written against the stable endpoint distances, which is what
//! the singular entries need to be evaluable at every node the engine
//! generates. The `exact` values are frozen from a 60-digit computation
//! (tools/gen_oracles.py), where they are also cross-checked against an
//! independent multiprecision quadrature to better than 1e-25 relative.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::transform::Interval;

/// A named integrand with a known exact integral.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceIntegral {
    pub name: &'static str,
    /// Expression form accepted by the CLI front-end.
    pub expr: &'static str,
    a: f64,
    b: f64,
    /// Closed-form value of the integral, correct to f64 precision.
    pub exact: f64,
    /// Nominal decay constant of the transformed integrand, where the
    /// decay is symmetric enough for a single constant to make sense.
    pub c_nominal: Option<f64>,
    integrand: fn(f64, f64, f64) -> f64,
}

impl ReferenceIntegral {
    pub fn interval(&self) -> Interval {
        Interval::new(self.a, self.b).expect("registry intervals are valid")
    }

    /// The native integrand, written against stable endpoint distances.
    pub fn integrand(&self) -> fn(f64, f64, f64) -> f64 {
        self.integrand
    }
}

fn f_const2(_x: f64, _da: f64, _db: f64) -> f64 {
    1.0
}

// 1/sqrt(1-x^2) on (-1,1): (1-x)(1+x) = dist_b * dist_a
fn f_invsqrt(_x: f64, da: f64, db: f64) -> f64 {
    1.0 / (da * db).sqrt()
}

fn f_sqrt_sing(_x: f64, da: f64, db: f64) -> f64 {
    (da * db).sqrt()
}

// ln(1/x) on (0,1): x itself is the distance to the lower endpoint
fn f_log_sing(_x: f64, da: f64, _db: f64) -> f64 {
    -da.ln()
}

fn f_i1(x: f64, _da: f64, _db: f64) -> f64 {
    (20.0 * (x - 1.0)).exp() * (256.0 * x).sin()
}

/// ∫₀¹ e^{20(x−1)} sin(256x) dx via the antiderivative
/// e^{ax}(a sin bx − b cos bx)/(a² + b²): tools/gen_oracles.py.
pub const I1_EXACT: f64 = -0.000_148_594_479_678_924_31;

const REGISTRY: [ReferenceIntegral; 5] = [
    ReferenceIntegral {
        name: "const2",
        expr: "1",
        a: -1.0,
        b: 1.0,
        exact: 2.0,
        c_nominal: Some(FRAC_PI_2),
        integrand: f_const2,
    },
    ReferenceIntegral {
        name: "invsqrt",
        expr: "1/sqrt(1-x^2)",
        a: -1.0,
        b: 1.0,
        exact: PI,
        c_nominal: Some(FRAC_PI_2 / 2.0),
        integrand: f_invsqrt,
    },
    ReferenceIntegral {
        name: "sqrt_sing",
        expr: "sqrt(1-x^2)",
        a: -1.0,
        b: 1.0,
        exact: FRAC_PI_2,
        c_nominal: Some(1.5 * FRAC_PI_2),
        integrand: f_sqrt_sing,
    },
    ReferenceIntegral {
        name: "log_sing",
        expr: "log(1/x)",
        a: 0.0,
        b: 1.0,
        exact: 1.0,
        c_nominal: None,
        integrand: f_log_sing,
    },
    ReferenceIntegral {
        name: "I1",
        expr: "exp(20*(x-1))*sin(256*x)",
        a: 0.0,
        b: 1.0,
        exact: I1_EXACT,
        c_nominal: None,
        integrand: f_i1,
    },
];

/// All reference integrals.
pub fn registry() -> &'static [ReferenceIntegral] {
    &REGISTRY
}

/// Look an entry up by name.
pub fn by_name(name: &str) -> Option<&'static ReferenceIntegral> {
    REGISTRY.iter().find(|r| r.name == name)
}
