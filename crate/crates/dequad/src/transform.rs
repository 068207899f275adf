//! The tanh-sinh change of variable and its numerically stable building blocks.
//!
//! The substitution x = φ(t) = tanh(π/2 · sinh t) maps the real line onto
//! (−1, 1) and turns an integral over (−1, 1) into one whose integrand decays
//! double-exponentially in t. Quadrature nodes cluster toward the endpoints
//! so fast that endpoint singularities of the original integrand are
//! neutralized by the weight φ′(t).
//!
//! Everything here is written to stay accurate where it matters most: near
//! the endpoints, where 1 − x² underflows long before the weights do. The
//! quantity 1 − φ(t)² is therefore carried separately, computed through the
//! identity 1 − tanh²(u) = sech²(u) instead of by subtraction.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

/// A finite, nonempty integration interval (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

/// Error raised when an interval does not satisfy a < b with both finite.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid interval: require finite a < b, got a={a}, b={b}")]
pub struct InvalidInterval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self, InvalidInterval> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Self { a, b })
        } else {
            Err(InvalidInterval { a, b })
        }
    }

    /// The canonical interval (−1, 1) of the transform itself.
    pub fn unit() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Midpoint (a+b)/2.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Half-width (b−a)/2.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }
}

/// sech²(u) computed as 4e^{−2|u|}/(1+e^{−2|u|})², which never overflows and
/// underflows gracefully to zero for |u| ≳ 373.
fn sech_sq(u: f64) -> f64 {
    if !u.is_finite() {
        return 0.0;
    }
    let e = (-2.0 * u.abs()).exp();
    let d = 1.0 + e;
    4.0 * e / (d * d)
}

/// φ(t) = tanh(π/2 · sinh t).
///
/// Odd in t (bit-exactly: computed on |t| and mirrored), with values in
/// [−1, 1]; saturates to ±1.0 in f64 for |t| ≳ 3.1. Callers that need the
/// distance to ±1 below machine epsilon must use [`TransformNode::one_minus_x2`].
pub fn phi(t: f64) -> f64 {
    let m = (FRAC_PI_2 * t.abs().sinh()).tanh();
    if t.is_sign_negative() {
        -m
    } else {
        m
    }
}

/// φ′(t) = (π/2) cosh t / cosh²(π/2 · sinh t).
///
/// Even in t (bit-exactly), strictly positive until it underflows to zero
/// around |t| ≈ 6.6; the underflow point is where trapezoidal truncation
/// naturally occurs, so it is returned as an exact 0 rather than an error.
pub fn phi_prime(t: f64) -> f64 {
    let ta = t.abs();
    let s = sech_sq(FRAC_PI_2 * ta.sinh());
    if s == 0.0 {
        return 0.0;
    }
    FRAC_PI_2 * ta.cosh() * s
}

/// One quadrature node of the transformed trapezoidal rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformNode {
    /// Node index; the node sits at t = k·h.
    pub k: i64,
    /// Transform-plane coordinate t = k·h.
    pub t: f64,
    /// Abscissa φ(t) ∈ [−1, 1] (saturates in f64 at large |t|).
    pub x: f64,
    /// Weight φ′(t) ≥ 0 (0 only past the underflow point).
    pub w: f64,
    /// 1 − x², computed stably as sech²(π/2 · sinh t).
    pub one_minus_x2: f64,
}

/// Build the node at index k for step size h > 0.
///
/// All quantities are computed on |t| and mirrored, so x(−t) = −x(t) and
/// w(−t) = w(t) hold bit-exactly.
pub fn node(k: i64, h: f64) -> TransformNode {
    debug_assert!(h > 0.0);
    let mut n = node_at(k as f64 * h);
    n.k = k;
    n
}

/// Node quantities at an arbitrary transform coordinate (off-grid; the
/// index is recorded as 0).
pub fn node_at(t: f64) -> TransformNode {
    let ta = t.abs();
    let u = FRAC_PI_2 * ta.sinh();
    let s = sech_sq(u);
    let xm = u.tanh();
    let x = if t.is_sign_negative() { -xm } else { xm };
    let w = if s == 0.0 { 0.0 } else { FRAC_PI_2 * ta.cosh() * s };
    TransformNode {
        k: 0,
        t,
        x,
        w,
        one_minus_x2: s,
    }
}

/// A node mapped onto a general interval (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedNode {
    /// Abscissa in (a, b).
    pub x: f64,
    /// Weight including the (b−a)/2 scale.
    pub weight: f64,
    /// Stable distance x − a (exact even where x rounds to a).
    pub dist_a: f64,
    /// Stable distance b − x.
    pub dist_b: f64,
}

/// Affine map of a canonical node onto (a, b).
///
/// The abscissa is (a+b)/2 + (b−a)/2 · x and the weight picks up the factor
/// (b−a)/2. The endpoint distances are derived from `one_minus_x2`, not by
/// subtraction, so integrands singular at a or b can be evaluated without
/// catastrophic cancellation: on the side where 1 ∓ x would cancel, 1 ∓ x is
/// obtained as one_minus_x2 / (1 ± x).
pub fn map_affine(node: &TransformNode, iv: Interval) -> MappedNode {
    let half = iv.half_width();
    let x = iv.midpoint() + half * node.x;
    let (one_plus, one_minus) = if node.x >= 0.0 {
        (1.0 + node.x, node.one_minus_x2 / (1.0 + node.x))
    } else {
        (node.one_minus_x2 / (1.0 - node.x), 1.0 - node.x)
    };
    MappedNode {
        x,
        weight: half * node.w,
        dist_a: half * one_plus,
        dist_b: half * one_minus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn phi_at_zero() {
        assert_eq!(phi(0.0), 0.0);
    }

    #[test]
    fn phi_is_odd_bit_exact() {
        for i in 1..=600 {
            let t = i as f64 * 0.01;
            assert_eq!(phi(t).to_bits(), (-phi(-t)).to_bits(), "t={t}");
        }
    }

    #[test]
    fn phi_at_one_matches_multiprecision() {
        // tanh(pi/2 sinh 1), tools/gen_oracles.py
        let expected = 0.951_367_964_072_746_9;
        assert!(rel_close(phi(1.0), expected, 1e-15));
    }

    #[test]
    fn phi_range() {
        for i in -2000..=2000 {
            let t = i as f64 * 0.01;
            let x = phi(t);
            assert!((-1.0..=1.0).contains(&x));
        }
        // extreme arguments saturate without NaN
        assert_eq!(phi(1e308), 1.0);
        assert_eq!(phi(-1e308), -1.0);
    }

    #[test]
    fn phi_prime_at_zero_is_pi_over_2() {
        assert_eq!(phi_prime(0.0), FRAC_PI_2);
    }

    #[test]
    fn phi_prime_even_bit_exact() {
        for i in 1..=600 {
            let t = i as f64 * 0.011;
            assert_eq!(phi_prime(t).to_bits(), phi_prime(-t).to_bits());
        }
    }

    #[test]
    fn phi_prime_at_three_matches_multiprecision() {
        // (pi/2) cosh 3 / cosh^2(pi/2 sinh 3), tools/gen_oracles.py
        let expected = 1.358_178_427_453_909_1e-12;
        assert!(rel_close(phi_prime(3.0), expected, 1e-12));
    }

    #[test]
    fn phi_prime_nonnegative_and_underflows_cleanly() {
        for i in 0..=3000 {
            let t = i as f64 * 0.01;
            let w = phi_prime(t);
            assert!(w >= 0.0, "t={t} w={w}");
            assert!(w.is_finite());
        }
        assert_eq!(phi_prime(700.0), 0.0);
        assert_eq!(phi_prime(f64::MAX), 0.0);
    }

    #[test]
    fn phi_prime_matches_central_difference() {
        let delta = 1e-5;
        // the quotient is quantized at ulp(phi)/(2 delta); past |t| ~ 2.3
        // that floor exceeds the 1e-6 relative target
        let quantization = f64::EPSILON / (2.0 * delta);
        for i in -300..=300 {
            let t = i as f64 * 0.01;
            let fd = (phi(t + delta) - phi(t - delta)) / (2.0 * delta);
            let w = phi_prime(t);
            assert!(
                (fd - w).abs() <= 1e-6 * w + quantization,
                "t={t} fd={fd} w={w}"
            );
        }
    }

    #[test]
    fn node_at_zero() {
        let n = node(0, 0.37);
        assert_eq!(n.x, 0.0);
        assert_eq!(n.w, FRAC_PI_2);
        assert_eq!(n.one_minus_x2, 1.0);
    }

    #[test]
    fn node_mirror_symmetry() {
        for k in 1..=60 {
            let p = node(k, 0.125);
            let m = node(-k, 0.125);
            assert_eq!(p.x.to_bits(), (-m.x).to_bits());
            assert_eq!(p.w.to_bits(), m.w.to_bits());
            assert_eq!(p.one_minus_x2.to_bits(), m.one_minus_x2.to_bits());
        }
    }

    #[test]
    fn node_one_minus_x2_survives_saturation() {
        // At t = 4 the abscissa rounds to exactly 1.0, so the naive 1 - x*x
        // is zero, while sech^2((pi/2) sinh 4) is still a normal f64.
        let n = node(40, 0.1);
        assert_eq!(n.x, 1.0);
        assert_eq!(1.0 - n.x * n.x, 0.0);
        let expected = 2.335_297_795_019_722e-37; // tools/gen_oracles.py
        assert!(rel_close(n.one_minus_x2, expected, 1e-12));
    }

    #[test]
    fn node_one_minus_x2_consistent_with_product_form() {
        // (1-x)(1+x) loses a digit for every digit x gains toward 1, so
        // the product comparison only makes sense while it is still well
        // conditioned; beyond that the identity 1 - x^2 is checked in sum
        // form, which has no cancellation.
        for k in 0..=25 {
            let n = node(k, 0.1);
            let naive = (1.0 - n.x) * (1.0 + n.x);
            if naive >= 1e-3 {
                assert!(
                    rel_close(n.one_minus_x2, naive, 1e-12),
                    "k={k} stable={} naive={naive}",
                    n.one_minus_x2
                );
            }
            if n.one_minus_x2 >= 1e-8 {
                let sum = n.one_minus_x2 + n.x * n.x;
                assert!((sum - 1.0).abs() <= 1e-12, "k={k} sum={sum}");
            }
        }
    }

    #[test]
    fn map_affine_identity_on_unit_interval() {
        let m = map_affine(&node(0, 1.0), Interval::unit());
        assert_eq!(m.x, 0.0);
        assert_eq!(m.weight, FRAC_PI_2);
        assert_eq!(m.dist_a, 1.0);
        assert_eq!(m.dist_b, 1.0);
    }

    #[test]
    fn map_affine_unit_to_zero_one() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let m = map_affine(&node(0, 1.0), iv);
        assert_eq!(m.x, 0.5);
        assert_eq!(m.weight, FRAC_PI_2 / 2.0);
    }

    #[test]
    fn map_affine_distances_match_subtraction_away_from_endpoints() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        for k in -12..=12 {
            let n = node(k, 0.1);
            let m = map_affine(&n, iv);
            // no cancellation in this range; direct subtraction is reliable
            let direct_a = m.x - iv.a();
            let direct_b = iv.b() - m.x;
            if direct_a > 1e-4 && direct_b > 1e-4 {
                assert!(rel_close(m.dist_a, direct_a, 1e-12));
                assert!(rel_close(m.dist_b, direct_b, 1e-12));
            }
        }
    }

    #[test]
    fn map_affine_distances_positive_deep_in_the_corner() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        // x rounds to 1.0 here but dist_b stays positive and tiny
        let m = map_affine(&node(45, 0.1), iv);
        assert_eq!(m.x, 1.0);
        assert!(m.dist_b > 0.0);
        assert!(m.dist_b < 1e-30);
        assert!((m.dist_a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interval_rejects_bad_endpoints() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 0.0).is_err());
        assert!(Interval::new(0.0, f64::NAN).is_err());
    }
}
