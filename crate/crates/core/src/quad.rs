//! Adaptive double-exponential (tanh–sinh) quadrature.
//!
//! The tanh–sinh substitution clusters nodes doubly-exponentially at both
//! endpoints, so integrable algebraic endpoint singularities such as
//! `x^{a−1}` are handled without special treatment. The integrand receives
//! the abscissa together with its distances to both endpoints, computed
//! without cancellation, so singular factors can be evaluated accurately.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Result of a quadrature: value, error estimate and evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

const MAX_LEVEL: usize = 12;
const MIN_LEVEL: usize = 3;
const T_MAX: f64 = 6.5;

/// Integrates `f` over `[a, b]` to relative tolerance `tol`.
///
/// `f(x, dl, dr)` is called with `dl = x − a` and `dr = b − x`, both
/// accurate even when tiny.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    if !(b > a) {
        if a == b {
            return Ok(QuadResult {
                value: 0.0,
                error: 0.0,
                evals: 0,
            });
        }
        return Err(Error::domain(format!("empty interval [{a}, {b}]")));
    }
    let half = 0.5 * (b - a);
    let mut evals = 0usize;

    // Contribution of the node pair at ±t (or the single node at t = 0).
    let mut pair = |t: f64, evals: &mut usize| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        let small = half * 2.0 * e / (1.0 + e);
        let large = half * 2.0 / (1.0 + e);
        let w = half * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if t == 0.0 {
            *evals += 1;
            return w * f(a + half, half, half);
        }
        let mut s = 0.0;
        // Right node: close to b.
        if small > 0.0 {
            *evals += 2;
            s += w * f(b - small, large, small);
            s += w * f(a + small, small, large);
        }
        s
    };

    let mut h = 1.0;
    let mut sum = pair(0.0, &mut evals);
    let mut k = 1usize;
    loop {
        let t = k as f64 * h;
        if t > T_MAX {
            break;
        }
        sum += pair(t, &mut evals);
        k += 1;
    }
    let mut estimate = h * sum;
    let mut error = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1usize;
        loop {
            let t = k as f64 * h;
            if t > T_MAX {
                break;
            }
            sum += pair(t, &mut evals);
            k += 2;
        }
        let next = h * sum;
        error = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            return Err(Error::Precision("non-finite quadrature sum".into()));
        }
        if level >= MIN_LEVEL && error <= tol * estimate.abs().max(f64::MIN_POSITIVE) {
            return Ok(QuadResult {
                value: estimate,
                error,
                evals,
            });
        }
    }
    // The last refinement is usually far more accurate than the difference
    // suggests; only give up when the estimate is clearly unconverged.
    if error <= 1e3 * tol * estimate.abs() {
        Ok(QuadResult {
            value: estimate,
            error,
            evals,
        })
    } else {
        Err(Error::Precision(format!(
            "tanh-sinh did not converge: error {error:e} for value {estimate:e}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomials_and_trig() {
        let r = tanh_sinh(|x, _, _| x * x, 0.0, 3.0, 1e-13).unwrap();
        assert!((r.value - 9.0).abs() < 1e-12);
        let r = tanh_sinh(|x, _, _| x.sin(), 0.0, PI, 1e-13).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn handles_endpoint_singularities() {
        // ∫₀¹ x^{-0.7} dx = 1/0.3
        let r = tanh_sinh(|_, dl, _| dl.powf(-0.7), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 0.3).abs() < 1e-9, "{}", r.value);
        // ∫₀¹ (1-x)^{-0.5} dx = 2
        let r = tanh_sinh(|_, _, dr| dr.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(tanh_sinh(|_, _, _| 1.0, 1.0, 1.0, 1e-10).unwrap().value, 0.0);
    }
}
