//! Special functions and the exact Max-Cut separation probability of the
//! basic sticky walk started at the cube center.
//!
//! The separation probability of a pair whose SDP vectors meet at angle θ is
//! computed by two independent routes:
//!
//! * **quadrature** (authoritative): with `a = θ/π`, `b = 1 − a`,
//!   `P_sep = 1 − (2/π) ∫₀^{π/2} I_{sin²φ}(a/2, b/2) dφ`, where `I` is the
//!   regularized incomplete beta function (equivalently `r(φ)/r(π/2)` with
//!   `r(φ) = ¼ β_{sin²φ}(a/2, b/2)` the arc length along the rhombus side);
//! * **closed form**:
//!   `P_sep = 1 − Γ((a+1)/2) / (Γ((1−a)/2) Γ(a/2+1)²) ·
//!   ₃F₂((1+a)/2, (1+a)/2, a/2; a/2+1, a/2+1; 1)`.
//!
//! The two are compared on every call and a consistency flag is reported.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;

/// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of Γ(z) for `z > 0` (Lanczos approximation).
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("log_gamma requires z > 0, got {z}")));
    }
    Ok(ln_gamma_pos(z))
}

fn ln_gamma_pos(z: f64) -> f64 {
    if z < 0.5 {
        // Γ(z) = Γ(z+1)/z keeps the Lanczos sum in its accurate range.
        return ln_gamma_pos(z + 1.0) - z.ln();
    }
    let z = z - 1.0;
    let mut x = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Γ(z) for `z > 0`.
pub fn gamma(z: f64) -> Result<f64> {
    Ok(log_gamma(z)?.exp())
}

fn check_beta_params(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "beta parameters must be positive, got ({a}, {b})"
        )));
    }
    Ok(())
}

fn ln_beta_pos(a: f64, b: f64) -> f64 {
    ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b)
}

/// Complete beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta(a: f64, b: f64) -> Result<f64> {
    check_beta_params(a, b)?;
    Ok(ln_beta_pos(a, b).exp())
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..20_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` given both `x` and `y = 1 − x`
/// (callers pass `y` computed without cancellation, e.g. `cos²φ`).
pub fn regularized_incomplete_beta_xy(x: f64, y: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_params(a, b)?;
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(Error::domain(format!("incomplete beta needs x in [0,1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if y == 0.0 {
        return Ok(1.0);
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta_pos(a, b);
    // Symmetry switch keeps the continued fraction in its fast-converging half.
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(ln_front.exp() * beta_cf(a, b, x) / a)
    } else {
        Ok(1.0 - ln_front.exp() * beta_cf(b, a, y) / b)
    }
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    regularized_incomplete_beta_xy(x, 1.0 - x, a, b)
}

/// Unregularized incomplete beta `β_x(a, b) = ∫₀ˣ t^{a−1}(1−t)^{b−1} dt`.
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    incomplete_beta_xy(x, 1.0 - x, a, b)
}

/// [`incomplete_beta`] with an accurately supplied `y = 1 − x`.
pub fn incomplete_beta_xy(x: f64, y: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_params(a, b)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("incomplete beta needs x in [0,1], got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let full = ln_beta_pos(a, b).exp();
    if y == 0.0 {
        return Ok(full);
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((a * x.ln() + b * y.ln()).exp() * beta_cf(a, b, x) / a)
    } else {
        Ok(full - (a * x.ln() + b * y.ln()).exp() * beta_cf(b, a, y) / b)
    }
}

/// Maximum number of series terms before a precision error is raised.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

/// Kahan-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v.fract() == 0.0
}

/// Gauss hypergeometric series ₂F₁(a, b; c; x) for `x ∈ [0, 1)`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain(format!("hyp2f1 requires x in [0,1), got {x}")));
    }
    if is_nonpositive_integer(c) {
        return Err(Error::domain(format!("hyp2f1 undefined for c = {c}")));
    }
    let mut acc = Kahan::default();
    let mut term = 1.0;
    acc.add(term);
    // Beyond n0 the term ratio is monotone in n, so the tail is bounded by a
    // geometric series with ratio max(|r_n|, x).
    let n0 = (a.abs() + b.abs() + c.abs()) as usize + 2;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        term *= ratio;
        acc.add(term);
        if term == 0.0 {
            return Ok(acc.sum);
        }
        if n >= n0 {
            let q = ratio.abs().max(x);
            if q < 1.0 && term.abs() * q / (1.0 - q) <= 1e-16 * acc.sum.abs() {
                return Ok(acc.sum);
            }
        }
    }
    Err(Error::Precision(format!(
        "hyp2f1({a}, {b}; {c}; {x}) needs more than {MAX_SERIES_TERMS} terms"
    )))
}

/// Generalized hypergeometric ₃F₂(a₁, a₂, a₃; b₁, b₂; 1), convergent when
/// `s = b₁ + b₂ − a₁ − a₂ − a₃ > 0`.
///
/// Terms decay like `n^{−1−s}`, so plain summation converges slowly for
/// `s < 1`. Partial sums are taken with Kahan compensation at checkpoints
/// `N, 2N, 4N, …` and the algebraic tail `N^{−s}(A₀ + A₁/N + …)` is removed
/// by Richardson extrapolation with the known exponents `s, s+1, …`. The
/// result is accepted when successive extrapolants agree to a relative
/// `1e−12`, or when the plain tail estimate already falls below that.
pub fn hyp3f2_at1(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64) -> Result<f64> {
    if is_nonpositive_integer(b1) || is_nonpositive_integer(b2) {
        return Err(Error::domain("hyp3f2 undefined for nonpositive integer b"));
    }
    let s = b1 + b2 - a1 - a2 - a3;
    let terminating = [a1, a2, a3].into_iter().any(is_nonpositive_integer);
    if !terminating && !(s > 0.0) {
        return Err(Error::domain(format!(
            "hyp3f2 at 1 diverges: b1 + b2 - a1 - a2 - a3 = {s}"
        )));
    }
    const TOL: f64 = 1e-12;
    const FIRST_CHECKPOINT: usize = 256;
    let mut acc = Kahan::default();
    let mut term = 1.0;
    acc.add(term);
    let mut checkpoint = FIRST_CHECKPOINT;
    // Richardson tableau: last row of extrapolants.
    let mut row: Vec<f64> = Vec::new();
    let mut previous_best: Option<f64> = None;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        term *= (a1 + nf) * (a2 + nf) * (a3 + nf) / ((b1 + nf) * (b2 + nf) * (nf + 1.0));
        acc.add(term);
        if term == 0.0 {
            return Ok(acc.sum);
        }
        let count = n + 2; // number of terms summed so far
        if count != checkpoint {
            continue;
        }
        checkpoint *= 2;
        let partial = acc.sum;
        if term.abs() * count as f64 / s <= TOL * partial.abs() {
            return Ok(partial + term * count as f64 / s);
        }
        // Extend the tableau with the new partial sum.
        let mut new_row = Vec::with_capacity(row.len() + 1);
        new_row.push(partial);
        for (j, prev) in row.iter().enumerate() {
            let p = s + j as f64;
            let last = new_row[j];
            new_row.push(last + (last - prev) / (2f64.powf(p) - 1.0));
        }
        row = new_row;
        let best = *row.last().expect("row is nonempty");
        if let Some(prev) = previous_best {
            if row.len() >= 4 && (best - prev).abs() <= TOL * best.abs() {
                return Ok(best);
            }
        }
        previous_best = Some(best);
    }
    Err(Error::Precision(format!(
        "hyp3f2 at 1 not converged within {MAX_SERIES_TERMS} terms (s = {s})"
    )))
}

/// Angle parameter `a = θ/π`, `b = 1 − a` for `θ ∈ (0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleParam {
    pub a: f64,
    pub b: f64,
}

impl AngleParam {
    pub fn from_theta(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::domain(format!("angle must lie in (0, π), got {theta}")));
        }
        let a = theta / PI;
        Ok(AngleParam { a, b: 1.0 - a })
    }
}

/// Arc-length function `r(φ) = ¼ β_{sin²φ}(a/2, b/2)` for `φ ∈ [0, π/2]`.
pub fn r_phi(phi: f64, param: AngleParam) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::domain(format!("φ must lie in [0, π/2], got {phi}")));
    }
    let (s, c) = phi.sin_cos();
    let c2 = if phi == FRAC_PI_2 { 0.0 } else { c * c };
    Ok(0.25 * incomplete_beta_xy(s * s, c2, 0.5 * param.a, 0.5 * param.b)?)
}

/// Independent route for [`r_phi`]: adaptive quadrature of
/// `½ (sin ψ)^{a−1} (cos ψ)^{b−1}` over `[0, φ]`.
pub fn r_phi_quadrature(phi: f64, param: AngleParam) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::domain(format!("φ must lie in [0, π/2], got {phi}")));
    }
    let at_corner = phi == FRAC_PI_2;
    let f = |x: f64, dl: f64, dr: f64| {
        let s = dl.sin();
        let c = if at_corner { dr.sin() } else { x.cos() };
        0.5 * s.powf(param.a - 1.0) * c.powf(param.b - 1.0)
    };
    Ok(tanh_sinh(f, 0.0, phi, 1e-12)?.value)
}

/// Both routes to the separation probability and their agreement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationProbability {
    /// Quadrature of the arc-length integral (authoritative).
    pub quadrature: f64,
    /// Closed hypergeometric form.
    pub closed_form: f64,
    /// `true` when the two routes agree within [`ROUTE_CONSISTENCY_TOL`].
    pub consistent: bool,
}

impl SeparationProbability {
    pub fn value(&self) -> f64 {
        self.quadrature
    }
}

/// Maximum allowed disagreement between quadrature and closed form.
pub const ROUTE_CONSISTENCY_TOL: f64 = 1e-6;

/// Separation probability by quadrature only (the fast authoritative route).
pub fn separation_prob(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("θ must lie in [0, π], got {theta}")));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    if theta == PI {
        return Ok(1.0);
    }
    let p = AngleParam::from_theta(theta)?;
    let (ha, hb) = (0.5 * p.a, 0.5 * p.b);
    let mut failure = None;
    let f = |_x: f64, dl: f64, dr: f64| {
        let s = dl.sin();
        let c = dr.sin();
        match regularized_incomplete_beta_xy(s * s, c * c, ha, hb) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let q = tanh_sinh(f, 0.0, FRAC_PI_2, 1e-13)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((1.0 - q.value / FRAC_PI_2).clamp(0.0, 1.0))
}

/// Separation probability by the closed hypergeometric form.
pub fn separation_prob_closed_form(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("θ must lie in [0, π], got {theta}")));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    if theta == PI {
        return Ok(1.0);
    }
    let a = theta / PI;
    let ln_pref = ln_gamma_pos(0.5 * (a + 1.0))
        - ln_gamma_pos(0.5 * (1.0 - a))
        - 2.0 * ln_gamma_pos(0.5 * a + 1.0);
    let f = hyp3f2_at1(
        0.5 * (1.0 + a),
        0.5 * (1.0 + a),
        0.5 * a,
        0.5 * a + 1.0,
        0.5 * a + 1.0,
    )?;
    Ok(1.0 - ln_pref.exp() * f)
}

/// Separation probability by both routes with a consistency flag.
/// `θ = 0` and `θ = π` return 0 and 1 by continuity.
pub fn separation_prob_exact(theta: f64) -> Result<SeparationProbability> {
    let quadrature = separation_prob(theta)?;
    let closed_form = separation_prob_closed_form(theta)?;
    Ok(SeparationProbability {
        quadrature,
        closed_form,
        consistent: (quadrature - closed_form).abs() <= ROUTE_CONSISTENCY_TOL,
    })
}

/// Leading-order non-separation probability `(4/π) ε` at `θ = (1 − ε) π`.
pub fn nonseparation_asymptotic(eps: f64) -> Result<f64> {
    if !(0.0..=0.1).contains(&eps) {
        return Err(Error::domain(format!("ε must lie in [0, 0.1], got {eps}")));
    }
    Ok(4.0 / PI * eps)
}

/// 2×2 matrix in row-major order.
pub type Mat2 = [[f64; 2]; 2];

/// Smallest distance of θ from {0, π} accepted by [`sqrt_correlation_2x2`].
pub const SINGULAR_MARGIN: f64 = 1e-8;

/// Symmetric square root of `W = [[1, cos θ], [cos θ, 1]]` and its inverse.
pub fn sqrt_correlation_2x2(theta: f64) -> Result<(Mat2, Mat2)> {
    if !(theta >= SINGULAR_MARGIN && theta <= PI - SINGULAR_MARGIN) {
        return Err(Error::Singular(format!(
            "correlation matrix is singular at θ = {theta}"
        )));
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let half = [[r2 * (c + s), r2 * (c - s)], [r2 * (c - s), r2 * (c + s)]];
    let (sec, csc) = (1.0 / c, 1.0 / s);
    let k = 1.0 / 8f64.sqrt();
    let inv = [
        [k * (sec + csc), k * (sec - csc)],
        [k * (sec - csc), k * (sec + csc)],
    ];
    Ok((half, inv))
}

/// Product of two 2×2 matrices.
pub fn mat2_mul(p: &Mat2, q: &Mat2) -> Mat2 {
    let mut r = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!((log_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-14);
        assert!((log_gamma(6.0).unwrap() - 120f64.ln()).abs() < 1e-13);
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
    }

    #[test]
    fn gamma_matches_factorials_and_half_integers() {
        let mut f = 1.0;
        for n in 1..20 {
            f *= n as f64;
            assert!(rel(gamma(n as f64 + 1.0).unwrap(), f) < 1e-12, "n = {n}");
        }
        // Γ(n + ½) = (2n)! √π / (4ⁿ n!)
        assert!(rel(gamma(3.5).unwrap(), 15.0 / 8.0 * PI.sqrt()) < 1e-13);
        assert!(rel(gamma(0.1).unwrap(), 9.513_507_698_668_732) < 1e-12);
    }

    #[test]
    fn beta_examples() {
        assert!((beta(1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((beta(0.5, 0.5).unwrap() - PI).abs() < 1e-13);
        assert!((incomplete_beta(0.5, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-14);
        assert!(beta(0.0, 1.0).is_err());
        assert!(incomplete_beta(0.5, -1.0, 1.0).is_err());
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // β_x(a, 1) = x^a / a
        for &(x, a) in &[(0.3, 0.7), (0.9, 2.5), (0.01, 0.05)] {
            assert!(rel(incomplete_beta(x, a, 1.0).unwrap(), x.powf(a) / a) < 1e-12);
        }
        // I_x(½, ½) = (2/π) asin √x
        for &x in &[0.1f64, 0.5, 0.77, 0.999] {
            let want = 2.0 / PI * x.sqrt().asin();
            assert!(rel(regularized_incomplete_beta(x, 0.5, 0.5).unwrap(), want) < 1e-12);
        }
        assert_eq!(incomplete_beta(1.0, 0.3, 0.4).unwrap(), beta(0.3, 0.4).unwrap());
    }

    #[test]
    fn hyp2f1_examples() {
        for &(a, b, x) in &[(0.3f64, 1.7, 0.4f64), (2.0, 0.5, 0.9), (-0.5, 3.0, 0.2)] {
            let want = (1.0 - x).powf(-a);
            assert!(rel(hyp2f1(a, b, b, x).unwrap(), want) < 1e-13);
        }
        assert_eq!(hyp2f1(0.7, 1.3, 2.1, 0.0).unwrap(), 1.0);
        assert!(hyp2f1(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn hyp3f2_reduces_to_gauss_sum() {
        // ₃F₂(a1, a2, c; c, b2; 1) = ₂F₁(a1, a2; b2; 1) = Gauss summation.
        for &(a1, a2, b2) in &[(0.3, 0.4, 1.5), (0.75, 0.75, 1.6), (0.1, 0.2, 0.5)] {
            let lg = |z: f64| log_gamma(z).unwrap();
            let want = (lg(b2) + lg(b2 - a1 - a2) - lg(b2 - a1) - lg(b2 - a2)).exp();
            let got = hyp3f2_at1(a1, a2, 0.9, 0.9, b2).unwrap();
            assert!(rel(got, want) < 1e-10, "({a1},{a2};{b2}): {got} vs {want}");
        }
        assert!(hyp3f2_at1(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn r_phi_examples() {
        let p = AngleParam::from_theta(PI / 2.0).unwrap();
        assert_eq!(r_phi(0.0, p).unwrap(), 0.0);
        let side = 0.25 * beta(0.25, 0.25).unwrap();
        assert!(rel(r_phi(FRAC_PI_2, p).unwrap(), side) < 1e-13);
        let p = AngleParam::from_theta(0.3 * PI).unwrap();
        let a = r_phi(1.0, p).unwrap();
        let b = r_phi_quadrature(1.0, p).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn separation_examples() {
        assert!((separation_prob(PI / 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(separation_prob(0.0).unwrap(), 0.0);
        assert_eq!(separation_prob(PI).unwrap(), 1.0);
        let s = separation_prob_exact(2.0 * PI / 3.0).unwrap();
        assert!(s.consistent, "{s:?}");
    }

    #[test]
    fn asymptotic_examples() {
        assert!((nonseparation_asymptotic(0.01).unwrap() - 0.012_732_395_447_351_627).abs() < 1e-15);
        assert_eq!(nonseparation_asymptotic(0.0).unwrap(), 0.0);
        let eps = 0.005;
        let exact = 1.0 - separation_prob((1.0 - eps) * PI).unwrap();
        let r = exact / nonseparation_asymptotic(eps).unwrap();
        assert!((r - 1.0).abs() < 0.15, "{r}");
    }

    #[test]
    fn sqrt_correlation_examples() {
        let (h, _) = sqrt_correlation_2x2(PI / 2.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((h[i][j] - want).abs() < 1e-15);
            }
        }
        let (h, inv) = sqrt_correlation_2x2(PI / 3.0).unwrap();
        let sq = mat2_mul(&h, &h);
        assert!((sq[0][1] - 0.5).abs() < 1e-12 && (sq[0][0] - 1.0).abs() < 1e-12);
        let id = mat2_mul(&h, &inv);
        assert!((id[0][0] - 1.0).abs() < 1e-10 && id[0][1].abs() < 1e-10);
        assert!(sqrt_correlation_2x2(0.0).is_err());
        assert!(sqrt_correlation_2x2(PI).is_err());
        assert!(sqrt_correlation_2x2(PI - 1e-9).is_err());
    }
}
