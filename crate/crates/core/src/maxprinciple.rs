//! Analytic sub-solutions for the Max-2SAT Dirichlet problem and their
//! numerical verification.
//!
//! With `x, y` the probabilities that the two literals of a clause are
//! false, the probability that the basic walk satisfies the clause solves
//! `u_xx + u_yy + 2 cos θ u_xy = 0` on `(0,1)²` with `u = 1 − xy` on the
//! boundary. Any `g` with `L g ≥ 0` inside and `g = 1 − xy` on the boundary
//! lies below `u` (maximum principle), so `g / SDP` lower-bounds the
//! rounding ratio. Three candidates cover the three ranges of `cos θ`:
//!
//! * `g₁ = 1 − xy − c·√(x−x²)·√(y−y²)` for `c ∈ [0, 1]`;
//! * `g₂ = 1 − xy − 2c·(x−x²)(y−y²)` for `c ∈ [−½, 0]`;
//! * `g₃ = 1 − xy − ½(1+5c)·(x−x²)(y−y²)(x+y)(2−x−y)` for `c ∈ [−1, −½]`.
//!
//! Each candidate is written as `1 − xy − corr`, and `L` is applied to
//! the correction analytically. The grid checks here replace formal
//! sum-of-squares certificates.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sdp::{check_triangle, Configuration, PairProblem};

/// Ratio target for the second and third candidates.
pub const CANDIDATE_RATIO_TARGET: f64 = 0.8749;
/// Allowed shortfall of a ratio minimum below its target.
pub const RATIO_TOL: f64 = 1e-4;
/// Allowed negative floating-point noise in `L g`.
pub const FEASIBILITY_TOL: f64 = 1e-8;
/// Lower limit on the SDP value of a configuration entering a ratio.
pub const SDP_CUTOFF: f64 = 1e-3;
/// Ratio target of the warm-up bound `(1 − xy) / SDP` for `cos θ ≤ 0`.
pub const WARMUP_TARGET: f64 = 0.75;
/// Default points per axis of the verification grids.
pub const DEFAULT_GRID_N: usize = 201;
/// Default angle step of the verification sweeps.
pub const DEFAULT_THETA_STEP: f64 = 0.01;

/// One of the three sub-solution candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Candidate {
    G1,
    G2,
    G3,
}

impl Candidate {
    pub const ALL: [Candidate; 3] = [Candidate::G1, Candidate::G2, Candidate::G3];

    /// Candidate by its index 1, 2 or 3.
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(Candidate::G1),
            2 => Ok(Candidate::G2),
            3 => Ok(Candidate::G3),
            _ => Err(Error::domain(format!("candidate index must be 1, 2 or 3, got {index}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Candidate::G1 => 1,
            Candidate::G2 => 2,
            Candidate::G3 => 3,
        }
    }

    /// Range `[lo, hi]` of `cos θ` on which the candidate applies. The
    /// three ranges partition `[−1, 1]` (sharing endpoints).
    pub fn cos_range(self) -> (f64, f64) {
        match self {
            Candidate::G1 => (0.0, 1.0),
            Candidate::G2 => (-0.5, 0.0),
            Candidate::G3 => (-1.0, -0.5),
        }
    }

    /// Range of θ matching [`Candidate::cos_range`].
    pub fn theta_range(self) -> (f64, f64) {
        let (lo, hi) = self.cos_range();
        (hi.acos(), lo.acos())
    }

    /// Ratio target: the first candidate is the SDP value itself.
    pub fn ratio_target(self) -> f64 {
        match self {
            Candidate::G1 => 1.0,
            _ => CANDIDATE_RATIO_TARGET,
        }
    }

    /// Candidate applying at a given `cos θ` (the first one whose range
    /// contains it).
    pub fn for_cos(c: f64) -> Self {
        if c >= 0.0 {
            Candidate::G1
        } else if c >= -0.5 {
            Candidate::G2
        } else {
            Candidate::G3
        }
    }
}

/// A candidate whose correction term is multiplied by `sign`; `sign = 1`
/// is the candidate itself, other values are mutations used to check that
/// the verifier rejects them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateForm {
    pub candidate: Candidate,
    pub sign: f64,
}

impl From<Candidate> for CandidateForm {
    fn from(candidate: Candidate) -> Self {
        CandidateForm { candidate, sign: 1.0 }
    }
}

fn quad(x: f64) -> f64 {
    x - x * x
}

/// `√(x − x²)` with its first two derivatives.
fn root_parts(x: f64) -> (f64, f64, f64) {
    let p = quad(x).max(0.0).sqrt();
    let d1 = (1.0 - 2.0 * x) / (2.0 * p);
    let d2 = (-1.0 - d1 * d1) / p;
    (p, d1, d2)
}

impl CandidateForm {
    fn correction(&self, x: f64, y: f64, c: f64) -> f64 {
        let corr = match self.candidate {
            Candidate::G1 => c * quad(x).max(0.0).sqrt() * quad(y).max(0.0).sqrt(),
            Candidate::G2 => 2.0 * c * quad(x) * quad(y),
            Candidate::G3 => {
                let s = x + y;
                0.5 * (1.0 + 5.0 * c) * quad(x) * quad(y) * s * (2.0 - s)
            }
        };
        self.sign * corr
    }

    /// `L` applied to the correction term.
    fn correction_op(&self, x: f64, y: f64, c: f64) -> f64 {
        let op = match self.candidate {
            Candidate::G1 => {
                let (px, dx, ddx) = root_parts(x);
                let (py, dy, ddy) = root_parts(y);
                c * (ddx * py + px * ddy) + 2.0 * c * c * dx * dy
            }
            Candidate::G2 => {
                let (dx, dy) = (1.0 - 2.0 * x, 1.0 - 2.0 * y);
                2.0 * c * (-2.0 * quad(y) - 2.0 * quad(x)) + 4.0 * c * c * dx * dy
            }
            Candidate::G3 => {
                // F = P(x) P(y) Q(x+y) with P(t) = t − t², Q(s) = s(2 − s).
                let k = 0.5 * (1.0 + 5.0 * c);
                let (px, py) = (quad(x), quad(y));
                let (dx, dy) = (1.0 - 2.0 * x, 1.0 - 2.0 * y);
                let s = x + y;
                let q = s * (2.0 - s);
                let dq = 2.0 - 2.0 * s;
                let fxx = py * (-2.0 * q + 2.0 * dx * dq - 2.0 * px);
                let fyy = px * (-2.0 * q + 2.0 * dy * dq - 2.0 * py);
                let fxy = dx * dy * q + (dx * py + px * dy) * dq - 2.0 * px * py;
                k * (fxx + fyy + 2.0 * c * fxy)
            }
        };
        self.sign * op
    }

    /// Value of the candidate at `(x, y)` with `c = cos θ`.
    pub fn eval(&self, x: f64, y: f64, c: f64) -> f64 {
        1.0 - x * y - self.correction(x, y, c)
    }

    /// `g_xx + g_yy + 2c·g_xy` at an interior point.
    pub fn apply(&self, x: f64, y: f64, c: f64) -> f64 {
        -2.0 * c - self.correction_op(x, y, c)
    }
}

fn check_unit_square(x: f64, y: f64) -> Result<()> {
    if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
        return Err(Error::domain(format!("({x}, {y}) lies outside [0,1]²")));
    }
    Ok(())
}

/// Value of candidate `index` at `(x, y)` and angle θ.
pub fn eval_candidate(index: u8, x: f64, y: f64, theta: f64) -> Result<f64> {
    check_unit_square(x, y)?;
    Ok(CandidateForm::from(Candidate::from_index(index)?).eval(x, y, theta.cos()))
}

/// `L g = g_xx + g_yy + 2 cos θ g_xy` of candidate `index` at an interior
/// point, from analytic second partials.
pub fn apply_operator(index: u8, x: f64, y: f64, theta: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
        return Err(Error::domain(format!("({x}, {y}) is not interior to [0,1]²")));
    }
    Ok(CandidateForm::from(Candidate::from_index(index)?).apply(x, y, theta.cos()))
}

/// Central-difference approximation of `L g` with step `h`, as an
/// independent check of [`apply_operator`].
pub fn apply_operator_fd(form: &CandidateForm, x: f64, y: f64, c: f64, h: f64) -> f64 {
    let g = |a: f64, b: f64| form.eval(a, b, c);
    let gxx = (g(x + h, y) - 2.0 * g(x, y) + g(x - h, y)) / (h * h);
    let gyy = (g(x, y + h) - 2.0 * g(x, y) + g(x, y - h)) / (h * h);
    let gxy = (g(x + h, y + h) - g(x + h, y - h) - g(x - h, y + h) + g(x - h, y - h)) / (4.0 * h * h);
    gxx + gyy + 2.0 * c * gxy
}

/// Angles on `[lo, hi]` at multiples of `step`, with both endpoints.
pub fn theta_samples(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut out = vec![lo];
    let mut k = (lo / step).floor() as i64 + 1;
    loop {
        let t = k as f64 * step;
        if t >= hi - 1e-12 {
            break;
        }
        if t > lo + 1e-12 {
            out.push(t);
        }
        k += 1;
    }
    if hi > lo {
        out.push(hi);
    }
    out
}

/// Location of a grid extremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub value: f64,
}

fn min_point(a: GridPoint, b: GridPoint) -> GridPoint {
    if b.value < a.value {
        b
    } else {
        a
    }
}

const NO_POINT: GridPoint = GridPoint {
    x: f64::NAN,
    y: f64::NAN,
    theta: f64::NAN,
    value: f64::INFINITY,
};

/// Minimum of `L g` over the interior grid `{k/(n+1)}²` at one angle.
pub fn operator_min_at(form: &CandidateForm, theta: f64, grid_n: usize) -> GridPoint {
    let c = theta.cos();
    let h = 1.0 / (grid_n + 1) as f64;
    let mut best = NO_POINT;
    for i in 1..=grid_n {
        let x = i as f64 * h;
        for j in 1..=grid_n {
            let y = j as f64 * h;
            best = min_point(best, GridPoint { x, y, theta, value: form.apply(x, y, c) });
        }
    }
    best
}

/// Largest `|g − (1 − xy)|` over a boundary sample of `4·per_side` points
/// and the given angles (zero when the boundary identity holds exactly).
pub fn boundary_defect(form: &CandidateForm, thetas: &[f64], per_side: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in thetas {
        let c = t.cos();
        for k in 0..per_side {
            let s = k as f64 / per_side as f64;
            for (x, y) in [(s, 0.0), (1.0, s), (1.0 - s, 1.0), (0.0, 1.0 - s)] {
                worst = worst.max((form.eval(x, y, c) - (1.0 - x * y)).abs());
            }
        }
    }
    worst
}

/// Outcome of the sub-solution test for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub candidate: u8,
    pub cos_range: (f64, f64),
    pub grid_n: usize,
    pub angles: usize,
    /// Grid minimum of `L g` and where it occurs.
    pub min_operator: GridPoint,
    /// Largest boundary deviation from `1 − xy` (400-point sample per angle).
    pub boundary_defect: f64,
    pub pass: bool,
}

/// Checks `L g ≥ −1e−8` on the interior grid for every angle of the
/// candidate's range (step `theta_step`) and the exact boundary identity.
pub fn verify_feasibility_form(form: &CandidateForm, grid_n: usize, theta_step: f64) -> Result<FeasibilityReport> {
    if grid_n < 101 {
        return Err(Error::domain(format!("grid_n must be at least 101, got {grid_n}")));
    }
    if !(theta_step > 0.0) {
        return Err(Error::domain("θ step must be positive"));
    }
    let (lo, hi) = form.candidate.theta_range();
    let thetas = theta_samples(lo, hi, theta_step);
    let min_operator = thetas
        .par_iter()
        .map(|&t| operator_min_at(form, t, grid_n))
        .reduce(|| NO_POINT, min_point);
    let defect = boundary_defect(form, &thetas, 100);
    Ok(FeasibilityReport {
        candidate: form.candidate.index(),
        cos_range: form.candidate.cos_range(),
        grid_n,
        angles: thetas.len(),
        min_operator,
        boundary_defect: defect,
        pass: min_operator.value >= -FEASIBILITY_TOL && defect == 0.0,
    })
}

/// [`verify_feasibility_form`] for candidate `index` at the default angle
/// step.
pub fn verify_feasibility(index: u8, grid_n: usize) -> Result<FeasibilityReport> {
    verify_feasibility_form(&Candidate::from_index(index)?.into(), grid_n, DEFAULT_THETA_STEP)
}

/// Clause SDP value with false-marginals `x, y`:
/// `1 − xy − cos θ·√(x−x²)·√(y−y²)`.
pub fn sdp_value(x: f64, y: f64, c: f64) -> f64 {
    1.0 - x * y - c * quad(x).max(0.0).sqrt() * quad(y).max(0.0).sqrt()
}

/// Whether `(x, y, θ)` is a feasible clause configuration (the triangle
/// lower bounds; they are invariant under `(x, y) ↦ (1−x, 1−y)`, so the
/// false-marginal convention needs no translation).
pub fn is_feasible(x: f64, y: f64, theta: f64) -> bool {
    check_triangle(&Configuration::new(PairProblem::Max2Sat, x, y, theta))
}

/// Minimum of `f(x, y, c) / SDP` over feasible grid points `{k/(n−1)}²` at
/// the given angles, skipping SDP values below [`SDP_CUTOFF`].
pub fn ratio_min<F>(f: F, thetas: &[f64], grid_n: usize) -> GridPoint
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    let h = 1.0 / (grid_n - 1) as f64;
    thetas
        .par_iter()
        .map(|&t| {
            let c = t.cos();
            let mut best = NO_POINT;
            for i in 0..grid_n {
                let x = i as f64 * h;
                for j in 0..grid_n {
                    let y = j as f64 * h;
                    if !is_feasible(x, y, t) {
                        continue;
                    }
                    let sdp = sdp_value(x, y, c);
                    if sdp < SDP_CUTOFF {
                        continue;
                    }
                    best = min_point(best, GridPoint { x, y, theta: t, value: f(x, y, c) / sdp });
                }
            }
            best
        })
        .reduce(|| NO_POINT, min_point)
}

/// Outcome of a ratio check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioCheck {
    /// Candidate index, or 0 for the warm-up bound `1 − xy`.
    pub candidate: u8,
    pub target: f64,
    pub min_ratio: GridPoint,
    pub pass: bool,
}

/// Minimum of `g / SDP` over feasible grid configurations in the
/// candidate's angle range; passes when it is at least the target minus
/// [`RATIO_TOL`].
pub fn verify_ratio_form(form: &CandidateForm, grid_n: usize, theta_step: f64) -> Result<RatioCheck> {
    if grid_n < 3 {
        return Err(Error::domain("grid_n must be at least 3"));
    }
    let (lo, hi) = form.candidate.theta_range();
    let thetas = theta_samples(lo, hi, theta_step);
    let m = ratio_min(|x, y, c| form.eval(x, y, c), &thetas, grid_n);
    let target = form.candidate.ratio_target();
    Ok(RatioCheck {
        candidate: form.candidate.index(),
        target,
        min_ratio: m,
        pass: m.value >= target - RATIO_TOL,
    })
}

/// [`verify_ratio_form`] for candidate `index` at the default angle step.
pub fn verify_ratio(index: u8, grid_n: usize) -> Result<RatioCheck> {
    verify_ratio_form(&Candidate::from_index(index)?.into(), grid_n, DEFAULT_THETA_STEP)
}

/// Warm-up bound: `(1 − xy) / SDP ≥ ¾` over feasible configurations with
/// `cos θ ≤ 0`.
pub fn verify_warmup(grid_n: usize, theta_step: f64) -> RatioCheck {
    let thetas = theta_samples(PI / 2.0, PI, theta_step);
    let m = ratio_min(|x, y, _| 1.0 - x * y, &thetas, grid_n);
    RatioCheck {
        candidate: 0,
        target: WARMUP_TARGET,
        min_ratio: m,
        pass: m.value >= WARMUP_TARGET - 1e-6,
    }
}

/// Combined bound: the applicable candidate's `g / SDP` over all feasible
/// configurations with θ ∈ [0, π].
pub fn combined_ratio(grid_n: usize, theta_step: f64) -> GridPoint {
    let thetas = theta_samples(0.0, PI, theta_step);
    ratio_min(
        |x, y, c| CandidateForm::from(Candidate::for_cos(c)).eval(x, y, c),
        &thetas,
        grid_n,
    )
}

/// All maximum-principle checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub grid_n: usize,
    pub theta_step: f64,
    pub feasibility: Vec<FeasibilityReport>,
    pub ratios: Vec<RatioCheck>,
    pub warmup: RatioCheck,
    pub combined: GridPoint,
    pub pass: bool,
}

/// Runs feasibility and ratio checks for the given candidate forms plus the
/// warm-up and combined bounds.
pub fn run_suite_with(forms: &[CandidateForm; 3], grid_n: usize, theta_step: f64) -> Result<SuiteReport> {
    let feasibility = forms
        .iter()
        .map(|f| verify_feasibility_form(f, grid_n, theta_step))
        .collect::<Result<Vec<_>>>()?;
    let ratios = forms
        .iter()
        .map(|f| verify_ratio_form(f, grid_n, theta_step))
        .collect::<Result<Vec<_>>>()?;
    let warmup = verify_warmup(grid_n, theta_step);
    let combined = combined_ratio(grid_n, theta_step);
    let pass = feasibility.iter().all(|f| f.pass)
        && ratios.iter().all(|r| r.pass)
        && warmup.pass
        && combined.value >= CANDIDATE_RATIO_TARGET - RATIO_TOL;
    Ok(SuiteReport {
        grid_n,
        theta_step,
        feasibility,
        ratios,
        warmup,
        combined,
        pass,
    })
}

/// [`run_suite_with`] for the three candidates as defined.
pub fn run_suite(grid_n: usize, theta_step: f64) -> Result<SuiteReport> {
    run_suite_with(&Candidate::ALL.map(CandidateForm::from), grid_n, theta_step)
}
