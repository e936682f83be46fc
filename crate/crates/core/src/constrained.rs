//! Max-Cut with cardinality side constraints `|S ∩ Fᵢ| = bᵢ`.
//!
//! The main rounding runs the sticky walk in `[0,1]ⁿ` from the marginals
//! `x` with covariance `W` (unit diagonal on fractional coordinates), stops
//! it at time `τ`, and then includes each vertex independently with
//! probability `(X_τ)ᵢ`. Stopping early keeps the martingale
//! `Σ_{i∈F} (X_t)ᵢ` concentrated; `τ = Θ(log 1/ε)` is still long enough for
//! almost every coordinate to have been absorbed.
//!
//! Also here: the independent baseline rounding, a helper building
//! fractional points for disjoint families, and empirical validators for
//! the hitting-time and concentration bounds.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{run_stopped_walk, trial_rng, CovarianceRoots, Cube, Estimate, WalkParams};
use crate::error::{Error, Result};
use crate::instances::MaxCutInstance;

/// Tolerance on `Σ_{j∈Fᵢ} xⱼ = bᵢ` for supplied fractional points.
pub const MARGINAL_SUM_TOL: f64 = 1e-9;
/// Hitting-time bound slack: survival must be at most `4^{−t}(1 + 0.3)`.
pub const HITTING_SLACK: f64 = 0.3;
/// Concentration bound slack: tails must be at most `bound·(1 + 0.5)`.
pub const CONCENTRATION_SLACK: f64 = 0.5;
/// Deviation ladder of the concentration check, in units of
/// `√(τ·yᵀWy)`.
pub const CONCENTRATION_LADDER: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

/// Families `Fᵢ` with targets `bᵢ` and a violation budget `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideConstraints {
    pub families: Vec<Vec<usize>>,
    pub targets: Vec<usize>,
    pub epsilon: f64,
}

impl SideConstraints {
    /// Validated constraints over `n` vertices.
    pub fn new(families: Vec<Vec<usize>>, targets: Vec<usize>, epsilon: f64, n: usize) -> Result<Self> {
        if families.len() != targets.len() {
            return Err(Error::Dimension {
                expected: families.len(),
                got: targets.len(),
            });
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::domain(format!("ε must lie in (0, 1], got {epsilon}")));
        }
        for (k, (f, &b)) in families.iter().zip(&targets).enumerate() {
            let distinct: BTreeSet<usize> = f.iter().copied().collect();
            if distinct.len() != f.len() {
                return Err(Error::domain(format!("family {k} repeats a vertex")));
            }
            if let Some(&v) = f.iter().find(|&&v| v >= n) {
                return Err(Error::domain(format!("family {k} has vertex {v} outside 0..{n}")));
            }
            if b > f.len() {
                return Err(Error::domain(format!(
                    "family {k}: target {b} exceeds its size {}",
                    f.len()
                )));
            }
        }
        Ok(SideConstraints {
            families,
            targets,
            epsilon,
        })
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    /// `maxᵢ | |S ∩ Fᵢ| − bᵢ |` (0 without constraints).
    pub fn max_violation(&self, assignment: &[bool]) -> usize {
        self.families
            .iter()
            .zip(&self.targets)
            .map(|(f, &b)| {
                let c = f.iter().filter(|&&v| assignment[v]).count();
                c.abs_diff(b)
            })
            .max()
            .unwrap_or(0)
    }

    /// Checks that a fractional point meets every constraint exactly (up to
    /// [`MARGINAL_SUM_TOL`] per member).
    pub fn check_fractional(&self, x: &[f64]) -> Result<()> {
        for (k, (f, &b)) in self.families.iter().zip(&self.targets).enumerate() {
            let s: f64 = f.iter().map(|&v| x[v]).sum();
            if (s - b as f64).abs() > MARGINAL_SUM_TOL * (f.len().max(1) as f64) {
                return Err(Error::domain(format!(
                    "family {k}: marginals sum to {s}, target is {b}"
                )));
            }
        }
        Ok(())
    }
}

/// Parses constraint lines `b: v₁ v₂ …`. Every other non-comment line is
/// ignored, so the constraints may follow the graph in the same file.
pub fn parse_constraints(text: &str, n: usize, epsilon: f64) -> Result<SideConstraints> {
    let mut families = Vec::new();
    let mut targets = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.starts_with('#') {
            continue;
        }
        let Some((head, tail)) = l.split_once(':') else {
            continue;
        };
        let b = head
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::parse(line, format!("invalid target `{}`", head.trim())))?;
        let f = tail
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(line, format!("invalid vertex `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        families.push(f);
        targets.push(b);
    }
    SideConstraints::new(families, targets, epsilon, n)
}

/// Fractional point for pairwise disjoint families: `xⱼ = bᵢ/|Fᵢ|` on `Fᵢ`
/// and `½` elsewhere.
pub fn disjoint_feasible_point(constraints: &SideConstraints, n: usize) -> Result<Vec<f64>> {
    let mut x = vec![0.5; n];
    let mut owner = vec![usize::MAX; n];
    for (k, (f, &b)) in constraints.families.iter().zip(&constraints.targets).enumerate() {
        for &v in f {
            if owner[v] != usize::MAX {
                return Err(Error::domain(format!(
                    "vertex {v} lies in families {} and {k}; only disjoint families are supported",
                    owner[v]
                )));
            }
            owner[v] = k;
            x[v] = b as f64 / f.len() as f64;
        }
    }
    Ok(x)
}

fn cut_weight(instance: &MaxCutInstance, s: &[bool]) -> f64 {
    instance
        .edges
        .iter()
        .filter(|e| s[e.i] != s[e.j])
        .map(|e| e.weight)
        .sum()
}

/// A set with its cut weight and worst constraint violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedCut {
    pub assignment: Vec<bool>,
    pub cut_value: f64,
    pub max_violation: usize,
    /// Rounding attempts used (baseline) or 1.
    pub attempts: u32,
}

/// Independent rounding of `yⱼ = (1−ε)xⱼ + ε/2`, repeated until the cut
/// weighs at least `(ε/2)·a(E)` and every violation is at most `εn`.
pub fn baseline_round<R: Rng>(
    x: &[f64],
    instance: &MaxCutInstance,
    constraints: &SideConstraints,
    max_attempts: u32,
    rng: &mut R,
) -> Result<ConstrainedCut> {
    let n = instance.n;
    check_point(x, n)?;
    constraints.check_fractional(x)?;
    let eps = constraints.epsilon;
    if eps > 0.5 {
        return Err(Error::domain(format!("baseline rounding needs ε ≤ ½, got {eps}")));
    }
    let y: Vec<f64> = x.iter().map(|&v| (1.0 - eps) * v + 0.5 * eps).collect();
    let total: f64 = instance.edges.iter().map(|e| e.weight).sum();
    let (cut_goal, viol_goal) = (0.5 * eps * total, eps * n as f64);
    let (mut best_cut, mut worst_viol, mut cut_fails, mut viol_fails) = (0.0f64, 0usize, 0u32, 0u32);
    for attempt in 1..=max_attempts {
        let s: Vec<bool> = y.iter().map(|&p| rng.gen::<f64>() < p).collect();
        let cut = cut_weight(instance, &s);
        let viol = constraints.max_violation(&s);
        best_cut = best_cut.max(cut);
        worst_viol = worst_viol.max(viol);
        let cut_ok = cut >= cut_goal;
        let viol_ok = viol as f64 <= viol_goal;
        cut_fails += !cut_ok as u32;
        viol_fails += !viol_ok as u32;
        if cut_ok && viol_ok {
            return Ok(ConstrainedCut {
                assignment: s,
                cut_value: cut,
                max_violation: viol,
                attempts: attempt,
            });
        }
    }
    Err(Error::RetryCap {
        attempts: max_attempts as usize,
        msg: format!(
            "cut below {cut_goal} in {cut_fails} attempts, violation above {viol_goal} in \
             {viol_fails}; best cut {best_cut}, worst violation {worst_viol}"
        ),
    })
}

fn check_point(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::Dimension { expected: n, got: x.len() });
    }
    if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::domain(format!("marginal {i} = {v} lies outside [0, 1]")));
    }
    Ok(())
}

/// Default stopping time `log₂(2√2/ε)`, after which each coordinate is
/// still fractional with probability at most `ε²/8`.
pub fn default_tau(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::domain(format!("ε must lie in (0, 1], got {epsilon}")));
    }
    Ok((2.0 * 2f64.sqrt() / epsilon).log2())
}

/// Result of one stopped-walk rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppedRounding {
    pub cut: ConstrainedCut,
    /// State of the walk at time `τ`.
    pub fractional: Vec<f64>,
    /// Coordinates still fractional at time `τ`.
    pub unfixed: usize,
}

/// The stopped-walk rounding for one instance: start point, covariance
/// roots and stopping time, reusable across trials.
#[derive(Debug, Clone)]
pub struct StoppedRounder {
    x: Vec<f64>,
    roots: CovarianceRoots,
    tau: f64,
    params: WalkParams,
}

impl StoppedRounder {
    /// `w` is the row-major `n × n` correlation matrix of the orthogonal
    /// directions (unit diagonal on fractional coordinates).
    pub fn new(x: Vec<f64>, w: Vec<f64>, tau: f64, params: WalkParams) -> Result<Self> {
        let n = x.len();
        check_point(&x, n)?;
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::domain(format!("τ must be finite and nonnegative, got {tau}")));
        }
        let roots = CovarianceRoots::new(w, n)?;
        for (i, &xi) in x.iter().enumerate() {
            let d = roots.entry(i, i);
            if xi > 0.0 && xi < 1.0 && (d - 1.0).abs() > 1e-9 {
                return Err(Error::domain(format!(
                    "W[{i}][{i}] = {d}, expected 1 for a fractional coordinate"
                )));
            }
        }
        Ok(StoppedRounder { x, roots, tau, params })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Walk to time `τ`, then include each vertex with probability
    /// `(X_τ)ᵢ`.
    pub fn round<R: Rng>(
        &mut self,
        instance: &MaxCutInstance,
        constraints: &SideConstraints,
        rng: &mut R,
    ) -> Result<StoppedRounding> {
        if instance.n != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                got: instance.n,
            });
        }
        let out = run_stopped_walk(&mut self.roots, &self.x, Cube::Unit, self.tau, &self.params, rng)?;
        let s: Vec<bool> = out.state.iter().map(|&p| rng.gen::<f64>() < p).collect();
        let unfixed = out.state.iter().filter(|&&p| p > 0.0 && p < 1.0).count();
        Ok(StoppedRounding {
            cut: ConstrainedCut {
                cut_value: cut_weight(instance, &s),
                max_violation: constraints.max_violation(&s),
                assignment: s,
                attempts: 1,
            },
            fractional: out.state,
            unfixed,
        })
    }
}

/// One stopped-walk rounding from marginals `x` (meeting the constraints
/// exactly) and correlation matrix `w`.
pub fn constrained_round<R: Rng>(
    x: &[f64],
    w: &[f64],
    instance: &MaxCutInstance,
    constraints: &SideConstraints,
    tau: f64,
    params: &WalkParams,
    rng: &mut R,
) -> Result<StoppedRounding> {
    check_point(x, instance.n)?;
    constraints.check_fractional(x)?;
    StoppedRounder::new(x.to_vec(), w.to_vec(), tau, *params)?.round(instance, constraints, rng)
}

const CHUNKS: u64 = 64;

/// Runs `f` for trials `0..trials` in fixed chunks (results independent of
/// the thread count) and concatenates the per-trial outputs.
fn par_trials<T: Send>(trials: u64, f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let per = trials.div_ceil(CHUNKS).max(1);
    let chunks: Result<Vec<Vec<T>>> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| (c * per..((c + 1) * per).min(trials)).map(&f).collect())
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

/// Empirical survival of a single coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingProfile {
    pub start: f64,
    pub trials: u64,
    /// `survival[t]` = fraction of walks still inside `(0,1)` at time `t`.
    pub survival: Vec<f64>,
    /// `4^{−t}`.
    pub bound: Vec<f64>,
    pub pass: bool,
}

/// Survival curve `P[0 < X_s < 1 ∀ s ≤ t]`, `t = 0..=t_max`, of a
/// unit-variance coordinate started at `start`; passes when every entry
/// with `t ≥ 1` is at most `4^{−t}(1 + 0.3)`.
pub fn hitting_profile(
    trials: u64,
    t_max: u32,
    start: f64,
    params: &WalkParams,
    seed: u64,
) -> Result<HittingProfile> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if !(0.0..=1.0).contains(&start) {
        return Err(Error::domain(format!("start {start} lies outside [0, 1]")));
    }
    let gamma2 = params.step * params.step;
    let times = par_trials(trials, |t| {
        let mut roots = CovarianceRoots::new(vec![1.0], 1)?;
        let out = run_stopped_walk(&mut roots, &[start], Cube::Unit, t_max as f64, params, &mut trial_rng(seed, t))?;
        Ok(out.absorption_steps[0].map_or(f64::INFINITY, |s| s as f64 * gamma2))
    })?;
    let survival: Vec<f64> = (0..=t_max)
        .map(|t| times.iter().filter(|&&s| s > t as f64).count() as f64 / trials as f64)
        .collect();
    let bound: Vec<f64> = (0..=t_max).map(|t| 4f64.powi(-(t as i32))).collect();
    let pass = (1..=t_max as usize).all(|t| survival[t] <= bound[t] * (1.0 + HITTING_SLACK));
    Ok(HittingProfile {
        start,
        trials,
        survival,
        bound,
        pass,
    })
}

/// Synthetic correlation matrices for the concentration check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum CovarianceRegime {
    Identity,
    /// Unit diagonal, every off-diagonal entry equal to `rho`.
    Constant { rho: f64 },
    /// Gram matrix of random unit vectors in dimension `rank`.
    LowRank { rank: usize },
}

impl CovarianceRegime {
    /// Row-major `n × n` matrix; `seed` only matters for
    /// [`CovarianceRegime::LowRank`].
    pub fn build(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        match *self {
            CovarianceRegime::Identity => {
                Ok((0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect())
            }
            CovarianceRegime::Constant { rho } => {
                let lo = if n > 1 { -1.0 / (n as f64 - 1.0) } else { -1.0 };
                if !(rho >= lo && rho <= 1.0) {
                    return Err(Error::domain(format!("ρ = {rho} does not give a PSD matrix for n = {n}")));
                }
                Ok((0..n * n).map(|k| if k / n == k % n { 1.0 } else { rho }).collect())
            }
            CovarianceRegime::LowRank { rank } => {
                if rank == 0 {
                    return Err(Error::domain("rank must be at least 1"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let vecs: Vec<Vec<f64>> = (0..n)
                    .map(|_| {
                        let v: Vec<f64> = (0..rank).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
                        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                        v.into_iter().map(|a| a / norm).collect()
                    })
                    .collect();
                let mut w = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        w[i * n + j] = if i == j {
                            1.0
                        } else {
                            vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum()
                        };
                    }
                }
                Ok(w)
            }
        }
    }
}

/// One deviation threshold of the concentration check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRung {
    pub s: f64,
    pub empirical: f64,
    /// `2·exp(−s²/(2τ·yᵀWy))`.
    pub bound: f64,
    pub pass: bool,
}

/// Tail table of `Σ_{i∈F} (X_τ)ᵢ − Σ_{i∈F} xᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub tau: f64,
    pub trials: u64,
    /// `yᵀWy` for the indicator `y` of `F`.
    pub y_w_y: f64,
    /// Empirical mean deviation and its standard error (zero mean expected).
    pub mean_deviation: f64,
    pub mean_stderr: f64,
    /// Empirical mean of `|S ∩ F| − Σ_{i∈F} (X_τ)ᵢ` after the Bernoulli
    /// finish, and its standard error.
    pub finish_bias: f64,
    pub finish_stderr: f64,
    pub rungs: Vec<TailRung>,
    pub pass: bool,
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}

/// Empirical tails of the stopped martingale `Σ_{i∈F}(X_τ)ᵢ` against the
/// sub-Gaussian bound `2exp(−s²/(2τ·yᵀWy))` on the ladder
/// `s ∈ CONCENTRATION_LADDER·√(τ·yᵀWy)`. Every member of `F` must satisfy
/// `2xᵢ(1−xᵢ) > eps1`.
#[allow(clippy::too_many_arguments)]
pub fn concentration_check(
    x: &[f64],
    w: &[f64],
    family: &[usize],
    eps1: f64,
    tau: f64,
    trials: u64,
    params: &WalkParams,
    seed: u64,
) -> Result<ConcentrationReport> {
    let n = x.len();
    check_point(x, n)?;
    if trials < 2 {
        return Err(Error::domain("trials must be at least 2"));
    }
    for &i in family {
        if i >= n {
            return Err(Error::domain(format!("family vertex {i} outside 0..{n}")));
        }
        if !(2.0 * x[i] * (1.0 - x[i]) > eps1) {
            return Err(Error::domain(format!(
                "vertex {i} has 2x(1−x) = {} ≤ ε₁ = {eps1}",
                2.0 * x[i] * (1.0 - x[i])
            )));
        }
    }
    let roots = CovarianceRoots::new(w.to_vec(), n)?;
    let y_w_y: f64 = family
        .iter()
        .flat_map(|&i| family.iter().map(move |&j| (i, j)))
        .map(|(i, j)| roots.entry(i, j))
        .sum();
    let base: f64 = family.iter().map(|&i| x[i]).sum();
    let samples = par_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let mut r = roots.clone();
        let out = run_stopped_walk(&mut r, x, Cube::Unit, tau, params, &mut rng)?;
        let frac: f64 = family.iter().map(|&i| out.state[i]).sum();
        let count = family.iter().filter(|&&i| rng.gen::<f64>() < out.state[i]).count() as f64;
        Ok((frac - base, count - frac))
    })?;
    let devs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let fin: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (mean_deviation, mean_stderr) = mean_and_stderr(&devs);
    let (finish_bias, finish_stderr) = mean_and_stderr(&fin);
    let scale = (tau * y_w_y).sqrt();
    let unit = if scale > 0.0 { scale } else { 1.0 };
    let rungs: Vec<TailRung> = CONCENTRATION_LADDER
        .iter()
        .map(|&k| {
            let s = k * unit;
            let empirical = devs.iter().filter(|d| d.abs() >= s).count() as f64 / trials as f64;
            let bound = if scale > 0.0 {
                2.0 * (-s * s / (2.0 * tau * y_w_y)).exp()
            } else {
                0.0
            };
            TailRung {
                s,
                empirical,
                bound,
                pass: empirical <= bound * (1.0 + CONCENTRATION_SLACK),
            }
        })
        .collect();
    let pass = rungs.iter().all(|r| r.pass);
    Ok(ConcentrationReport {
        tau,
        trials,
        y_w_y,
        mean_deviation,
        mean_stderr,
        finish_bias,
        finish_stderr,
        rungs,
        pass,
    })
}

/// Probability that the stopped-then-Bernoulli rounding separates a pair
/// with marginals `(x, y)` and direction angle θ.
pub fn stopped_pair_separation(
    x: f64,
    y: f64,
    theta: f64,
    tau: f64,
    params: &WalkParams,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let c = theta.cos().clamp(-1.0, 1.0);
    let roots = CovarianceRoots::new(vec![1.0, c, c, 1.0], 2)?;
    let hits = par_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let mut r = roots.clone();
        let out = run_stopped_walk(&mut r, &[x, y], Cube::Unit, tau, params, &mut rng)?;
        let a = rng.gen::<f64>() < out.state[0];
        let b = rng.gen::<f64>() < out.state[1];
        Ok((a != b) as u64)
    })?;
    Ok(Estimate::from_counts(hits.iter().sum(), trials))
}

/// Upper bound on how much stopping at `τ` can change a pair's separation
/// probability: both endpoints are absorbed by `τ` except with probability
/// at most `2·4^{−⌊τ⌋}`.
pub fn stopping_gap_bound(tau: f64) -> f64 {
    2.0 * 4f64.powi(-(tau.floor() as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Edge;

    fn k2() -> MaxCutInstance {
        MaxCutInstance {
            n: 2,
            edges: vec![Edge { i: 0, j: 1, weight: 1.0 }],
        }
    }

    #[test]
    fn parse_and_validate() {
        let text = "4 2\n0 1\n2 3\n1: 0 1\n# comment\n2: 2 3\n";
        let c = parse_constraints(text, 4, 0.1).unwrap();
        assert_eq!(c.families, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(c.targets, vec![1, 2]);
        assert!(parse_constraints("3: 0 1\n", 4, 0.1).is_err());
        assert!(parse_constraints("1: 0 9\n", 4, 0.1).is_err());
        assert!(parse_constraints("1: 0 0\n", 4, 0.1).is_err());
        assert!(parse_constraints("x: 0\n", 4, 0.1).is_err());
    }

    #[test]
    fn disjoint_point_meets_targets() {
        let c = SideConstraints::new(vec![vec![0, 1, 2], vec![4]], vec![1, 1], 0.1, 6).unwrap();
        let x = disjoint_feasible_point(&c, 6).unwrap();
        c.check_fractional(&x).unwrap();
        assert_eq!(x[3], 0.5);
        let overlap = SideConstraints::new(vec![vec![0, 1], vec![1]], vec![1, 0], 0.1, 3).unwrap();
        assert!(disjoint_feasible_point(&overlap, 3).is_err());
    }

    #[test]
    fn baseline_k2_cut_probability() {
        // y = ¾·½ + ¼ = ½ on both ends: the edge is cut w.p. 2·½·½ = ½;
        // the independent-rounding bound y₀ + y₁ − y₀y₁ is ¾.
        let c = SideConstraints::new(vec![vec![0, 1]], vec![1], 0.5, 2).unwrap();
        let x = [0.5, 0.5];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v + 0.25).collect();
        assert!((y[0] + y[1] - y[0] * y[1] - 0.75).abs() < 1e-15);
        let mut rng = trial_rng(1, 0);
        let mut cuts = 0;
        for _ in 0..4000 {
            let s: Vec<bool> = y.iter().map(|&p| rng.gen::<f64>() < p).collect();
            cuts += (s[0] != s[1]) as u32;
        }
        assert!((cuts as f64 / 4000.0 - 0.5).abs() < 0.03);
        let out = baseline_round(&x, &k2(), &c, 100, &mut rng).unwrap();
        assert!(out.cut_value >= 0.25 && out.max_violation <= 1);
    }

    #[test]
    fn baseline_retry_cap_reports() {
        // With b = 0 on {0, 1} and εn < 1, cutting the edge always violates
        // the constraint, so both checks can never pass together.
        let inst = k2();
        let c = SideConstraints::new(vec![vec![0, 1]], vec![0], 0.01, 2).unwrap();
        let err = baseline_round(&[0.0, 0.0], &inst, &c, 5, &mut trial_rng(3, 0));
        match err {
            Err(Error::RetryCap { attempts, .. }) => assert_eq!(attempts, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn integral_marginals_are_deterministic() {
        let c = SideConstraints::new(vec![vec![0, 1]], vec![1], 0.1, 2).unwrap();
        let w = vec![0.0, 0.0, 0.0, 0.0];
        for seed in 0..5 {
            let out = constrained_round(&[1.0, 0.0], &w, &k2(), &c, 3.0, &WalkParams::default(), &mut trial_rng(seed, 0))
                .unwrap();
            assert_eq!(out.cut.assignment, vec![true, false]);
            assert_eq!(out.cut.max_violation, 0);
            assert_eq!(out.cut.cut_value, 1.0);
        }
    }

    #[test]
    fn default_tau_matches_formula() {
        assert!((default_tau(0.5).unwrap() - (4.0 * 2f64.sqrt()).log2()).abs() < 1e-15);
        assert!(4f64.powf(-default_tau(0.1).unwrap()) <= 0.01 / 8.0 + 1e-15);
        assert!(default_tau(0.0).is_err());
    }

    #[test]
    fn hitting_profile_small() {
        let params = WalkParams {
            step: 2e-2,
            stick_tol: 2e-2,
            ..Default::default()
        };
        let p = hitting_profile(2000, 3, 0.5, &params, 9).unwrap();
        assert_eq!(p.survival[0], 1.0);
        assert!(p.pass, "{p:?}");
        assert!(p.survival.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn empty_family_has_no_deviation() {
        let w = CovarianceRegime::Identity.build(4, 0).unwrap();
        let r = concentration_check(&[0.5; 4], &w, &[], 0.1, 1.0, 50, &WalkParams::default(), 0).unwrap();
        assert_eq!(r.mean_deviation, 0.0);
        assert!(r.rungs.iter().all(|g| g.empirical == 0.0));
    }

    #[test]
    fn regimes_are_valid_correlations() {
        for reg in [
            CovarianceRegime::Identity,
            CovarianceRegime::Constant { rho: 0.9 },
            CovarianceRegime::LowRank { rank: 3 },
        ] {
            let w = reg.build(5, 11).unwrap();
            for i in 0..5 {
                assert_eq!(w[i * 5 + i], 1.0);
                for j in 0..5 {
                    assert!((w[i * 5 + j] - w[j * 5 + i]).abs() < 1e-15);
                }
            }
        }
        assert!(CovarianceRegime::Constant { rho: -0.9 }.build(5, 0).is_err());
    }
}
