//! Discrete-time simulation of the sticky walk and Monte Carlo estimators.
//!
//! One step advances continuous time by `γ²`:
//! `X ← X + γ · A(X) · W_act^{1/2} g` with `g` standard normal, where `W_act`
//! is the covariance restricted to the still-active coordinates and `A(X)`
//! is the identity (basic walk) or the slowdown factor
//! `diag((1 − ξᵢ²)^{α/2})` evaluated at the pre-step state, `ξᵢ` being the
//! coordinate rescaled to `[−1, 1]`. A coordinate freezes permanently once
//! it comes within `stick_tol` of an endpoint of its interval (overshoot
//! also snaps), and its row and column leave the covariance.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{evaluate_assignment, ProblemInstance};
use crate::sdp::{decompose, Configuration, PairProblem, ProblemKind, SdpSolution};

/// Drift-free dynamics of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum WalkKind {
    Basic,
    /// Slowdown with exponent `α ∈ [0, 2)`.
    Slowdown(f64),
}

impl WalkKind {
    /// The slowdown exponent (0 for the basic walk).
    pub fn alpha(&self) -> f64 {
        match *self {
            WalkKind::Basic => 0.0,
            WalkKind::Slowdown(a) => a,
        }
    }
}

/// Parameters of a walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    /// `γ`: increments are `γ·g`, one step lasts `γ²` time units.
    pub step: f64,
    /// Absorption threshold: distance to an endpoint at which a coordinate
    /// freezes.
    pub stick_tol: f64,
    pub max_steps: u64,
    pub kind: WalkKind,
    /// When a multi-coordinate walk is down to one active coordinate, end
    /// it with a single draw from that coordinate's exact exit law
    /// (`P(hi) = (x − lo)/(hi − lo)`, the walk being a bounded martingale)
    /// instead of simulating the remaining one-dimensional path.
    #[serde(default)]
    pub exact_finish: bool,
}

impl Default for WalkParams {
    fn default() -> Self {
        WalkParams {
            step: 1e-2,
            stick_tol: 1e-2,
            max_steps: 10_000_000,
            kind: WalkKind::Basic,
            exact_finish: false,
        }
    }
}

impl WalkParams {
    pub fn with_kind(kind: WalkKind) -> Self {
        WalkParams {
            kind,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::domain(format!("step must be positive, got {}", self.step)));
        }
        if !(self.stick_tol > 0.0 && self.stick_tol < 0.5) {
            return Err(Error::domain(format!(
                "stick_tol must lie in (0, 0.5), got {}",
                self.stick_tol
            )));
        }
        let a = self.kind.alpha();
        if !(0.0..2.0).contains(&a) {
            return Err(Error::domain(format!("α must lie in [0, 2), got {a}")));
        }
        Ok(())
    }
}

/// The interval every coordinate lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cube {
    /// `[0, 1]`
    Unit,
    /// `[−1, 1]`
    Centered,
}

impl Cube {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Cube::Unit => (0.0, 1.0),
            Cube::Centered => (-1.0, 1.0),
        }
    }
}

/// Result of one walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkOutcome {
    /// Final state: a cube vertex for [`run_walk`], possibly fractional for
    /// [`run_stopped_walk`].
    pub state: Vec<f64>,
    /// Step index at which each coordinate froze (0 if it started frozen),
    /// `None` if it never froze.
    pub absorption_steps: Vec<Option<u64>>,
    pub steps: u64,
}

/// Cache of symmetric square roots of principal submatrices of a PSD
/// covariance, keyed by the set of active coordinates.
#[derive(Debug, Clone)]
pub struct CovarianceRoots {
    n: usize,
    cov: Vec<f64>,
    cache: HashMap<Vec<u64>, std::sync::Arc<Vec<f64>>>,
}

impl CovarianceRoots {
    /// `cov` is row-major `n × n`.
    pub fn new(cov: Vec<f64>, n: usize) -> Result<Self> {
        if cov.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: cov.len(),
            });
        }
        Ok(CovarianceRoots {
            n,
            cov,
            cache: HashMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.n + j]
    }

    fn key(active: &[usize]) -> Vec<u64> {
        let mut key = vec![0u64; active.last().map_or(0, |&m| m / 64 + 1)];
        for &i in active {
            key[i / 64] |= 1 << (i % 64);
        }
        key
    }

    /// Symmetric square root of the submatrix on `active` (row-major
    /// `k × k`), negative eigenvalues clamped to zero.
    pub fn root(&mut self, active: &[usize]) -> std::sync::Arc<Vec<f64>> {
        let key = Self::key(active);
        if let Some(r) = self.cache.get(&key) {
            return r.clone();
        }
        let root = std::sync::Arc::new(psd_sqrt(&self.cov, self.n, active));
        if self.cache.len() < 4096 {
            self.cache.insert(key, root.clone());
        }
        root
    }
}

/// Symmetric PSD square root of the principal submatrix of `cov` on `idx`.
pub fn psd_sqrt(cov: &[f64], n: usize, idx: &[usize]) -> Vec<f64> {
    let k = idx.len();
    match k {
        0 => Vec::new(),
        1 => vec![cov[idx[0] * n + idx[0]].max(0.0).sqrt()],
        _ => {
            let m = DMatrix::from_fn(k, k, |r, c| {
                0.5 * (cov[idx[r] * n + idx[c]] + cov[idx[c] * n + idx[r]])
            });
            let eig = SymmetricEigen::new(m);
            let q = &eig.eigenvectors;
            let d: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
            let mut out = vec![0.0; k * k];
            for r in 0..k {
                for c in 0..k {
                    out[r * k + c] = (0..k).map(|t| q[(r, t)] * d[t] * q[(c, t)]).sum();
                }
            }
            out
        }
    }
}

/// Per-trial random stream derived from `(seed, trial)`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

struct Walker<'a> {
    params: &'a WalkParams,
    lo: f64,
    hi: f64,
}

impl Walker<'_> {
    fn speed(&self, x: f64) -> f64 {
        let a = self.params.kind.alpha();
        if a == 0.0 {
            return 1.0;
        }
        let xi = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        (1.0 - xi * xi).max(0.0).powf(0.5 * a)
    }

    fn snap(&self, x: f64) -> Option<f64> {
        let tol = self.params.stick_tol;
        if x <= self.lo + tol {
            Some(self.lo)
        } else if x >= self.hi - tol {
            Some(self.hi)
        } else {
            None
        }
    }

    /// Advances `state` for at most `budget` steps (or until frozen).
    /// Returns the number of steps taken.
    fn advance<R: Rng>(
        &self,
        roots: &mut CovarianceRoots,
        state: &mut [f64],
        absorbed: &mut [Option<u64>],
        budget: u64,
        allow_finish: bool,
        rng: &mut R,
    ) -> u64 {
        let mut active: Vec<usize> = (0..state.len()).filter(|&i| absorbed[i].is_none()).collect();
        let gamma = self.params.step;
        let mut root = roots.root(&active);
        let mut g = vec![0.0; active.len()];
        let mut dx = vec![0.0; active.len()];
        let mut steps = 0u64;
        let finish = allow_finish && self.params.exact_finish && active.len() >= 2;
        while !active.is_empty() && steps < budget {
            let k = active.len();
            if finish && k == 1 {
                let i = active[0];
                let p = (state[i] - self.lo) / (self.hi - self.lo);
                state[i] = if rng.gen::<f64>() < p { self.hi } else { self.lo };
                absorbed[i] = Some(steps);
                break;
            }
            for v in g.iter_mut().take(k) {
                *v = rng.sample(StandardNormal);
            }
            for r in 0..k {
                let row = &root[r * k..(r + 1) * k];
                let z: f64 = row.iter().zip(&g[..k]).map(|(a, b)| a * b).sum();
                dx[r] = gamma * self.speed(state[active[r]]) * z;
            }
            steps += 1;
            let mut froze = false;
            for r in 0..k {
                let i = active[r];
                state[i] += dx[r];
                if let Some(end) = self.snap(state[i]) {
                    state[i] = end;
                    absorbed[i] = Some(steps);
                    froze = true;
                }
            }
            if froze {
                active.retain(|&i| absorbed[i].is_none());
                root = roots.root(&active);
            }
        }
        steps
    }

    fn initial(&self, start: &[f64]) -> Result<(Vec<f64>, Vec<Option<u64>>)> {
        let mut state = start.to_vec();
        let mut absorbed = vec![None; start.len()];
        for (i, x) in state.iter_mut().enumerate() {
            if !(*x >= self.lo && *x <= self.hi) {
                return Err(Error::domain(format!(
                    "start coordinate {i} = {x} lies outside [{}, {}]",
                    self.lo, self.hi
                )));
            }
            if *x == self.lo || *x == self.hi {
                absorbed[i] = Some(0);
            }
        }
        Ok((state, absorbed))
    }
}

/// Runs the walk until every coordinate is frozen.
pub fn run_walk<R: Rng>(
    roots: &mut CovarianceRoots,
    start: &[f64],
    cube: Cube,
    params: &WalkParams,
    rng: &mut R,
) -> Result<WalkOutcome> {
    params.validate()?;
    if start.len() != roots.n() {
        return Err(Error::Dimension {
            expected: roots.n(),
            got: start.len(),
        });
    }
    let (lo, hi) = cube.bounds();
    let walker = Walker { params, lo, hi };
    let (mut state, mut absorbed) = walker.initial(start)?;
    let steps = walker.advance(roots, &mut state, &mut absorbed, params.max_steps, true, rng);
    let active = absorbed.iter().filter(|a| a.is_none()).count();
    if active > 0 {
        return Err(Error::WalkTimeout {
            steps,
            active,
            state,
        });
    }
    Ok(WalkOutcome {
        state,
        absorption_steps: absorbed,
        steps,
    })
}

/// Runs the walk up to continuous time `τ` (`⌈τ/γ²⌉` steps) and returns the
/// possibly fractional state; frozen coordinates stay frozen.
pub fn run_stopped_walk<R: Rng>(
    roots: &mut CovarianceRoots,
    start: &[f64],
    cube: Cube,
    tau: f64,
    params: &WalkParams,
    rng: &mut R,
) -> Result<WalkOutcome> {
    params.validate()?;
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("τ must be nonnegative, got {tau}")));
    }
    if start.len() != roots.n() {
        return Err(Error::Dimension {
            expected: roots.n(),
            got: start.len(),
        });
    }
    let (lo, hi) = cube.bounds();
    let walker = Walker { params, lo, hi };
    let (mut state, mut absorbed) = walker.initial(start)?;
    let budget = (tau / (params.step * params.step)).ceil() as u64;
    let steps = walker.advance(roots, &mut state, &mut absorbed, budget, false, rng);
    Ok(WalkOutcome {
        state,
        absorption_steps: absorbed,
        steps,
    })
}

/// Integral assignment and its value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rounding {
    pub assignment: Vec<bool>,
    pub value: f64,
    pub steps: u64,
}

/// Everything needed to round one instance repeatedly: start point, cube,
/// covariance roots and the map from final state to assignment.
#[derive(Debug, Clone)]
pub struct RoundingPlan {
    kind: ProblemKind,
    cube: Cube,
    start: Vec<f64>,
    roots: CovarianceRoots,
}

impl RoundingPlan {
    /// Builds the walk for a solved relaxation.
    ///
    /// * Max-Cut: `[−1,1]ⁿ` from the origin with `W = (wᵢ·wⱼ)`, `S = {Xᵢ = 1}`.
    /// * Max-2SAT: `[0,1]ⁿ` from the marginals (probability of *false*) with
    ///   `W` the correlation of the orthogonal directions; variable `i` is
    ///   true iff `Xᵢ = 0`.
    /// * Max-DiCut: `[−1,1]^{n+1}` from the origin with the Gram matrix of
    ///   `w₀..wₙ`; `S = {i : Xᵢ = X₀}`.
    pub fn new(solution: &SdpSolution) -> Result<Self> {
        match solution.kind {
            ProblemKind::MaxCut => {
                let w = &solution.vectors[1..];
                let n = w.len();
                let cov = gram(w);
                Ok(RoundingPlan {
                    kind: ProblemKind::MaxCut,
                    cube: Cube::Centered,
                    start: vec![0.0; n],
                    roots: CovarianceRoots::new(cov, n)?,
                })
            }
            ProblemKind::Max2Sat => {
                let d = decompose(solution);
                let n = d.n();
                Ok(RoundingPlan {
                    kind: ProblemKind::Max2Sat,
                    cube: Cube::Unit,
                    start: d.x.clone(),
                    roots: CovarianceRoots::new(d.correlation_matrix(), n)?,
                })
            }
            ProblemKind::DiCut => {
                let u = solution.unit_vectors();
                let n = u.len();
                Ok(RoundingPlan {
                    kind: ProblemKind::DiCut,
                    cube: Cube::Centered,
                    start: vec![0.0; n],
                    roots: CovarianceRoots::new(gram(&u), n)?,
                })
            }
        }
    }

    fn assignment(&self, state: &[f64]) -> Vec<bool> {
        match self.kind {
            ProblemKind::MaxCut => state.iter().map(|&x| x > 0.0).collect(),
            ProblemKind::Max2Sat => state.iter().map(|&x| x < 0.5).collect(),
            ProblemKind::DiCut => state[1..].iter().map(|&x| x == state[0]).collect(),
        }
    }

    /// One rounding with the given random stream.
    pub fn round<R: Rng>(
        &mut self,
        instance: &ProblemInstance,
        params: &WalkParams,
        rng: &mut R,
    ) -> Result<Rounding> {
        let out = run_walk(&mut self.roots, &self.start, self.cube, params, rng)?;
        let assignment = self.assignment(&out.state);
        let value = evaluate_assignment(instance, &assignment)?;
        Ok(Rounding {
            assignment,
            value,
            steps: out.steps,
        })
    }
}

fn gram(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
        }
        g[i * n + i] = 1.0;
    }
    g
}

/// Rounds a solved relaxation once (stream `(seed, 0)`).
pub fn round_instance(
    instance: &ProblemInstance,
    solution: &SdpSolution,
    params: &WalkParams,
    seed: u64,
) -> Result<Rounding> {
    if instance.n() != solution.n() {
        return Err(Error::Dimension {
            expected: instance.n(),
            got: solution.n(),
        });
    }
    let mut plan = RoundingPlan::new(solution)?;
    plan.round(instance, params, &mut trial_rng(seed, 0))
}

/// A Monte Carlo frequency with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub prob: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl Estimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Estimate {
            prob: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// Standard error floored at the value for one success, so that an
    /// estimate of exactly 0 or 1 still carries a nonzero band.
    pub fn stderr_floor(&self) -> f64 {
        let n = self.trials as f64;
        self.stderr.max(((n - 1.0).max(1.0) / (n * n * n)).sqrt())
    }
}

const CHUNKS: u64 = 64;

/// Runs `trials` independent 2-D walks, fanned across threads in chunks;
/// the event count is independent of the thread count.
fn count_pair_event(
    start: [f64; 2],
    rho: f64,
    cube: Cube,
    params: &WalkParams,
    trials: u64,
    seed: u64,
    event: impl Fn(&[f64]) -> bool + Sync,
) -> Result<u64> {
    let cov = vec![1.0, rho, rho, 1.0];
    let params = &WalkParams {
        exact_finish: true,
        ..*params
    };
    let per = trials.div_ceil(CHUNKS);
    let counts: Result<Vec<u64>> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut roots = CovarianceRoots::new(cov.clone(), 2)?;
            let mut hits = 0;
            for t in c * per..((c + 1) * per).min(trials) {
                let mut rng = trial_rng(seed, t);
                let out = run_walk(&mut roots, &start, cube, params, &mut rng)?;
                hits += event(&out.state) as u64;
            }
            Ok(hits)
        })
        .collect();
    Ok(counts?.iter().sum())
}

/// Empirical probability of the rounding event for a pair configuration.
///
/// The two-dimensional phase is simulated step by step; once one coordinate
/// has frozen, the other is finished with its exact exit law (see
/// [`WalkParams::exact_finish`]).
///
/// Max-Cut runs in `[−1,1]²` from `(2xᵢ−1, 2xⱼ−1)` and counts separated
/// endpoints. Max-2SAT (marginals = probabilities of truth) runs in `[0,1]²`
/// from `(xᵢ, xⱼ)` and counts absorption with at least one coordinate at 1.
pub fn estimate_pair_separation(
    config: &Configuration,
    params: &WalkParams,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let rho = config.theta.cos().clamp(-1.0, 1.0);
    let hits = match config.problem {
        PairProblem::MaxCut => count_pair_event(
            [2.0 * config.xi - 1.0, 2.0 * config.xj - 1.0],
            rho,
            Cube::Centered,
            params,
            trials,
            seed,
            |s| s[0] != s[1],
        )?,
        PairProblem::Max2Sat => count_pair_event(
            [config.xi, config.xj],
            rho,
            Cube::Unit,
            params,
            trials,
            seed,
            |s| s[0] == 1.0 || s[1] == 1.0,
        )?,
    };
    Ok(Estimate::from_counts(hits, trials))
}
