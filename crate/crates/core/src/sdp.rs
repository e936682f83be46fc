//! Vector (SDP) relaxations of the three problems, a low-rank factorized
//! solver, and the decomposition of solutions into marginals, orthogonal
//! directions and pairwise angles.
//!
//! Internally every relaxation is written over unit vectors `u₀, …, uₙ`:
//!
//! * Max-Cut: `uᵢ = wᵢ` (the ±1-convention vectors); `u₀` is unused.
//!   Objective `Σ a_ij (1 − wᵢ·wⱼ)/2`.
//! * Max-2SAT: `u₀ = v₀` is the *false* reference vector and
//!   `vᵢ = (v₀ + uᵢ)/2`, which satisfies `v₀·vᵢ = ‖vᵢ‖²` identically; a
//!   negated literal uses `v₀ − vᵢ = (v₀ − uᵢ)/2`. Clause objective
//!   `1 − v_ℓ₁·v_ℓ₂`; the triangle constraints among `v₀, ±vᵢ, ±vⱼ` become
//!   `1 + σ₁ u₀·uᵢ + σ₂ u₀·uⱼ + σ₁σ₂ uᵢ·uⱼ ≥ 0` for all signs σ.
//! * Max-DiCut: `uᵢ = wᵢ`, objective `Σ a_ij (w₀+wᵢ)·(w₀−wⱼ)/4` and the ℓ₂²
//!   triangle inequalities on `{w₀, wᵢ, wⱼ}` for every arc.
//!
//! Because every variable is a unit vector the norm constraints hold exactly
//! (rows are renormalized after each step); inequalities are handled by an
//! augmented Lagrangian.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{Clause, Edge, ProblemInstance};

/// Which relaxation a model or solution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    MaxCut,
    Max2Sat,
    DiCut,
}

/// Affine function `constant + Σ coef·⟨u_a, u_b⟩` of the Gram matrix.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GramForm {
    pub constant: f64,
    /// `(a, b, coef)` with `a ≠ b`.
    pub terms: Vec<(usize, usize, f64)>,
}

impl GramForm {
    fn push(&mut self, a: usize, b: usize, coef: f64) {
        if a == b {
            self.constant += coef;
        } else if coef != 0.0 {
            self.terms.push((a, b, coef));
        }
    }

    /// Value at the unit vectors `u` (rows of length `r`).
    pub fn eval(&self, u: &[f64], r: usize) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|&(a, b, c)| c * dot(&u[a * r..(a + 1) * r], &u[b * r..(b + 1) * r]))
                .sum::<f64>()
    }

    /// Adds `scale · ∇` of this form to `grad`.
    fn add_gradient(&self, u: &[f64], r: usize, scale: f64, grad: &mut [f64]) {
        for &(a, b, c) in &self.terms {
            let k = scale * c;
            for t in 0..r {
                grad[a * r + t] += k * u[b * r + t];
                grad[b * r + t] += k * u[a * r + t];
            }
        }
    }
}

fn dot(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| a * b).sum()
}

/// A relaxation over unit vectors `u₀..uₙ`: maximize `objective` subject to
/// every form in `inequalities` being nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpModel {
    pub kind: ProblemKind,
    /// Number of problem variables; the model has `n + 1` vectors.
    pub n: usize,
    pub objective: GramForm,
    pub inequalities: Vec<GramForm>,
}

impl SdpModel {
    /// Default factorization rank `min(n+1, ⌈√(2n)⌉ + 1)`.
    pub fn default_rank(&self) -> usize {
        let n = self.n.max(1);
        let r = ((2.0 * n as f64).sqrt().ceil() as usize) + 1;
        r.min(n + 1).max(2)
    }
}

fn max2sat_clause_terms(clause: &Clause, objective: &mut GramForm, cons: &mut Vec<GramForm>) {
    let [l1, l2] = clause.lits;
    let (i, j) = (l1.var + 1, l2.var + 1);
    let (s1, s2) = (l1.sign(), l2.sign());
    let w = clause.weight;
    // 1 − v_ℓ₁·v_ℓ₂ with v_ℓ = (u₀ + s uᵢ)/2.
    objective.constant += 0.75 * w;
    objective.push(0, i, -0.25 * w * s1);
    objective.push(0, j, -0.25 * w * s2);
    objective.push(i, j, -0.25 * w * s1 * s2);
    if i != j {
        for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let mut g = GramForm {
                constant: 1.0,
                terms: Vec::new(),
            };
            g.push(0, i, a);
            g.push(0, j, b);
            g.push(i, j, a * b);
            cons.push(g);
        }
    }
}

fn dicut_arc_terms(arc: &Edge, objective: &mut GramForm, cons: &mut Vec<GramForm>) {
    let (i, j, w) = (arc.i + 1, arc.j + 1, arc.weight);
    // (w₀ + wᵢ)·(w₀ − wⱼ)/4 = (1 + w₀·wᵢ − w₀·wⱼ − wᵢ·wⱼ)/4
    objective.constant += 0.25 * w;
    objective.push(0, i, 0.25 * w);
    objective.push(0, j, -0.25 * w);
    objective.push(i, j, -0.25 * w);
    // ‖x−y‖² + ‖y−z‖² ≥ ‖x−z‖²  ⇔  1 − x·y − y·z + x·z ≥ 0, middle y varies.
    for (x, y, z) in [(i, 0, j), (0, i, j), (0, j, i)] {
        let mut g = GramForm {
            constant: 1.0,
            terms: Vec::new(),
        };
        g.push(x, y, -1.0);
        g.push(y, z, -1.0);
        g.push(x, z, 1.0);
        cons.push(g);
    }
}

/// Assembles the vector relaxation of an instance.
pub fn build_relaxation(instance: &ProblemInstance) -> SdpModel {
    let mut objective = GramForm::default();
    let mut inequalities = Vec::new();
    let kind = match instance {
        ProblemInstance::MaxCut(g) => {
            for e in &g.edges {
                objective.constant += 0.5 * e.weight;
                objective.push(e.i + 1, e.j + 1, -0.5 * e.weight);
            }
            ProblemKind::MaxCut
        }
        ProblemInstance::Max2Sat(f) => {
            for c in &f.clauses {
                max2sat_clause_terms(c, &mut objective, &mut inequalities);
            }
            ProblemKind::Max2Sat
        }
        ProblemInstance::DiCut(g) => {
            for a in &g.arcs {
                dicut_arc_terms(a, &mut objective, &mut inequalities);
            }
            ProblemKind::DiCut
        }
    };
    SdpModel {
        kind,
        n: instance.n(),
        objective,
        inequalities,
    }
}

/// Options of the low-rank solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Cap on inner gradient iterations per restart.
    pub max_iters: usize,
    /// Tolerance on constraint violation and on the Riemannian gradient.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: 50_000,
            tol: 1e-7,
            restarts: 5,
            seed: 0,
        }
    }
}

/// A solved relaxation. `vectors` holds rows `v₀..vₙ` in the problem's own
/// convention: for Max-Cut `vᵢ = wᵢ` (unit) and `v₀` is a unit vector
/// orthogonal to all of them; for Max-2SAT and Max-DiCut `v₀·vᵢ = ‖vᵢ‖²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub kind: ProblemKind,
    pub vectors: Vec<Vec<f64>>,
    pub objective: f64,
    pub max_violation: f64,
    /// Largest row norm of the Riemannian gradient of the Lagrangian.
    pub gradient_norm: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn n(&self) -> usize {
        self.vectors.len() - 1
    }

    /// The unit vectors `u₀..uₙ` of the internal parameterization.
    pub fn unit_vectors(&self) -> Vec<Vec<f64>> {
        match self.kind {
            ProblemKind::MaxCut => self.vectors.clone(),
            ProblemKind::Max2Sat | ProblemKind::DiCut => {
                let v0 = &self.vectors[0];
                let mut out = vec![v0.clone()];
                for v in &self.vectors[1..] {
                    out.push(v.iter().zip(v0).map(|(a, b)| 2.0 * a - b).collect());
                }
                out
            }
        }
    }
}

/// Internal state of one restart.
struct Run {
    u: Vec<f64>,
    objective: f64,
    violation: f64,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
}

struct Lagrangian<'a> {
    model: &'a SdpModel,
    r: usize,
    lambda: Vec<f64>,
    mu: f64,
}

impl Lagrangian<'_> {
    fn value(&self, u: &[f64]) -> f64 {
        let mut v = self.model.objective.eval(u, self.r);
        for (g, &l) in self.model.inequalities.iter().zip(&self.lambda) {
            let m = (l - self.mu * g.eval(u, self.r)).max(0.0);
            v -= (m * m - l * l) / (2.0 * self.mu);
        }
        v
    }

    /// Riemannian gradient (projected onto the tangent spaces of the spheres).
    fn gradient(&self, u: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        self.model.objective.add_gradient(u, self.r, 1.0, grad);
        for (g, &l) in self.model.inequalities.iter().zip(&self.lambda) {
            let m = (l - self.mu * g.eval(u, self.r)).max(0.0);
            if m > 0.0 {
                g.add_gradient(u, self.r, m, grad);
            }
        }
        let r = self.r;
        for a in 0..u.len() / r {
            let row = a * r..(a + 1) * r;
            let p = dot(&grad[row.clone()], &u[row.clone()]);
            for t in row {
                grad[t] -= p * u[t];
            }
        }
    }
}

fn row_norm_max(g: &[f64], r: usize) -> f64 {
    g.chunks(r)
        .map(|row| dot(row, row).sqrt())
        .fold(0.0, f64::max)
}

fn normalize_rows(u: &mut [f64], r: usize) {
    for row in u.chunks_mut(r) {
        let nrm = dot(row, row).sqrt();
        if nrm > 0.0 {
            row.iter_mut().for_each(|x| *x /= nrm);
        } else {
            row[0] = 1.0;
        }
    }
}

/// Riemannian gradient ascent with Barzilai–Borwein steps and Armijo
/// backtracking. Returns the final gradient norm and iteration count.
fn ascend(lag: &Lagrangian, u: &mut Vec<f64>, tol: f64, budget: usize) -> (f64, usize) {
    let r = lag.r;
    let mut grad = vec![0.0; u.len()];
    let mut prev_u = u.clone();
    let mut prev_g = vec![0.0; u.len()];
    let mut trial = vec![0.0; u.len()];
    let mut step = 0.1;
    let mut value = lag.value(u);
    lag.gradient(u, &mut grad);
    let mut it = 0;
    while it < budget {
        let gnorm = row_norm_max(&grad, r);
        if gnorm <= tol {
            return (gnorm, it);
        }
        let g2 = dot(&grad, &grad);
        loop {
            for k in 0..u.len() {
                trial[k] = u[k] + step * grad[k];
            }
            normalize_rows(&mut trial, r);
            let tv = lag.value(&trial);
            if tv >= value + 1e-4 * step * g2 {
                value = tv;
                break;
            }
            if step < 1e-14 {
                // No representable ascent left: the gradient is at the
                // noise floor of the Lagrangian's value.
                return (gnorm, it);
            }
            step *= 0.5;
        }
        prev_u.copy_from_slice(u);
        prev_g.copy_from_slice(&grad);
        u.copy_from_slice(&trial);
        lag.gradient(u, &mut grad);
        // BB step for ascent: s·s / |s·y| with y = g_new − g_old.
        let mut ss = 0.0;
        let mut sy = 0.0;
        for k in 0..u.len() {
            let s = u[k] - prev_u[k];
            let y = grad[k] - prev_g[k];
            ss += s * s;
            sy += s * y;
        }
        step = if sy.abs() > 1e-300 {
            (ss / sy.abs()).clamp(1e-6, 1e3)
        } else {
            (2.0 * step).min(1e3)
        };
        it += 1;
    }
    (row_norm_max(&grad, r), it)
}

fn max_violation(model: &SdpModel, u: &[f64], r: usize) -> f64 {
    model
        .inequalities
        .iter()
        .map(|g| (-g.eval(u, r)).max(0.0))
        .fold(0.0, f64::max)
}

fn run_restart(model: &SdpModel, r: usize, opts: &SolverOptions, seed: u64) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = model.n + 1;
    let mut u: Vec<f64> = (0..count * r).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize_rows(&mut u, r);
    let mut lag = Lagrangian {
        model,
        r,
        lambda: vec![0.0; model.inequalities.len()],
        mu: 10.0,
    };
    let scale = 1.0 + model.objective.terms.iter().map(|t| t.2.abs()).sum::<f64>();
    let grad_tol = opts.tol * scale.sqrt();
    let mut iterations = 0;
    let mut prev_violation = f64::INFINITY;
    let mut gradient_norm = f64::INFINITY;
    let mut violation = f64::INFINITY;
    // Inexact inner solves: loose gradient tolerance while the multipliers
    // are far from settled, tightening geometrically to `grad_tol`.
    let mut inner_tol = if model.inequalities.is_empty() { grad_tol } else { 1e-2 * scale.sqrt() };
    for _outer in 0..60 {
        let remaining = opts.max_iters.saturating_sub(iterations);
        if remaining == 0 {
            break;
        }
        let (gn, it) = ascend(&lag, &mut u, inner_tol.max(grad_tol), remaining);
        iterations += it;
        gradient_norm = gn;
        violation = max_violation(model, &u, r);
        if model.inequalities.is_empty() {
            break;
        }
        let mut multipliers_settled = true;
        for (g, l) in model.inequalities.iter().zip(lag.lambda.iter_mut()) {
            let new = (*l - lag.mu * g.eval(&u, r)).max(0.0);
            if (new - *l).abs() > opts.tol * (1.0 + l.abs()) {
                multipliers_settled = false;
            }
            *l = new;
        }
        if violation <= opts.tol && gradient_norm <= grad_tol && multipliers_settled {
            break;
        }
        if violation > opts.tol && violation > 0.25 * prev_violation {
            lag.mu = (lag.mu * 10.0).min(1e7);
        }
        inner_tol *= 0.1;
        prev_violation = violation;
    }
    let objective = model.objective.eval(&u, r);
    let converged = violation <= opts.tol.max(1e-9) * 10.0 && gradient_norm <= 1e-4 * scale.sqrt();
    Run {
        u,
        objective,
        violation,
        gradient_norm,
        iterations,
        converged,
    }
}

fn to_solution(model: &SdpModel, run: &Run, r: usize) -> SdpSolution {
    let rows: Vec<&[f64]> = run.u.chunks(r).collect();
    let vectors = match model.kind {
        ProblemKind::MaxCut => {
            // Pad with one extra coordinate so v₀ ⟂ wᵢ for every i.
            let mut v = vec![vec![0.0; r + 1]];
            v[0][r] = 1.0;
            for row in &rows[1..] {
                let mut w = row.to_vec();
                w.push(0.0);
                v.push(w);
            }
            v
        }
        ProblemKind::Max2Sat | ProblemKind::DiCut => {
            let u0 = rows[0];
            let mut v = vec![u0.to_vec()];
            for row in &rows[1..] {
                v.push(row.iter().zip(u0).map(|(a, b)| 0.5 * (a + b)).collect());
            }
            v
        }
    };
    SdpSolution {
        kind: model.kind,
        vectors,
        objective: run.objective,
        max_violation: run.violation,
        gradient_norm: run.gradient_norm,
        iterations: run.iterations,
    }
}

/// Solves the relaxation by local optimization over a rank-`rank`
/// factorization, keeping the best converged restart. Deterministic given
/// `opts.seed`.
pub fn solve_low_rank(model: &SdpModel, rank: usize, opts: &SolverOptions) -> Result<SdpSolution> {
    if rank < 2 {
        return Err(Error::domain(format!("rank must be at least 2, got {rank}")));
    }
    let restarts = opts.restarts.max(1);
    let mut best: Option<Run> = None;
    let mut best_any: Option<Run> = None;
    for k in 0..restarts {
        let seed = opts.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64);
        let run = run_restart(model, rank, opts, seed);
        let better = |cur: &Option<Run>, run: &Run| match cur {
            None => true,
            Some(b) => run.objective > b.objective,
        };
        if run.converged {
            if better(&best, &run) {
                best = Some(run);
            }
        } else if best_any
            .as_ref()
            .map_or(true, |b| run.violation < b.violation)
        {
            best_any = Some(run);
        }
    }
    match best {
        Some(run) => Ok(to_solution(model, &run, rank)),
        None => {
            let run = best_any.expect("at least one restart ran");
            Err(Error::NoConvergence {
                msg: format!(
                    "no restart converged (violation {:e}, gradient {:e})",
                    run.violation, run.gradient_norm
                ),
                best: Box::new(to_solution(model, &run, rank)),
            })
        }
    }
}

/// Marginals and orthogonal directions of a solution:
/// `vᵢ = xᵢ v₀ + √(xᵢ − xᵢ²) ŵᵢ`.
///
/// For Max-Cut the decomposition is of the embedded vectors
/// `(v₀ + wᵢ)/2`, i.e. `xᵢ = ½` and `ŵᵢ = wᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub kind: ProblemKind,
    /// Marginals `xᵢ = v₀·vᵢ`; for Max-2SAT the probability that variable
    /// `i` is *false*.
    pub x: Vec<f64>,
    /// Unit direction `ŵᵢ ⟂ v₀`, or `None` when `xᵢ ∈ {0, 1}` (fixed).
    pub directions: Vec<Option<Vec<f64>>>,
}

/// Threshold on `xᵢ(1 − xᵢ)` below which a coordinate is declared fixed.
pub const FIXED_MARGINAL_TOL: f64 = 1e-12;

/// Splits every vector into its component along `v₀` and a unit direction
/// orthogonal to `v₀`.
pub fn decompose(solution: &SdpSolution) -> Decomposition {
    let v0 = &solution.vectors[0];
    let mut x = Vec::with_capacity(solution.n());
    let mut directions = Vec::with_capacity(solution.n());
    for v in &solution.vectors[1..] {
        if solution.kind == ProblemKind::MaxCut {
            x.push(0.5);
            directions.push(Some(v.clone()));
            continue;
        }
        let xi = dot(v0, v).clamp(0.0, 1.0);
        if xi * (1.0 - xi) < FIXED_MARGINAL_TOL {
            x.push(xi.round());
            directions.push(None);
            continue;
        }
        let mut w: Vec<f64> = v.iter().zip(v0).map(|(a, b)| a - xi * b).collect();
        let nrm = dot(&w, &w).sqrt();
        w.iter_mut().for_each(|t| *t /= nrm);
        x.push(xi);
        directions.push(Some(w));
    }
    Decomposition {
        kind: solution.kind,
        x,
        directions,
    }
}

impl Decomposition {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `cos θᵢⱼ = ŵᵢ·ŵⱼ`, or `None` if either coordinate is fixed.
    pub fn cos_theta(&self, i: usize, j: usize) -> Option<f64> {
        match (&self.directions[i], &self.directions[j]) {
            (Some(a), Some(b)) => Some(dot(a, b).clamp(-1.0, 1.0)),
            _ => None,
        }
    }

    /// Angle `θᵢⱼ ∈ [0, π]`; `π/2` by convention when a coordinate is fixed
    /// (the angle then does not enter any formula).
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        self.cos_theta(i, j)
            .map_or(std::f64::consts::FRAC_PI_2, f64::acos)
    }

    /// Correlation matrix `Wᵢⱼ = ŵᵢ·ŵⱼ` (row-major `n × n`); rows and columns
    /// of fixed coordinates are zero.
    pub fn correlation_matrix(&self) -> Vec<f64> {
        let n = self.n();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if let Some(c) = self.cos_theta(i, j) {
                    w[i * n + j] = if i == j { 1.0 } else { c };
                }
            }
        }
        w
    }

    /// Reconstructs `vᵢ = xᵢ v₀ + √(xᵢ − xᵢ²) ŵᵢ` given `v₀`.
    pub fn reconstruct(&self, v0: &[f64], i: usize) -> Vec<f64> {
        let xi = self.x[i];
        let s = (xi - xi * xi).max(0.0).sqrt();
        match &self.directions[i] {
            Some(w) => v0.iter().zip(w).map(|(a, b)| xi * a + s * b).collect(),
            None => v0.iter().map(|a| xi * a).collect(),
        }
    }
}

/// Problems whose analysis is driven by pairwise configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairProblem {
    MaxCut,
    Max2Sat,
}

/// Pair configuration `(xᵢ, xⱼ, θ)`.
///
/// For Max-2SAT the marginals are the probabilities that the two literals
/// are *true*; for Max-Cut they are the probabilities of lying in `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub xi: f64,
    pub xj: f64,
    pub theta: f64,
    pub problem: PairProblem,
}

impl Configuration {
    pub fn new(problem: PairProblem, xi: f64, xj: f64, theta: f64) -> Self {
        Configuration {
            xi,
            xj,
            theta,
            problem,
        }
    }
}

fn is_boundary(x: f64) -> bool {
    x <= 0.0 || x >= 1.0
}

/// Feasibility of a configuration under the triangle constraints:
/// `cos θ ≥ −√(xᵢxⱼ/((1−xᵢ)(1−xⱼ)))` and `cos θ ≥ −√((1−xᵢ)(1−xⱼ)/(xᵢxⱼ))`.
///
/// A configuration with a boundary marginal (0 or 1) is always feasible:
/// its orthogonal component vanishes, so θ does not enter the vectors.
pub fn check_triangle(config: &Configuration) -> bool {
    check_triangle_tol(config, 0.0)
}

/// [`check_triangle`] with an absolute slack on `cos θ` (used for solver
/// output, which satisfies constraints only within tolerance).
pub fn check_triangle_tol(config: &Configuration, slack: f64) -> bool {
    let (x, y) = (config.xi, config.xj);
    if is_boundary(x) || is_boundary(y) {
        return true;
    }
    let c = config.theta.cos();
    let b1 = -(x * y / ((1.0 - x) * (1.0 - y))).sqrt();
    let b2 = -((1.0 - x) * (1.0 - y) / (x * y)).sqrt();
    c + slack >= b1 && c + slack >= b2
}

/// [`check_triangle`] plus the upper bounds implied by `vᵢ·v₀ ≥ vᵢ·vⱼ`:
/// `cos θ ≤ √(xᵢ(1−xⱼ)/((1−xᵢ)xⱼ))` and `cos θ ≤ √((1−xᵢ)xⱼ/(xᵢ(1−xⱼ)))`.
pub fn check_triangle_full(config: &Configuration) -> bool {
    if !check_triangle(config) {
        return false;
    }
    let (x, y) = (config.xi, config.xj);
    if is_boundary(x) || is_boundary(y) {
        return true;
    }
    let c = config.theta.cos();
    let u1 = (x * (1.0 - y) / ((1.0 - x) * y)).sqrt();
    let u2 = ((1.0 - x) * y / (x * (1.0 - y))).sqrt();
    c <= u1 && c <= u2
}

/// SDP contribution of one pair:
/// Max-Cut `x+y−2xy−2√((x−x²)(y−y²)) cos θ`;
/// Max-2SAT `x+y−xy−√((x−x²)(y−y²)) cos θ` (marginals of truth).
pub fn sdp_clause_value(config: &Configuration) -> f64 {
    let (x, y) = (config.xi, config.xj);
    let s = ((x - x * x).max(0.0) * (y - y * y).max(0.0)).sqrt();
    let c = config.theta.cos();
    match config.problem {
        PairProblem::MaxCut => x + y - 2.0 * x * y - 2.0 * s * c,
        PairProblem::Max2Sat => x + y - x * y - s * c,
    }
}

/// Configuration of a Max-Cut edge in a decomposed solution.
pub fn edge_configuration(d: &Decomposition, edge: &Edge) -> Configuration {
    Configuration::new(PairProblem::MaxCut, d.x[edge.i], d.x[edge.j], d.theta(edge.i, edge.j))
}

/// Configuration of a Max-2SAT clause in a decomposed solution, expressed in
/// the literals' probabilities of being true.
pub fn clause_configuration(d: &Decomposition, clause: &Clause) -> Configuration {
    let [l1, l2] = clause.lits;
    // x is the probability of *false*; a positive literal is true with
    // probability 1 − x, a negated one with probability x.
    let truth = |l: crate::instances::Literal| {
        if l.negated {
            d.x[l.var]
        } else {
            1.0 - d.x[l.var]
        }
    };
    let theta = match d.cos_theta(l1.var, l2.var) {
        Some(c) => {
            let c = if l1.var == l2.var { 1.0 } else { c };
            (l1.sign() * l2.sign() * c).clamp(-1.0, 1.0).acos()
        }
        None => std::f64::consts::FRAC_PI_2,
    };
    Configuration::new(PairProblem::Max2Sat, truth(l1), truth(l2), theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{parse_cnf2, parse_digraph, parse_graph, Literal, Max2SatInstance};
    use std::f64::consts::PI;

    fn solve(inst: &ProblemInstance) -> SdpSolution {
        let model = build_relaxation(inst);
        solve_low_rank(&model, model.default_rank(), &SolverOptions::default()).unwrap()
    }

    #[test]
    fn relaxation_shapes() {
        let k2 = ProblemInstance::MaxCut(parse_graph("2 1\n0 1 1.0").unwrap());
        let m = build_relaxation(&k2);
        assert_eq!(m.objective.constant, 0.5);
        assert_eq!(m.objective.terms, vec![(1, 2, -0.5)]);
        assert!(m.inequalities.is_empty());

        let c = ProblemInstance::Max2Sat(parse_cnf2("p cnf 2 1\n1 2 0").unwrap());
        let m = build_relaxation(&c);
        assert_eq!(m.inequalities.len(), 4);
        let d = ProblemInstance::DiCut(parse_digraph("2 1\n0 1").unwrap());
        assert_eq!(build_relaxation(&d).inequalities.len(), 3);
    }

    #[test]
    fn max2sat_objective_matches_vector_formula() {
        // Evaluate 1 − v_ℓ₁·v_ℓ₂ directly on random unit vectors.
        let f = Max2SatInstance {
            n: 2,
            clauses: vec![Clause {
                lits: [Literal::neg(0), Literal::pos(1)],
                weight: 2.0,
            }],
        };
        let m = build_relaxation(&ProblemInstance::Max2Sat(f));
        let r = 3;
        let mut u = vec![0.3, -0.2, 0.9, 0.5, 0.5, -0.1, -0.7, 0.1, 0.2];
        normalize_rows(&mut u, r);
        let (u0, u1, u2) = (&u[0..3], &u[3..6], &u[6..9]);
        let vl1: Vec<f64> = (0..3).map(|t| 0.5 * (u0[t] - u1[t])).collect();
        let vl2: Vec<f64> = (0..3).map(|t| 0.5 * (u0[t] + u2[t])).collect();
        let want = 2.0 * (1.0 - dot(&vl1, &vl2));
        assert!((m.objective.eval(&u, r) - want).abs() < 1e-14);
    }

    #[test]
    fn k2_is_antipodal() {
        let s = solve(&ProblemInstance::MaxCut(parse_graph("2 1\n0 1 1.0").unwrap()));
        assert!((s.objective - 1.0).abs() < 1e-6, "{}", s.objective);
        let c = dot(&s.vectors[1], &s.vectors[2]);
        assert!((c + 1.0).abs() < 1e-6);
    }

    #[test]
    fn c5_matches_closed_form() {
        let s = solve(&ProblemInstance::MaxCut(
            parse_graph("5 5\n0 1\n1 2\n2 3\n3 4\n4 0").unwrap(),
        ));
        let want = 2.5 * (1.0 - (4.0 * PI / 5.0).cos());
        assert!((s.objective - want).abs() < 1e-3, "{} vs {want}", s.objective);
    }

    #[test]
    fn single_clause_is_fully_satisfied() {
        let s = solve(&ProblemInstance::Max2Sat(parse_cnf2("p cnf 2 1\n1 2 0").unwrap()));
        assert!((s.objective - 1.0).abs() < 1e-6, "{}", s.objective);
        assert!(s.max_violation <= 1e-6);
    }

    #[test]
    fn solver_is_deterministic() {
        let inst = ProblemInstance::MaxCut(parse_graph("4 5\n0 1\n1 2\n2 3\n3 0\n0 2").unwrap());
        let a = solve(&inst);
        let b = solve(&inst);
        assert_eq!(a, b);
    }

    #[test]
    fn rank_below_two_is_rejected() {
        let m = build_relaxation(&ProblemInstance::MaxCut(parse_graph("2 1\n0 1").unwrap()));
        assert!(solve_low_rank(&m, 1, &SolverOptions::default()).is_err());
    }

    #[test]
    fn decompose_examples() {
        let v0 = vec![1.0, 0.0, 0.0];
        let sol = |v1: Vec<f64>| SdpSolution {
            kind: ProblemKind::Max2Sat,
            vectors: vec![v0.clone(), v1],
            objective: 0.0,
            max_violation: 0.0,
            gradient_norm: 0.0,
            iterations: 0,
        };
        let d = decompose(&sol(v0.clone()));
        assert_eq!(d.x[0], 1.0);
        assert!(d.directions[0].is_none());
        let d = decompose(&sol(vec![0.0, 0.0, 0.0]));
        assert_eq!(d.x[0], 0.0);
        assert!(d.directions[0].is_none());
        let d = decompose(&sol(vec![0.5, 0.5, 0.0]));
        let w = d.directions[0].as_ref().unwrap();
        assert!((dot(w, w) - 1.0).abs() < 1e-12 && dot(w, &v0).abs() < 1e-12);
        let rec = d.reconstruct(&v0, 0);
        assert!((rec[0] - 0.5).abs() < 1e-12 && (rec[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn triangle_examples() {
        let cfg = |x, y, t| Configuration::new(PairProblem::Max2Sat, x, y, t);
        for k in 0..=20 {
            let t = PI * k as f64 / 20.0;
            assert!(check_triangle(&cfg(0.5, 0.5, t)));
            // (0.1, 0.1): feasible iff cos θ ≥ −1/9
            assert_eq!(check_triangle(&cfg(0.1, 0.1, t)), t.cos() >= -1.0 / 9.0);
        }
        assert!(check_triangle(&cfg(0.5, 0.5, PI)));
        assert!(check_triangle(&cfg(0.0, 0.0, PI)));
    }

    #[test]
    fn clause_value_examples() {
        let mc = |x, y, t| sdp_clause_value(&Configuration::new(PairProblem::MaxCut, x, y, t));
        assert!((mc(0.5, 0.5, PI) - 1.0).abs() < 1e-15);
        assert!((mc(0.5, 0.5, PI / 2.0) - 0.5).abs() < 1e-15);
        for &(y, t) in &[(0.3, 1.0), (0.9, 3.0), (0.0, 0.0)] {
            let v = sdp_clause_value(&Configuration::new(PairProblem::Max2Sat, 1.0, y, t));
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn clause_configuration_reproduces_objective() {
        let f = parse_cnf2("p cnf 3 3\n1 -2 0\n-1 3 0\n2 3 0").unwrap();
        let inst = ProblemInstance::Max2Sat(f.clone());
        let s = solve(&inst);
        let d = decompose(&s);
        let total: f64 = f
            .clauses
            .iter()
            .map(|c| sdp_clause_value(&clause_configuration(&d, c)))
            .sum();
        assert!((total - s.objective).abs() < 1e-6, "{total} vs {}", s.objective);
    }
}
