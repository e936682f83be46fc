//! Worst-case configuration search: the rounding probability of every
//! feasible configuration on a grid is divided by its SDP contribution and
//! the minimum is reported.
//!
//! * Pair problems (Max-Cut, Max-2SAT): configurations `(xᵢ, xⱼ, θ)` with
//!   marginals on `{kδ}` and angles on `{kδ ≤ π}`; one PDE solve per angle
//!   serves every marginal pair of that angle.
//! * Max-Cut at half marginals: a sweep over θ of center values.
//! * Max-DiCut: angle triplets `(θ₀ᵢ, θ₀ⱼ, θᵢⱼ)`, forward-edge probability
//!   `½(p₀ⱼ + pᵢⱼ − p₀ᵢ)` from pairwise separation probabilities.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::{estimate_pair_separation, WalkKind, WalkParams};
use crate::error::{Error, Result};
use crate::pde::{maxcut_center_prob, solve_dirichlet, Boundary, DirichletProblem, DEFAULT_GRID_N};
use crate::sdp::{check_triangle, check_triangle_full, sdp_clause_value, Configuration, PairProblem};
use crate::specfun::separation_prob_exact;

/// Default lower limit on the SDP value of a reported configuration.
pub const DEFAULT_SDP_CUTOFF: f64 = 1e-3;

/// How rounding probabilities are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioMethod {
    Pde,
    MonteCarlo,
}

/// Knobs shared by the searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioOptions {
    pub grid_n: usize,
    pub sdp_cutoff: f64,
    /// Monte Carlo trials per configuration.
    pub trials: u64,
    pub seed: u64,
    /// Walk discretization for the Monte Carlo route (its `kind` is
    /// overridden by the search's kind).
    pub walk: WalkParams,
}

impl Default for RatioOptions {
    fn default() -> Self {
        RatioOptions {
            grid_n: DEFAULT_GRID_N,
            sdp_cutoff: DEFAULT_SDP_CUTOFF,
            trials: 100_000,
            seed: 0,
            walk: WalkParams::default(),
        }
    }
}

/// One evaluated configuration. `coords` are `(xᵢ, xⱼ, θ)` for pair
/// problems and `(θ₀ᵢ, θ₀ⱼ, θᵢⱼ)` for Max-DiCut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub coords: [f64; 3],
    pub sdp: f64,
    pub round: f64,
    pub ratio: f64,
}

/// Result of a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub problem: String,
    pub coord_names: [String; 3],
    pub kind: WalkKind,
    pub method: RatioMethod,
    /// Grid step (marginals and angles, or angles only).
    pub delta: f64,
    pub sdp_cutoff: f64,
    pub min_ratio: f64,
    pub argmin: RatioRow,
    /// Number of feasible grid configurations, including those skipped for
    /// a small SDP value.
    pub feasible_count: usize,
    pub below_cutoff: usize,
    pub rows: Vec<RatioRow>,
}

impl RatioReport {
    fn build(
        problem: &str,
        names: [&str; 3],
        kind: WalkKind,
        method: RatioMethod,
        delta: f64,
        cutoff: f64,
        feasible_count: usize,
        rows: Vec<RatioRow>,
    ) -> Result<Self> {
        let argmin = rows
            .iter()
            .copied()
            .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .ok_or_else(|| {
                Error::EmptyFeasibleSet(format!(
                    "no feasible {problem} configuration has SDP value ≥ {cutoff}"
                ))
            })?;
        Ok(RatioReport {
            problem: problem.to_string(),
            coord_names: names.map(str::to_string),
            kind,
            method,
            delta,
            sdp_cutoff: cutoff,
            min_ratio: argmin.ratio,
            argmin,
            feasible_count,
            below_cutoff: feasible_count - rows.len(),
            rows,
        })
    }

    /// CSV with header `<coords>,sdp,round,ratio`.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "{},{},{},sdp,round,ratio\n",
            self.coord_names[0], self.coord_names[1], self.coord_names[2]
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.coords[0], r.coords[1], r.coords[2], r.sdp, r.round, r.ratio
            ));
        }
        s
    }
}

/// `{kδ : 0 ≤ k, kδ ≤ hi}` computed as multiples (no accumulated drift).
pub fn grid(delta: f64, hi: f64) -> Vec<f64> {
    let count = (hi / delta + 1e-9).floor() as usize;
    (0..=count).map(|k| k as f64 * delta).collect()
}

fn validate_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!("δ must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Feasibility test used for a problem's configurations: the lower
/// (triangle) bounds for Max-2SAT, and additionally the upper bounds
/// `vᵢ·v₀ ≥ vᵢ·vⱼ` for Max-Cut with general marginals.
pub fn is_feasible(config: &Configuration) -> bool {
    match config.problem {
        PairProblem::Max2Sat => check_triangle(config),
        PairProblem::MaxCut => check_triangle_full(config),
    }
}

/// All feasible configurations on the δ-grid, ordered by θ, then `xᵢ`,
/// then `xⱼ`.
pub fn enumerate_configs(problem: PairProblem, delta: f64) -> Result<Vec<Configuration>> {
    validate_delta(delta)?;
    let s = grid(delta, 1.0);
    let r = grid(delta, PI);
    let mut out = Vec::new();
    for &theta in &r {
        for &x in &s {
            for &y in &s {
                let c = Configuration::new(problem, x, y, theta);
                if is_feasible(&c) {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

fn boundary_for(problem: PairProblem) -> Boundary {
    match problem {
        PairProblem::MaxCut => Boundary::Maxcut01,
        PairProblem::Max2Sat => Boundary::Max2satTrue1,
    }
}

fn problem_name(problem: PairProblem) -> &'static str {
    match problem {
        PairProblem::MaxCut => "maxcut",
        PairProblem::Max2Sat => "max2sat",
    }
}

/// Rounding probability of one configuration: a PDE solve (queried at the
/// marginals) or a Monte Carlo estimate.
pub fn get_rounding_value(
    config: &Configuration,
    method: RatioMethod,
    kind: WalkKind,
    opts: &RatioOptions,
) -> Result<f64> {
    match method {
        RatioMethod::Pde => {
            let p = DirichletProblem::new(config.theta.cos(), kind.alpha(), boundary_for(config.problem))
                .with_grid(opts.grid_n);
            solve_dirichlet(&p)?.query(config.xi, config.xj)
        }
        RatioMethod::MonteCarlo => {
            let params = WalkParams { kind, ..opts.walk };
            Ok(estimate_pair_separation(config, &params, opts.trials, opts.seed)?.prob)
        }
    }
}

fn row(config: &Configuration, round: f64) -> RatioRow {
    let sdp = sdp_clause_value(config);
    RatioRow {
        coords: [config.xi, config.xj, config.theta],
        sdp,
        round,
        ratio: round / sdp,
    }
}

/// Minimum of rounding value over SDP value across the feasible grid.
pub fn approx_ratio(
    problem: PairProblem,
    kind: WalkKind,
    delta: f64,
    method: RatioMethod,
    opts: &RatioOptions,
) -> Result<RatioReport> {
    if !(opts.sdp_cutoff > 0.0) {
        return Err(Error::domain("sdp_cutoff must be positive"));
    }
    let configs = enumerate_configs(problem, delta)?;
    let feasible = configs.len();
    let kept: Vec<Configuration> = configs
        .into_iter()
        .filter(|c| sdp_clause_value(c) >= opts.sdp_cutoff)
        .collect();
    let rows: Vec<RatioRow> = match method {
        RatioMethod::Pde => {
            // One slice per angle, each owning its PDE solution.
            let mut slices: Vec<(f64, Vec<Configuration>)> = Vec::new();
            for c in kept {
                match slices.last_mut() {
                    Some((t, v)) if *t == c.theta => v.push(c),
                    _ => slices.push((c.theta, vec![c])),
                }
            }
            let per: Result<Vec<Vec<RatioRow>>> = slices
                .par_iter()
                .map(|(theta, cs)| {
                    let p = DirichletProblem::new(theta.cos(), kind.alpha(), boundary_for(problem))
                        .with_grid(opts.grid_n);
                    let sol = solve_dirichlet(&p)?;
                    cs.iter()
                        .map(|c| Ok(row(c, sol.query(c.xi, c.xj)?)))
                        .collect()
                })
                .collect();
            per?.into_iter().flatten().collect()
        }
        RatioMethod::MonteCarlo => {
            let params = WalkParams { kind, ..opts.walk };
            let out: Result<Vec<RatioRow>> = kept
                .par_iter()
                .enumerate()
                .map(|(k, c)| {
                    let seed = opts.seed.wrapping_add(k as u64);
                    let e = estimate_pair_separation(c, &params, opts.trials, seed)?;
                    Ok(row(c, e.prob))
                })
                .collect();
            out?
        }
    };
    RatioReport::build(
        problem_name(problem),
        ["x_i", "x_j", "theta"],
        kind,
        method,
        delta,
        opts.sdp_cutoff,
        feasible,
        rows,
    )
}

/// PDE separation probability from the center of `[−1,1]²` at each angle
/// (analytic at θ ∈ {0, π}).
pub fn center_values(alpha: f64, thetas: &[f64], grid_n: usize) -> Result<Vec<f64>> {
    thetas
        .par_iter()
        .map(|&t| maxcut_center_prob(t.min(PI), alpha, grid_n))
        .collect()
}

/// Max-Cut at half marginals: ratio `p(θ) / ((1 − cos θ)/2)` over
/// `θ ∈ {k·θ_step} ∩ (0, π]`.
pub fn maxcut_half_sweep(
    kind: WalkKind,
    theta_step: f64,
    method: RatioMethod,
    opts: &RatioOptions,
) -> Result<RatioReport> {
    if !(theta_step > 0.0) {
        return Err(Error::domain(format!("θ step must be positive, got {theta_step}")));
    }
    let thetas = grid(theta_step, PI);
    let probs: Vec<f64> = match method {
        RatioMethod::Pde => center_values(kind.alpha(), &thetas, opts.grid_n)?,
        RatioMethod::MonteCarlo => {
            let params = WalkParams { kind, ..opts.walk };
            let out: Result<Vec<f64>> = thetas
                .par_iter()
                .enumerate()
                .map(|(k, &t)| {
                    let c = Configuration::new(PairProblem::MaxCut, 0.5, 0.5, t);
                    Ok(estimate_pair_separation(&c, &params, opts.trials, opts.seed.wrapping_add(k as u64))?.prob)
                })
                .collect();
            out?
        }
    };
    half_sweep_from_values(kind, method, theta_step, &thetas, &probs, opts.sdp_cutoff)
}

/// Builds the half-marginal report from precomputed center values.
pub fn half_sweep_from_values(
    kind: WalkKind,
    method: RatioMethod,
    theta_step: f64,
    thetas: &[f64],
    probs: &[f64],
    cutoff: f64,
) -> Result<RatioReport> {
    let rows: Vec<RatioRow> = thetas
        .iter()
        .zip(probs)
        .filter_map(|(&t, &p)| {
            let sdp = 0.5 * (1.0 - t.cos());
            (sdp >= cutoff).then_some(RatioRow {
                coords: [0.5, 0.5, t],
                sdp,
                round: p,
                ratio: p / sdp,
            })
        })
        .collect();
    RatioReport::build(
        "maxcut_half",
        ["x_i", "x_j", "theta"],
        kind,
        method,
        theta_step,
        cutoff,
        thetas.len(),
        rows,
    )
}

/// Probability of a three-way sign pattern from the three pairwise pattern
/// probabilities: `½(p_ij + p_ik + p_jk − ½)`.
pub fn triple_prob(p_ij: f64, p_ik: f64, p_jk: f64) -> f64 {
    0.5 * (p_ij + p_ik + p_jk - 0.5)
}

/// Probability that the arc `i → j` is a forward cut arc given pairwise
/// separation probabilities: `½(p₀ⱼ + pᵢⱼ − p₀ᵢ)`.
pub fn forward_edge_prob(p0i: f64, p0j: f64, pij: f64) -> f64 {
    0.5 * (p0j + pij - p0i)
}

/// SDP contribution of an arc: `¼(1 − cos θ₀ⱼ + cos θ₀ᵢ − cos θᵢⱼ)`.
pub fn dicut_sdp_value(t0i: f64, t0j: f64, tij: f64) -> f64 {
    0.25 * (1.0 - t0j.cos() + t0i.cos() - tij.cos())
}

/// Feasibility of an angle triplet among three unit vectors: the ℓ₂²
/// triangle inequalities `1 − cos a − cos b + cos c ≥ 0` with each vector
/// in the middle, and realizability (the Gram matrix is PSD, i.e. the
/// spherical triangle inequalities hold).
pub fn dicut_feasible(t0i: f64, t0j: f64, tij: f64) -> bool {
    const SLACK: f64 = 1e-12;
    let (a, b, c) = (t0i.cos(), t0j.cos(), tij.cos());
    let l2 = 1.0 - a - c + b >= -SLACK // w₀ – wᵢ – wⱼ with wᵢ in the middle
        && 1.0 - b - c + a >= -SLACK // wⱼ in the middle
        && 1.0 - a - b + c >= -SLACK; // w₀ in the middle
    let det = 1.0 + 2.0 * a * b * c - a * a - b * b - c * c;
    l2 && det >= -SLACK
}

/// Pairwise separation probabilities from the center on an angle grid:
/// exact formula (basic walk) or PDE center values (slowdown).
pub fn dicut_pair_table(kind: WalkKind, thetas: &[f64], grid_n: usize) -> Result<Vec<f64>> {
    match kind {
        WalkKind::Basic => thetas
            .iter()
            .map(|&t| {
                if t <= 0.0 {
                    Ok(0.0)
                } else if t >= PI {
                    Ok(1.0)
                } else {
                    Ok(separation_prob_exact(t)?.value())
                }
            })
            .collect(),
        WalkKind::Slowdown(a) => center_values(a, thetas, grid_n),
    }
}

/// Max-DiCut ratio over feasible angle triplets on the δθ-grid.
pub fn dicut_ratio(kind: WalkKind, delta_theta: f64, opts: &RatioOptions) -> Result<RatioReport> {
    if !(delta_theta > 0.0) {
        return Err(Error::domain(format!("δθ must be positive, got {delta_theta}")));
    }
    let thetas = grid(delta_theta, PI);
    let probs = dicut_pair_table(kind, &thetas, opts.grid_n)?;
    dicut_ratio_from_table(kind, delta_theta, &thetas, &probs, opts.sdp_cutoff)
}

/// [`dicut_ratio`] from a precomputed table `probs[k] = p(thetas[k])`.
pub fn dicut_ratio_from_table(
    kind: WalkKind,
    delta_theta: f64,
    thetas: &[f64],
    probs: &[f64],
    cutoff: f64,
) -> Result<RatioReport> {
    let k = thetas.len();
    let per: Vec<(usize, Vec<RatioRow>)> = (0..k)
        .into_par_iter()
        .map(|a| {
            let mut feasible = 0;
            let mut rows = Vec::new();
            for b in 0..k {
                for c in 0..k {
                    let (t0i, t0j, tij) = (thetas[a], thetas[b], thetas[c]);
                    if !dicut_feasible(t0i, t0j, tij) {
                        continue;
                    }
                    feasible += 1;
                    let sdp = dicut_sdp_value(t0i, t0j, tij);
                    if sdp < cutoff {
                        continue;
                    }
                    let round = forward_edge_prob(probs[a], probs[b], probs[c]);
                    rows.push(RatioRow {
                        coords: [t0i, t0j, tij],
                        sdp,
                        round,
                        ratio: round / sdp,
                    });
                }
            }
            (feasible, rows)
        })
        .collect();
    let feasible = per.iter().map(|p| p.0).sum();
    let rows = per.into_iter().flat_map(|p| p.1).collect();
    RatioReport::build(
        "dicut",
        ["theta_0i", "theta_0j", "theta_ij"],
        kind,
        RatioMethod::Pde,
        delta_theta,
        cutoff,
        feasible,
        rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_endpoints() {
        let g = grid(0.02, 1.0);
        assert_eq!(g.len(), 51);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(grid(0.02, PI).len(), 158);
    }

    #[test]
    fn coarse_enumeration() {
        let cs = enumerate_configs(PairProblem::Max2Sat, 0.5).unwrap();
        assert!(cs.iter().all(check_triangle));
        let has = |x: f64, y: f64, t: f64| {
            cs.iter().any(|c| c.xi == x && c.xj == y && (c.theta - t).abs() < 1e-12)
        };
        assert!(has(0.5, 0.5, 3.0));
        assert!(has(0.0, 0.0, 3.0));
        assert!(enumerate_configs(PairProblem::Max2Sat, 1.5).is_err());
    }

    #[test]
    fn triple_prob_examples() {
        assert!((triple_prob(0.25, 0.25, 0.25) - 0.125).abs() < 1e-15);
        // θ₀ᵢ = 0 makes i a copy of 0: forward probability reduces to p₀ⱼ.
        let p0j = 0.37;
        assert!((forward_edge_prob(0.0, p0j, p0j) - p0j).abs() < 1e-15);
    }

    #[test]
    fn dicut_examples() {
        let h = PI / 2.0;
        assert!(dicut_feasible(h, h, h));
        assert!((dicut_sdp_value(h, h, h) - 0.25).abs() < 1e-15);
        assert!((forward_edge_prob(0.5, 0.5, 0.5) / 0.25 - 1.0).abs() < 1e-15);
        // θ₀ᵢ = π, θ₀ⱼ = 0 forces θᵢⱼ = π, where the SDP value vanishes.
        assert!(!dicut_feasible(PI, 0.0, 2.0));
        assert!(dicut_feasible(PI, 0.0, PI));
        assert!(dicut_sdp_value(PI, 0.0, PI).abs() < 1e-15);
    }

    #[test]
    fn half_sweep_ratio_is_at_least_one_for_acute_angles() {
        let opts = RatioOptions {
            grid_n: 61,
            ..Default::default()
        };
        let r = maxcut_half_sweep(WalkKind::Basic, 0.3, RatioMethod::Pde, &opts).unwrap();
        for row in &r.rows {
            if row.coords[2] <= PI / 2.0 {
                assert!(row.round >= row.sdp - 2e-3, "{row:?}");
            }
        }
        assert_eq!(r.rows.len() + r.below_cutoff, r.feasible_count);
    }
}
