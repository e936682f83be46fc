//! Subcommand implementations. Each returns a serializable report plus a
//! CSV rendering; the caller picks the format and destination.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use sbr_core::constrained::{
    baseline_round, default_tau, disjoint_feasible_point, parse_constraints, ConstrainedCut, StoppedRounder,
};
use sbr_core::diffusion::{estimate_pair_separation, trial_rng, RoundingPlan, WalkKind, WalkParams};
use sbr_core::instances::{
    brute_force_optimum, clause_coeffs, parse_cnf2, parse_digraph, parse_graph, ProblemInstance,
};
use sbr_core::maxprinciple::{self, Candidate, CandidateForm, SuiteReport};
use sbr_core::pde::{solve_dirichlet, Boundary, DirichletProblem, DEFAULT_GRID_N};
use sbr_core::ratio::{
    approx_ratio, dicut_ratio, maxcut_half_sweep, RatioMethod, RatioOptions, RatioReport, DEFAULT_SDP_CUTOFF,
};
use sbr_core::sdp::{build_relaxation, solve_low_rank, Configuration, PairProblem, SolverOptions};
use sbr_core::specfun::{nonseparation_asymptotic, separation_prob_exact};

/// Trials are split into this many fixed chunks so results do not depend
/// on the thread count.
const CHUNKS: u64 = 64;
/// Flag thresholds for route disagreement in `prob`.
const PDE_FLAG_TOL: f64 = 2e-3;
const MC_FLAG_SIGMAS: f64 = 3.0;
/// Instances up to this size also report their exact optimum.
const BRUTE_FORCE_MAX_N: usize = 20;

/// A finished command: report, CSV rendering and overall verdict.
pub struct Outcome {
    pub json: serde_json::Value,
    pub csv: String,
    pub pass: bool,
    pub failing: Vec<String>,
}

impl Outcome {
    fn ok(report: &impl Serialize, csv: String) -> Result<Self> {
        Ok(Outcome {
            json: serde_json::to_value(report)?,
            csv,
            pass: true,
            failing: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Basic,
    Slowdown,
}

/// Walk selection shared by several subcommands.
#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    /// Walk dynamics.
    #[arg(long, value_enum, default_value = "basic")]
    pub kind: KindArg,
    /// Slowdown exponent, used with `--kind slowdown`.
    #[arg(long, default_value_t = 1.61)]
    pub alpha: f64,
    /// Walk step γ (also the absorption threshold).
    #[arg(long, default_value_t = 1e-2)]
    pub gamma: f64,
}

impl WalkArgs {
    pub fn kind(&self) -> Result<WalkKind> {
        match self.kind {
            KindArg::Basic => Ok(WalkKind::Basic),
            KindArg::Slowdown => {
                ensure!((0.0..2.0).contains(&self.alpha), "--alpha must lie in [0, 2), got {}", self.alpha);
                Ok(WalkKind::Slowdown(self.alpha))
            }
        }
    }

    pub fn params(&self) -> Result<WalkParams> {
        ensure!(self.gamma > 0.0 && self.gamma < 0.5, "--gamma must lie in (0, 0.5), got {}", self.gamma);
        Ok(WalkParams {
            step: self.gamma,
            stick_tol: self.gamma,
            ..WalkParams::with_kind(self.kind()?)
        })
    }
}

fn check_grid(grid_n: usize) -> Result<()> {
    ensure!(grid_n >= 15 && grid_n % 2 == 1, "--grid-n must be odd and at least 15, got {grid_n}");
    Ok(())
}

// ─── prob ──────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Exact,
    Pde,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct ProbArgs {
    /// Angles θ ∈ (0, π), comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "sweep")]
    pub theta: Vec<f64>,
    /// Angle sweep `lo:hi:step`.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Routes to evaluate, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "exact,pde")]
    pub routes: Vec<Route>,
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Interior grid points per axis for the PDE route.
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
    /// Monte Carlo trials per angle.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Serialize)]
struct ProbRow {
    theta: f64,
    sdp: f64,
    quadrature: Option<f64>,
    closed_form: Option<f64>,
    pde: Option<f64>,
    mc: Option<f64>,
    mc_stderr: Option<f64>,
    flags: Vec<String>,
}

#[derive(Debug, Serialize)]
struct ProbReport {
    command: &'static str,
    kind: WalkKind,
    routes: Vec<Route>,
    grid_n: usize,
    trials: u64,
    gamma: f64,
    seed: u64,
    rows: Vec<ProbRow>,
    /// Whether the reference column (exact, else PDE, else MC) is
    /// nondecreasing in θ.
    monotone: bool,
}

fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("invalid sweep component '{t}'")))
        .collect::<Result<_>>()?;
    let [lo, hi, step] = parts[..] else {
        bail!("--sweep expects lo:hi:step, got '{s}'");
    };
    ensure!(step > 0.0 && hi >= lo, "--sweep needs step > 0 and hi ≥ lo");
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| lo + k as f64 * step).collect())
}

pub fn prob(args: &ProbArgs, seed: u64) -> Result<Outcome> {
    let thetas = match (&args.sweep, args.theta.is_empty()) {
        (Some(s), _) => parse_sweep(s)?,
        (None, false) => args.theta.clone(),
        (None, true) => (1..=10).map(|k| 0.3 * k as f64).collect(),
    };
    for &t in &thetas {
        ensure!(t > 0.0 && t < PI, "θ must lie in (0, π), got {t}");
    }
    check_grid(args.grid_n)?;
    let kind = args.walk.kind()?;
    let params = args.walk.params()?;
    let alpha = kind.alpha();
    let want = |r: Route| args.routes.contains(&r);
    ensure!(
        !(want(Route::Exact) && alpha != 0.0),
        "the exact route covers the basic walk only; drop it for --kind slowdown"
    );
    let rows = thetas
        .iter()
        .enumerate()
        .map(|(k, &theta)| {
            let exact = if want(Route::Exact) { Some(separation_prob_exact(theta)?) } else { None };
            let pde = if want(Route::Pde) {
                Some(sbr_core::pde::maxcut_center_prob(theta, alpha, args.grid_n)?)
            } else {
                None
            };
            let mc = if want(Route::Mc) {
                let config = Configuration::new(PairProblem::MaxCut, 0.5, 0.5, theta);
                Some(estimate_pair_separation(&config, &params, args.trials, seed.wrapping_add(k as u64))?)
            } else {
                None
            };
            let mut flags = Vec::new();
            if let Some(e) = exact {
                if !e.consistent {
                    flags.push("closed_form".to_string());
                }
            }
            let reference = exact.map(|e| e.value()).or(pde);
            if let (Some(r), Some(p), true) = (reference, pde, exact.is_some()) {
                if (p - r).abs() > PDE_FLAG_TOL {
                    flags.push("pde".to_string());
                }
            }
            if let (Some(m), Some(r)) = (mc, reference) {
                if (m.prob - r).abs() > MC_FLAG_SIGMAS * m.stderr_floor() {
                    flags.push("mc".to_string());
                }
            }
            Ok(ProbRow {
                theta,
                sdp: 0.5 * (1.0 - theta.cos()),
                quadrature: exact.map(|e| e.quadrature),
                closed_form: exact.map(|e| e.closed_form),
                pde,
                mc: mc.map(|m| m.prob),
                mc_stderr: mc.map(|m| m.stderr),
                flags,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<f64> = rows.iter().filter_map(|r| r.quadrature.or(r.pde).or(r.mc)).collect();
    let monotone = refs.windows(2).all(|w| w[1] >= w[0]);
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut csv = String::from("theta,sdp,quadrature,closed_form,pde,mc,mc_stderr,flags\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.theta,
            r.sdp,
            opt(r.quadrature),
            opt(r.closed_form),
            opt(r.pde),
            opt(r.mc),
            opt(r.mc_stderr),
            r.flags.join(";")
        ));
    }
    let report = ProbReport {
        command: "prob",
        kind,
        routes: args.routes.clone(),
        grid_n: args.grid_n,
        trials: args.trials,
        gamma: args.walk.gamma,
        seed,
        rows,
        monotone,
    };
    Outcome::ok(&report, csv)
}

// ─── ratio ─────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatioProblem {
    /// Max-Cut over all feasible marginal pairs.
    Maxcut,
    /// Max-Cut at half marginals (angle sweep only).
    MaxcutHalf,
    Max2sat,
    Dicut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Pde,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct RatioArgs {
    #[arg(long, value_enum)]
    pub problem: RatioProblem,
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Grid step for marginals and angles.
    #[arg(long, default_value_t = 0.02)]
    pub delta: f64,
    #[arg(long, value_enum, default_value = "pde")]
    pub method: MethodArg,
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
    /// Monte Carlo trials per configuration.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Configurations with a smaller SDP value are skipped.
    #[arg(long, default_value_t = DEFAULT_SDP_CUTOFF)]
    pub cutoff: f64,
    /// Omit the per-configuration rows from the JSON report.
    #[arg(long)]
    pub summary: bool,
}

pub fn ratio(args: &RatioArgs, seed: u64) -> Result<Outcome> {
    ensure!(args.delta > 0.0 && args.delta <= 0.5, "--delta must lie in (0, 0.5], got {}", args.delta);
    check_grid(args.grid_n)?;
    let kind = args.walk.kind()?;
    let method = match args.method {
        MethodArg::Pde => RatioMethod::Pde,
        MethodArg::Mc => RatioMethod::MonteCarlo,
    };
    let opts = RatioOptions {
        grid_n: args.grid_n,
        sdp_cutoff: args.cutoff,
        trials: args.trials,
        seed,
        walk: args.walk.params()?,
    };
    let mut report: RatioReport = match args.problem {
        RatioProblem::Maxcut => approx_ratio(PairProblem::MaxCut, kind, args.delta, method, &opts)?,
        RatioProblem::Max2sat => approx_ratio(PairProblem::Max2Sat, kind, args.delta, method, &opts)?,
        RatioProblem::MaxcutHalf => maxcut_half_sweep(kind, args.delta, method, &opts)?,
        RatioProblem::Dicut => {
            ensure!(method == RatioMethod::Pde, "the Max-DiCut search supports --method pde only");
            dicut_ratio(kind, args.delta, &opts)?
        }
    };
    let csv = report.to_csv();
    if args.summary {
        report.rows.clear();
    }
    Outcome::ok(&report, csv)
}

// ─── round ─────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceKind {
    Maxcut,
    Max2sat,
    Dicut,
}

#[derive(Debug, Clone, Args)]
pub struct RoundArgs {
    /// Instance file: edge list (Max-Cut, Max-DiCut) or 2-CNF in DIMACS form.
    #[arg(long)]
    pub input: PathBuf,
    /// Problem type; inferred from a `.cnf` extension when omitted
    /// (otherwise Max-Cut).
    #[arg(long, value_enum)]
    pub problem: Option<InstanceKind>,
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Independent roundings; the best is reported.
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Rank of the SDP factorization (default: the solver's choice).
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Debug, Serialize)]
struct RoundReport {
    command: &'static str,
    problem: &'static str,
    n: usize,
    kind: WalkKind,
    gamma: f64,
    seed: u64,
    trials: u64,
    sdp_value: f64,
    sdp_max_violation: f64,
    best_value: f64,
    best_trial: u64,
    best_assignment: Vec<bool>,
    mean_value: f64,
    /// Best value over SDP value.
    empirical_ratio: f64,
    /// Exact optimum for small instances.
    optimum: Option<f64>,
}

fn load_instance(path: &Path, kind: Option<InstanceKind>) -> Result<(ProblemInstance, &'static str)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let kind = kind.unwrap_or(match path.extension().and_then(|e| e.to_str()) {
        Some("cnf") => InstanceKind::Max2sat,
        _ => InstanceKind::Maxcut,
    });
    let ctx = || format!("parsing {}", path.display());
    Ok(match kind {
        InstanceKind::Maxcut => (ProblemInstance::MaxCut(parse_graph(&text).with_context(ctx)?), "maxcut"),
        InstanceKind::Max2sat => (ProblemInstance::Max2Sat(parse_cnf2(&text).with_context(ctx)?), "max2sat"),
        InstanceKind::Dicut => (ProblemInstance::DiCut(parse_digraph(&text).with_context(ctx)?), "dicut"),
    })
}

pub fn round(args: &RoundArgs, seed: u64) -> Result<Outcome> {
    ensure!(args.trials >= 1, "--trials must be at least 1");
    let (instance, name) = load_instance(&args.input, args.problem)?;
    let params = args.walk.params()?;
    let model = build_relaxation(&instance);
    let rank = args.rank.unwrap_or_else(|| model.default_rank());
    let solution = solve_low_rank(&model, rank, &SolverOptions { seed, ..Default::default() })?;
    let plan = RoundingPlan::new(&solution)?;
    let per = args.trials.div_ceil(CHUNKS);
    let values: Vec<(f64, Vec<bool>)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut plan = plan.clone();
            (c * per..((c + 1) * per).min(args.trials))
                .map(|t| {
                    let r = plan.round(&instance, &params, &mut trial_rng(seed, t))?;
                    Ok((r.value, r.assignment))
                })
                .collect::<sbr_core::Result<Vec<_>>>()
        })
        .collect::<sbr_core::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let (best_trial, (best_value, best_assignment)) = values
        .iter()
        .enumerate()
        .fold(None::<(usize, &(f64, Vec<bool>))>, |best, (t, v)| match best {
            Some((_, b)) if b.0 >= v.0 => best,
            _ => Some((t, v)),
        })
        .expect("at least one trial");
    let mean_value = values.iter().map(|v| v.0).sum::<f64>() / values.len() as f64;
    let optimum = if instance.n() <= BRUTE_FORCE_MAX_N { Some(brute_force_optimum(&instance)?.0) } else { None };
    let mut csv = String::from("trial,value\n");
    for (t, v) in values.iter().enumerate() {
        csv.push_str(&format!("{t},{}\n", v.0));
    }
    let report = RoundReport {
        command: "round",
        problem: name,
        n: instance.n(),
        kind: params.kind,
        gamma: args.walk.gamma,
        seed,
        trials: args.trials,
        sdp_value: solution.objective,
        sdp_max_violation: solution.max_violation,
        best_value: *best_value,
        best_trial: best_trial as u64,
        best_assignment: best_assignment.clone(),
        mean_value,
        empirical_ratio: if solution.objective > 0.0 { best_value / solution.objective } else { 1.0 },
        optimum,
    };
    Outcome::ok(&report, csv)
}

// ─── pde ───────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Args)]
pub struct PdeArgs {
    /// Correlation ρ ∈ [−1, 1].
    #[arg(long, allow_hyphen_values = true, conflicts_with = "theta")]
    pub rho: Option<f64>,
    /// Angle θ ∈ [0, π]; ρ = cos θ.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Slowdown exponent (0 for the basic walk).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Boundary data: maxcut01, maxcut_pm, max2sat_false1, max2sat_true1.
    #[arg(long, default_value = "maxcut_pm")]
    pub boundary: String,
    #[arg(long, default_value_t = DEFAULT_GRID_N)]
    pub grid_n: usize,
    /// Query points `x,y`; repeat the flag for several.
    #[arg(long = "at", allow_hyphen_values = true)]
    pub at: Vec<String>,
}

#[derive(Debug, Serialize)]
struct PointValue {
    x: f64,
    y: f64,
    value: f64,
}

#[derive(Debug, Serialize)]
struct PdeReport {
    command: &'static str,
    boundary: Boundary,
    rho: f64,
    alpha: f64,
    grid_n: usize,
    center: f64,
    residual: f64,
    direct: bool,
    interior_range: [f64; 2],
    boundary_range: [f64; 2],
    queries: Vec<PointValue>,
}

pub fn pde(args: &PdeArgs) -> Result<Outcome> {
    let rho = match (args.rho, args.theta) {
        (Some(r), _) => r,
        (None, Some(t)) => {
            ensure!((0.0..=PI).contains(&t), "--theta must lie in [0, π], got {t}");
            t.cos()
        }
        (None, None) => bail!("give --rho or --theta"),
    };
    ensure!((-1.0..=1.0).contains(&rho), "--rho must lie in [−1, 1], got {rho}");
    ensure!((0.0..2.0).contains(&args.alpha), "--alpha must lie in [0, 2), got {}", args.alpha);
    check_grid(args.grid_n)?;
    let boundary: Boundary = args.boundary.parse()?;
    let sol = solve_dirichlet(&DirichletProblem::new(rho, args.alpha, boundary).with_grid(args.grid_n))?;
    let queries = args
        .at
        .iter()
        .map(|s| {
            let (x, y) = s.split_once(',').with_context(|| format!("--at expects x,y, got '{s}'"))?;
            let (x, y): (f64, f64) = (x.trim().parse()?, y.trim().parse()?);
            Ok(PointValue { x, y, value: sol.query(x, y)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = Vec::new();
    sol.write_csv(&mut csv)?;
    let (ilo, ihi) = sol.interior_range();
    let (blo, bhi) = sol.boundary_range();
    let report = PdeReport {
        command: "pde",
        boundary,
        rho: sol.rho,
        alpha: args.alpha,
        grid_n: args.grid_n,
        center: sol.center(),
        residual: sol.residual,
        direct: sol.direct,
        interior_range: [ilo, ihi],
        boundary_range: [blo, bhi],
        queries,
    };
    Outcome::ok(&report, String::from_utf8(csv)?)
}

// ─── verify ────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Reduced grids for a fast smoke run.
    #[arg(long)]
    pub quick: bool,
    /// Fault injection for testing the checker: flips the sign of the
    /// correlation term in the second candidate.
    #[arg(long, hide = true)]
    pub inject_g2_sign_flip: bool,
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    command: &'static str,
    quick: bool,
    suite: SuiteReport,
    checks: Vec<Check>,
    failing: Vec<String>,
    pass: bool,
}

fn invariant_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for k in 1..=10 {
        let e = separation_prob_exact(0.3 * k as f64)?;
        worst = worst.max((e.quadrature - e.closed_form).abs());
    }
    checks.push(Check {
        name: "separation_routes_agree",
        pass: worst <= sbr_core::specfun::ROUTE_CONSISTENCY_TOL,
        detail: format!("max |quadrature − closed form| = {worst:.2e}"),
    });

    let mut ratios = Vec::new();
    for eps in [0.01, 0.005] {
        let p = separation_prob_exact((1.0 - eps) * PI)?.value();
        ratios.push((1.0 - p) / nonseparation_asymptotic(eps)?);
    }
    checks.push(Check {
        name: "near_antipodal_asymptotics",
        pass: ratios.iter().all(|q| (0.85..=1.15).contains(q)),
        detail: format!("ratios {ratios:?}"),
    });

    let mut bad = 0;
    for mask in 0u8..16 {
        let table = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0, mask & 8 != 0];
        let c = clause_coeffs(table);
        let corners = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
        bad += corners.iter().zip(table).filter(|(&(x, y), b)| c.eval(x, y) != f64::from(u8::from(*b))).count();
    }
    checks.push(Check {
        name: "clause_coeffs_round_trip",
        pass: bad == 0,
        detail: format!("{bad} mismatched corners over 16 predicates"),
    });

    let mut violations = 0;
    for b in Boundary::ALL {
        for rho in [-0.9, 0.0, 0.7] {
            let sol = solve_dirichlet(&DirichletProblem::new(rho, 0.0, b).with_grid(31))?;
            let ((lo, hi), (blo, bhi)) = (sol.interior_range(), sol.boundary_range());
            violations += usize::from(lo < blo - 1e-10 || hi > bhi + 1e-10);
        }
    }
    checks.push(Check {
        name: "discrete_maximum_principle",
        pass: violations == 0,
        detail: format!("{violations} violations over 12 problems"),
    });

    let k2 = ProblemInstance::MaxCut(parse_graph("2 1\n0 1 1")?);
    let model = build_relaxation(&k2);
    let v = solve_low_rank(&model, model.default_rank(), &SolverOptions::default())?.objective;
    checks.push(Check {
        name: "sdp_single_edge",
        pass: (v - 1.0).abs() <= 1e-6,
        detail: format!("objective {v}"),
    });
    Ok(checks)
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let (grid_n, step) = if args.quick {
        (101, 0.05)
    } else {
        (maxprinciple::DEFAULT_GRID_N, maxprinciple::DEFAULT_THETA_STEP)
    };
    let mut forms = Candidate::ALL.map(CandidateForm::from);
    if args.inject_g2_sign_flip {
        forms[1].sign = -forms[1].sign;
    }
    let suite = maxprinciple::run_suite_with(&forms, grid_n, step)?;
    let checks = invariant_checks()?;
    let mut failing = Vec::new();
    for f in &suite.feasibility {
        if !f.pass {
            failing.push(format!("feasibility g{}", f.candidate));
        }
    }
    for r in &suite.ratios {
        if !r.pass {
            failing.push(format!("ratio g{}", r.candidate));
        }
    }
    if !suite.warmup.pass {
        failing.push("warm-up".to_string());
    }
    if !suite.pass && failing.is_empty() {
        failing.push("combined bound".to_string());
    }
    failing.extend(checks.iter().filter(|c| !c.pass).map(|c| c.name.to_string()));
    let pass = failing.is_empty();
    let mut csv = String::from("check,pass\n");
    for f in &suite.feasibility {
        csv.push_str(&format!("feasibility g{},{}\n", f.candidate, f.pass));
    }
    for r in &suite.ratios {
        csv.push_str(&format!("ratio g{},{}\n", r.candidate, r.pass));
    }
    csv.push_str(&format!("warm-up,{}\n", suite.warmup.pass));
    for c in &checks {
        csv.push_str(&format!("{},{}\n", c.name, c.pass));
    }
    let report = VerifyReport {
        command: "verify",
        quick: args.quick,
        suite,
        checks,
        failing: failing.clone(),
        pass,
    };
    Ok(Outcome {
        json: serde_json::to_value(&report)?,
        csv,
        pass,
        failing,
    })
}

// ─── constrained ───────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstrainedMethod {
    /// Walk stopped at time τ, then independent rounding.
    Stopped,
    /// Independent rounding of the damped marginals, with retries.
    Baseline,
}

#[derive(Debug, Clone, Args)]
pub struct ConstrainedArgs {
    /// Graph file followed by constraint lines `b: v₁ v₂ …` on pairwise
    /// disjoint vertex families.
    #[arg(long)]
    pub input: PathBuf,
    /// Allowed violation per family, as a fraction of n.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Stopping time (default log₂(2√2/ε)).
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_enum, default_value = "stopped")]
    pub method: ConstrainedMethod,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Retry cap per baseline rounding.
    #[arg(long, default_value_t = 1000)]
    pub max_attempts: u32,
    #[arg(long, default_value_t = 1e-2)]
    pub gamma: f64,
}

#[derive(Debug, Serialize)]
struct ConstrainedReport {
    command: &'static str,
    method: &'static str,
    n: usize,
    families: usize,
    epsilon: f64,
    tau: Option<f64>,
    seed: u64,
    trials: u64,
    marginals: Vec<f64>,
    best: ConstrainedCut,
    best_trial: u64,
    mean_cut: f64,
    mean_max_violation: f64,
    /// Mean number of coordinates still fractional at τ (stopped walk).
    mean_unfixed: Option<f64>,
    /// Violation allowance `εn`.
    violation_allowance: f64,
}

pub fn constrained(args: &ConstrainedArgs, seed: u64) -> Result<Outcome> {
    ensure!(args.trials >= 1, "--trials must be at least 1");
    ensure!(args.gamma > 0.0 && args.gamma < 0.5, "--gamma must lie in (0, 0.5), got {}", args.gamma);
    let text = std::fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let graph = parse_graph(&text).with_context(|| format!("parsing {}", args.input.display()))?;
    let n = graph.n;
    let constraints = parse_constraints(&text, n, args.epsilon)?;
    let x = disjoint_feasible_point(&constraints, n)?;
    let per = args.trials.div_ceil(CHUNKS);
    let chunks = |f: &(dyn Fn(u64) -> sbr_core::Result<(ConstrainedCut, usize)> + Sync)| {
        (0..CHUNKS)
            .into_par_iter()
            .map(|c| (c * per..((c + 1) * per).min(args.trials)).map(f).collect::<sbr_core::Result<Vec<_>>>())
            .collect::<sbr_core::Result<Vec<_>>>()
            .map(|v| v.into_iter().flatten().collect::<Vec<_>>())
    };
    let (method, tau, results) = match args.method {
        ConstrainedMethod::Baseline => {
            let r = chunks(&|t| {
                Ok((baseline_round(&x, &graph, &constraints, args.max_attempts, &mut trial_rng(seed, t))?, 0))
            })?;
            ("baseline", None, r)
        }
        ConstrainedMethod::Stopped => {
            let tau = match args.tau {
                Some(t) => t,
                None => default_tau(args.epsilon)?,
            };
            let model = build_relaxation(&ProblemInstance::MaxCut(graph.clone()));
            let sol = solve_low_rank(&model, model.default_rank(), &SolverOptions { seed, ..Default::default() })?;
            let w = &sol.vectors[1..];
            let mut gram = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    gram[i * n + j] = w[i].iter().zip(&w[j]).map(|(a, b)| a * b).sum();
                }
            }
            let params = WalkParams {
                step: args.gamma,
                stick_tol: args.gamma,
                ..WalkParams::default()
            };
            let rounder = StoppedRounder::new(x.clone(), gram, tau, params)?;
            let r = chunks(&|t| {
                let out = rounder.clone().round(&graph, &constraints, &mut trial_rng(seed, t))?;
                Ok((out.cut, out.unfixed))
            })?;
            ("stopped", Some(tau), r)
        }
    };
    let count = results.len() as f64;
    let (best_trial, best) = results
        .iter()
        .enumerate()
        .fold(None::<(usize, &ConstrainedCut)>, |best, (t, (c, _))| match best {
            Some((_, b)) if (b.max_violation, -b.cut_value) <= (c.max_violation, -c.cut_value) => best,
            _ => Some((t, c)),
        })
        .expect("at least one trial");
    let mut csv = String::from("trial,cut_value,max_violation,unfixed\n");
    for (t, (c, u)) in results.iter().enumerate() {
        csv.push_str(&format!("{t},{},{},{u}\n", c.cut_value, c.max_violation));
    }
    let report = ConstrainedReport {
        command: "constrained",
        method,
        n,
        families: constraints.len(),
        epsilon: args.epsilon,
        tau,
        seed,
        trials: args.trials,
        marginals: x,
        best: best.clone(),
        best_trial: best_trial as u64,
        mean_cut: results.iter().map(|r| r.0.cut_value).sum::<f64>() / count,
        mean_max_violation: results.iter().map(|r| r.0.max_violation as f64).sum::<f64>() / count,
        mean_unfixed: tau.map(|_| results.iter().map(|r| r.1 as f64).sum::<f64>() / count),
        violation_allowance: args.epsilon * n as f64,
    };
    Outcome::ok(&report, csv)
}
