//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p sbr-core --test acceptance`. Set
//! `SBR_ACCEPTANCE_ONLY=3,5` to run a subset. The process exits nonzero
//! when a criterion fails that is not listed in [`KNOWN_DEVIATIONS`];
//! known deviations still print `FAIL`.
//!
//! Runtime budgets refer to a multi-core reference machine. Measured
//! runtimes are printed next to each budget and do not affect the verdict.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sbr_core::constrained::{
    concentration_check, hitting_profile, stopped_pair_separation, stopping_gap_bound, CovarianceRegime,
};
use sbr_core::diffusion::{estimate_pair_separation, run_stopped_walk, trial_rng, CovarianceRoots, Cube, WalkKind, WalkParams};
use sbr_core::instances::{
    brute_force_optimum, clause_coeffs, parse_graph, Clause, DiCutInstance, Edge, Literal, Max2SatInstance,
    MaxCutInstance, ProblemInstance,
};
use sbr_core::maxprinciple;
use sbr_core::pde::{maxcut_center_prob, solve_dirichlet, Boundary, DirichletProblem, DEFAULT_GRID_N};
use sbr_core::ratio::{
    approx_ratio, center_values, dicut_ratio_from_table, grid, half_sweep_from_values, RatioMethod, RatioOptions,
    DEFAULT_SDP_CUTOFF,
};
use sbr_core::sdp::{build_relaxation, solve_low_rank, Configuration, PairProblem, SolverOptions};
use sbr_core::specfun::{mat2_mul, separation_prob_exact, sqrt_correlation_2x2};

// ─── Tolerances ────────────────────────────────────────────────────────

/// PDE center value vs exact separation probability (grid_n = 199).
const ROUTE_PDE_TOL: f64 = 2e-3;
/// Monte Carlo agreement, in standard errors.
const MC_SIGMAS: f64 = 3.0;
/// Monte Carlo trials for route consistency.
const MC_TRIALS: u64 = 100_000;
/// Angle grid step of every sweep.
const DELTA: f64 = 0.02;
/// Max-Cut half-marginal bands.
const MAXCUT_BASIC_BAND: (f64, f64) = (0.84, 0.86);
const MAXCUT_ALPHA1_BAND: (f64, f64) = (0.85, 0.87);
const MAXCUT_ALPHA161_BAND: (f64, f64) = (0.8765, 0.8795);
/// Slowdown exponent matching the Goemans–Williamson constant.
const GW_ALPHA: f64 = 1.61;
/// Max-2SAT targets and half-width.
const MAX2SAT_TARGETS: [(f64, f64); 3] = [(0.0, 0.921), (1.0, 0.927), (GW_ALPHA, 0.929)];
const MAX2SAT_HALF_WIDTH: f64 = 0.004;
/// Worst basic Max-2SAT configuration's marginals (unordered) and distance.
const MAX2SAT_ARGMIN: (f64, f64) = (0.38, 0.40);
const MAX2SAT_ARGMIN_TOL: f64 = 0.02;
/// Max-DiCut slowdown band.
const DICUT_BAND: (f64, f64) = (0.78, 0.80);
/// Near-antipodal asymptotics band for `(1 − p) / ((4/π)ε)`.
const ASYMPTOTIC_BAND: (f64, f64) = (0.85, 1.15);
/// Stopped-walk pair-separation band and stopping time.
const STOPPED_BAND: (f64, f64) = (0.838, 0.848);
const STOPPED_TAU: f64 = 50.0;
/// SDP oracles.
const K2_TOL: f64 = 1e-6;
const C5_VALUE: f64 = 4.5225;
const C5_TOL: f64 = 1e-3;

/// Criteria expected to fail, with the reason recorded in the ledger.
const KNOWN_DEVIATIONS: &[(u8, &str)] = &[
    (
        2,
        "the basic half-marginal minimum is 0.8619 by all three routes, just above the published band",
    ),
    (
        3,
        "the α=1 half-marginal minimum is 0.8749 (Monte Carlo 0.871 ± 0.002 at the argmin), above the \
         published band; the α=1.61 part passes",
    ),
];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn in_band(v: f64, band: (f64, f64)) -> bool {
    v >= band.0 && v <= band.1
}

/// Center values for one slowdown exponent on the δ angle grid, shared by
/// the Max-Cut and Max-DiCut criteria.
struct Centers {
    thetas: Vec<f64>,
    probs: Vec<f64>,
}

fn centers(alpha: f64) -> Centers {
    let thetas = grid(DELTA, PI);
    let probs = center_values(alpha, &thetas, DEFAULT_GRID_N).expect("center values");
    Centers { thetas, probs }
}

fn half_min(kind: WalkKind, c: &Centers) -> (f64, f64) {
    let r = half_sweep_from_values(kind, RatioMethod::Pde, DELTA, &c.thetas, &c.probs, DEFAULT_SDP_CUTOFF)
        .expect("half sweep");
    (r.min_ratio, r.argmin.coords[2])
}

// ─── Criteria ──────────────────────────────────────────────────────────

fn route_consistency() -> Verdict {
    let params = WalkParams::default();
    let mut worst_pde: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    let mut failures = Vec::new();
    for k in 1..=10 {
        let theta = 0.3 * k as f64;
        let exact = separation_prob_exact(theta).expect("exact").value();
        let pde = maxcut_center_prob(theta, 0.0, DEFAULT_GRID_N).expect("pde");
        let config = Configuration::new(PairProblem::MaxCut, 0.5, 0.5, theta);
        let mc = estimate_pair_separation(&config, &params, MC_TRIALS, 1000 + k).expect("mc");
        let se = mc.stderr_floor();
        let d_pde = (pde - exact).abs();
        let s = ((mc.prob - exact).abs() / se).max((mc.prob - pde).abs() / se);
        worst_pde = worst_pde.max(d_pde);
        worst_sigma = worst_sigma.max(s);
        if d_pde > ROUTE_PDE_TOL || s > MC_SIGMAS {
            failures.push(format!("θ={theta:.1}: exact {exact:.6} pde {pde:.6} mc {:.6}±{se:.1e}", mc.prob));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "max |pde−exact| {worst_pde:.2e} (≤ {ROUTE_PDE_TOL:e}), max MC deviation {worst_sigma:.2}σ (≤ {MC_SIGMAS}){}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn maxcut_basic() -> Verdict {
    let c = centers(0.0);
    let (m, t) = half_min(WalkKind::Basic, &c);
    let exact_at = separation_prob_exact(t).expect("exact").value() / (0.5 * (1.0 - t.cos()));
    verdict(
        in_band(m, MAXCUT_BASIC_BAND),
        format!(
            "min {m:.5} at θ={t:.2} (band {MAXCUT_BASIC_BAND:?}); exact formula there {exact_at:.5}"
        ),
    )
}

fn maxcut_slowdown(gw: &Centers) -> Verdict {
    let c1 = centers(1.0);
    let (m1, t1) = half_min(WalkKind::Slowdown(1.0), &c1);
    let (m2, t2) = half_min(WalkKind::Slowdown(GW_ALPHA), gw);
    verdict(
        in_band(m1, MAXCUT_ALPHA1_BAND) && in_band(m2, MAXCUT_ALPHA161_BAND),
        format!(
            "α=1: {m1:.5} at θ={t1:.2} (band {MAXCUT_ALPHA1_BAND:?}); α={GW_ALPHA}: {m2:.5} at θ={t2:.2} (band {MAXCUT_ALPHA161_BAND:?})"
        ),
    )
}

fn max2sat() -> Verdict {
    let opts = RatioOptions::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (alpha, target) in MAX2SAT_TARGETS {
        let kind = if alpha == 0.0 { WalkKind::Basic } else { WalkKind::Slowdown(alpha) };
        let r = approx_ratio(PairProblem::Max2Sat, kind, DELTA, RatioMethod::Pde, &opts).expect("max2sat ratio");
        let ok = (r.min_ratio - target).abs() <= MAX2SAT_HALF_WIDTH;
        let [x, y, t] = r.argmin.coords;
        let mut part = format!("α={alpha}: {:.4} (target {target}±{MAX2SAT_HALF_WIDTH}) at ({x:.2},{y:.2},{t:.2})", r.min_ratio);
        let mut argmin_ok = true;
        if alpha == 0.0 {
            // Configurations are symmetric in the two marginals.
            let (lo, hi) = (x.min(y), x.max(y));
            argmin_ok = (lo - MAX2SAT_ARGMIN.0).abs() <= MAX2SAT_ARGMIN_TOL + 1e-9
                && (hi - MAX2SAT_ARGMIN.1).abs() <= MAX2SAT_ARGMIN_TOL + 1e-9;
            part.push_str(if argmin_ok { " argmin ok" } else { " argmin off" });
        }
        pass &= ok && argmin_ok;
        parts.push(part);
    }
    verdict(pass, parts.join("; "))
}

fn dicut(gw: &Centers) -> Verdict {
    let r = dicut_ratio_from_table(WalkKind::Slowdown(GW_ALPHA), DELTA, &gw.thetas, &gw.probs, DEFAULT_SDP_CUTOFF)
        .expect("dicut ratio");
    let [a, b, c] = r.argmin.coords;
    verdict(
        in_band(r.min_ratio, DICUT_BAND),
        format!(
            "min {:.4} at (θ₀ᵢ,θ₀ⱼ,θᵢⱼ)=({a:.2},{b:.2},{c:.2}) over {} feasible triplets (band {DICUT_BAND:?})",
            r.min_ratio, r.feasible_count
        ),
    )
}

fn asymptotics() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [0.01, 0.005] {
        let p = separation_prob_exact((1.0 - eps) * PI).expect("exact").value();
        let q = (1.0 - p) / (4.0 / PI * eps);
        pass &= in_band(q, ASYMPTOTIC_BAND);
        parts.push(format!("ε={eps}: {q:.4}"));
    }
    verdict(pass, format!("{} (band {ASYMPTOTIC_BAND:?})", parts.join(", ")))
}

fn maxprinciple_suite() -> Verdict {
    let r = maxprinciple::run_suite(maxprinciple::DEFAULT_GRID_N, maxprinciple::DEFAULT_THETA_STEP).expect("suite");
    let feas: Vec<String> = r
        .feasibility
        .iter()
        .map(|f| format!("g{} min L {:.1e} bdry {:.0e}", f.candidate, f.min_operator.value, f.boundary_defect))
        .collect();
    let ratios: Vec<String> = r
        .ratios
        .iter()
        .map(|q| format!("g{} {:.5}≥{}", q.candidate, q.min_ratio.value, q.target))
        .collect();
    verdict(
        r.pass,
        format!(
            "{}; {}; warm-up {:.4}; combined {:.4}",
            feas.join(", "),
            ratios.join(", "),
            r.warmup.min_ratio.value,
            r.combined.value
        ),
    )
}

fn constrained_suite() -> Verdict {
    let params = WalkParams::default();
    let hit = hitting_profile(100_000, 5, 0.5, &params, 7).expect("hitting profile");
    let n = 12;
    let x: Vec<f64> = (0..n).map(|i| 0.3 + 0.4 * i as f64 / (n - 1) as f64).collect();
    let family: Vec<usize> = (0..n).collect();
    let mut conc = Vec::new();
    let mut conc_pass = true;
    for (k, regime) in [
        CovarianceRegime::Identity,
        CovarianceRegime::Constant { rho: 0.9 },
        CovarianceRegime::LowRank { rank: 3 },
    ]
    .into_iter()
    .enumerate()
    {
        let w = regime.build(n, 17).expect("regime");
        let r = concentration_check(&x, &w, &family, 0.1, 1.0, 20_000, &params, 30 + k as u64).expect("concentration");
        let mean_ok = r.mean_deviation.abs() <= 3.0 * r.mean_stderr.max(1e-12) + 0.02 * n as f64 * params.stick_tol;
        conc_pass &= r.pass && mean_ok;
        conc.push(format!("{regime:?} {}", if r.pass && mean_ok { "ok" } else { "FAIL" }));
    }
    let opts = RatioOptions::default();
    let worst = approx_ratio(PairProblem::MaxCut, WalkKind::Basic, DELTA, RatioMethod::Pde, &opts).expect("ratio");
    let [x0, y0, t0] = worst.argmin.coords;
    let gap = stopping_gap_bound(STOPPED_TAU);
    let mc = stopped_pair_separation(x0, y0, t0, STOPPED_TAU, &params, MC_TRIALS, 55).expect("mc");
    let spot_ok = (mc.prob - worst.argmin.round).abs() <= MC_SIGMAS * mc.stderr_floor() + gap;
    let band_ok = in_band(worst.min_ratio - gap / worst.argmin.sdp, STOPPED_BAND)
        && in_band(worst.min_ratio, STOPPED_BAND);
    verdict(
        hit.pass && conc_pass && spot_ok && band_ok,
        format!(
            "hitting {:?} vs 4^-t; concentration [{}]; worst pair ratio {:.4} at ({x0:.2},{y0:.2},{t0:.2}) \
             (band {STOPPED_BAND:?}, stopping gap ≤ {gap:.1e}); MC spot {:.4}±{:.4} vs PDE {:.4}",
            hit.survival[1..].iter().map(|s| format!("{s:.1e}")).collect::<Vec<_>>(),
            conc.join(", "),
            worst.min_ratio,
            mc.prob,
            mc.stderr,
            worst.argmin.round
        ),
    )
}

fn solve(inst: &ProblemInstance) -> f64 {
    let model = build_relaxation(inst);
    solve_low_rank(&model, model.default_rank(), &SolverOptions::default())
        .expect("sdp")
        .objective
}

fn random_instance(rng: &mut ChaCha8Rng, k: usize) -> ProblemInstance {
    let n = rng.gen_range(3..=12);
    let lit = |v: usize, neg: bool| if neg { Literal::neg(v) } else { Literal::pos(v) };
    match k % 3 {
        0 => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.4) {
                        edges.push(Edge { i, j, weight: rng.gen_range(1..=3) as f64 });
                    }
                }
            }
            ProblemInstance::MaxCut(MaxCutInstance { n, edges })
        }
        1 => {
            let m = rng.gen_range(n..=3 * n);
            let clauses = (0..m)
                .map(|_| {
                    let a = rng.gen_range(0..n);
                    let b = (a + rng.gen_range(1..n)) % n;
                    Clause {
                        lits: [lit(a, rng.gen()), lit(b, rng.gen())],
                        weight: rng.gen_range(1..=3) as f64,
                    }
                })
                .collect();
            ProblemInstance::Max2Sat(Max2SatInstance { n, clauses })
        }
        _ => {
            let mut arcs = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.gen_bool(0.25) {
                        arcs.push(Edge { i, j, weight: rng.gen_range(1..=3) as f64 });
                    }
                }
            }
            ProblemInstance::DiCut(DiCutInstance { n, arcs })
        }
    }
}

fn sdp_solver() -> Verdict {
    let k2 = solve(&ProblemInstance::MaxCut(parse_graph("2 1\n0 1 1.0").expect("K2")));
    let c5 = solve(&ProblemInstance::MaxCut(
        parse_graph("5 5\n0 1\n1 2\n2 3\n3 4\n4 0").expect("C5"),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut below = Vec::new();
    for k in 0..20 {
        let inst = random_instance(&mut rng, k);
        let (opt, _) = brute_force_optimum(&inst).expect("brute force");
        let v = solve(&inst);
        if v < opt - 1e-6 * (1.0 + inst.total_weight()) {
            below.push(format!("#{k}: {v} < {opt}"));
        }
    }
    let pass = (k2 - 1.0).abs() <= K2_TOL && (c5 - C5_VALUE).abs() <= C5_TOL && below.is_empty();
    verdict(
        pass,
        format!(
            "K₂ {k2:.8}, C₅ {c5:.5} (oracle {C5_VALUE}), relaxation ≥ optimum on {}/20 random instances{}",
            20 - below.len(),
            if below.is_empty() { String::new() } else { format!(" [{}]", below.join(", ")) }
        ),
    )
}

fn property_suite() -> Verdict {
    let mut failures: Vec<String> = Vec::new();

    // Martingale mean preservation of the stopped walk.
    let params = WalkParams::default();
    let start = [0.3, 0.7];
    let mut roots = CovarianceRoots::new(vec![1.0, -0.6, -0.6, 1.0], 2).expect("roots");
    let trials = 20_000;
    let mut sum = [0.0; 2];
    let mut sq = [0.0; 2];
    for t in 0..trials {
        let out = run_stopped_walk(&mut roots, &start, Cube::Unit, 0.2, &params, &mut trial_rng(3, t)).expect("walk");
        for k in 0..2 {
            sum[k] += out.state[k];
            sq[k] += out.state[k] * out.state[k];
        }
    }
    for k in 0..2 {
        let m = sum[k] / trials as f64;
        let se = ((sq[k] / trials as f64 - m * m) / trials as f64).sqrt();
        if (m - start[k]).abs() > 3.0 * se + params.stick_tol * 0.5 {
            failures.push(format!("martingale coordinate {k}: mean {m:.5} vs {}", start[k]));
        }
    }

    // Discrete maximum principle.
    for b in Boundary::ALL {
        for rho in [-0.9, 0.0, 0.7] {
            for alpha in [0.0, 1.61] {
                let sol = solve_dirichlet(&DirichletProblem::new(rho, alpha, b).with_grid(51)).expect("pde");
                let (lo, hi) = sol.interior_range();
                let (blo, bhi) = sol.boundary_range();
                if lo < blo - 1e-10 || hi > bhi + 1e-10 {
                    failures.push(format!("maximum principle {b} ρ={rho} α={alpha}"));
                }
            }
        }
    }

    // Grid convergence: successive center differences shrink ~4× per doubling.
    for rho in [0.0f64, 0.5, -0.5, 0.9, -0.9] {
        let u: Vec<f64> = [99, 199, 399]
            .iter()
            .map(|&n| maxcut_center_prob(rho.acos(), 0.0, n).expect("center"))
            .collect();
        let (d1, d2) = ((u[0] - u[1]).abs(), (u[1] - u[2]).abs());
        if d1 >= 1e-10 && d1 / d2 <= 2.5 {
            failures.push(format!("grid convergence ρ={rho}: ratio {:.2}", d1 / d2));
        }
    }

    // W^{1/2} identities.
    for k in 1..100 {
        let theta = PI * k as f64 / 100.0;
        let (half, inv) = sqrt_correlation_2x2(theta).expect("root");
        let w = mat2_mul(&half, &half);
        let id = mat2_mul(&half, &inv);
        let c = theta.cos();
        let err = (w[0][0] - 1.0).abs() + (w[0][1] - c).abs() + (w[1][0] - c).abs() + (w[1][1] - 1.0).abs();
        let err_id = (id[0][0] - 1.0).abs() + id[0][1].abs() + id[1][0].abs() + (id[1][1] - 1.0).abs();
        if err > 1e-12 || err_id > 1e-9 {
            failures.push(format!("W^(1/2) identity at θ={theta:.3}"));
        }
    }

    // clause_coeffs exhaustive round trip.
    for mask in 0u8..16 {
        let table = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0, mask & 8 != 0];
        let c = clause_coeffs(table);
        let corners = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
        if corners
            .iter()
            .zip(table)
            .any(|(&(x, y), b)| c.eval(x, y) != if b { 1.0 } else { 0.0 })
        {
            failures.push(format!("clause_coeffs mask {mask}"));
        }
    }

    // Deterministic replay across thread counts.
    let config = Configuration::new(PairProblem::Max2Sat, 0.4, 0.7, 2.2);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("pool")
            .install(|| estimate_pair_separation(&config, &params, 5000, 11).expect("mc"))
    };
    if run(1) != run(4) {
        failures.push("deterministic replay".into());
    }

    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            "martingale, maximum principle, grid convergence, W^(1/2), clause_coeffs, replay: all hold".to_string()
        } else {
            failures.join("; ")
        },
    )
}

// ─── Driver ────────────────────────────────────────────────────────────

fn main() -> ExitCode {
    let only: Option<Vec<u8>> = std::env::var("SBR_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let wanted = |id: u8| only.as_ref().map_or(true, |v| v.contains(&id));
    let gw = if wanted(3) || wanted(5) { Some(centers(GW_ALPHA)) } else { None };
    let gw = gw.as_ref();

    type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;
    let criteria: Vec<(u8, &str, f64, Check)> = vec![
        (1, "route consistency", 120.0, Box::new(route_consistency)),
        (2, "Max-Cut basic ratio", 60.0, Box::new(maxcut_basic)),
        (3, "Max-Cut slowdown ratios", 180.0, Box::new(|| maxcut_slowdown(gw.expect("centers")))),
        (4, "Max-2SAT ratios", 1200.0, Box::new(max2sat)),
        (5, "Max-DiCut slowdown ratio", 900.0, Box::new(|| dicut(gw.expect("centers")))),
        (6, "near-antipodal asymptotics", 10.0, Box::new(asymptotics)),
        (7, "maximum-principle suite", 120.0, Box::new(maxprinciple_suite)),
        (8, "constrained suite", 600.0, Box::new(constrained_suite)),
        (9, "SDP solver", 300.0, Box::new(sdp_solver)),
        (10, "property suite", 300.0, Box::new(property_suite)),
    ];

    let mut unexpected = Vec::new();
    let mut summary = (0, 0);
    for (id, name, budget, check) in criteria {
        if !wanted(id) {
            continue;
        }
        let t = Instant::now();
        let v = check();
        let secs = t.elapsed().as_secs_f64();
        let known = KNOWN_DEVIATIONS.iter().find(|k| k.0 == id);
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = match (v.pass, known) {
            (false, Some((_, why))) => format!(" [known deviation: {why}]"),
            _ => String::new(),
        };
        let over = if secs > budget { ", over budget on this host" } else { "" };
        println!("{tag} [{id:>2}] {name}: {} ({secs:.1} s, budget {budget:.0} s{over}){note}", v.detail);
        if v.pass {
            summary.0 += 1;
        } else {
            summary.1 += 1;
            if known.is_none() {
                unexpected.push(id);
            }
        }
    }
    println!("acceptance: {} passed, {} failed", summary.0, summary.1);
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
