//! Property suite: invariants that hold independently of any published
//! numbers.

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sbr_core::diffusion::{
    estimate_pair_separation, psd_sqrt, run_stopped_walk, trial_rng, CovarianceRoots, Cube, WalkKind, WalkParams,
};
use sbr_core::instances::{
    brute_force_optimum, clause_coeffs, Clause, DiCutInstance, Edge, Literal, Max2SatInstance, MaxCutInstance,
    ProblemInstance,
};
use sbr_core::pde::{maxcut_center_prob, solve_dirichlet, Boundary, DirichletProblem};
use sbr_core::sdp::{build_relaxation, solve_low_rank, Configuration, PairProblem, SolverOptions};
use sbr_core::specfun::{mat2_mul, sqrt_correlation_2x2};

fn coarse_walk() -> WalkParams {
    WalkParams {
        step: 2e-2,
        stick_tol: 2e-2,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    /// Optional stopping: the stopped walk's mean equals its start.
    #[test]
    fn stopped_walk_preserves_mean(
        x0 in 0.1f64..0.9, x1 in 0.1f64..0.9, rho in -0.95f64..0.95, tau in 0.05f64..2.0,
    ) {
        let params = coarse_walk();
        let mut roots = CovarianceRoots::new(vec![1.0, rho, rho, 1.0], 2).unwrap();
        let trials = 3000;
        let mut sum = [0.0; 2];
        let mut sq = [0.0; 2];
        for t in 0..trials {
            let out = run_stopped_walk(&mut roots, &[x0, x1], Cube::Unit, tau, &params, &mut trial_rng(5, t)).unwrap();
            for k in 0..2 {
                sum[k] += out.state[k];
                sq[k] += out.state[k] * out.state[k];
            }
        }
        for (k, x) in [x0, x1].into_iter().enumerate() {
            let m = sum[k] / trials as f64;
            let se = ((sq[k] / trials as f64 - m * m).max(0.0) / trials as f64).sqrt();
            // Snapping to an endpoint within stick_tol adds a bias of at most
            // stick_tol per coordinate.
            prop_assert!((m - x).abs() <= 4.0 * se + 0.02, "coordinate {k}: mean {m}, start {x}, se {se}");
        }
    }

    /// Discrete maximum principle: interior values lie within the boundary range.
    #[test]
    fn pde_solution_obeys_maximum_principle(
        rho in -0.95f64..0.95, alpha in 0.0f64..1.9, b in 0usize..4,
    ) {
        let boundary = Boundary::ALL[b];
        let sol = solve_dirichlet(&DirichletProblem::new(rho, alpha, boundary).with_grid(31)).unwrap();
        let (lo, hi) = sol.interior_range();
        let (blo, bhi) = sol.boundary_range();
        prop_assert!(lo >= blo - 1e-10 && hi <= bhi + 1e-10, "[{lo}, {hi}] ⊄ [{blo}, {bhi}]");
    }

    /// `W^{1/2}·W^{1/2} = W` and `W^{1/2}·W^{−1/2} = I` for the 2×2 correlation matrix.
    #[test]
    fn correlation_root_identities(theta in 0.01f64..(PI - 0.01)) {
        let (half, inv) = sqrt_correlation_2x2(theta).unwrap();
        let w = mat2_mul(&half, &half);
        let id = mat2_mul(&half, &inv);
        let c = theta.cos();
        let want_w = [[1.0, c], [c, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((w[i][j] - want_w[i][j]).abs() < 1e-12);
                let e = if i == j { 1.0 } else { 0.0 };
                prop_assert!((id[i][j] - e).abs() < 1e-9 / theta.sin());
                prop_assert!((half[i][j] - half[j][i]).abs() < 1e-15);
            }
        }
    }

    /// The general PSD root used by the walk squares back to the submatrix.
    #[test]
    fn psd_root_squares_back(seed in 0u64..1000, n in 2usize..7, rank in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vecs: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..rank).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                w[i * n + j] = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
            }
        }
        let idx: Vec<usize> = (0..n).collect();
        let r = psd_sqrt(&w, n, &idx);
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|t| r[i * n + t] * r[t * n + j]).sum();
                prop_assert!((s - w[i * n + j]).abs() < 1e-9, "({i},{j}): {s} vs {}", w[i * n + j]);
            }
        }
    }
}

/// Every binary predicate is reproduced by its multilinear expansion at the
/// four corners.
#[test]
fn clause_coeffs_round_trip_all_predicates() {
    for mask in 0u8..16 {
        let table = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0, mask & 8 != 0];
        let c = clause_coeffs(table);
        for (k, (x, y)) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)].into_iter().enumerate() {
            let want = if table[k] { 1.0 } else { 0.0 };
            assert_eq!(c.eval(x, y), want, "mask {mask} corner {k}");
        }
    }
    // Every clause's truth table comes back from its coefficients.
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        let lit = |v, neg| if neg { Literal::neg(v) } else { Literal::pos(v) };
        let clause = Clause {
            lits: [lit(0, a), lit(1, b)],
            weight: 1.0,
        };
        let c = clause_coeffs(clause.truth_table());
        for (k, (x, y)) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)].into_iter().enumerate() {
            assert_eq!(c.eval(x, y) == 1.0, clause.truth_table()[k]);
        }
    }
}

/// Successive center differences shrink by about 4 per grid doubling.
#[test]
fn grid_convergence_is_second_order() {
    for rho in [0.0f64, 0.5, -0.5, 0.9, -0.9] {
        let theta = rho.acos();
        let u: Vec<f64> = [99, 199, 399]
            .iter()
            .map(|&n| maxcut_center_prob(theta, 0.0, n).unwrap())
            .collect();
        let (d1, d2) = ((u[0] - u[1]).abs(), (u[1] - u[2]).abs());
        if d1 < 1e-10 {
            // Symmetric cases are exact on every grid.
            assert!(d2 < 1e-10, "ρ = {rho}: {u:?}");
            continue;
        }
        let ratio = d1 / d2;
        assert!(ratio > 2.5, "ρ = {rho}: differences {d1:e}, {d2:e}, ratio {ratio}");
    }
}

/// Fixed seeds reproduce estimates bit for bit, whatever the thread count.
#[test]
fn deterministic_replay() {
    let config = Configuration::new(PairProblem::MaxCut, 0.3, 0.6, 2.0);
    let params = WalkParams::with_kind(WalkKind::Slowdown(1.0));
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_pair_separation(&config, &params, 2000, 42).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    assert_eq!(a, run(1));
    let c = estimate_pair_separation(&config, &params, 2000, 43).unwrap();
    assert_ne!(a.prob, c.prob);
}

fn random_instance(rng: &mut ChaCha8Rng, k: usize) -> ProblemInstance {
    let n = rng.gen_range(3..=12);
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
                    let lit = |v: usize, neg: bool| if neg { Literal::neg(v) } else { Literal::pos(v) };
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

/// The relaxation value is never below the integral optimum.
#[test]
fn relaxation_dominates_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..20 {
        let inst = random_instance(&mut rng, k);
        let (opt, _) = brute_force_optimum(&inst).unwrap();
        let model = build_relaxation(&inst);
        let sol = solve_low_rank(&model, model.default_rank(), &SolverOptions::default()).unwrap();
        let scale = 1.0 + inst.total_weight();
        assert!(
            sol.objective >= opt - 1e-6 * scale,
            "instance {k}: relaxation {} below optimum {opt}",
            sol.objective
        );
    }
}
