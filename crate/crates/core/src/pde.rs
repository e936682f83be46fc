//! Finite-difference solver for the Dirichlet problems whose solutions are
//! the walk's absorption probabilities:
//! `L u = A u_xx + 2ρ√(AC) u_xy + C u_yy = 0` with `A = s(x)²`, `C = s(y)²`
//! and `s ≡ 1` (basic walk) or `s(ξ) = (1 − ξ²)^{α/2}` in the coordinate
//! `ξ ∈ [−1, 1]` normalizing each axis (slowdown walk).
//!
//! # Discretization
//!
//! Each axis is meshed uniformly in the stretched coordinate
//! `z = G(ξ) = ∫₀^ξ (1 − t²)^{−α/2} dt = ½ β_{ξ²}(½, 1 − α/2)`, which is the
//! identity for `α = 0`. Since `s·G' = 1`, the operator becomes
//! `u_zz + u_ww + 2ρ u_zw + b(ξ) u_z + b(η) u_w` with drift
//! `b(ξ) = α ξ (1 − ξ²)^{α/2 − 1}`, a constant-coefficient principal part.
//! The cross derivative uses the diagonal pair matching `sign ρ` and the
//! axis terms carry the remaining diffusion `1 − |ρ|`; the drift is
//! exponentially fitted (Il'in–Allen–Southwell), so every off-diagonal
//! weight is nonnegative and the matrix is an M-matrix for `|ρ| < 1`.
//! Mesh points crowd the faces exactly as fast as the walk slows down, so
//! the first interior layer sits strictly inside the square where the
//! coefficients are positive.
//!
//! The system is solved by banded LU without pivoting (safe for M-matrices)
//! up to `grid_n = 399`, and by Jacobi-preconditioned BiCGSTAB beyond.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::incomplete_beta_xy;

/// Largest admissible `|ρ|`; larger values are clamped.
pub const RHO_CLAMP: f64 = 1.0 - 1e-9;
/// Default number of interior points per axis.
pub const DEFAULT_GRID_N: usize = 199;
/// Largest grid solved by direct factorization.
pub const DIRECT_LIMIT: usize = 399;
/// Required relative residual `‖b − Au‖∞ / ‖b‖∞`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Square domain of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `[0, 1]²`
    Unit,
    /// `[−1, 1]²`
    Centered,
}

impl Domain {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Domain::Unit => (0.0, 1.0),
            Domain::Centered => (-1.0, 1.0),
        }
    }
}

/// Named boundary data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Max-Cut on `[0,1]²`: `x + y − 2xy` (endpoints differ).
    Maxcut01,
    /// Max-Cut on `[−1,1]²`: `(1 − xy)/2`.
    MaxcutPm,
    /// Max-2SAT, value 1 meaning *false*: `1 − xy`.
    Max2satFalse1,
    /// Max-2SAT, value 1 meaning *true*: `min(1, max(x, y))`.
    Max2satTrue1,
}

impl Boundary {
    pub const ALL: [Boundary; 4] = [
        Boundary::Maxcut01,
        Boundary::MaxcutPm,
        Boundary::Max2satFalse1,
        Boundary::Max2satTrue1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Boundary::Maxcut01 => "maxcut01",
            Boundary::MaxcutPm => "maxcut_pm",
            Boundary::Max2satFalse1 => "max2sat_false1",
            Boundary::Max2satTrue1 => "max2sat_true1",
        }
    }

    /// The square the boundary data lives on.
    pub fn domain(&self) -> Domain {
        match self {
            Boundary::MaxcutPm => Domain::Centered,
            _ => Domain::Unit,
        }
    }

    /// Boundary value at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Boundary::Maxcut01 => x + y - 2.0 * x * y,
            Boundary::MaxcutPm => 0.5 * (1.0 - x * y),
            Boundary::Max2satFalse1 => 1.0 - x * y,
            Boundary::Max2satTrue1 => x.max(y).min(1.0),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Boundary::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown boundary function '{s}'")))
    }
}

/// Boundary value by name.
pub fn boundary_fn(name: &str, x: f64, y: f64) -> Result<f64> {
    Ok(name.parse::<Boundary>()?.eval(x, y))
}

/// A Dirichlet problem for the walk's generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletProblem {
    /// Correlation `cos θ`; clamped to `±RHO_CLAMP`.
    pub rho: f64,
    /// Slowdown exponent, 0 for the basic walk.
    pub alpha: f64,
    pub boundary: Boundary,
    /// Interior points per axis; odd so the center is a node.
    pub grid_n: usize,
}

impl DirichletProblem {
    pub fn new(rho: f64, alpha: f64, boundary: Boundary) -> Self {
        DirichletProblem {
            rho,
            alpha,
            boundary,
            grid_n: DEFAULT_GRID_N,
        }
    }

    pub fn with_grid(mut self, grid_n: usize) -> Self {
        self.grid_n = grid_n;
        self
    }

    pub fn domain(&self) -> Domain {
        self.boundary.domain()
    }

    fn validate(&self) -> Result<()> {
        if self.grid_n < 15 || self.grid_n % 2 == 0 {
            return Err(Error::domain(format!(
                "grid_n must be odd and at least 15, got {}",
                self.grid_n
            )));
        }
        if !(0.0..2.0).contains(&self.alpha) {
            return Err(Error::domain(format!("α must lie in [0, 2), got {}", self.alpha)));
        }
        if !self.rho.is_finite() || self.rho.abs() > 1.0 {
            return Err(Error::domain(format!("ρ must lie in [−1, 1], got {}", self.rho)));
        }
        Ok(())
    }
}

/// One axis of the mesh: closed node list in the normalized coordinate
/// together with `1 − ξ²` (kept separately for accuracy near the faces).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisMesh {
    /// Nodes `ξ₀ = −1 < … < ξ_{N+1} = 1`.
    pub xi: Vec<f64>,
    /// `1 − ξₖ²`.
    pub gap: Vec<f64>,
    /// Uniform spacing in the stretched coordinate.
    pub h: f64,
}

/// `G(ξ)` for `ξ ≥ 0`, with `p = 1 − ξ²` supplied accurately.
fn stretch(alpha: f64, p: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok((1.0 - p).max(0.0).sqrt());
    }
    Ok(0.5 * incomplete_beta_xy(1.0 - p, p, 0.5, 1.0 - 0.5 * alpha)?)
}

/// Builds the mesh with `n` (odd) interior nodes, uniform in `z = G(ξ)`.
pub fn axis_mesh(n: usize, alpha: f64) -> Result<AxisMesh> {
    if n % 2 == 0 {
        return Err(Error::domain(format!("mesh size must be odd, got {n}")));
    }
    let total = stretch(alpha, 0.0)?;
    let h = 2.0 * total / (n + 1) as f64;
    let mid = (n + 1) / 2;
    let mut xi = vec![0.0; n + 2];
    let mut gap = vec![1.0; n + 2];
    for k in 1..mid {
        let z = k as f64 * h;
        let (x, p) = if alpha == 0.0 {
            (z, (1.0 - z) * (1.0 + z))
        } else {
            // Bisection on ln p with p = 1 − ξ² ∈ (0, 1]; G decreases in p.
            let (mut lo, mut hi) = (-745.0_f64, 0.0_f64);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if stretch(alpha, m.exp())? > z {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            let p = (0.5 * (lo + hi)).exp();
            if p == 0.0 {
                return Err(Error::Precision(format!(
                    "mesh node underflows at the face for α = {alpha}, n = {n}"
                )));
            }
            ((1.0 - p).max(0.0).sqrt(), p)
        };
        xi[mid + k] = x;
        xi[mid - k] = -x;
        gap[mid + k] = p;
        gap[mid - k] = p;
    }
    xi[0] = -1.0;
    xi[n + 1] = 1.0;
    gap[0] = 0.0;
    gap[n + 1] = 0.0;
    Ok(AxisMesh { xi, gap, h })
}

/// Solution on the closed grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeSolution {
    pub problem: DirichletProblem,
    /// Effective (clamped) correlation.
    pub rho: f64,
    /// Physical node coordinates per axis (`N + 2` values, both axes equal).
    pub nodes: Vec<f64>,
    /// Values `u[j·(N+2) + i]` at `(nodes[i], nodes[j])`.
    pub values: Vec<f64>,
    /// Relative residual `‖b − Au‖∞ / ‖b‖∞` of the discrete system.
    pub residual: f64,
    /// Whether the system was solved by direct factorization.
    pub direct: bool,
}

/// Nine-point system in the stretched coordinates; row `k = j·N + i`.
struct Stencil {
    n: usize,
    /// Weights per interior node: [W, E, S, N, SW, SE, NW, NE] and diagonal.
    w: Vec<[f64; 8]>,
    diag: Vec<f64>,
    rhs: Vec<f64>,
}

/// Il'in–Allen–Southwell weights for `a u'' + b u'` on spacing `h`:
/// returns (west, east), both nonnegative.
fn fitted_weights(a: f64, b: f64, h: f64) -> (f64, f64) {
    let base = a / (h * h);
    if b == 0.0 {
        return (base, base);
    }
    let t = b * h / a;
    // Bernoulli function B(x) = x/(eˣ − 1).
    let bern = |x: f64| -> f64 {
        if x.abs() < 1e-6 {
            1.0 - 0.5 * x
        } else if x > 700.0 {
            0.0
        } else {
            x / x.exp_m1()
        }
    };
    (base * bern(t), base * bern(-t))
}

const OFFSETS: [(isize, isize); 8] = [
    (-1, 0),
    (1, 0),
    (0, -1),
    (0, 1),
    (-1, -1),
    (1, -1),
    (-1, 1),
    (1, 1),
];

fn assemble(problem: &DirichletProblem, rho: f64, mesh: &AxisMesh, phys: &[f64]) -> Stencil {
    let n = problem.grid_n;
    let h = mesh.h;
    let a_axis = 1.0 - rho.abs();
    let diag_w = rho.abs() / (h * h);
    let drift: Vec<f64> = (0..n + 2)
        .map(|k| {
            if problem.alpha == 0.0 || mesh.gap[k] == 0.0 {
                0.0
            } else {
                problem.alpha * mesh.xi[k] * mesh.gap[k].powf(0.5 * problem.alpha - 1.0)
            }
        })
        .collect();
    let axis: Vec<(f64, f64)> = (0..n + 2)
        .map(|k| fitted_weights(a_axis, drift[k], h))
        .collect();
    let bval = |i: usize, j: usize| problem.boundary.eval(phys[i], phys[j]);
    let mut w = Vec::with_capacity(n * n);
    let mut diag = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for j in 1..=n {
        for i in 1..=n {
            let (xw, xe) = axis[i];
            let (ys, yn) = axis[j];
            let (sw, se, nw, ne) = if rho >= 0.0 {
                (diag_w, 0.0, 0.0, diag_w)
            } else {
                (0.0, diag_w, diag_w, 0.0)
            };
            let weights = [xw, xe, ys, yn, sw, se, nw, ne];
            let mut d = 0.0;
            let mut b = 0.0;
            let mut kept = [0.0; 8];
            for (t, &(di, dj)) in OFFSETS.iter().enumerate() {
                let wt = weights[t];
                d += wt;
                let (ii, jj) = ((i as isize + di) as usize, (j as isize + dj) as usize);
                if ii == 0 || ii == n + 1 || jj == 0 || jj == n + 1 {
                    b += wt * bval(ii, jj);
                } else {
                    kept[t] = wt;
                }
            }
            w.push(kept);
            diag.push(d);
            rhs.push(b);
        }
    }
    Stencil { n, w, diag, rhs }
}

impl Stencil {
    /// `y = A u` for the system `diag·u − Σ w·u_nb = rhs`.
    fn apply(&self, u: &[f64], y: &mut [f64]) {
        let n = self.n as isize;
        for k in 0..u.len() {
            let (i, j) = ((k as isize) % n, (k as isize) / n);
            let mut s = self.diag[k] * u[k];
            for (t, &(di, dj)) in OFFSETS.iter().enumerate() {
                let wt = self.w[k][t];
                if wt != 0.0 {
                    s -= wt * u[((j + dj) * n + i + di) as usize];
                }
            }
            y[k] = s;
        }
    }

    fn residual(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let mut au = vec![0.0; u.len()];
        self.apply(u, &mut au);
        let r: Vec<f64> = self.rhs.iter().zip(&au).map(|(b, a)| b - a).collect();
        let bn = self.rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let rn = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        (r, rn / bn)
    }
}

/// Banded LU factorization (no pivoting) of the stencil matrix.
struct BandLu {
    size: usize,
    bw: usize,
    /// Row-major band: row `r` holds columns `r−bw ..= r+bw`.
    a: Vec<f64>,
}

impl BandLu {
    fn factor(st: &Stencil) -> Result<Self> {
        let n = st.n;
        let size = n * n;
        let bw = n + 1;
        let width = 2 * bw + 1;
        let mut a = vec![0.0; size * width];
        for k in 0..size {
            let (i, j) = (k % n, k / n);
            a[k * width + bw] = st.diag[k];
            for (t, &(di, dj)) in OFFSETS.iter().enumerate() {
                let wt = st.w[k][t];
                if wt != 0.0 {
                    let col = ((j as isize + dj) * n as isize + i as isize + di) as usize;
                    let off = (col as isize - k as isize + bw as isize) as usize;
                    a[k * width + off] = -wt;
                }
            }
        }
        for k in 0..size {
            let pivot = a[k * width + bw];
            if !(pivot.abs() > 0.0) || !pivot.is_finite() {
                return Err(Error::Singular(format!("zero pivot at row {k}")));
            }
            let last = (k + bw).min(size - 1);
            let (head, tail) = a.split_at_mut((k + 1) * width);
            let prow = &head[k * width + bw..k * width + width];
            for r in k + 1..=last {
                let row = &mut tail[(r - k - 1) * width..(r - k) * width];
                // Column k sits at offset k − r + bw in row r.
                let off = bw + k - r;
                let l = row[off] / pivot;
                if l == 0.0 {
                    continue;
                }
                row[off] = l;
                let dst = &mut row[off + 1..off + 1 + (width - bw - 1)];
                for (d, p) in dst.iter_mut().zip(&prow[1..]) {
                    *d -= l * p;
                }
            }
        }
        Ok(BandLu { size, bw, a })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (size, bw) = (self.size, self.bw);
        let width = 2 * bw + 1;
        let mut y = b.to_vec();
        for r in 0..size {
            let lo = r.saturating_sub(bw);
            let row = &self.a[r * width..(r + 1) * width];
            let mut s = y[r];
            for c in lo..r {
                s -= row[c + bw - r] * y[c];
            }
            y[r] = s;
        }
        for r in (0..size).rev() {
            let hi = (r + bw).min(size - 1);
            let row = &self.a[r * width..(r + 1) * width];
            let mut s = y[r];
            for c in r + 1..=hi {
                s -= row[c + bw - r] * y[c];
            }
            y[r] = s / row[bw];
        }
        y
    }
}

/// Jacobi-preconditioned BiCGSTAB.
fn bicgstab(st: &Stencil, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let m = st.rhs.len();
    let inv: Vec<f64> = st.diag.iter().map(|d| 1.0 / d).collect();
    let mut x = vec![0.0; m];
    let (mut r, _) = st.residual(&x);
    let r0 = r.clone();
    let bn = st.rhs.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; m];
    let mut p = vec![0.0; m];
    let mut y = vec![0.0; m];
    let mut z = vec![0.0; m];
    let mut t = vec![0.0; m];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    for _ in 0..max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..m {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
            y[k] = inv[k] * p[k];
        }
        st.apply(&y, &mut v);
        alpha = rho / dot(&r0, &v);
        for k in 0..m {
            x[k] += alpha * y[k];
            r[k] -= alpha * v[k];
        }
        if r.iter().fold(0.0_f64, |a, v| a.max(v.abs())) <= tol * bn {
            return Ok(x);
        }
        for k in 0..m {
            z[k] = inv[k] * r[k];
        }
        st.apply(&z, &mut t);
        omega = dot(&t, &r) / dot(&t, &t);
        for k in 0..m {
            x[k] += omega * z[k];
            r[k] -= omega * t[k];
        }
        if r.iter().fold(0.0_f64, |a, v| a.max(v.abs())) <= tol * bn {
            return Ok(x);
        }
    }
    let (_, res) = st.residual(&x);
    if res <= tol {
        Ok(x)
    } else {
        Err(Error::Precision(format!(
            "BiCGSTAB stalled at relative residual {res:e}"
        )))
    }
}

/// Solves a Dirichlet problem on its square.
pub fn solve_dirichlet(problem: &DirichletProblem) -> Result<PdeSolution> {
    problem.validate()?;
    let rho = problem.rho.clamp(-RHO_CLAMP, RHO_CLAMP);
    let n = problem.grid_n;
    let mesh = axis_mesh(n, problem.alpha)?;
    let (lo, hi) = problem.domain().bounds();
    let phys: Vec<f64> = mesh
        .xi
        .iter()
        .map(|&x| lo + 0.5 * (x + 1.0) * (hi - lo))
        .collect();
    let st = assemble(problem, rho, &mesh, &phys);
    let direct = n <= DIRECT_LIMIT;
    let mut u = if direct {
        let lu = BandLu::factor(&st)?;
        let mut u = lu.solve(&st.rhs);
        // Iterative refinement until the residual stops improving.
        for _ in 0..3 {
            let (r, res) = st.residual(&u);
            if res <= 1e-3 * RESIDUAL_TOL {
                break;
            }
            let du = lu.solve(&r);
            u.iter_mut().zip(&du).for_each(|(a, b)| *a += b);
        }
        u
    } else {
        bicgstab(&st, 1e-2 * RESIDUAL_TOL, 20 * n * n)?
    };
    let (_, residual) = st.residual(&u);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Precision(format!(
            "linear solve reached relative residual {residual:e} only"
        )));
    }
    let side = n + 2;
    let mut values = vec![0.0; side * side];
    for j in 0..side {
        for i in 0..side {
            values[j * side + i] = if i == 0 || j == 0 || i == n + 1 || j == n + 1 {
                problem.boundary.eval(phys[i], phys[j])
            } else {
                std::mem::take(&mut u[(j - 1) * n + i - 1])
            };
        }
    }
    Ok(PdeSolution {
        problem: *problem,
        rho,
        nodes: phys,
        values,
        residual,
        direct,
    })
}

impl PdeSolution {
    fn side(&self) -> usize {
        self.nodes.len()
    }

    /// Stored value at node `(i, j)` of the closed grid.
    pub fn node_value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.side() + i]
    }

    /// Value at the center of the square (a node, since `grid_n` is odd).
    pub fn center(&self) -> f64 {
        let m = self.side() / 2;
        self.node_value(m, m)
    }

    /// Bilinear interpolation; exact at nodes and on the boundary.
    pub fn query(&self, x: f64, y: f64) -> Result<f64> {
        let (lo, hi) = self.problem.domain().bounds();
        let eps = 1e-12;
        if !(x >= lo - eps && x <= hi + eps && y >= lo - eps && y <= hi + eps) {
            return Err(Error::domain(format!(
                "query point ({x}, {y}) outside [{lo}, {hi}]²"
            )));
        }
        let (x, y) = (x.clamp(lo, hi), y.clamp(lo, hi));
        if x == lo || x == hi || y == lo || y == hi {
            return Ok(self.problem.boundary.eval(x, y));
        }
        let cell = |v: f64| -> (usize, f64) {
            let k = self.nodes.partition_point(|&t| t <= v).clamp(1, self.side() - 1) - 1;
            let t = (v - self.nodes[k]) / (self.nodes[k + 1] - self.nodes[k]);
            (k, t)
        };
        let (i, tx) = cell(x);
        let (j, ty) = cell(y);
        let v00 = self.node_value(i, j);
        let v10 = self.node_value(i + 1, j);
        let v01 = self.node_value(i, j + 1);
        let v11 = self.node_value(i + 1, j + 1);
        Ok((1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11))
    }

    /// Smallest and largest interior values.
    pub fn interior_range(&self) -> (f64, f64) {
        let s = self.side();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 1..s - 1 {
            for i in 1..s - 1 {
                let v = self.node_value(i, j);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Smallest and largest boundary values.
    pub fn boundary_range(&self) -> (f64, f64) {
        let s = self.side();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..s {
            for i in 0..s {
                if i == 0 || j == 0 || i == s - 1 || j == s - 1 {
                    let v = self.node_value(i, j);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        (lo, hi)
    }

    /// Writes `x,y,u` rows for every node.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,u")?;
        let s = self.side();
        for j in 0..s {
            for i in 0..s {
                writeln!(out, "{},{},{}", self.nodes[i], self.nodes[j], self.node_value(i, j))?;
            }
        }
        Ok(())
    }
}

/// Probability that the walk from the center of `[−1,1]²` with correlation
/// `cos θ` ends at opposite corners. θ ∈ {0, π} are answered by their
/// analytic limits (0 and 1).
pub fn maxcut_center_prob(theta: f64, alpha: f64, grid_n: usize) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::domain(format!("θ must lie in [0, π], got {theta}")));
    }
    if theta == 0.0 {
        return Ok(0.0);
    }
    if theta == std::f64::consts::PI {
        return Ok(1.0);
    }
    let p = DirichletProblem::new(theta.cos(), alpha, Boundary::MaxcutPm).with_grid(grid_n);
    Ok(solve_dirichlet(&p)?.center())
}
