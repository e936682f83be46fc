//! Problem instances for the three constraint satisfaction problems, their
//! text formats, and exact evaluation of integral assignments.
//!
//! Graph files start with a header line `n m` followed by `m` edge lines
//! `i j [w]` (0-indexed vertices, weight defaults to 1). Lines starting with
//! `#` are comments. Lines containing `:` after the edge block are side
//! constraints (see [`crate::constrained`]) and are skipped here.
//!
//! Max-2SAT instances use the DIMACS CNF subset where every clause has
//! exactly two literals.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A weighted edge or arc between two distinct vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Weighted undirected graph for Max-Cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxCutInstance {
    pub n: usize,
    pub edges: Vec<Edge>,
}

/// Weighted directed graph for Max-DiCut; arc `i → j` is satisfied when
/// `i ∈ S` and `j ∉ S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiCutInstance {
    pub n: usize,
    pub arcs: Vec<Edge>,
}

/// A literal over 0-indexed variable `var`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    /// Truth value of the literal under a variable assignment.
    pub fn eval(&self, value: bool) -> bool {
        value != self.negated
    }

    /// Sign used by vector relaxations: `+1` for positive literals.
    pub fn sign(&self) -> f64 {
        if self.negated {
            -1.0
        } else {
            1.0
        }
    }
}

/// Weighted disjunction of two literals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub lits: [Literal; 2],
    pub weight: f64,
}

impl Clause {
    /// Truth table of the clause as a predicate over its two variables,
    /// ordered `[p(0,0), p(0,1), p(1,0), p(1,1)]`.
    pub fn truth_table(&self) -> [bool; 4] {
        let mut t = [false; 4];
        for (k, slot) in t.iter_mut().enumerate() {
            let a = k & 2 != 0;
            let b = k & 1 != 0;
            *slot = self.lits[0].eval(a) || self.lits[1].eval(b);
        }
        t
    }
}

/// Weighted Max-2SAT formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Max2SatInstance {
    pub n: usize,
    pub clauses: Vec<Clause>,
}

/// Tagged union of the supported problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum ProblemInstance {
    MaxCut(MaxCutInstance),
    Max2Sat(Max2SatInstance),
    DiCut(DiCutInstance),
}

impl ProblemInstance {
    /// Number of decision variables.
    pub fn n(&self) -> usize {
        match self {
            ProblemInstance::MaxCut(g) => g.n,
            ProblemInstance::Max2Sat(f) => f.n,
            ProblemInstance::DiCut(g) => g.n,
        }
    }

    /// Sum of all constraint weights.
    pub fn total_weight(&self) -> f64 {
        match self {
            ProblemInstance::MaxCut(g) => g.edges.iter().map(|e| e.weight).sum(),
            ProblemInstance::Max2Sat(f) => f.clauses.iter().map(|c| c.weight).sum(),
            ProblemInstance::DiCut(g) => g.arcs.iter().map(|e| e.weight).sum(),
        }
    }
}

/// Multilinear expansion `c0 + ci·x + cj·y + cij·x·y` of a binary predicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClauseCoeffs {
    pub c0: f64,
    pub ci: f64,
    pub cj: f64,
    pub cij: f64,
}

impl ClauseCoeffs {
    /// Evaluates the multilinear form at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.c0 + self.ci * x + self.cj * y + self.cij * x * y
    }
}

/// Unique multilinear coefficients of a predicate given by its truth table
/// `[p(0,0), p(0,1), p(1,0), p(1,1)]`.
pub fn clause_coeffs(truth_table: [bool; 4]) -> ClauseCoeffs {
    let p = truth_table.map(|b| if b { 1.0 } else { 0.0 });
    ClauseCoeffs {
        c0: p[0],
        ci: p[2] - p[0],
        cj: p[1] - p[0],
        cij: p[3] - p[2] - p[1] + p[0],
    }
}

/// Non-comment lines of `text` with their 1-based line numbers.
fn content_lines<'a>(
    text: &'a str,
    is_comment: impl Fn(&str) -> bool + 'a,
) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(move |(_, l)| !l.is_empty() && !is_comment(l))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

/// Parses the shared edge-list format. `directed` controls whether `(i,j)` and
/// `(j,i)` are the same edge when accumulating duplicates.
fn parse_edge_list(text: &str, directed: bool) -> Result<(usize, Vec<Edge>)> {
    let mut lines = content_lines(text, |l| l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header `n m`"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::parse(hline, "header must be `n m`"));
    }
    let n = parse_usize(toks[0], hline, "vertex count")?;
    let m = parse_usize(toks[1], hline, "edge count")?;

    // BTreeMap keeps a deterministic edge order after accumulation.
    let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut seen = 0usize;
    for (line, l) in lines {
        if seen == m {
            if l.contains(':') {
                continue;
            }
            return Err(Error::parse(
                line,
                format!("unexpected content after {m} edge lines"),
            ));
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(Error::parse(line, "edge line must be `i j [w]`"));
        }
        let i = parse_usize(toks[0], line, "vertex index")?;
        let j = parse_usize(toks[1], line, "vertex index")?;
        if i >= n || j >= n {
            return Err(Error::parse(
                line,
                format!("vertex index out of range for n = {n}"),
            ));
        }
        if i == j {
            return Err(Error::parse(line, format!("self-loop on vertex {i}")));
        }
        let w = match toks.get(2) {
            Some(t) => t
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("invalid weight `{t}`")))?,
            None => 1.0,
        };
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::parse(line, format!("weight must be finite and nonnegative, got {w}")));
        }
        let key = if directed { (i, j) } else { (i.min(j), i.max(j)) };
        *acc.entry(key).or_insert(0.0) += w;
        seen += 1;
    }
    if seen < m {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("expected {m} edge lines, found {seen}"),
        ));
    }
    let edges = acc
        .into_iter()
        .map(|((i, j), weight)| Edge { i, j, weight })
        .collect();
    Ok((n, edges))
}

/// Parses an undirected weighted graph; duplicate edges have their weights summed.
pub fn parse_graph(text: &str) -> Result<MaxCutInstance> {
    let (n, edges) = parse_edge_list(text, false)?;
    Ok(MaxCutInstance { n, edges })
}

/// Parses a directed weighted graph in the same format as [`parse_graph`];
/// line `i j w` is the arc `i → j`.
pub fn parse_digraph(text: &str) -> Result<DiCutInstance> {
    let (n, arcs) = parse_edge_list(text, true)?;
    Ok(DiCutInstance { n, arcs })
}

/// Parses a DIMACS CNF file in which every clause has exactly two literals.
pub fn parse_cnf2(text: &str) -> Result<Max2SatInstance> {
    let mut lines = content_lines(text, |l| l.starts_with('c') || l.starts_with('%'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header `p cnf n m`"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
        return Err(Error::parse(hline, "header must be `p cnf n m`"));
    }
    let n = parse_usize(toks[2], hline, "variable count")?;
    let m = parse_usize(toks[3], hline, "clause count")?;

    // Clauses may span lines; literals are accumulated until a terminating 0.
    let mut clauses = Vec::with_capacity(m);
    let mut pending: Vec<i64> = Vec::new();
    let mut last_line = hline;
    for (line, l) in lines {
        last_line = line;
        for tok in l.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid literal `{tok}`")))?;
            if v != 0 {
                if v.unsigned_abs() as usize > n {
                    return Err(Error::parse(
                        line,
                        format!("literal {v} out of range for n = {n}"),
                    ));
                }
                pending.push(v);
                continue;
            }
            let index = clauses.len();
            if pending.len() != 2 {
                return Err(Error::parse(
                    line,
                    format!(
                        "clause {index} has {} literals; exactly 2 are required",
                        pending.len()
                    ),
                ));
            }
            let lit = |v: i64| Literal {
                var: v.unsigned_abs() as usize - 1,
                negated: v < 0,
            };
            clauses.push(Clause {
                lits: [lit(pending[0]), lit(pending[1])],
                weight: 1.0,
            });
            pending.clear();
        }
    }
    if !pending.is_empty() {
        return Err(Error::parse(
            last_line,
            format!("clause {} is not terminated by 0", clauses.len()),
        ));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            last_line,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }
    Ok(Max2SatInstance { n, clauses })
}

/// Total weight satisfied by an integral assignment.
///
/// For Max-Cut and Max-DiCut `assignment[i]` means `i ∈ S`; for Max-2SAT it
/// is the truth value of variable `i`.
pub fn evaluate_assignment(instance: &ProblemInstance, assignment: &[bool]) -> Result<f64> {
    let n = instance.n();
    if assignment.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: assignment.len(),
        });
    }
    let value = match instance {
        ProblemInstance::MaxCut(g) => g
            .edges
            .iter()
            .filter(|e| assignment[e.i] != assignment[e.j])
            .map(|e| e.weight)
            .sum(),
        ProblemInstance::DiCut(g) => g
            .arcs
            .iter()
            .filter(|e| assignment[e.i] && !assignment[e.j])
            .map(|e| e.weight)
            .sum(),
        ProblemInstance::Max2Sat(f) => f
            .clauses
            .iter()
            .filter(|c| c.lits.iter().any(|l| l.eval(assignment[l.var])))
            .map(|c| c.weight)
            .sum(),
    };
    Ok(value)
}

/// Exhaustive optimum over all `2ⁿ` assignments (for `n ≤ 24`); used as a
/// test oracle and by the CLI for small instances.
pub fn brute_force_optimum(instance: &ProblemInstance) -> Result<(f64, Vec<bool>)> {
    let n = instance.n();
    if n > 24 {
        return Err(Error::domain(format!("brute force limited to n ≤ 24, got {n}")));
    }
    let mut best = (f64::NEG_INFINITY, vec![false; n]);
    let mut a = vec![false; n];
    for mask in 0u32..(1u32 << n) {
        for (k, slot) in a.iter_mut().enumerate() {
            *slot = mask >> k & 1 == 1;
        }
        let v = evaluate_assignment(instance, &a)?;
        if v > best.0 {
            best = (v, a.clone());
        }
    }
    Ok(best)
}
