use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::matchkit::word_metrics;
use crate::scalar::Scalar;

use super::blocks::BlockDistribution;

pub const MAX_COST_ENTRIES: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    Edit,
    Hamming,
}

/// A joining of two block distributions, stored sparsely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling<S> {
    pub n: usize,
    pub mass: Vec<(Vec<u8>, Vec<u8>, S)>,
}

impl<S: Scalar> Coupling<S> {
    /// Largest deviation of either marginal from the given distributions.
    pub fn marginal_error(&self, mu: &BlockDistribution<S>, nu: &BlockDistribution<S>) -> S {
        let mut rows: std::collections::BTreeMap<&[u8], S> = mu.probs.keys().map(|k| (k.as_slice(), S::zero())).collect();
        let mut cols: std::collections::BTreeMap<&[u8], S> = nu.probs.keys().map(|k| (k.as_slice(), S::zero())).collect();
        for (u, w, m) in &self.mass {
            let r = rows.entry(u.as_slice()).or_insert(S::zero());
            *r = *r + *m;
            let c = cols.entry(w.as_slice()).or_insert(S::zero());
            *c = *c + *m;
        }
        let er = rows.iter().map(|(k, &v)| (v - mu.prob(k)).abs());
        let ec = cols.iter().map(|(k, &v)| (v - nu.prob(k)).abs());
        er.chain(ec).fold(S::zero(), S::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult<S> {
    pub value: S,
    pub plan: Coupling<S>,
    /// Optimality certificate: worst dual infeasibility or marginal violation.
    pub residual: S,
}

/// Optimal transport cost between two `n`-block distributions under `f̄_n` or `d̄_n`.
pub fn transport_block_distance<S: Scalar>(
    mu: &BlockDistribution<S>,
    nu: &BlockDistribution<S>,
    cost: CostKind,
) -> Result<TransportResult<S>> {
    if mu.n != nu.n {
        return Err(FkError::LengthMismatch(mu.n, nu.n));
    }
    let rows: Vec<(&[u8], f64)> = mu.probs.iter().filter(|(_, &p)| p > S::zero()).map(|(w, p)| (w.as_slice(), p.as_f64())).collect();
    let cols: Vec<(&[u8], f64)> = nu.probs.iter().filter(|(_, &p)| p > S::zero()).map(|(w, p)| (w.as_slice(), p.as_f64())).collect();
    let entries = rows.len().saturating_mul(cols.len());
    if entries > MAX_COST_ENTRIES {
        return Err(FkError::ProblemTooLarge { entries, max: MAX_COST_ENTRIES });
    }
    let mut c = Vec::with_capacity(entries);
    for (u, _) in &rows {
        for (w, _) in &cols {
            let m = word_metrics::<f64>(u, w)?;
            c.push(match cost {
                CostKind::Edit => m.edit,
                CostKind::Hamming => m.hamming,
            });
        }
    }
    let a: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let b: Vec<f64> = cols.iter().map(|r| r.1).collect();
    let sol = solve_transport(&a, &b, &c)?;
    let plan = Coupling {
        n: mu.n,
        mass: sol
            .flows
            .iter()
            .map(|&(i, j, x)| (rows[i].0.to_vec(), cols[j].0.to_vec(), S::lit(x)))
            .collect(),
    };
    Ok(TransportResult { value: S::lit(sol.value), plan, residual: S::lit(sol.residual) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportSolution {
    /// Positive entries `(i, j, x_ij)` in row-major order.
    pub flows: Vec<(usize, usize, f64)>,
    pub value: f64,
    pub residual: f64,
}

/// Transportation simplex: northwest-corner start, potentials for pricing,
/// lowest-index entering and leaving cells (which also rules out cycling).
pub fn solve_transport(a: &[f64], b: &[f64], cost: &[f64]) -> Result<TransportSolution> {
    let (m, n) = (a.len(), b.len());
    if m == 0 || n == 0 || cost.len() != m * n {
        return Err(FkError::Invalid("transport problem dimensions do not match".into()));
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if (sa - 1.0).abs() > 1e-9 || (sb - 1.0).abs() > 1e-9 {
        return Err(FkError::InfeasibleMarginals { left: sa, right: sb });
    }
    let mut x = vec![0.0f64; m * n];
    let mut basic = vec![false; m * n];
    {
        let (mut ra, mut rb) = (a.to_vec(), b.to_vec());
        let (mut i, mut j) = (0, 0);
        loop {
            let t = ra[i].min(rb[j]);
            x[i * n + j] = t;
            basic[i * n + j] = true;
            ra[i] -= t;
            rb[j] -= t;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && ra[i] <= rb[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    let scale = cost.iter().fold(1.0f64, |acc, &c| acc.max(c.abs()));
    let eps = 1e-12 * scale;
    let mut u = vec![0.0f64; m];
    let mut v = vec![0.0f64; n];
    let max_iter = 50 * (m + n) * (m + n) + 1000;
    for _ in 0..max_iter {
        potentials(m, n, cost, &basic, &mut u, &mut v);
        let entering = (0..m * n).find(|&k| !basic[k] && cost[k] - u[k / n] - v[k % n] < -eps);
        let Some(e) = entering else {
            return Ok(finish(m, n, a, b, cost, &x, &u, &v));
        };
        let cycle = find_cycle(m, n, &basic, e / n, e % n);
        // Cells alternate −, +, −, … after the entering cell.
        let minus: Vec<usize> = cycle.iter().step_by(2).copied().collect();
        let theta = minus.iter().map(|&k| x[k]).fold(f64::INFINITY, f64::min);
        let leave = *minus
            .iter()
            .filter(|&&k| x[k] <= theta)
            .min()
            .expect("cycle has a leaving cell");
        for (t, &k) in cycle.iter().enumerate() {
            if t % 2 == 0 {
                x[k] = (x[k] - theta).max(0.0);
            } else {
                x[k] += theta;
            }
        }
        x[e] = theta;
        basic[e] = true;
        basic[leave] = false;
        x[leave] = 0.0;
    }
    Err(FkError::Invalid("transport simplex iteration limit reached".into()))
}

fn potentials(m: usize, n: usize, c: &[f64], basic: &[bool], u: &mut [f64], v: &mut [f64]) {
    let mut row_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut col_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for k in (0..m * n).filter(|&k| basic[k]) {
        row_adj[k / n].push(k % n);
        col_adj[k % n].push(k / n);
    }
    let mut seen_r = vec![false; m];
    let mut seen_c = vec![false; n];
    u[0] = 0.0;
    seen_r[0] = true;
    // Nodes: rows are 0..m, columns m..m+n.
    let mut q = VecDeque::from([0usize]);
    while let Some(node) = q.pop_front() {
        if node < m {
            for &j in &row_adj[node] {
                if !seen_c[j] {
                    seen_c[j] = true;
                    v[j] = c[node * n + j] - u[node];
                    q.push_back(m + j);
                }
            }
        } else {
            let j = node - m;
            for &i in &col_adj[j] {
                if !seen_r[i] {
                    seen_r[i] = true;
                    u[i] = c[i * n + j] - v[j];
                    q.push_back(i);
                }
            }
        }
    }
}

/// Basis cells on the tree path from column `je` back to row `ie`.
fn find_cycle(m: usize, n: usize, basic: &[bool], ie: usize, je: usize) -> Vec<usize> {
    let mut row_adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut col_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for k in (0..m * n).filter(|&k| basic[k]) {
        row_adj[k / n].push(k % n);
        col_adj[k % n].push(k / n);
    }
    let mut parent = vec![usize::MAX; m + n];
    let start = ie;
    parent[start] = start;
    let mut q = VecDeque::from([start]);
    while let Some(node) = q.pop_front() {
        if node == m + je {
            break;
        }
        let next: Vec<usize> = if node < m {
            row_adj[node].iter().map(|&j| m + j).collect()
        } else {
            col_adj[node - m].clone()
        };
        for nb in next {
            if parent[nb] == usize::MAX {
                parent[nb] = node;
                q.push_back(nb);
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = m + je;
    while node != start {
        let p = parent[node];
        let cell = if node < m { node * n + (p - m) } else { p * n + (node - m) };
        cells.push(cell);
        node = p;
    }
    cells
}

#[allow(clippy::too_many_arguments)]
fn finish(m: usize, n: usize, a: &[f64], b: &[f64], c: &[f64], x: &[f64], u: &[f64], v: &[f64]) -> TransportSolution {
    let mut dual = 0.0f64;
    let mut slack = 0.0f64;
    for k in 0..m * n {
        let r = c[k] - u[k / n] - v[k % n];
        dual = dual.max(-r);
        if x[k] > 0.0 {
            slack = slack.max(r.abs());
        }
    }
    let mut marg = 0.0f64;
    for i in 0..m {
        let s: f64 = (0..n).map(|j| x[i * n + j]).sum();
        marg = marg.max((s - a[i]).abs());
    }
    for j in 0..n {
        let s: f64 = (0..m).map(|i| x[i * n + j]).sum();
        marg = marg.max((s - b[j]).abs());
    }
    let flows: Vec<(usize, usize, f64)> = (0..m * n).filter(|&k| x[k] > 0.0).map(|k| (k / n, k % n, x[k])).collect();
    let value = flows.iter().map(|&(i, j, f)| f * c[i * n + j]).sum();
    TransportSolution { flows, value, residual: dual.max(slack).max(marg) }
}
