use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matchkit::{fk_distance, FkOptions, FkResult};
use crate::scalar::Scalar;
use crate::seqcore::{assemble_quasi_orbit, QuasiOrbit, SymbolicPoint};

use super::synth::GiknSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck<S> {
    pub n: usize,
    pub m: usize,
    pub fk: FkResult<S>,
    pub bound: S,
    pub pass: bool,
}

/// Separation condition `γ_n < min_{i ≤ n} d_i / (3 · 2^n)`, with `d_i` the least
/// distance between distinct points of orbit `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCheck<S> {
    pub level: usize,
    pub gamma: Option<S>,
    pub min_distance: S,
    pub threshold: S,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport<S> {
    /// `F̄_K(Γ_n, Γ_{n+1}) < γ_n + (1 − κ_n) + tol`.
    pub consecutive: Vec<PairCheck<S>>,
    /// `F̄_K(Γ_n, Γ_m) ≤ Σ_{j=n}^{m−1} (γ_j + 1 − κ_j) + tol` for `m > n + 1`.
    pub pairs: Vec<PairCheck<S>>,
    pub separation: Vec<SeparationCheck<S>>,
    pub violations: Vec<String>,
}

impl<S> CauchyReport<S> {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Budget term `γ_n + (1 − κ_n)` of level `n`, from the declared budgets or,
/// failing that, from the recorded projection.
fn budget<S: Scalar>(gs: &GiknSequence<S>, n: usize) -> Option<S> {
    let l = &gs.levels[n];
    let g = l.gamma.or(l.approx.as_ref().map(|a| a.gamma))?;
    let k = l.kappa.or(l.approx.as_ref().map(|a| a.kappa))?;
    Some(g + S::one() - k)
}

/// Least shift distance between distinct rotations of a primitive word.
pub fn min_intra_orbit_distance<S: Scalar>(word: &[u8], depth: usize) -> S {
    let p = word.len();
    if p < 2 {
        return S::one();
    }
    let window = |i: usize| (0..depth).map(move |j| word[(i + j) % p]);
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| window(a).cmp(window(b)));
    let mut longest = 0usize;
    for w in idx.windows(2) {
        let lcp = window(w[0]).zip(window(w[1])).take_while(|(a, b)| a == b).count();
        longest = longest.max(lcp);
    }
    if longest >= depth {
        S::zero()
    } else {
        crate::scalar::dyadic(longest)
    }
}

fn check_pair<S: Scalar>(gs: &GiknSequence<S>, n: usize, m: usize, bound: S, strict: bool, opts: &FkOptions<S>) -> Result<PairCheck<S>> {
    let shift = gs.shift();
    let fk = fk_distance(&shift, &gs.orbit(n), &gs.orbit(m), opts)?;
    // The bracket's upper end is a rigorous upper bound on the distance.
    let upper = fk.bracket.1;
    let pass = if strict { upper < bound } else { upper <= bound };
    Ok(PairCheck { n, m, fk, bound, pass })
}

/// Checks consecutive and telescoped distance bounds, and reports the separation condition.
pub fn verify_cauchy<S: Scalar>(gs: &GiknSequence<S>, tol: S) -> Result<CauchyReport<S>> {
    verify_cauchy_with(gs, &FkOptions::with_tol(tol), true)
}

/// As [`verify_cauchy`], with explicit distance options; `all_pairs = false`
/// skips the non-consecutive pairs.
pub fn verify_cauchy_with<S: Scalar>(gs: &GiknSequence<S>, opts: &FkOptions<S>, all_pairs: bool) -> Result<CauchyReport<S>> {
    let levels = gs.len();
    let tol = opts.tol;
    let mut report = CauchyReport { consecutive: Vec::new(), pairs: Vec::new(), separation: Vec::new(), violations: Vec::new() };
    for n in 0..levels.saturating_sub(1) {
        let Some(b) = budget(gs, n) else {
            report.violations.push(format!("level {n}: no budget declared"));
            continue;
        };
        let c = check_pair(gs, n, n + 1, b + tol, true, opts)?;
        if !c.pass {
            report.violations.push(format!(
                "levels {n},{}: distance {} not below γ + (1 − κ) + tol = {}",
                n + 1,
                c.fk.bracket.1,
                c.bound
            ));
        }
        report.consecutive.push(c);
    }
    if all_pairs {
        for n in 0..levels {
            for m in n + 2..levels {
                let Some(sum) = (n..m).map(|j| budget(gs, j)).try_fold(S::zero(), |acc, b| b.map(|b| acc + b)) else {
                    continue;
                };
                let c = check_pair(gs, n, m, sum + tol, false, opts)?;
                if !c.pass {
                    report.violations.push(format!(
                        "levels {n},{m}: distance {} exceeds telescoped bound {}",
                        c.fk.bracket.1, c.bound
                    ));
                }
                report.pairs.push(c);
            }
        }
    }
    let depth = gs.shift().depth;
    let mut least = S::infinity();
    for (n, l) in gs.levels.iter().enumerate() {
        let d = min_intra_orbit_distance::<S>(&l.word, depth);
        least = least.min(d);
        let threshold = least * crate::scalar::dyadic::<S>(n) / S::lit(3.0);
        report.separation.push(SeparationCheck {
            level: n,
            gamma: l.gamma,
            min_distance: d,
            threshold,
            pass: l.gamma.map(|g| g < threshold),
        });
    }
    Ok(report)
}

/// `|χ_{n+1}| < α |χ_n|` per step; a zero exponent followed by zero counts as decay.
pub fn exponent_decay<S: Scalar>(gs: &GiknSequence<S>, alpha: S) -> Vec<bool> {
    gs.exponents()
        .windows(2)
        .map(|w| w[1].abs() < alpha * w[0].abs() || (w[0] == S::zero() && w[1] == S::zero()))
        .collect()
}

/// Concatenates orbit segments of lengths `(j + 1)|Γ_j|` while they fit in
/// `total_length`, extends the last segment to fill the rest, and truncates.
pub fn limit_quasi_orbit<S: Scalar>(gs: &GiknSequence<S>, total_length: usize) -> Result<QuasiOrbit<SymbolicPoint>> {
    let mut orbits = Vec::new();
    let mut lengths: Vec<usize> = Vec::new();
    let mut used = 0usize;
    for (j, l) in gs.levels.iter().enumerate() {
        let len = (j + 1) * l.word.len();
        if !lengths.is_empty() && used + len > total_length {
            break;
        }
        orbits.push(gs.orbit(j));
        lengths.push(len);
        used += len;
    }
    if used < total_length {
        let last = lengths.len() - 1;
        let p = orbits[last].period();
        lengths[last] += (total_length - used).div_ceil(p) * p;
    }
    let mut q = assemble_quasi_orbit(&orbits, &lengths)?;
    if q.len() > total_length && total_length > 0 {
        let mut pts = q.points.into_points();
        pts.truncate(total_length);
        q.points = crate::seqcore::PointSeq::new(pts)?;
        q.switch_indices.retain(|&s| s < total_length);
    }
    Ok(q)
}

/// Cyclic `depth`-blocks of a periodic word.
pub fn cyclic_blocks(word: &[u8], depth: usize) -> BTreeSet<Vec<u8>> {
    let p = word.len();
    (0..p).map(|i| (0..depth).map(|j| word[(i + j) % p]).collect()).collect()
}

/// `⋂_k ⋃_{n ≥ k}` of the `depth`-blocks of the available levels; a
/// finite-level approximation of the support of the limit.
pub fn support_blocks<S: Scalar>(gs: &GiknSequence<S>, depth: usize) -> BTreeSet<Vec<u8>> {
    let sets: Vec<BTreeSet<Vec<u8>>> = gs.levels.iter().map(|l| cyclic_blocks(&l.word, depth)).collect();
    let mut tail_union = BTreeSet::new();
    let mut out: Option<BTreeSet<Vec<u8>>> = None;
    for s in sets.iter().rev() {
        tail_union.extend(s.iter().cloned());
        out = Some(match out {
            None => tail_union.clone(),
            Some(acc) => acc.intersection(&tail_union).cloned().collect(),
        });
    }
    out.unwrap_or_default()
}
