use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;
use crate::seqcore::MetricSystem;

use super::lcs::{lcs_len_by, lcs_len_classes, lcs_pairs_by};

/// How much a reported gap can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    Exact,
    /// A rigorous upper bound on the limiting quantity.
    UpperBound,
    /// The refinement budget ran out before successive values stabilised;
    /// still an upper bound, but possibly a loose one.
    Unconverged,
}

/// An order-preserving partial bijection `π` between `[0, n)` and `[0, n)`
/// pairing only points at distance `< delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Match<S> {
    pub pairs: Vec<(usize, usize)>,
    pub n: usize,
    pub delta: S,
}

impl<S: Scalar> Match<S> {
    pub fn empty(n: usize, delta: S) -> Self {
        Self { pairs: Vec::new(), n, delta }
    }

    pub fn identity(n: usize, delta: S) -> Self {
        Self { pairs: (0..n).map(|i| (i, i)).collect(), n, delta }
    }

    pub fn fit(&self) -> usize {
        self.pairs.len()
    }

    /// `1 − |π| / n`.
    pub fn gap(&self) -> S {
        S::count(self.n - self.fit()) / S::count(self.n)
    }

    pub fn image_of(&self, i: usize) -> Option<usize> {
        self.pairs.binary_search_by_key(&i, |p| p.0).ok().map(|k| self.pairs[k].1)
    }

    /// Index bounds and strict monotonicity in both coordinates.
    pub fn check_structure(&self) -> Result<()> {
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            if i >= self.n || j >= self.n {
                return Err(FkError::Invalid(format!("pair ({i}, {j}) outside horizon {}", self.n)));
            }
            if k > 0 {
                let (pi, pj) = self.pairs[k - 1];
                if i <= pi || j <= pj {
                    return Err(FkError::Invalid(format!("pairs ({pi}, {pj}) and ({i}, {j}) not order preserving")));
                }
            }
        }
        Ok(())
    }

    /// All invariants, including `ρ(x_i, z_{π(i)}) < δ` for every pair.
    pub fn validate<M: MetricSystem<S>>(&self, sys: &M, x: &[M::Point], z: &[M::Point]) -> Result<()> {
        self.check_structure()?;
        for &(i, j) in &self.pairs {
            if i >= x.len() || j >= z.len() {
                return Err(FkError::HorizonTooShort { needed: i.max(j) + 1, available: x.len().min(z.len()) });
            }
            let d = sys.distance(&x[i], &z[j]);
            if d >= self.delta {
                return Err(FkError::Invalid(format!("pair ({i}, {j}) at distance {d} ≥ δ = {}", self.delta)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    Dp,
    Brute,
}

/// Largest horizon accepted by [`MatchMode::Brute`].
pub const BRUTE_MAX: usize = 12;

/// `f̄_{n,δ}` together with the fit it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapValue<S> {
    pub value: S,
    pub n: usize,
    pub delta: S,
    pub fit: usize,
    pub certified: Certification,
}

/// The closeness relation `ρ(x_i, z_j) < δ` on two finite stretches.
pub(crate) enum Closeness<'a, S: Scalar, M: MetricSystem<S>> {
    Classes(Vec<u32>, Vec<u32>),
    Oracle { sys: &'a M, x: &'a [M::Point], z: &'a [M::Point], delta: S },
}

impl<'a, S: Scalar, M: MetricSystem<S>> Closeness<'a, S, M> {
    pub(crate) fn new(sys: &'a M, x: &'a [M::Point], z: &'a [M::Point], delta: S) -> Self {
        let all: Vec<&M::Point> = x.iter().chain(z.iter()).collect();
        match sys.closeness_classes(&all, delta) {
            Some(mut ids) => {
                let cz = ids.split_off(x.len());
                Closeness::Classes(ids, cz)
            }
            None => Closeness::Oracle { sys, x, z, delta },
        }
    }

    #[inline]
    pub(crate) fn close(&self, i: usize, j: usize) -> bool {
        match self {
            Closeness::Classes(a, b) => a[i] == b[j],
            Closeness::Oracle { sys, x, z, delta } => sys.distance(&x[i], &z[j]) < *delta,
        }
    }

    pub(crate) fn lcs_len(&self, rows: usize, cols: usize) -> usize {
        match self {
            Closeness::Classes(a, b) => lcs_len_classes(a[..rows].iter().copied(), &b[..cols]),
            Closeness::Oracle { .. } => lcs_len_by(rows, cols, |i, j| self.close(i, j)),
        }
    }
}

fn check_inputs<S: Scalar>(xl: usize, zl: usize, n: usize, delta: S) -> Result<()> {
    if !(delta > S::zero()) {
        return Err(FkError::Invalid(format!("δ must be positive, got {delta}")));
    }
    if n == 0 {
        return Err(FkError::Invalid("horizon must be at least 1".into()));
    }
    if xl < n || zl < n {
        return Err(FkError::HorizonTooShort { needed: n, available: xl.min(zl) });
    }
    Ok(())
}

/// A maximal `(n, δ)`-match between the first `n` points of `x` and `z`.
pub fn max_match<S: Scalar, M: MetricSystem<S>>(
    sys: &M,
    x: &[M::Point],
    z: &[M::Point],
    n: usize,
    delta: S,
    mode: MatchMode,
) -> Result<Match<S>> {
    check_inputs(x.len(), z.len(), n, delta)?;
    let close = Closeness::new(sys, &x[..n], &z[..n], delta);
    let pairs = match mode {
        MatchMode::Dp => lcs_pairs_by(n, n, |i, j| close.close(i, j)),
        MatchMode::Brute => {
            if n > BRUTE_MAX {
                return Err(FkError::BruteTooLarge { n, max: BRUTE_MAX });
            }
            brute_pairs(n, |i, j| close.close(i, j))
        }
    };
    Ok(Match { pairs, n, delta })
}

/// Exhaustive search over every order-preserving partial bijection.
fn brute_pairs<F: Fn(usize, usize) -> bool>(n: usize, close: F) -> Vec<(usize, usize)> {
    fn go<F: Fn(usize, usize) -> bool>(
        i: usize,
        next_j: usize,
        n: usize,
        close: &F,
        cur: &mut Vec<(usize, usize)>,
        best: &mut Vec<(usize, usize)>,
    ) {
        if i == n {
            if cur.len() > best.len() {
                *best = cur.clone();
            }
            return;
        }
        go(i + 1, next_j, n, close, cur, best);
        for j in next_j..n {
            if close(i, j) {
                cur.push((i, j));
                go(i + 1, j + 1, n, close, cur, best);
                cur.pop();
            }
        }
    }
    let mut best = Vec::new();
    go(0, 0, n, &close, &mut Vec::new(), &mut best);
    best
}

/// `f̄_{n,δ}(x, z) = 1 − max|π| / n`.
pub fn gap<S: Scalar, M: MetricSystem<S>>(sys: &M, x: &[M::Point], z: &[M::Point], n: usize, delta: S) -> Result<GapValue<S>> {
    check_inputs(x.len(), z.len(), n, delta)?;
    let fit = Closeness::new(sys, &x[..n], &z[..n], delta).lcs_len(n, n);
    Ok(GapValue {
        value: S::count(n - fit) / S::count(n),
        n,
        delta,
        fit,
        certified: Certification::Exact,
    })
}

/// `π2 ∘ π1`, an `(n, δ1 + δ2)`-match from `x` to `u` when `π1: x → z` and `π2: z → u`.
pub fn compose_matches<S: Scalar>(p1: &Match<S>, p2: &Match<S>) -> Result<Match<S>> {
    if p1.n != p2.n {
        return Err(FkError::HorizonMismatch(p1.n, p2.n));
    }
    let pairs = p1
        .pairs
        .iter()
        .filter_map(|&(i, j)| p2.image_of(j).map(|k| (i, k)))
        .collect();
    Ok(Match { pairs, n: p1.n, delta: p1.delta + p2.delta })
}

/// Finite-horizon analogue of `F̄_K`: `inf{δ : f̄_{n,δ}(x, z) < δ}`, bisected to `tol`.
pub fn fk_finite<S: Scalar, M: MetricSystem<S>>(sys: &M, x: &[M::Point], z: &[M::Point], n: usize, tol: S) -> Result<S> {
    let (mut lo, mut hi) = (S::zero(), sys.diameter() + tol);
    while hi - lo > tol {
        let mid = (lo + hi) / S::lit(2.0);
        if gap(sys, x, z, n, mid)?.value < mid {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
