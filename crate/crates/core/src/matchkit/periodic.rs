use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;
use crate::seqcore::{MetricSystem, PeriodicOrbit};

use super::lcs::{lcs_len_by, lcs_len_classes};
use super::matching::{Certification, Closeness, GapValue};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkOptions<S> {
    /// Stabilisation tolerance for doublings and bracket width for the δ bisection.
    pub tol: S,
    /// Largest repetition count `n` in `f̄_{nN,δ}` (or in block cycles).
    pub n_max: usize,
    /// Common periods up to this size are handled exactly along doublings.
    pub exact_horizon: usize,
    /// Block shapes with more closeness cells than this are skipped after the first level.
    pub max_cells: u64,
}

impl<S: Scalar> Default for FkOptions<S> {
    fn default() -> Self {
        Self { tol: S::lit(1e-3), n_max: 8, exact_horizon: 4096, max_cells: 1 << 37 }
    }
}

impl<S: Scalar> FkOptions<S> {
    pub fn with_tol(tol: S) -> Self {
        Self { tol, ..Self::default() }
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> u128 {
    (a / gcd(a, b)) as u128 * b as u128
}

/// Closeness between orbit phases, indexed modulo the periods.
enum PhaseTable {
    Classes(Vec<u32>, Vec<u32>),
    Table(Vec<bool>, usize),
}

const MAX_PHASE_TABLE: usize = 50_000_000;

impl PhaseTable {
    fn new<S: Scalar, M: MetricSystem<S>>(
        sys: &M,
        x: &PeriodicOrbit<M::Point>,
        z: &PeriodicOrbit<M::Point>,
        delta: S,
    ) -> Result<Self> {
        let (xp, zp) = (x.block().points(), z.block().points());
        Ok(match Closeness::new(sys, xp, zp, delta) {
            Closeness::Classes(a, b) => PhaseTable::Classes(a, b),
            c @ Closeness::Oracle { .. } => {
                let (p, q) = (xp.len(), zp.len());
                if p.saturating_mul(q) > MAX_PHASE_TABLE {
                    return Err(FkError::ProblemTooLarge { entries: p * q, max: MAX_PHASE_TABLE });
                }
                let mut t = Vec::with_capacity(p * q);
                for i in 0..p {
                    t.extend((0..q).map(|j| c.close(i, j)));
                }
                PhaseTable::Table(t, q)
            }
        })
    }

    fn any_close(&self) -> bool {
        match self {
            PhaseTable::Classes(a, b) => {
                let set: std::collections::HashSet<u32> = a.iter().copied().collect();
                b.iter().any(|c| set.contains(c))
            }
            PhaseTable::Table(t, _) => t.iter().any(|&c| c),
        }
    }

    /// LCS fit of `rows` consecutive x-points from phase `px` against `cols`
    /// consecutive z-points from phase `pz`.
    fn fit(&self, rows: usize, cols: usize, px: usize, pz: usize) -> usize {
        match self {
            PhaseTable::Classes(a, b) => {
                let (p, q) = (a.len(), b.len());
                let bs: Vec<u32> = (0..cols).map(|j| b[(pz + j) % q]).collect();
                lcs_len_classes((0..rows).map(|i| a[(px + i) % p]), &bs)
            }
            PhaseTable::Table(t, q) => {
                let q = *q;
                let p = t.len() / q;
                lcs_len_by(rows, cols, |i, j| t[((px + i) % p) * q + (pz + j) % q])
            }
        }
    }
}

/// Incremental upper bounds on `f̄_δ(x, z)` for a fixed closeness relation.
///
/// Every shape pairs `r` points of `x` (a whole number of periods, starting at
/// phase `px`) with `c` points of `z` (likewise); repeating the block match
/// forever shows `f̄_δ ≤ 1 − fit / max(r, c)`. With `r = c = nN` and phase 0
/// this is `f̄_{nN,δ}` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Shape {
    r: usize,
    c: usize,
    px: usize,
    pz: usize,
}

/// Cell budget for scanning all relative phases at the first level.
const PHASE_SCAN_CELLS: u128 = 1 << 34;

struct Refiner {
    table: PhaseTable,
    levels: Vec<Vec<Shape>>,
    level: usize,
    shape: usize,
    level_best: Vec<f64>,
    best: f64,
    best_shape: (usize, usize),
    best_fit: usize,
    tol: f64,
    done: Option<Certification>,
}

impl Refiner {
    fn new<S: Scalar, M: MetricSystem<S>>(
        sys: &M,
        x: &PeriodicOrbit<M::Point>,
        z: &PeriodicOrbit<M::Point>,
        delta: S,
        opts: &FkOptions<S>,
    ) -> Result<Self> {
        if !(opts.tol > S::zero()) {
            return Err(FkError::Invalid("tolerance must be positive".into()));
        }
        let table = PhaseTable::new(sys, x, z, delta)?;
        let (p, q) = (x.period(), z.period());
        let n = lcm(p, q);
        let mut levels: Vec<Vec<Shape>> = Vec::new();
        let mut a = 1usize;
        while a <= opts.n_max.max(1) {
            let mut dims: Vec<(usize, usize)> = if n <= opts.exact_horizon as u128 {
                let h = a * n as usize;
                vec![(h, h)]
            } else {
                let mut v = Vec::new();
                for (r, c) in [
                    (a * p, (a * p / q) * q),
                    (a * p, (a * p).div_ceil(q) * q),
                    ((a * q / p) * p, a * q),
                    ((a * q).div_ceil(p) * p, a * q),
                ] {
                    if r > 0 && c > 0 && !v.contains(&(r, c)) {
                        v.push((r, c));
                    }
                }
                v
            };
            dims.sort_by_key(|&(r, c)| ((r as u128) * (c as u128), r.max(c), r.min(c), r));
            if !levels.is_empty() {
                dims.retain(|&(r, c)| (r as u128) * (c as u128) <= opts.max_cells as u128);
            }
            if dims.is_empty() {
                break;
            }
            let mut shapes: Vec<Shape> = dims.iter().map(|&(r, c)| Shape { r, c, px: 0, pz: 0 }).collect();
            if levels.is_empty() {
                // Relative phase shifts: rotating either block keeps the bound valid.
                for &(r, c) in &dims {
                    if (p + q) as u128 * (r as u128) * (c as u128) <= PHASE_SCAN_CELLS {
                        shapes.extend((1..q).map(|pz| Shape { r, c, px: 0, pz }));
                        shapes.extend((1..p).map(|px| Shape { r, c, px, pz: 0 }));
                    }
                }
            }
            levels.push(shapes);
            a *= 2;
        }
        let mut r = Self {
            table,
            levels,
            level: 0,
            shape: 0,
            level_best: Vec::new(),
            best: 1.0,
            best_shape: (p, q),
            best_fit: 0,
            tol: opts.tol.as_f64(),
            done: None,
        };
        if !r.table.any_close() {
            // No phase pair is close, so nothing ever matches.
            r.best_shape = (n.min(usize::MAX as u128) as usize, n.min(usize::MAX as u128) as usize);
            r.done = Some(Certification::Exact);
        }
        Ok(r)
    }

    /// Evaluates one more shape; false once nothing is left to do.
    fn step(&mut self) -> bool {
        if self.done.is_some() {
            return false;
        }
        if self.level >= self.levels.len() {
            self.done = Some(Certification::Unconverged);
            return false;
        }
        let Shape { r, c, px, pz } = self.levels[self.level][self.shape];
        let fit = self.table.fit(r, c, px, pz);
        let h = r.max(c);
        let v = (h - fit) as f64 / h as f64;
        if v < self.best || (v == self.best && fit > self.best_fit && self.best_fit == 0) {
            self.best = v;
            self.best_shape = (r, c);
            self.best_fit = fit;
        }
        if self.best == 0.0 {
            self.done = Some(Certification::Exact);
            return true;
        }
        self.shape += 1;
        if self.shape == self.levels[self.level].len() {
            self.level_best.push(self.best);
            self.level += 1;
            self.shape = 0;
            let k = self.level_best.len();
            if k >= 2 && (self.level_best[k - 2] - self.level_best[k - 1]).abs() < self.tol {
                self.done = Some(Certification::UpperBound);
            }
        }
        true
    }

    fn refine_until(&mut self, target: f64) -> f64 {
        while self.best >= target && self.step() {}
        self.best
    }

    fn finish(&mut self) -> Certification {
        while self.step() {}
        self.done.unwrap_or(Certification::Unconverged)
    }

    fn value<S: Scalar>(&self, delta: S, certified: Certification) -> GapValue<S> {
        GapValue {
            value: S::lit(self.best),
            n: self.best_shape.0.max(self.best_shape.1),
            delta,
            fit: self.best_fit,
            certified,
        }
    }
}

/// `f̄_δ(x, z) = inf_n f̄_{nN,δ}` for periodic `x`, `z`, as a certified upper bound.
///
/// Small common periods are doubled exactly until consecutive values differ by
/// less than `tol`; large ones fall back to block-cycle bounds (see [`FkOptions`]).
pub fn fbar_delta_periodic<S: Scalar, M: MetricSystem<S>>(
    sys: &M,
    x: &PeriodicOrbit<M::Point>,
    z: &PeriodicOrbit<M::Point>,
    delta: S,
    opts: &FkOptions<S>,
) -> Result<GapValue<S>> {
    if !(delta > S::zero()) {
        return Err(FkError::Invalid(format!("δ must be positive, got {delta}")));
    }
    let mut r = Refiner::new(sys, x, z, delta, opts)?;
    let cert = r.finish();
    Ok(r.value(delta, cert))
}

/// Exact `f̄_{nN,δ}` for `n = 1, 2, 4, …` (`levels` values), `N = lcm` of the periods.
pub fn fbar_doubling_sequence<S: Scalar, M: MetricSystem<S>>(
    sys: &M,
    x: &PeriodicOrbit<M::Point>,
    z: &PeriodicOrbit<M::Point>,
    delta: S,
    levels: usize,
) -> Result<Vec<GapValue<S>>> {
    let table = PhaseTable::new(sys, x, z, delta)?;
    let n = lcm(x.period(), z.period());
    let limit = 1u128 << 20;
    let mut out = Vec::with_capacity(levels);
    for s in 0..levels {
        let h = n << s;
        if h > limit {
            return Err(FkError::ProblemTooLarge { entries: h.min(usize::MAX as u128) as usize, max: limit as usize });
        }
        let h = h as usize;
        let fit = table.fit(h, h, 0, 0);
        out.push(GapValue {
            value: S::count(h - fit) / S::count(h),
            n: h,
            delta,
            fit,
            certified: Certification::Exact,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkResult<S> {
    pub value: S,
    pub bracket: (S, S),
    pub certified: Certification,
}

/// `F̄_K(x, z) = inf{δ > 0 : f̄_δ(x, z) < δ}` by bisection on the monotone predicate.
///
/// The predicate is decided from upper bounds on `f̄_δ`, so a "true" answer is
/// rigorous and the returned bracket's upper end bounds `F̄_K` from above.
pub fn fk_distance<S: Scalar, M: MetricSystem<S>>(
    sys: &M,
    x: &PeriodicOrbit<M::Point>,
    z: &PeriodicOrbit<M::Point>,
    opts: &FkOptions<S>,
) -> Result<FkResult<S>> {
    if !(opts.tol > S::zero()) {
        return Err(FkError::Invalid("tolerance must be positive".into()));
    }
    let mut memo: HashMap<u64, Refiner> = HashMap::new();
    let mut unconverged = false;
    let mut pred = |delta: S| -> Result<bool> {
        let target = delta.as_f64();
        let key = sys.closeness_key(delta);
        let mut fresh;
        let r = match key {
            Some(k) => match memo.entry(k) {
                std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                std::collections::hash_map::Entry::Vacant(e) => e.insert(Refiner::new(sys, x, z, delta, opts)?),
            },
            None => {
                fresh = Refiner::new(sys, x, z, delta, opts)?;
                &mut fresh
            }
        };
        let v = r.refine_until(target);
        if v >= target && r.done == Some(Certification::Unconverged) {
            unconverged = true;
        }
        Ok(v < target)
    };
    let (mut lo, mut hi) = (S::zero(), sys.diameter() + opts.tol);
    while hi - lo > opts.tol {
        let mid = (lo + hi) / S::lit(2.0);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let certified = if unconverged { Certification::Unconverged } else { Certification::UpperBound };
    Ok(FkResult { value: (lo + hi) / S::lit(2.0), bracket: (lo, hi), certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::FullShift;

    fn orb(w: &[u8]) -> PeriodicOrbit<crate::SymbolicPoint> {
        PeriodicOrbit::from_word(w).unwrap()
    }

    #[test]
    fn fixed_point_against_alternating() {
        let sys = FullShift::binary();
        let o = FkOptions::<f64>::default();
        let (x, z) = (orb(&[0]), orb(&[0, 1]));
        let g = fbar_delta_periodic(&sys, &x, &z, 0.75, &o).unwrap();
        assert_eq!(g.value, 0.5);
        let g = fbar_delta_periodic(&sys, &x, &z, 0.25, &o).unwrap();
        assert_eq!(g.value, 1.0);
        assert_eq!(g.certified, Certification::Exact);
        let g = fbar_delta_periodic(&sys, &x, &x, 0.01, &o).unwrap();
        assert_eq!((g.value, g.certified), (0.0, Certification::Exact));

        let fk = fk_distance(&sys, &x, &z, &o).unwrap();
        assert!((fk.value - 0.5).abs() <= 1e-3, "{fk:?}");
        let fk = fk_distance(&sys, &z, &z.rotated(1), &o).unwrap();
        assert!(fk.value <= 1e-3);
    }

    #[test]
    fn block_mode_is_an_upper_bound_on_exact_values() {
        // With the first orbit a prefix-power of the second, both modes see the same alignment.
        let sys = FullShift::binary();
        let z = orb(&[0, 0, 1, 0, 1]);
        let mut w = Vec::new();
        for _ in 0..3 {
            w.extend_from_slice(&[0, 0, 1, 0, 1]);
        }
        w.extend_from_slice(&[1, 1]);
        let x = orb(&w);
        let exact = FkOptions::<f64>::default();
        let block = FkOptions { exact_horizon: 1, ..exact };
        for delta in [0.2, 0.3, 0.6, 1.0] {
            let e = fbar_delta_periodic(&sys, &x, &z, delta, &exact).unwrap();
            let b = fbar_delta_periodic(&sys, &x, &z, delta, &block).unwrap();
            assert!((0.0..=1.0).contains(&b.value) && (0.0..=1.0).contains(&e.value));
            if delta > 0.5 {
                // The aligned copy of z^3 inside one period of x already matches 15 of 17.
                assert!(b.value <= 2.0 / 17.0 + 1e-12, "delta {delta}: block {}", b.value);
            }
        }
        let same = fbar_delta_periodic(&sys, &x, &x, 0.1, &block).unwrap();
        assert_eq!(same.value, 0.0);
    }
}
