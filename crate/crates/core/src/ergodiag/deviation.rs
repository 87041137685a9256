use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::matchkit::{max_match, MatchMode};
use crate::scalar::Scalar;
use crate::seqcore::{MetricSystem, QuasiOrbit};

use super::function::TestFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport<S> {
    pub n: usize,
    pub k: usize,
    pub delta: S,
    pub fit: usize,
    /// Matched starts whose `k`-window in `z` crosses a switch.
    pub switch_contaminated: usize,
    /// Matched starts whose image window has at least `√δ k` unmatched indices.
    pub sparse_range: usize,
    /// Matched starts whose own window has at least `√δ k` unmatched indices.
    pub sparse_domain: usize,
    pub good_starts: usize,
    /// `n (1 − 2√δ − 2δ) − k`.
    pub good_starts_floor: S,
    /// `max_{ℓ ∈ A} |A_k(φ, T^ℓ x) − A_k(φ, σ^{π(ℓ)} z)|`, zero when `A` is empty.
    pub deviation: S,
    pub epsilon: S,
    /// `ε + 4√δ ‖φ‖_∞`.
    pub bound: S,
}

impl<S: Scalar> DeviationReport<S> {
    pub fn within_bound(&self) -> bool {
        self.deviation <= self.bound
    }
}

/// Compares `k`-window averages of `φ` along `x` and along the quasi-orbit `z`
/// at matched starts, after discarding starts near switches of `z` and starts
/// where the match is sparse on either side.
pub fn matched_average_deviation<S: Scalar, M: MetricSystem<S>>(
    sys: &M,
    x: &[M::Point],
    z: &QuasiOrbit<M::Point>,
    phi: &TestFunction<M::Point, S>,
    k: usize,
    delta: S,
    n: usize,
) -> Result<DeviationReport<S>> {
    if k == 0 || k > n {
        return Err(FkError::Invalid(format!("window length {k} must lie in [1, {n}]")));
    }
    let zp = z.points.points();
    let needed = n + k;
    if x.len() < n || zp.len() < needed {
        return Err(FkError::HorizonTooShort { needed, available: x.len().min(zp.len()) });
    }
    let pi = max_match(sys, x, zp, n, delta, MatchMode::Dp)?;
    let gap = pi.gap();
    if !(gap < delta) {
        return Err(FkError::NoAdequateMatch { gap: gap.as_f64(), delta: delta.as_f64() });
    }

    let mut in_domain = vec![false; n];
    let mut in_range = vec![false; n];
    for &(i, j) in &pi.pairs {
        in_domain[i] = true;
        in_range[j] = true;
    }
    let prefix = |flags: &[bool]| {
        let mut c = vec![0usize; flags.len() + 1];
        for (t, &f) in flags.iter().enumerate() {
            c[t + 1] = c[t] + usize::from(!f);
        }
        c
    };
    let missing_d = prefix(&in_domain);
    let missing_r = prefix(&in_range);
    // Windows of the image side may run past `n`; indices there count as unmatched.
    let missing_in = |c: &[usize], a: usize, len: usize| {
        let b = (a + len).min(n);
        c[b] - c[a] + (a + len - b)
    };

    let fx: Vec<S> = x[..n].iter().map(|p| phi.eval(p)).collect();
    let fz: Vec<S> = zp[..needed].iter().map(|p| phi.eval(p)).collect();
    let window = |v: &[S], a: usize| v[a..a + k].iter().copied().sum::<S>() / S::count(k);

    let root = delta.sqrt();
    let threshold = root * S::count(k);
    let (mut a_z, mut a_r, mut a_d, mut good) = (0usize, 0usize, 0usize, 0usize);
    let mut deviation = S::zero();
    for &(l, m) in &pi.pairs {
        if l + k >= n {
            continue;
        }
        // A switch at m + i + 1 for some 0 ≤ i < k.
        let next = z.switch_indices.partition_point(|&s| s <= m);
        let contaminated = z.switch_indices.get(next).is_some_and(|&s| s <= m + k);
        let sparse_r = S::count(missing_in(&missing_r, m, k)) >= threshold;
        let sparse_d = S::count(missing_in(&missing_d, l, k)) >= threshold;
        a_z += usize::from(contaminated);
        a_r += usize::from(sparse_r);
        a_d += usize::from(sparse_d);
        if contaminated || sparse_r || sparse_d {
            continue;
        }
        good += 1;
        deviation = deviation.max((window(&fx, l) - window(&fz, m)).abs());
    }
    let epsilon = phi.modulus(delta);
    let two = S::lit(2.0);
    Ok(DeviationReport {
        n,
        k,
        delta,
        fit: pi.fit(),
        switch_contaminated: a_z,
        sparse_range: a_r,
        sparse_domain: a_d,
        good_starts: good,
        good_starts_floor: S::count(n) * (S::one() - two * root - two * delta) - S::count(k),
        deviation,
        epsilon,
        bound: epsilon + S::lit(4.0) * root * phi.sup_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{assemble_quasi_orbit, FullShift, PeriodicOrbit, SymbolicPoint};
    use std::collections::BTreeMap;

    fn bit() -> TestFunction<SymbolicPoint, f64> {
        TestFunction::symbol_weight(BTreeMap::from([(0, 0.0), (1, 1.0)])).unwrap()
    }

    #[test]
    fn identical_periodic_sequences() {
        let o = PeriodicOrbit::from_word(&[0, 0, 1, 0, 1]).unwrap();
        let z = assemble_quasi_orbit(std::slice::from_ref(&o), &[500]).unwrap();
        let r = matched_average_deviation(&FullShift::binary(), z.points.points(), &z, &bit(), 20, 1e-3, 400).unwrap();
        assert_eq!(r.deviation, 0.0);
        assert_eq!(r.good_starts, 400 - 20);
        assert!(r.within_bound());
    }

    #[test]
    fn frequent_switches_shrink_the_good_set() {
        // Segments of ten points alternating between 0^∞ and (01)^∞.
        let a = PeriodicOrbit::from_word(&[0]).unwrap();
        let b = PeriodicOrbit::from_word(&[0, 1]).unwrap();
        let mut pts = Vec::new();
        for t in 0..70 {
            let o = if t % 2 == 0 { &a } else { &b };
            pts.extend(o.segment(10 * t, 10));
        }
        let switches: Vec<usize> = (1..70).map(|t| 10 * t).collect();
        let dense = QuasiOrbit { points: crate::seqcore::PointSeq::new(pts).unwrap(), switch_indices: switches };
        let x = dense.points.points();
        let r = matched_average_deviation(&FullShift::binary(), x, &dense, &bit(), 5, 1e-3, 600).unwrap();
        assert!(r.switch_contaminated > 0);
        assert!(r.good_starts < 600 - 5);
        assert!(r.within_bound());
    }

    #[test]
    fn poor_match_is_rejected() {
        let x = PeriodicOrbit::from_word(&[0]).unwrap();
        let z = assemble_quasi_orbit(&[PeriodicOrbit::from_word(&[1]).unwrap()], &[100]).unwrap();
        let err = matched_average_deviation(&FullShift::binary(), &x.segment(0, 100), &z, &bit(), 5, 0.1, 50);
        assert!(matches!(err, Err(FkError::NoAdequateMatch { .. })));
    }
}
