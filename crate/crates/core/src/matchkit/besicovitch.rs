use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;
use crate::seqcore::MetricSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Besicovitch<S> {
    /// `(1/n) Σ ρ(x_j, z_j)`.
    pub db: S,
    /// `inf{δ > 0 : |{j < n : ρ(x_j, z_j) ≥ δ}| / n < δ}`.
    pub db_prime: S,
}

/// Finite-horizon Besicovitch quantities over the first `n` points.
///
/// The infimum is computed exactly: on each interval between consecutive
/// distinct distances the counting function is constant.
pub fn besicovitch<S: Scalar, M: MetricSystem<S>>(sys: &M, x: &[M::Point], z: &[M::Point], n: usize) -> Result<Besicovitch<S>> {
    if n == 0 {
        return Err(FkError::Invalid("horizon must be at least 1".into()));
    }
    if x.len() < n || z.len() < n {
        return Err(FkError::HorizonTooShort { needed: n, available: x.len().min(z.len()) });
    }
    let mut d: Vec<S> = (0..n).map(|j| sys.distance(&x[j], &z[j])).collect();
    let db = d.iter().fold(S::zero(), |a, &b| a + b) / S::count(n);
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    Ok(Besicovitch { db, db_prime: density_infimum(&d) })
}

/// `inf{δ > 0 : #{v ≥ δ} / n < δ}` for sorted nonnegative values.
pub(crate) fn density_infimum<S: Scalar>(sorted: &[S]) -> S {
    let n = sorted.len();
    let mut lo = S::zero();
    let mut idx = 0;
    loop {
        while idx < n && sorted[idx] <= lo {
            idx += 1;
        }
        // For δ in (lo, next], the values ≥ δ are exactly those > lo.
        let frac = S::count(n - idx) / S::count(n);
        let cand = lo.max(frac);
        if idx == n || cand < sorted[idx] {
            return cand;
        }
        lo = sorted[idx];
    }
}
