use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;
use crate::seqcore::MetricSystem;

/// A finitely supported probability measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure<P, S> {
    pub support: Vec<P>,
    pub weights: Vec<S>,
}

impl<P, S: Scalar> DiscreteMeasure<P, S> {
    /// Checks lengths, nonnegativity and total mass `1 ± 1e-12`.
    pub fn new(support: Vec<P>, weights: Vec<S>) -> Result<Self> {
        if support.len() != weights.len() || support.is_empty() {
            return Err(FkError::Invalid(format!(
                "support of size {} with {} weights",
                support.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w < S::zero() || !w.is_finite()) {
            return Err(FkError::Invalid("weights must be finite and nonnegative".into()));
        }
        let total = weights.iter().fold(S::zero(), |a, &w| a + w);
        if (total - S::one()).abs() > S::lit(1e-12) {
            return Err(FkError::Invalid(format!("weights sum to {total}")));
        }
        Ok(Self { support, weights })
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

/// Assigns each point a representative id, merging points at distance zero.
pub(crate) fn merge_ids<S: Scalar, M: MetricSystem<S>>(sys: &M, pts: &[&M::Point]) -> Vec<u32> {
    if let Some(ids) = sys.closeness_classes(pts, S::min_positive_value()) {
        return ids;
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut ids = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        match reps.iter().position(|&r| sys.distance(pts[r], p) == S::zero()) {
            Some(k) => ids.push(k as u32),
            None => {
                ids.push(reps.len() as u32);
                reps.push(i);
            }
        }
    }
    ids
}

/// `m(x, n) = (1/n) Σ_{j<n} δ_{x_j}`, with coinciding points merged.
pub fn empirical_measure<S: Scalar, M: MetricSystem<S>>(sys: &M, x: &[M::Point], n: usize) -> Result<DiscreteMeasure<M::Point, S>> {
    if n == 0 {
        return Err(FkError::Invalid("horizon must be at least 1".into()));
    }
    if x.len() < n {
        return Err(FkError::HorizonTooShort { needed: n, available: x.len() });
    }
    let refs: Vec<&M::Point> = x[..n].iter().collect();
    let ids = merge_ids(sys, &refs);
    let k = ids.iter().copied().max().unwrap_or(0) as usize + 1;
    let mut counts = vec![0usize; k];
    let mut first = vec![usize::MAX; k];
    for (j, &id) in ids.iter().enumerate() {
        counts[id as usize] += 1;
        if first[id as usize] == usize::MAX {
            first[id as usize] = j;
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&c| first[c]);
    let support = order.iter().map(|&c| x[first[c]].clone()).collect();
    let weights = order.iter().map(|&c| S::count(counts[c]) / S::count(n)).collect();
    Ok(DiscreteMeasure { support, weights })
}
