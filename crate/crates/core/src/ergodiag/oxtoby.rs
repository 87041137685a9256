use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;

use super::function::TestFunction;

/// `(1/k) Σ_{j=offset}^{offset+k−1} φ(points[j])`.
pub fn birkhoff_average<P, S: Scalar>(phi: &TestFunction<P, S>, seq: &[P], k: usize, offset: usize) -> Result<S> {
    if k == 0 {
        return Err(FkError::Invalid("window length must be positive".into()));
    }
    let end = offset.checked_add(k).ok_or_else(|| FkError::Invalid("window overflows".into()))?;
    if end > seq.len() {
        return Err(FkError::HorizonTooShort { needed: end, available: seq.len() });
    }
    let sum: S = seq[offset..end].iter().map(|p| phi.eval(p)).sum();
    Ok(sum / S::count(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BadDensity<S> {
    pub k: usize,
    pub density: S,
}

/// For each window length `k`, the fraction of starts `ℓ ≤ len − k` whose
/// window average differs from the full-prefix average by more than `alpha`.
pub fn bad_segment_density<P, S: Scalar>(
    seq: &[P],
    phi: &TestFunction<P, S>,
    alpha: S,
    k_list: &[usize],
) -> Result<Vec<BadDensity<S>>> {
    let len = seq.len();
    let kmax = k_list.iter().copied().max().unwrap_or(0);
    if k_list.contains(&0) {
        return Err(FkError::Invalid("window lengths must be positive".into()));
    }
    let needed = kmax.saturating_mul(10);
    if len < needed || len == 0 {
        return Err(FkError::HorizonTooShort { needed: needed.max(1), available: len });
    }
    let values: Vec<f64> = seq.iter().map(|p| phi.eval(p).as_f64()).collect();
    let mut prefix = Vec::with_capacity(len + 1);
    prefix.push(0.0f64);
    for v in &values {
        prefix.push(prefix.last().unwrap() + v);
    }
    let star = prefix[len] / len as f64;
    let a = alpha.as_f64();
    Ok(k_list
        .iter()
        .map(|&k| {
            let starts = len - k + 1;
            let bad = (0..starts).filter(|&l| ((prefix[l + k] - prefix[l]) / k as f64 - star).abs() > a).count();
            BadDensity { k, density: S::count(bad) / S::count(starts) }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{CircleRotation, PeriodicOrbit, SymbolicPoint};
    use std::collections::BTreeMap;

    fn pts(word: &[u8]) -> Vec<SymbolicPoint> {
        PeriodicOrbit::from_word(word).unwrap().block().points().to_vec()
    }

    fn bit() -> TestFunction<SymbolicPoint, f64> {
        TestFunction::symbol_weight(BTreeMap::from([(0, 0.0), (1, 1.0)])).unwrap()
    }

    #[test]
    fn averages() {
        let seq = pts(&[0, 1].repeat(10));
        assert_eq!(birkhoff_average(&bit(), &seq, 8, 3).unwrap(), 0.5);
        assert_eq!(birkhoff_average(&bit(), &seq, 1, 3).unwrap(), 1.0);
        let c = TestFunction::constant(0.3);
        assert_eq!(birkhoff_average(&c, &seq, 5, 0).unwrap(), 0.3);
        assert!(matches!(birkhoff_average(&bit(), &seq, 5, 16), Err(FkError::HorizonTooShort { .. })));
    }

    #[test]
    fn periodic_and_constant_sequences_have_no_bad_segments() {
        let seq = pts(&[0, 0, 1].repeat(100));
        let d = bad_segment_density(&seq, &bit(), 1e-9, &[3, 6, 30]).unwrap();
        assert!(d.iter().all(|b| b.density == 0.0), "{d:?}");
        let seq = pts(&[1; 200]);
        let d = bad_segment_density(&seq, &bit(), 0.01, &[1, 7, 20]).unwrap();
        assert!(d.iter().all(|b| b.density == 0.0));
    }

    #[test]
    fn golden_rotation_is_well_distributed() {
        let rot = CircleRotation::<f64>::golden();
        let seq = pts(&rot.sturmian_coding(0.1, 100_000));
        let d = bad_segment_density(&seq, &bit(), 0.1, &[200, 400, 1000, 5000]).unwrap();
        assert!(d.iter().all(|b| b.density < 0.05), "{d:?}");
    }

    #[test]
    fn half_and_half_mixture_is_bad() {
        let mut w = vec![0u8; 50_000];
        w.extend(vec![1u8; 50_000]);
        let seq = pts(&w);
        let d = bad_segment_density(&seq, &bit(), 0.1, &[10, 100, 1000]).unwrap();
        assert!(d.iter().all(|b| b.density >= 0.4), "{d:?}");
    }
}
