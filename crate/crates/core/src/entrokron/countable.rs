use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::matchkit::{fk_distance, FkOptions, FkResult};
use crate::measurekit::ProductSpec;
use crate::scalar::Scalar;
use crate::seqcore::{periodic_orbit, CountableProduct, PointSeq, ValueSeq};

use super::entropy::shannon_entropy;

/// Largest level accepted by [`countable_alphabet_example`].
pub const MAX_LEVEL: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountableExample<S> {
    pub n: usize,
    /// Entropy of the i.i.d. measure uniform on `{1/ℓ : 2^n ≤ ℓ < 2^{n+1}}`, in nats.
    pub entropy_rate: S,
    /// `F̄_K` from a periodic closure of one sample path to the fixed point `0^∞`.
    pub fk_to_fixed_point: FkResult<S>,
    pub sample_len: usize,
}

/// Symbol values `1/ℓ`, `2^n ≤ ℓ < 2^{n+1}`.
pub fn level_symbols<S: Scalar>(n: usize) -> Vec<S> {
    (1usize << n..1usize << (n + 1)).map(|l| S::one() / S::count(l)).collect()
}

/// Entropy of the level-`n` product measure and the `F̄_K` distance of a
/// sampled periodic surrogate to the fixed point.
pub fn countable_alphabet_example<S: Scalar>(n: usize, sample_len: usize, seed: u64, opts: &FkOptions<S>) -> Result<CountableExample<S>> {
    if n > MAX_LEVEL {
        return Err(FkError::Invalid(format!("level {n} exceeds {MAX_LEVEL}")));
    }
    if sample_len == 0 {
        return Err(FkError::Invalid("sample length must be positive".into()));
    }
    let spec = ProductSpec::<S>::uniform(1 << n);
    let entropy_rate = shannon_entropy(spec.probs.iter().copied());
    let values = level_symbols::<S>(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cycle: Vec<S> = (0..sample_len).map(|_| values[rng.gen_range(0..values.len())]).collect();
    let start = ValueSeq::periodic(&cycle)?;
    let sys = CountableProduct::default();
    let block: Vec<ValueSeq<S>> = (0..sample_len).map(|i| start.shifted(i)).collect();
    let x = periodic_orbit(&sys, PointSeq::new(block)?)?;
    let zero = periodic_orbit(&sys, PointSeq::new(vec![ValueSeq::periodic(&[S::zero()])?])?)?;
    let fk_to_fixed_point = fk_distance(&sys, &x, &zero, opts)?;
    Ok(CountableExample { n, entropy_rate, fk_to_fixed_point, sample_len })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn entropy_and_distance_by_level() {
        let o = FkOptions::with_tol(1e-3);
        let one = countable_alphabet_example::<f64>(1, 300, 5, &o).unwrap();
        let three = countable_alphabet_example::<f64>(3, 300, 5, &o).unwrap();
        assert_eq!(one.entropy_rate, LN_2);
        assert_eq!(three.entropy_rate, 3.0 * LN_2);
        assert!(three.fk_to_fixed_point.bracket.1 < one.fk_to_fixed_point.bracket.0);
        // Every level-n point lies within Σ 2^{-j} 2^{-n} = 2^{1-n} of 0^∞.
        assert!(three.fk_to_fixed_point.bracket.1 <= 0.25 + 1e-3);
    }
}
