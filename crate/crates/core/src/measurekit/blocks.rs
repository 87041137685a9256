use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;

/// A probability vector over words of a fixed length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDistribution<S> {
    pub n: usize,
    pub probs: BTreeMap<Vec<u8>, S>,
}

impl<S: Scalar> BlockDistribution<S> {
    pub fn new(n: usize, probs: BTreeMap<Vec<u8>, S>) -> Result<Self> {
        if n == 0 || probs.is_empty() {
            return Err(FkError::Invalid("block distribution needs n ≥ 1 and a nonempty support".into()));
        }
        if let Some(w) = probs.keys().find(|w| w.len() != n) {
            return Err(FkError::Invalid(format!("block of length {} in a distribution of {n}-blocks", w.len())));
        }
        if probs.values().any(|&p| p < S::zero() || !p.is_finite()) {
            return Err(FkError::Invalid("probabilities must be finite and nonnegative".into()));
        }
        let d = Self { n, probs };
        let total = d.total();
        if (total - S::one()).abs() > S::lit(1e-12) {
            return Err(FkError::InfeasibleMarginals { left: total.as_f64(), right: 1.0 });
        }
        Ok(d)
    }

    pub fn point_mass(word: &[u8]) -> Self {
        Self { n: word.len(), probs: BTreeMap::from([(word.to_vec(), S::one())]) }
    }

    /// Cyclic sliding-window frequencies of `n`-blocks in `stream`.
    ///
    /// Windows wrap around the end, so the `n`-block frequencies are exactly
    /// the marginals of the `(n+1)`-block ones.
    pub fn from_stream(stream: &[u8], n: usize) -> Result<Self> {
        let len = stream.len();
        if n == 0 || len == 0 {
            return Err(FkError::Invalid("need a nonempty stream and n ≥ 1".into()));
        }
        let ext: Vec<u8> = stream.iter().chain(stream.iter().cycle().take(n - 1)).copied().collect();
        let mut counts: HashMap<&[u8], usize> = HashMap::new();
        for i in 0..len {
            *counts.entry(&ext[i..i + n]).or_insert(0) += 1;
        }
        let probs = counts
            .into_iter()
            .map(|(w, c)| (w.to_vec(), S::count(c) / S::count(len)))
            .collect();
        Ok(Self { n, probs })
    }

    pub fn total(&self) -> S {
        self.probs.values().fold(S::zero(), |a, &p| a + p)
    }

    pub fn prob(&self, word: &[u8]) -> S {
        self.probs.get(word).copied().unwrap_or(S::zero())
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    /// Positive-mass blocks sorted by probability (descending), then lexicographically.
    pub fn ranked(&self) -> Vec<(&[u8], S)> {
        let mut v: Vec<(&[u8], S)> = self
            .probs
            .iter()
            .filter(|(_, &p)| p > S::zero())
            .map(|(w, &p)| (w.as_slice(), p))
            .collect();
        v.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite").then_with(|| a.0.cmp(b.0)));
        v
    }

    /// The distribution of the first `m ≤ n` symbols.
    pub fn marginal(&self, m: usize) -> Self {
        let mut probs = BTreeMap::new();
        for (w, &p) in &self.probs {
            let e = probs.entry(w[..m].to_vec()).or_insert(S::zero());
            *e = *e + p;
        }
        Self { n: m, probs }
    }
}

/// An i.i.d. process: one marginal, product probabilities on blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec<S> {
    pub symbols: Vec<u8>,
    pub probs: Vec<S>,
}

/// Largest number of blocks materialised from a product spec.
pub const MAX_PRODUCT_BLOCKS: usize = 1 << 22;

impl<S: Scalar> ProductSpec<S> {
    pub fn new(symbols: Vec<u8>, probs: Vec<S>) -> Result<Self> {
        if symbols.len() != probs.len() || symbols.is_empty() {
            return Err(FkError::Invalid("product spec needs one probability per symbol".into()));
        }
        let total = probs.iter().fold(S::zero(), |a, &p| a + p);
        if (total - S::one()).abs() > S::lit(1e-12) || probs.iter().any(|&p| p < S::zero()) {
            return Err(FkError::InfeasibleMarginals { left: total.as_f64(), right: 1.0 });
        }
        Ok(Self { symbols, probs })
    }

    pub fn uniform(k: usize) -> Self {
        let p = S::one() / S::count(k);
        Self { symbols: (0..k as u8).collect(), probs: vec![p; k] }
    }

    /// `P(1) = p`, `P(0) = 1 − p`.
    pub fn bernoulli(p: S) -> Self {
        Self { symbols: vec![0, 1], probs: vec![S::one() - p, p] }
    }

    pub fn block_distribution(&self, n: usize) -> Result<BlockDistribution<S>> {
        let k = self.symbols.len();
        let count = (k as f64).powi(n as i32);
        if count > MAX_PRODUCT_BLOCKS as f64 {
            return Err(FkError::ProblemTooLarge { entries: count as usize, max: MAX_PRODUCT_BLOCKS });
        }
        let mut probs = BTreeMap::new();
        let mut idx = vec![0usize; n];
        loop {
            let word: Vec<u8> = idx.iter().map(|&i| self.symbols[i]).collect();
            let p = idx.iter().fold(S::one(), |a, &i| a * self.probs[i]);
            if p > S::zero() {
                probs.insert(word, p);
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(BlockDistribution { n, probs });
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < k {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    /// A sample path of length `len`.
    pub fn sample<R: Rng>(&self, len: usize, rng: &mut R) -> Vec<u8> {
        let cdf: Vec<f64> = self
            .probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p.as_f64();
                Some(*acc)
            })
            .collect();
        (0..len)
            .map(|_| {
                let u: f64 = rng.gen();
                let i = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
                self.symbols[i]
            })
            .collect()
    }
}

pub enum BlockSource<'a, S> {
    Stream(&'a [u8]),
    Product(&'a ProductSpec<S>),
}

/// Block distribution from either source, with a warning when a stream is
/// shorter than `10 · |A|^n`.
pub fn block_distribution<S: Scalar>(source: BlockSource<'_, S>, n: usize) -> Result<(BlockDistribution<S>, Vec<String>)> {
    match source {
        BlockSource::Product(spec) => Ok((spec.block_distribution(n)?, Vec::new())),
        BlockSource::Stream(stream) => {
            let d = BlockDistribution::from_stream(stream, n)?;
            let alphabet = {
                let mut seen = [false; 256];
                stream.iter().for_each(|&s| seen[s as usize] = true);
                seen.iter().filter(|&&b| b).count().max(2)
            };
            let need = 10.0 * (alphabet as f64).powi(n as i32);
            let mut warnings = Vec::new();
            if (stream.len() as f64) < need {
                warnings.push(format!(
                    "stream of length {} is short for {n}-blocks (want at least {need:.0})",
                    stream.len()
                ));
            }
            Ok((d, warnings))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let d = BlockDistribution::<f64>::from_stream(&[0, 1, 0, 1, 0, 1], 2).unwrap();
        assert_eq!(d.probs, BTreeMap::from([(vec![0, 1], 0.5), (vec![1, 0], 0.5)]));

        let u = ProductSpec::<f64>::uniform(2).block_distribution(3).unwrap();
        assert_eq!(u.support_len(), 8);
        assert!(u.probs.values().all(|&p| p == 0.125));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = ProductSpec::bernoulli(0.8f64).sample(100_000, &mut rng);
        let d = BlockDistribution::<f64>::from_stream(&s, 1).unwrap();
        assert!((d.prob(&[1]) - 0.8).abs() < 0.01);
    }

    #[test]
    fn cyclic_counts_are_shift_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = ProductSpec::bernoulli(0.3f64).sample(999, &mut rng);
        let d3 = BlockDistribution::<f64>::from_stream(&s, 3).unwrap();
        let d2 = BlockDistribution::<f64>::from_stream(&s, 2).unwrap();
        let m = d3.marginal(2);
        for (w, &p) in &d2.probs {
            assert!((m.prob(w) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn short_stream_warns() {
        let (_, w) = block_distribution::<f64>(BlockSource::Stream(&[0, 1, 1]), 4).unwrap();
        assert_eq!(w.len(), 1);
    }
}
