use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::measurekit::{BlockDistribution, BlockSource};
use crate::scalar::Scalar;

/// Block entropy at one block length, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate<S> {
    pub m: usize,
    pub block_entropy: S,
    /// `H_m / m`.
    pub per_symbol: S,
    /// `H_m − H_{m−1}`, with `H_0 = 0`.
    pub conditional: S,
}

/// `−Σ p ln p`, summing equal probabilities together so uniform
/// distributions over `2^k` atoms give exactly `k ln 2`.
pub fn shannon_entropy<S: Scalar, I: IntoIterator<Item = S>>(probs: I) -> S {
    let mut ps: Vec<S> = probs.into_iter().filter(|&p| p > S::zero()).collect();
    ps.sort_by(|a, b| a.partial_cmp(b).expect("finite probabilities"));
    let ln2 = S::lit(std::f64::consts::LN_2);
    let mut h = S::zero();
    let mut i = 0;
    while i < ps.len() {
        let p = ps[i];
        let j = i + ps[i..].partition_point(|&q| q == p);
        let mass = S::count(j - i) * p;
        h = h - mass * (p.log2() * ln2);
        i = j;
    }
    h
}

fn estimates<S: Scalar>(hs: &[S]) -> Vec<EntropyEstimate<S>> {
    hs.iter()
        .enumerate()
        .map(|(i, &h)| EntropyEstimate {
            m: i + 1,
            block_entropy: h,
            per_symbol: h / S::count(i + 1),
            conditional: if i == 0 { h } else { h - hs[i - 1] },
        })
        .collect()
}

/// `H_m` for `m = 1..=m_max`. Product specs use `H_m = m H_1`; streams use
/// cyclic block frequencies and warn when shorter than `50 |A|^m`.
pub fn block_entropy_rate<S: Scalar>(source: BlockSource<'_, S>, m_max: usize) -> Result<(Vec<EntropyEstimate<S>>, Vec<String>)> {
    match source {
        BlockSource::Product(spec) => {
            let h1 = shannon_entropy(spec.probs.iter().copied());
            let hs: Vec<S> = (1..=m_max).map(|m| S::count(m) * h1).collect();
            Ok((estimates(&hs), Vec::new()))
        }
        BlockSource::Stream(stream) => {
            let alphabet = {
                let mut seen = [false; 256];
                stream.iter().for_each(|&s| seen[s as usize] = true);
                seen.iter().filter(|&&b| b).count().max(2)
            };
            let mut warnings = Vec::new();
            let mut hs = Vec::with_capacity(m_max);
            for m in 1..=m_max {
                let d = BlockDistribution::<S>::from_stream(stream, m)?;
                hs.push(distribution_entropy(&d));
                let need = 50.0 * (alphabet as f64).powi(m as i32);
                if (stream.len() as f64) < need {
                    warnings.push(format!("m = {m}: stream length {} below {need:.0}", stream.len()));
                }
            }
            Ok((estimates(&hs), warnings))
        }
    }
}

pub fn distribution_entropy<S: Scalar>(d: &BlockDistribution<S>) -> S {
    shannon_entropy(d.probs.values().copied())
}
