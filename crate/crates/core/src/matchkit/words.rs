use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;

use super::lcs::lcs_len_classes;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordMetrics<S> {
    /// `d̄_n(u, w)`, the normalised Hamming distance.
    pub hamming: S,
    /// `f̄_n(u, w) = 1 − LCS(u, w) / n`.
    pub edit: S,
}

pub fn word_lcs(u: &[u8], w: &[u8]) -> usize {
    let b: Vec<u32> = w.iter().map(|&s| s as u32).collect();
    lcs_len_classes(u.iter().map(|&s| s as u32), &b)
}

fn same_length(u: &[u8], w: &[u8]) -> Result<usize> {
    if u.len() != w.len() {
        return Err(FkError::LengthMismatch(u.len(), w.len()));
    }
    if u.is_empty() {
        return Err(FkError::Invalid("words must be nonempty".into()));
    }
    Ok(u.len())
}

pub fn word_metrics<S: Scalar>(u: &[u8], w: &[u8]) -> Result<WordMetrics<S>> {
    let n = same_length(u, w)?;
    let diff = u.iter().zip(w).filter(|(a, b)| a != b).count();
    Ok(WordMetrics {
        hamming: S::count(diff) / S::count(n),
        edit: S::count(n - word_lcs(u, w)) / S::count(n),
    })
}

/// Smallest `ε` on the `1/n` grid such that a common subsequence of density
/// at least `1 − ε` exists in both words.
pub fn fhat_estimate<S: Scalar>(u: &[u8], w: &[u8]) -> Result<S> {
    let n = same_length(u, w)?;
    let l = word_lcs(u, w);
    let k = (0..=n).find(|&k| l + k >= n).unwrap_or(n);
    Ok(S::count(k) / S::count(n))
}
