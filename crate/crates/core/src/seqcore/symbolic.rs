use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{FkError, Result};
use crate::scalar::{dyadic, dyadic_depth, Scalar};

use super::system::{MetricSystem, PointKind};

/// Default truncation depth for the shift metric.
pub const DEFAULT_DEPTH: usize = 64;

/// An eventually periodic sequence `prefix · cycle^∞`, viewed from position `pos`.
///
/// Shifting only moves `pos`, so all points of a long periodic orbit share one
/// allocation of the underlying word.
#[derive(Clone)]
pub struct EventuallyPeriodic<T> {
    prefix: Arc<[T]>,
    cycle: Arc<[T]>,
    pos: usize,
}

/// A point of a finite-alphabet shift space.
pub type SymbolicPoint = EventuallyPeriodic<u8>;

impl<T: Copy + PartialEq> EventuallyPeriodic<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(FkError::Invalid("eventually periodic sequence needs a nonempty cycle".into()));
        }
        Ok(Self { prefix: prefix.into(), cycle: cycle.into(), pos: 0 })
    }

    /// `word^∞`.
    pub fn periodic(word: &[T]) -> Result<Self> {
        Self::new(Vec::new(), word.to_vec())
    }

    pub(crate) fn from_shared(cycle: Arc<[T]>, pos: usize) -> Self {
        let n = cycle.len();
        Self { prefix: Arc::from(Vec::new()), cycle, pos: pos % n }
    }

    /// Symbol at index `j` of the sequence.
    #[inline]
    pub fn at(&self, j: usize) -> T {
        let i = self.pos + j;
        let p = self.prefix.len();
        if i < p {
            self.prefix[i]
        } else {
            self.cycle[(i - p) % self.cycle.len()]
        }
    }

    pub fn shifted(&self, by: usize) -> Self {
        let p = self.prefix.len();
        let mut pos = self.pos + by;
        if pos > p {
            pos = p + (pos - p) % self.cycle.len();
        }
        Self { prefix: self.prefix.clone(), cycle: self.cycle.clone(), pos }
    }

    pub fn take(&self, n: usize) -> Vec<T> {
        (0..n).map(|j| self.at(j)).collect()
    }

    fn prefix_remaining(&self) -> usize {
        self.prefix.len().saturating_sub(self.pos)
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Index of the first disagreement, searching at most `limit` symbols.
    pub fn first_difference(&self, other: &Self, limit: usize) -> Option<usize> {
        (0..limit).find(|&j| self.at(j) != other.at(j))
    }
}

impl<T: Copy + PartialEq> PartialEq for EventuallyPeriodic<T> {
    fn eq(&self, other: &Self) -> bool {
        // Two eventually periodic sequences that agree past both prefixes for
        // p + q symbols agree forever (Fine and Wilf).
        let n = self.prefix_remaining().max(other.prefix_remaining()) + self.cycle.len() + other.cycle.len();
        self.first_difference(other, n).is_none()
    }
}

impl<T: Copy + PartialEq + fmt::Debug> fmt::Debug for EventuallyPeriodic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = self.take(12.min(self.prefix_remaining() + self.cycle.len()));
        write!(f, "{:?}…(cycle {})", shown, self.cycle.len())
    }
}

/// Result of the truncated shift metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftDistance<S> {
    pub value: S,
    /// The sequences agree up to the truncation depth, so `value = 0` is only a lower bound.
    pub truncated: bool,
}

/// `2^{-min{j : ω_j ≠ ω'_j}}`, or `0` when the sequences agree up to `depth`.
pub fn shift_metric<S: Scalar>(a: &SymbolicPoint, b: &SymbolicPoint, depth: usize) -> ShiftDistance<S> {
    match a.first_difference(b, depth) {
        Some(j) => ShiftDistance { value: dyadic(j), truncated: false },
        None => ShiftDistance { value: S::zero(), truncated: a != b },
    }
}

/// Full shift over `{0, …, alphabet − 1}` with the standard dyadic metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FullShift {
    pub alphabet: usize,
    pub depth: usize,
}

impl FullShift {
    pub fn new(alphabet: usize) -> Self {
        Self { alphabet, depth: DEFAULT_DEPTH }
    }

    pub fn binary() -> Self {
        Self::new(2)
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth.max(1);
        self
    }

    pub fn check_word(&self, word: &[u8]) -> Result<()> {
        if word.is_empty() {
            return Err(FkError::Invalid("empty word".into()));
        }
        if let Some(&s) = word.iter().find(|&&s| s as usize >= self.alphabet) {
            return Err(FkError::Invalid(format!("symbol {s} outside alphabet of size {}", self.alphabet)));
        }
        Ok(())
    }
}

impl<S: Scalar> MetricSystem<S> for FullShift {
    type Point = SymbolicPoint;

    fn distance(&self, a: &SymbolicPoint, b: &SymbolicPoint) -> S {
        shift_metric::<S>(a, b, self.depth).value
    }

    fn step(&self, p: &SymbolicPoint) -> SymbolicPoint {
        p.shifted(1)
    }

    fn kind(&self) -> PointKind {
        PointKind::SymbolicSequence
    }

    fn label(&self) -> String {
        format!("full shift on {} symbols", self.alphabet)
    }

    fn diameter(&self) -> S {
        S::one()
    }

    fn same_point(&self, a: &SymbolicPoint, b: &SymbolicPoint) -> bool {
        a == b
    }

    fn closeness_key(&self, delta: S) -> Option<u64> {
        Some(dyadic_depth(delta).min(self.depth) as u64)
    }

    fn closeness_classes(&self, points: &[&SymbolicPoint], delta: S) -> Option<Vec<u32>> {
        // ρ < δ iff the first min(k, depth) symbols agree, with 2^{-k} < δ ≤ 2^{-k+1}.
        let width = dyadic_depth(delta).min(self.depth);
        if width == 0 {
            return Some(vec![0; points.len()]);
        }
        let mut ids: HashMap<Vec<u8>, u32> = HashMap::new();
        let mut out = Vec::with_capacity(points.len());
        let mut buf = Vec::with_capacity(width);
        for p in points {
            buf.clear();
            buf.extend((0..width).map(|j| p.at(j)));
            let next = ids.len() as u32;
            let id = *ids.entry(buf.clone()).or_insert(next);
            out.push(id);
        }
        Some(out)
    }
}

/// Parses a word written over `0-9a-z`.
pub fn parse_word(text: &str) -> Result<Vec<u8>> {
    text.trim()
        .chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as u8)
                .ok_or_else(|| FkError::Invalid(format!("bad symbol {c:?}")))
        })
        .collect()
}

pub fn format_word(word: &[u8]) -> String {
    word.iter()
        .map(|&s| std::char::from_digit(s as u32, 36).unwrap_or('?'))
        .collect()
}

/// Whether `word` is not a proper power of a shorter word.
pub fn is_primitive(word: &[u8]) -> bool {
    let n = word.len();
    if n <= 1 {
        return n == 1;
    }
    // Smallest period from the prefix function.
    let mut pi = vec![0usize; n];
    for i in 1..n {
        let mut k = pi[i - 1];
        while k > 0 && word[i] != word[k] {
            k = pi[k - 1];
        }
        if word[i] == word[k] {
            k += 1;
        }
        pi[i] = k;
    }
    let p = n - pi[n - 1];
    !(p < n && n.is_multiple_of(p))
}
