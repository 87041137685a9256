use std::sync::Arc;

use crate::error::{FkError, Result};
use crate::scalar::Scalar;

use super::symbolic::SymbolicPoint;
use super::system::MetricSystem;

/// A nonempty finite stretch of points `x_0, …, x_{n−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSeq<P> {
    points: Vec<P>,
}

impl<P> PointSeq<P> {
    pub fn new(points: Vec<P>) -> Result<Self> {
        if points.is_empty() {
            return Err(FkError::Invalid("point sequence must be nonempty".into()));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn get(&self, i: usize) -> &P {
        &self.points[i]
    }

    pub fn into_points(self) -> Vec<P> {
        self.points
    }

    pub fn require(&self, n: usize) -> Result<()> {
        if self.points.len() < n {
            return Err(FkError::HorizonTooShort { needed: n, available: self.points.len() });
        }
        Ok(())
    }
}

impl PointSeq<SymbolicPoint> {
    /// The symbol word `x_0(0) x_1(0) …`.
    pub fn symbols(&self) -> Vec<u8> {
        self.points.iter().map(|p| p.at(0)).collect()
    }
}

impl<P> std::ops::Index<usize> for PointSeq<P> {
    type Output = P;
    fn index(&self, i: usize) -> &P {
        &self.points[i]
    }
}

/// `(start, T(start), …, T^{n−1}(start))`.
pub fn orbit_segment<S: Scalar, M: MetricSystem<S>>(sys: &M, start: &M::Point, n: usize) -> Result<PointSeq<M::Point>> {
    if n == 0 {
        return Err(FkError::Invalid("orbit segment length must be at least 1".into()));
    }
    let mut pts = Vec::with_capacity(n);
    pts.push(start.clone());
    for i in 1..n {
        let next = sys.step(&pts[i - 1]);
        pts.push(next);
    }
    PointSeq::new(pts)
}

/// The base block of a periodic orbit; `point(i)` wraps around modulo the period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit<P> {
    block: PointSeq<P>,
    system: String,
}

pub fn periodic_orbit<S: Scalar, M: MetricSystem<S>>(sys: &M, seed: PointSeq<M::Point>) -> Result<PeriodicOrbit<M::Point>> {
    let n = seed.len();
    for i in 0..n {
        let image = sys.step(&seed[i]);
        let target = &seed[(i + 1) % n];
        if !sys.same_point(&image, target) {
            let gap = sys.distance(&image, target).as_f64();
            return Err(FkError::NotPeriodic { gap });
        }
    }
    Ok(PeriodicOrbit { block: seed, system: sys.label() })
}

impl<P: Clone> PeriodicOrbit<P> {
    pub fn period(&self) -> usize {
        self.block.len()
    }

    pub fn block(&self) -> &PointSeq<P> {
        &self.block
    }

    pub fn system(&self) -> &str {
        &self.system
    }

    pub fn point(&self, i: usize) -> &P {
        &self.block[i % self.block.len()]
    }

    /// `n` consecutive orbit points starting at phase `start`.
    pub fn segment(&self, start: usize, n: usize) -> Vec<P> {
        (0..n).map(|i| self.point(start + i).clone()).collect()
    }

    /// The same orbit with its base block starting at phase `by`.
    pub fn rotated(&self, by: usize) -> Self {
        let pts = self.segment(by, self.period());
        Self { block: PointSeq { points: pts }, system: self.system.clone() }
    }
}

impl PeriodicOrbit<SymbolicPoint> {
    /// The orbit of `word^∞` under the shift; closes up by construction.
    pub fn from_word(word: &[u8]) -> Result<Self> {
        if word.is_empty() {
            return Err(FkError::Invalid("empty word".into()));
        }
        let cycle: Arc<[u8]> = Arc::from(word.to_vec());
        let points = (0..word.len()).map(|i| SymbolicPoint::from_shared(cycle.clone(), i)).collect();
        Ok(Self { block: PointSeq { points }, system: "full shift".into() })
    }

    pub fn word(&self) -> Vec<u8> {
        self.block.symbols()
    }
}

/// A concatenation of orbit segments; `switch_indices` lists the indices at
/// which a new segment begins.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiOrbit<P> {
    pub points: PointSeq<P>,
    pub switch_indices: Vec<usize>,
}

impl<P> QuasiOrbit<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of switches inside the first `prefix` points, divided by `prefix`.
    pub fn switch_density(&self, prefix: usize) -> f64 {
        if prefix == 0 {
            return 0.0;
        }
        let c = self.switch_indices.partition_point(|&s| s < prefix);
        c as f64 / prefix as f64
    }

    /// `(M, density)` for `M = 1, 2, 4, …` up to the full length (always included).
    pub fn switch_density_curve(&self) -> Vec<(usize, f64)> {
        let n = self.len();
        let mut out = Vec::new();
        let mut m = 1usize;
        while m < n {
            out.push((m, self.switch_density(m)));
            m *= 2;
        }
        out.push((n, self.switch_density(n)));
        out
    }

    /// Whether index `i` continues the orbit of `points[i − 1]`.
    pub fn is_switch(&self, i: usize) -> bool {
        self.switch_indices.binary_search(&i).is_ok()
    }
}

/// Concatenates `lengths[j]` points of orbit `segments[j]`. Segment `j` starts
/// at absolute time `m_{j−1}`, i.e. at phase `m_{j−1} mod |Γ_j|`.
pub fn assemble_quasi_orbit<P: Clone>(segments: &[PeriodicOrbit<P>], lengths: &[usize]) -> Result<QuasiOrbit<P>> {
    if segments.len() != lengths.len() || segments.is_empty() {
        return Err(FkError::BadSchedule(format!(
            "{} segments but {} lengths",
            segments.len(),
            lengths.len()
        )));
    }
    for (j, (seg, &len)) in segments.iter().zip(lengths).enumerate() {
        if len == 0 || len % seg.period() != 0 {
            return Err(FkError::BadSchedule(format!(
                "segment {j}: length {len} is not a positive multiple of period {}",
                seg.period()
            )));
        }
        if j > 0 && len <= lengths[j - 1] {
            return Err(FkError::BadSchedule(format!("lengths not increasing at segment {j}")));
        }
    }
    let total: usize = lengths.iter().sum();
    let mut pts = Vec::with_capacity(total);
    let mut switches = Vec::with_capacity(segments.len().saturating_sub(1));
    for (seg, &len) in segments.iter().zip(lengths) {
        let start = pts.len();
        if start > 0 {
            switches.push(start);
        }
        pts.extend(seg.segment(start, len));
    }
    Ok(QuasiOrbit { points: PointSeq::new(pts)?, switch_indices: switches })
}
