use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;
use crate::seqcore::{MetricSystem, SymbolicPoint};

type Classify<P> = Arc<dyn Fn(&P) -> u8 + Send + Sync>;

/// A finite partition given by its labelling function `P: X → {0, …, k−1}`.
#[derive(Clone)]
pub struct Partition<P> {
    pub k: usize,
    /// Hull radius when the partition came from [`faithful_thicken`].
    pub boundary_margin: Option<f64>,
    pub label: String,
    classify: Classify<P>,
}

impl<P> fmt::Debug for Partition<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Partition")
            .field("k", &self.k)
            .field("boundary_margin", &self.boundary_margin)
            .field("label", &self.label)
            .finish()
    }
}

impl<P> Partition<P> {
    /// Labels returned by `classify` must lie below `k`; this is checked on every call.
    pub fn new(k: usize, label: impl Into<String>, classify: impl Fn(&P) -> u8 + Send + Sync + 'static) -> Result<Self> {
        if k == 0 || k > 256 {
            return Err(FkError::Invalid(format!("partition needs between 1 and 256 atoms, got {k}")));
        }
        Ok(Self { k, boundary_margin: None, label: label.into(), classify: Arc::new(classify) })
    }

    pub fn classify(&self, p: &P) -> u8 {
        let l = (self.classify)(p);
        assert!((l as usize) < self.k, "label {l} out of range for {} atoms", self.k);
        l
    }

    pub fn trivial() -> Self {
        Self { k: 1, boundary_margin: None, label: "trivial".into(), classify: Arc::new(|_| 0) }
    }
}

impl Partition<SymbolicPoint> {
    /// Atoms are the cylinders of the first symbol.
    pub fn identity(alphabet: usize) -> Result<Self> {
        Self::new(alphabet, "first symbol", |p: &SymbolicPoint| p.at(0))
    }
}

impl<S: Scalar> Partition<S> {
    /// Arcs `[c_i, c_{i+1})` of the circle, the last one wrapping through `0`.
    /// Atom `i` is the arc starting at `cuts[i]`.
    pub fn circle_arcs(cuts: Vec<S>) -> Result<Self> {
        if cuts.is_empty() || cuts.windows(2).any(|w| !(w[0] < w[1])) || cuts[0] < S::zero() || cuts[cuts.len() - 1] >= S::one() {
            return Err(FkError::Invalid("cuts must be strictly increasing in [0, 1)".into()));
        }
        let k = cuts.len();
        let label = format!("circle arcs at {:?}", cuts.iter().map(|c| c.as_f64()).collect::<Vec<_>>());
        Self::new(k, label, move |x: &S| {
            let i = cuts.partition_point(|c| c <= x);
            if i == 0 {
                (k - 1) as u8
            } else {
                (i - 1) as u8
            }
        })
    }

    /// `[0, 1/2) ↦ 0`, `[1/2, 1) ↦ 1`, rotated by `shift`.
    pub fn circle_halves(shift: S) -> Result<Self> {
        let a = crate::seqcore::wrap(shift);
        let b = crate::seqcore::wrap(shift + S::lit(0.5));
        let p = Self::circle_arcs(if a < b { vec![a, b] } else { vec![b, a] })?;
        Ok(if a < b {
            p
        } else {
            let inner = p.clone();
            Self::new(2, format!("circle halves shifted by {shift}"), move |x: &S| 1 - inner.classify(x))?
        })
    }
}

/// Pointwise labels `P(x_0) P(x_1) …`.
pub fn code_sequence<P>(partition: &Partition<P>, seq: &[P]) -> Vec<u8> {
    seq.iter().map(|p| partition.classify(p)).collect()
}

/// Fraction of sample points labelled differently by `p` and `q`.
pub fn partition_distance<P, S: Scalar>(p: &Partition<P>, q: &Partition<P>, sample: &[P]) -> S {
    if sample.is_empty() {
        return S::zero();
    }
    let diff = sample.iter().filter(|x| p.classify(x) != q.classify(x)).count();
    S::count(diff) / S::count(sample.len())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thickening {
    /// Hull radius `c`.
    pub margin: f64,
    /// Core trimming radius: sample points this close to another atom are left out of the cores.
    pub core_gap: f64,
    /// Least distance between cores of different atoms.
    pub separation: f64,
    /// Empirical `d_1(P, R)` under the relabelling `j ↦ j + 1`.
    pub distance: f64,
}

/// Sample points within this distance of a hull boundary count as boundary mass.
pub const BOUNDARY_BAND: f64 = 1e-3;
const GRID: usize = 64;

/// Hull partition `R^c = {R_0, R_1, …, R_k}` around compact cores of the atoms of `p`.
///
/// Cores are the sample points of each atom lying farther than a trimming
/// radius from every sample point of another atom; the trimming radius is the
/// largest one that drops less than `δ/4` of the sample. `R_{j+1}` is the
/// closed `c`-hull of core `j` and `R_0` the rest. The hull radius is the first
/// point of a grid in `(0, Δ/2)` leaving no sample point within
/// [`BOUNDARY_BAND`] of a hull boundary, where `Δ` is the least distance
/// between cores.
pub fn faithful_thicken<S, M>(p: &Partition<M::Point>, sys: &M, sample: &[M::Point], delta: S) -> Result<(Partition<M::Point>, Thickening)>
where
    S: Scalar,
    M: MetricSystem<S> + Clone + Send + Sync + 'static,
    M::Point: Send + Sync + 'static,
{
    if sample.is_empty() {
        return Err(FkError::Invalid("thickening needs a nonempty sample".into()));
    }
    if !(delta > S::zero()) {
        return Err(FkError::Invalid(format!("δ must be positive, got {delta}")));
    }
    let n = sample.len();
    let labels = code_sequence(p, sample);
    let dist = |a: usize, b: usize| sys.distance(&sample[a], &sample[b]).as_f64();

    // Distance from each sample point to the nearest sample point of another atom.
    let sep: Vec<f64> = (0..n)
        .map(|i| (0..n).filter(|&j| labels[j] != labels[i]).map(|j| dist(i, j)).fold(f64::INFINITY, f64::min))
        .collect();
    let mut sorted = sep.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let budget = delta.as_f64() / 4.0 * n as f64;
    // Points with sep ≤ core_gap are dropped; take the largest gap dropping fewer than `budget`.
    let mut core_gap = 0.0f64;
    for &s in sorted.iter().take_while(|s| s.is_finite()) {
        if (sorted.partition_point(|&t| t <= s) as f64) < budget {
            core_gap = s;
        } else {
            break;
        }
    }
    let core: Vec<bool> = sep.iter().map(|&s| s > core_gap).collect();

    let mut separation = f64::INFINITY;
    for i in 0..n {
        if !core[i] {
            continue;
        }
        for j in i + 1..n {
            if core[j] && labels[j] != labels[i] {
                separation = separation.min(dist(i, j));
            }
        }
    }
    let reach = if separation.is_finite() { separation / 2.0 } else { sys.diameter().as_f64() };
    if !(reach > 0.0) {
        return Err(FkError::NoGoodCut);
    }

    // Distance from each sample point to each core.
    let k = p.k;
    let mut to_core = vec![f64::INFINITY; n * k];
    for i in 0..n {
        for j in 0..n {
            if core[j] {
                let slot = &mut to_core[i * k + labels[j] as usize];
                *slot = slot.min(dist(i, j));
            }
        }
    }
    let hull_label = |row: &[f64], c: f64| row.iter().position(|&d| d <= c).map_or(0u8, |a| a as u8 + 1);

    let mut chosen = None;
    for t in 1..=GRID {
        let c = reach * t as f64 / (GRID + 1) as f64;
        let near = (0..n).any(|i| to_core[i * k..(i + 1) * k].iter().any(|&d| (d - c).abs() <= BOUNDARY_BAND));
        let diff = (0..n).filter(|&i| hull_label(&to_core[i * k..(i + 1) * k], c) != labels[i] + 1).count();
        let d1 = diff as f64 / n as f64;
        if d1 < delta.as_f64() && (!near || delta >= S::one()) {
            chosen = Some((c, d1));
            break;
        }
    }
    let Some((margin, distance)) = chosen else {
        return Err(FkError::NoGoodCut);
    };

    let cores: Vec<(u8, M::Point)> = (0..n).filter(|&i| core[i]).map(|i| (labels[i], sample[i].clone())).collect();
    let system = sys.clone();
    let c = S::lit(margin);
    let mut r = Partition::new(k + 1, format!("{}-hull of {}", margin, p.label), move |x: &M::Point| {
        let mut best: Option<(S, u8)> = None;
        for (l, q) in &cores {
            let d = system.distance(x, q);
            if d <= c && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, *l));
            }
        }
        best.map_or(0, |(_, l)| l + 1)
    })?;
    r.boundary_margin = Some(margin);
    Ok((r, Thickening { margin, core_gap, separation, distance }))
}
