use crate::scalar::{dyadic, Scalar};

use super::symbolic::{EventuallyPeriodic, DEFAULT_DEPTH};
use super::system::{MetricSystem, PointKind};

/// A point of `A^∞` for a countable alphabet `A ⊂ [0, 1]`, as an eventually periodic value sequence.
pub type ValueSeq<S> = EventuallyPeriodic<S>;

/// Product space `A^∞` with `A = {0} ∪ {1/k}` and the shift map, metrized by
/// `ρ(ω, ω') = Σ_j 2^{-j} |ω_j − ω'_j|` truncated after `depth` terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountableProduct {
    pub depth: usize,
}

impl Default for CountableProduct {
    fn default() -> Self {
        Self { depth: DEFAULT_DEPTH }
    }
}

impl CountableProduct {
    pub fn new(depth: usize) -> Self {
        Self { depth: depth.max(1) }
    }
}

impl<S: Scalar> MetricSystem<S> for CountableProduct {
    type Point = ValueSeq<S>;

    fn distance(&self, a: &ValueSeq<S>, b: &ValueSeq<S>) -> S {
        let mut acc = S::zero();
        for j in 0..self.depth {
            acc = acc + dyadic::<S>(j) * (a.at(j) - b.at(j)).abs();
        }
        acc
    }

    fn step(&self, p: &ValueSeq<S>) -> ValueSeq<S> {
        p.shifted(1)
    }

    fn kind(&self) -> PointKind {
        PointKind::RealVector
    }

    fn label(&self) -> String {
        "countable alphabet {0} ∪ {1/k} product, weighted l1 metric".into()
    }

    fn diameter(&self) -> S {
        S::lit(2.0)
    }

    fn same_point(&self, a: &ValueSeq<S>, b: &ValueSeq<S>) -> bool {
        a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_on_constant_sequences() {
        let sys = CountableProduct::default();
        let zero = ValueSeq::periodic(&[0.0f64]).unwrap();
        let half = ValueSeq::periodic(&[0.5f64]).unwrap();
        let d: f64 = sys.distance(&zero, &half);
        assert!((d - 1.0).abs() < 1e-12);
        let d0: f64 = sys.distance(&zero, &zero);
        assert_eq!(d0, 0.0);
    }
}
