use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    SymbolicSequence,
    RealVector,
    CircleAngle,
}

/// A compact metric space `X` with metric `ρ` and a continuous self-map `T`.
pub trait MetricSystem<S: Scalar> {
    type Point: Clone + Debug;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> S;

    /// One application of the map `T`.
    fn step(&self, p: &Self::Point) -> Self::Point;

    fn kind(&self) -> PointKind;

    fn label(&self) -> String;

    /// An upper bound on the metric; search brackets for `F̄_K` start here.
    fn diameter(&self) -> S;

    /// Point identity used for periodic closure and quasi-orbit switches:
    /// exact for symbolic systems, within `1e-12` otherwise.
    fn same_point(&self, a: &Self::Point, b: &Self::Point) -> bool {
        self.distance(a, b) <= S::lit(1e-12)
    }

    /// When `ρ(p, q) < δ` is an equivalence relation on the given points,
    /// returns one class id per point so that `ρ(p_i, p_j) < δ` iff the ids agree.
    fn closeness_classes(&self, _points: &[&Self::Point], _delta: S) -> Option<Vec<u32>> {
        None
    }

    /// A key such that two thresholds with equal keys define the same closeness
    /// relation `ρ < δ`; lets callers reuse gap computations across thresholds.
    fn closeness_key(&self, _delta: S) -> Option<u64> {
        None
    }
}

/// The real line with the absolute-value metric and the identity map.
///
/// Used for matching experiments on raw real-valued sequences, where the map
/// plays no role. The diameter is taken from the configured bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealLine<S> {
    pub bound: S,
}

impl<S: Scalar> RealLine<S> {
    pub fn new(bound: S) -> Self {
        Self { bound }
    }
}

impl<S: Scalar> MetricSystem<S> for RealLine<S> {
    type Point = S;

    fn distance(&self, a: &S, b: &S) -> S {
        (*a - *b).abs()
    }

    fn step(&self, p: &S) -> S {
        *p
    }

    fn kind(&self) -> PointKind {
        PointKind::RealVector
    }

    fn label(&self) -> String {
        format!("real line |x-y| (identity map, diameter {})", self.bound)
    }

    fn diameter(&self) -> S {
        self.bound
    }
}

/// Rotation `x ↦ x + angle (mod 1)` of the circle `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleRotation<S> {
    pub angle: S,
}

impl<S: Scalar> CircleRotation<S> {
    pub fn new(angle: S) -> Self {
        Self { angle: wrap(angle) }
    }

    /// Rotation by the inverse golden ratio `(√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::new((S::lit(5.0).sqrt() - S::one()) / S::lit(2.0))
    }

    /// `T^j(start)` computed directly, without accumulating rounding error.
    pub fn nth(&self, start: S, j: usize) -> S {
        let a = self.angle.as_f64();
        let x = start.as_f64() + (j as f64) * a;
        S::lit(x - x.floor())
    }

    /// Coding of the orbit of `start` by the two-interval partition
    /// `[0, 1 − angle) ↦ 0`, `[1 − angle, 1) ↦ 1`; a Sturmian word for irrational angles.
    pub fn sturmian_coding(&self, start: S, n: usize) -> Vec<u8> {
        let cut = S::one() - self.angle;
        (0..n).map(|j| u8::from(self.nth(start, j) >= cut)).collect()
    }
}

pub(crate) fn wrap<S: Scalar>(x: S) -> S {
    let f = x - x.floor();
    if f >= S::one() {
        S::zero()
    } else {
        f
    }
}

impl<S: Scalar> MetricSystem<S> for CircleRotation<S> {
    type Point = S;

    fn distance(&self, a: &S, b: &S) -> S {
        let d = wrap(*a - *b);
        d.min(S::one() - d)
    }

    fn step(&self, p: &S) -> S {
        wrap(*p + self.angle)
    }

    fn kind(&self) -> PointKind {
        PointKind::CircleAngle
    }

    fn label(&self) -> String {
        format!("circle rotation by {}", self.angle)
    }

    fn diameter(&self) -> S {
        S::lit(0.5)
    }
}
