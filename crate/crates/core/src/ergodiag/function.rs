use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::{dyadic, dyadic_depth, Scalar};
use crate::seqcore::{SymbolicPoint, ValueSeq};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Coordinate { index: usize },
    /// Fraction of the word's leading symbols matched before the first disagreement.
    SmoothedCylinder { word: Vec<u8> },
    SymbolWeight { weights: BTreeMap<u8, f64> },
    Constant { value: f64 },
    /// `cos 2πθ` on the circle.
    Cosine,
}

type Eval<P, S> = Arc<dyn Fn(&P) -> S + Send + Sync>;
type Modulus<S> = Arc<dyn Fn(S) -> S + Send + Sync>;

/// A continuous observable together with its sup norm and a modulus of continuity:
/// `modulus(δ)` bounds `|φ(y) − φ(y')|` whenever `ρ(y, y') < δ`.
#[derive(Clone)]
pub struct TestFunction<P, S> {
    pub kind: TestKind,
    pub sup_norm: S,
    eval: Eval<P, S>,
    modulus: Modulus<S>,
}

impl<P, S: Scalar> fmt::Debug for TestFunction<P, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("kind", &self.kind).field("sup_norm", &self.sup_norm).finish()
    }
}

impl<P, S: Scalar> TestFunction<P, S> {
    pub fn eval(&self, p: &P) -> S {
        (self.eval)(p)
    }

    pub fn modulus(&self, delta: S) -> S {
        (self.modulus)(delta)
    }

    /// `(2^{−j}, modulus(2^{−j}))` for `j = 0..=depth`.
    pub fn modulus_table(&self, depth: usize) -> Vec<(S, S)> {
        (0..=depth).map(|j| {
            let d = dyadic::<S>(j);
            (d, self.modulus(d))
        }).collect()
    }

    pub fn constant(value: S) -> Self {
        Self {
            kind: TestKind::Constant { value: value.as_f64() },
            sup_norm: value.abs(),
            eval: Arc::new(move |_| value),
            modulus: Arc::new(|_| S::zero()),
        }
    }
}

impl<S: Scalar> TestFunction<SymbolicPoint, S> {
    /// `φ(y) = y_index` for an alphabet of `alphabet` symbols.
    pub fn coordinate(alphabet: usize, index: usize) -> Self {
        let top = S::count(alphabet.saturating_sub(1));
        Self {
            kind: TestKind::Coordinate { index },
            sup_norm: top,
            eval: Arc::new(move |p: &SymbolicPoint| S::count(p.at(index) as usize)),
            // ρ < δ forces agreement on the first dyadic_depth(δ) symbols.
            modulus: Arc::new(move |d| if dyadic_depth(d) > index { S::zero() } else { top }),
        }
    }

    /// `φ(y) = a(y_0)`.
    pub fn symbol_weight(weights: BTreeMap<u8, S>) -> Result<Self> {
        if weights.is_empty() {
            return Err(FkError::Invalid("symbol weights are empty".into()));
        }
        let sup = weights.values().fold(S::zero(), |a, w| a.max(w.abs()));
        let lo = weights.values().fold(S::infinity(), |a, &w| a.min(w));
        let hi = weights.values().fold(S::neg_infinity(), |a, &w| a.max(w));
        let table = weights.clone();
        Ok(Self {
            kind: TestKind::SymbolWeight { weights: weights.iter().map(|(k, v)| (*k, v.as_f64())).collect() },
            sup_norm: sup,
            eval: Arc::new(move |p: &SymbolicPoint| {
                let s = p.at(0);
                *table.get(&s).unwrap_or_else(|| panic!("no weight for symbol {s}"))
            }),
            modulus: Arc::new(move |d| if dyadic_depth(d) >= 1 { S::zero() } else { hi - lo }),
        })
    }

    /// Lipschitz surrogate for the indicator of the cylinder `[word]`: the
    /// length of the common prefix with `word`, divided by `|word|`.
    pub fn smoothed_cylinder(word: Vec<u8>) -> Result<Self> {
        if word.is_empty() {
            return Err(FkError::Invalid("cylinder word is empty".into()));
        }
        let len = word.len();
        let w = word.clone();
        Ok(Self {
            kind: TestKind::SmoothedCylinder { word },
            sup_norm: S::one(),
            eval: Arc::new(move |p: &SymbolicPoint| {
                let agree = w.iter().enumerate().take_while(|&(j, &s)| p.at(j) == s).count();
                S::count(agree) / S::count(len)
            }),
            modulus: Arc::new(move |d| S::count(len.saturating_sub(dyadic_depth(d))) / S::count(len)),
        })
    }
}

impl<S: Scalar> TestFunction<S, S> {
    /// `φ(x) = x` on an interval of half-width `bound`.
    pub fn identity(bound: S) -> Self {
        Self {
            kind: TestKind::Coordinate { index: 0 },
            sup_norm: bound,
            eval: Arc::new(|x: &S| *x),
            modulus: Arc::new(|d| d),
        }
    }

    /// `φ(θ) = cos 2πθ`, Lipschitz with constant `2π` for the circle metric.
    pub fn cosine() -> Self {
        let tau = S::lit(std::f64::consts::TAU);
        Self {
            kind: TestKind::Cosine,
            sup_norm: S::one(),
            eval: Arc::new(move |x: &S| (tau * *x).cos()),
            modulus: Arc::new(move |d| (tau * d).min(S::lit(2.0))),
        }
    }
}

impl<S: Scalar> TestFunction<ValueSeq<S>, S> {
    /// `φ(ω) = ω_index` on the countable product, where `|ω_i − ω'_i| ≤ 2^i ρ(ω, ω')`.
    pub fn value_coordinate(index: usize) -> Self {
        Self {
            kind: TestKind::Coordinate { index },
            sup_norm: S::one(),
            eval: Arc::new(move |p: &ValueSeq<S>| p.at(index)),
            modulus: Arc::new(move |d| (d / dyadic::<S>(index)).min(S::one())),
        }
    }
}
