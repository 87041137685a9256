use crate::error::{FkError, Result};
use crate::scalar::Scalar;
use crate::seqcore::MetricSystem;

use super::flow::FlowNetwork;
use super::measure::DiscreteMeasure;

pub const MAX_SUPPORT: usize = 10_000;

/// Mass deficits below this are rounding noise from the flow computation.
const DEFICIT_FLOOR: f64 = 1e-12;

/// Exact Prokhorov distance between finitely supported measures.
///
/// With `D(ε) = max_B [μ(B) − ν(B^ε)] = 1 − maxflow` over the edges
/// `ρ(a, b) < ε`, the distance is `inf{ε > 0 : D(ε) ≤ ε}`. `D` is constant on
/// each interval `(d_i, d_{i+1}]` between consecutive distinct distances, so
/// the infimum is `max(d_i, D_i)` for the first interval where `D_i ≤ d_{i+1}`.
pub fn prokhorov<S: Scalar, M: MetricSystem<S>>(
    sys: &M,
    mu: &DiscreteMeasure<M::Point, S>,
    nu: &DiscreteMeasure<M::Point, S>,
) -> Result<S> {
    for m in [mu.len(), nu.len()] {
        if m > MAX_SUPPORT {
            return Err(FkError::SupportTooLarge { size: m, max: MAX_SUPPORT });
        }
    }
    let (a, b) = (mu.len(), nu.len());
    let mut dist = Vec::with_capacity(a * b);
    for p in &mu.support {
        for q in &nu.support {
            dist.push(sys.distance(p, q).as_f64());
        }
    }
    let mut levels: Vec<f64> = dist.iter().copied().filter(|&d| d > 0.0).collect();
    levels.push(0.0);
    levels.sort_by(|x, y| x.partial_cmp(y).expect("finite distances"));
    levels.dedup();

    let wa: Vec<f64> = mu.weights.iter().map(|w| w.as_f64()).collect();
    let wb: Vec<f64> = nu.weights.iter().map(|w| w.as_f64()).collect();
    let deficit = |threshold: f64| -> f64 {
        let (s, t) = (a + b, a + b + 1);
        let mut g = FlowNetwork::new(a + b + 2);
        for (i, &w) in wa.iter().enumerate() {
            g.add_edge(s, i, w);
        }
        for (j, &w) in wb.iter().enumerate() {
            g.add_edge(a + j, t, w);
        }
        for i in 0..a {
            for j in 0..b {
                if dist[i * b + j] <= threshold {
                    g.add_edge(i, a + j, 2.0);
                }
            }
        }
        let d = 1.0 - g.max_flow(s, t);
        if d < DEFICIT_FLOOR {
            0.0
        } else {
            d
        }
    };
    // First index whose interval contains a feasible ε; the predicate is monotone.
    let feasible = |i: usize| -> (bool, f64) {
        let d = deficit(levels[i]);
        let next = levels.get(i + 1).copied().unwrap_or(f64::INFINITY);
        (d <= next, d)
    };
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(mid).0 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let (_, d) = feasible(lo);
    Ok(S::lit(levels[lo].max(d)))
}
