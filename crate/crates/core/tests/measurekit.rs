use std::collections::BTreeMap;

use fkdyn_core::matchkit::gap;
use fkdyn_core::measurekit::{
    empirical_measure, prokhorov, transport_block_distance, BlockDistribution, CostKind, DiscreteMeasure, ProductSpec,
};
use fkdyn_core::{CircleRotation, MetricSystem, RealLine};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `max_B μ(B) − ν(B^ε)` over all subsets of the first support, `B^ε` the open ε-neighbourhood.
fn subset_deficit<M: MetricSystem<f64>>(sys: &M, mu: &DiscreteMeasure<M::Point, f64>, nu: &DiscreteMeasure<M::Point, f64>, eps: f64) -> f64 {
    let mut best = 0.0f64;
    for mask in 1u32..(1 << mu.len()) {
        let inside: Vec<usize> = (0..mu.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let mass: f64 = inside.iter().map(|&i| mu.weights[i]).sum();
        let near: f64 = (0..nu.len())
            .filter(|&j| inside.iter().any(|&i| sys.distance(&mu.support[i], &nu.support[j]) < eps))
            .map(|j| nu.weights[j])
            .sum();
        best = best.max(mass - near);
    }
    best
}

/// Prokhorov distance from the subset deficit, scanning the intervals between pairwise distances.
fn prokhorov_oracle<M: MetricSystem<f64>>(sys: &M, mu: &DiscreteMeasure<M::Point, f64>, nu: &DiscreteMeasure<M::Point, f64>) -> f64 {
    let mut cuts = vec![0.0];
    for p in &mu.support {
        for q in &nu.support {
            cuts.push(sys.distance(p, q));
        }
    }
    cuts.push(sys.diameter() + 1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    for w in cuts.windows(2) {
        // On (w0, w1] the deficit equals its value at w1.
        let d = subset_deficit(sys, mu, nu, w[1]);
        let cand = w[0].max(d);
        if cand <= w[1] {
            return cand;
        }
    }
    unreachable!()
}

fn random_measure(rng: &mut ChaCha8Rng, size: usize, lattice: u32) -> DiscreteMeasure<f64, f64> {
    let support: Vec<f64> = (0..size).map(|_| rng.gen_range(0..lattice) as f64 / lattice as f64).collect();
    let raw: Vec<u32> = (0..size).map(|_| rng.gen_range(1..10)).collect();
    let total: u32 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|&r| r as f64 / total as f64).collect();
    let head: f64 = weights[..size - 1].iter().sum();
    weights[size - 1] = 1.0 - head;
    DiscreteMeasure::new(support, weights).unwrap()
}

#[test]
fn prokhorov_against_subset_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let line = RealLine::new(1.0f64);
    let circle = CircleRotation::new(0.1f64);
    for k in 0..120 {
        let (a, b) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let (mu, nu) = (random_measure(&mut rng, a, 20), random_measure(&mut rng, b, 20));
        if k % 2 == 0 {
            let got = prokhorov(&line, &mu, &nu).unwrap();
            let want = prokhorov_oracle(&line, &mu, &nu);
            assert!((got - want).abs() <= 1e-9, "line: {got} vs {want}");
        } else {
            let got = prokhorov(&circle, &mu, &nu).unwrap();
            let want = prokhorov_oracle(&circle, &mu, &nu);
            assert!((got - want).abs() <= 1e-9, "circle: {got} vs {want}");
        }
    }
}

#[test]
fn prokhorov_examples() {
    let line = RealLine::new(1.0f64);
    let m = |s: Vec<f64>, w: Vec<f64>| DiscreteMeasure::new(s, w).unwrap();
    assert_eq!(prokhorov(&line, &m(vec![0.3], vec![1.0]), &m(vec![0.3], vec![1.0])).unwrap(), 0.0);
    // Two unit atoms at distance 0.4: the distance is the point separation capped by total mass.
    assert!((prokhorov(&line, &m(vec![0.0], vec![1.0]), &m(vec![0.4], vec![1.0])).unwrap() - 0.4).abs() < 1e-12);
    assert!((prokhorov(&line, &m(vec![0.0], vec![1.0]), &m(vec![-1.0], vec![1.0])).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn empirical_measures_merge_repeats() {
    let line = RealLine::new(1.0f64);
    let e = empirical_measure::<f64, _>(&line, &[0.0, 0.0, 1.0, 0.5], 3).unwrap();
    let mut pairs: Vec<(f64, f64)> = e.support.iter().copied().zip(e.weights.iter().copied()).collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(pairs, vec![(0.0, 2.0 / 3.0), (1.0, 1.0 / 3.0)]);
    assert!(empirical_measure::<f64, _>(&line, &[0.0], 2).is_err());
}

#[test]
fn small_gap_gives_close_empirical_measures() {
    let line = RealLine::new(1.0f64);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.gen_range(5..=40);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..16) as f64 / 16.0).collect();
        // A shifted, jittered copy with a few fresh points.
        let lag = rng.gen_range(0..3);
        let z: Vec<f64> = (0..n)
            .map(|j| {
                if rng.gen_bool(0.1) || j + lag >= n {
                    rng.gen_range(0.0..1.0)
                } else {
                    x[j + lag] + rng.gen_range(-0.02..0.02)
                }
            })
            .collect();
        let delta = rng.gen_range(0.03..0.3);
        let g = gap(&line, &x, &z, n, delta).unwrap().value;
        let eps = g + rng.gen_range(0.001..0.1);
        let mx = empirical_measure::<f64, _>(&line, &x, n).unwrap();
        let mz = empirical_measure::<f64, _>(&line, &z, n).unwrap();
        let dp = prokhorov(&line, &mx, &mz).unwrap();
        assert!(dp < delta.max(eps), "D_P {dp} with δ {delta}, gap {g}, ε {eps}");
    }
}

fn random_blocks(rng: &mut ChaCha8Rng, n: usize) -> BlockDistribution<f64> {
    let k = rng.gen_range(1..=6);
    let mut raw: BTreeMap<Vec<u8>, u32> = BTreeMap::new();
    for _ in 0..k {
        let w: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        *raw.entry(w).or_insert(0) += rng.gen_range(1..10);
    }
    let total: u32 = raw.values().sum();
    let probs = raw.into_iter().map(|(w, c)| (w, c as f64 / total as f64)).collect();
    BlockDistribution::new(n, probs).unwrap()
}

fn word_cost(u: &[u8], w: &[u8], kind: CostKind) -> f64 {
    let m = fkdyn_core::matchkit::word_metrics::<f64>(u, w).unwrap();
    match kind {
        CostKind::Edit => m.edit,
        CostKind::Hamming => m.hamming,
    }
}

/// Cost of the independent coupling, an upper bound for the optimum.
fn product_cost(mu: &BlockDistribution<f64>, nu: &BlockDistribution<f64>, kind: CostKind) -> f64 {
    let mut c = 0.0;
    for (u, p) in &mu.probs {
        for (w, q) in &nu.probs {
            c += p * q * word_cost(u, w, kind);
        }
    }
    c
}

#[test]
fn bernoulli_single_symbol_transport() {
    for (p, q) in [(0.5f64, 0.5f64), (0.2, 0.7), (0.9, 0.1), (0.0, 1.0), (0.33, 0.34)] {
        let mu = ProductSpec::bernoulli(p).block_distribution(1).unwrap();
        let nu = ProductSpec::bernoulli(q).block_distribution(1).unwrap();
        for kind in [CostKind::Edit, CostKind::Hamming] {
            let r = transport_block_distance(&mu, &nu, kind).unwrap();
            assert!((r.value - (p - q).abs()).abs() <= 1e-9, "{p} {q}: {}", r.value);
        }
    }
}

#[test]
fn transport_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let (mu, nu) = (random_blocks(&mut rng, n), random_blocks(&mut rng, n));
        let e = transport_block_distance(&mu, &nu, CostKind::Edit).unwrap();
        let h = transport_block_distance(&mu, &nu, CostKind::Hamming).unwrap();
        assert!(e.value <= h.value + 1e-12);
        for (r, kind) in [(&e, CostKind::Edit), (&h, CostKind::Hamming)] {
            assert!(r.plan.marginal_error(&mu, &nu) <= 1e-9);
            let recomputed: f64 = r.plan.mass.iter().map(|(u, w, m)| m * word_cost(u, w, kind)).sum();
            assert!((recomputed - r.value).abs() <= 1e-9);
            assert!(r.value <= product_cost(&mu, &nu, kind) + 1e-12);
            assert!(r.plan.mass.iter().all(|t| t.2 >= 0.0));
        }
        assert!(transport_block_distance(&mu, &mu, CostKind::Edit).unwrap().value.abs() <= 1e-12);
    }
    let a = BlockDistribution::<f64>::point_mass(&[0, 1, 0, 1]);
    let b = BlockDistribution::<f64>::point_mass(&[1, 0, 1, 0]);
    assert_eq!(transport_block_distance(&a, &b, CostKind::Edit).unwrap().value, 0.25);
    assert_eq!(transport_block_distance(&a, &b, CostKind::Hamming).unwrap().value, 1.0);
}
