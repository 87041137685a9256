use std::collections::BTreeMap;

use fkdyn_core::gikn::{
    exponent_decay, inductive_projection_match, limit_quasi_orbit, projection_to_match, synthesize_gikn, verify_cauchy, verify_good_approximation,
    verify_good_approximation_words, GiknSequence, GoodApproximation, SynthConfig,
};
use fkdyn_core::matchkit::{max_match, MatchMode};
use fkdyn_core::measurekit::{empirical_measure, prokhorov};
use fkdyn_core::seqcore::{is_primitive, shift_metric};
use fkdyn_core::{FkError, FullShift, PeriodicOrbit, SymbolicPoint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct definition: `y` shadows `λ` when `ρ(T^j y, T^j λ) < γ` for every `j < |Λ|`.
/// With `Λ` primitive the shadowed phase is unique, so fibers are determined.
fn oracle_kappa(gw: &[u8], lw: &[u8], gamma: f64) -> (f64, Vec<usize>, Vec<usize>) {
    let (p, q) = (gw.len(), lw.len());
    let g = |i: usize| SymbolicPoint::new(vec![], gw.to_vec()).unwrap().shifted(i);
    let l = |i: usize| SymbolicPoint::new(vec![], lw.to_vec()).unwrap().shifted(i);
    let mut cand = vec![None; p];
    for (y, slot) in cand.iter_mut().enumerate() {
        let hits: Vec<usize> = (0..q)
            .filter(|&lam| (0..q).all(|j| shift_metric::<f64>(&g(y + j), &l(lam + j), 64).value < gamma))
            .collect();
        assert!(hits.len() <= 1);
        *slot = hits.first().copied();
    }
    let mut fibers = vec![0usize; q];
    cand.iter().flatten().for_each(|&lam| fibers[lam] += 1);
    let c = *fibers.iter().min().unwrap();
    let mut used = vec![0usize; q];
    let (mut delta, mut psi) = (Vec::new(), Vec::new());
    for (y, lam) in cand.iter().enumerate() {
        if let Some(lam) = *lam {
            if used[lam] < c {
                used[lam] += 1;
                delta.push(y);
                psi.push(lam);
            }
        }
    }
    ((c * q) as f64 / p as f64, delta, psi)
}

fn primitive_word(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    loop {
        let w: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2)).collect();
        if is_primitive(&w) {
            return w;
        }
    }
}

/// `Λ^reps` with a few flipped symbols and a random tail.
fn noisy_power(rng: &mut ChaCha8Rng, lw: &[u8], reps: usize, flips: usize, tail: usize) -> Vec<u8> {
    let mut w: Vec<u8> = lw.iter().copied().cycle().take(lw.len() * reps).collect();
    for _ in 0..flips {
        let i = rng.gen_range(0..w.len());
        w[i] ^= 1;
    }
    w.extend((0..tail).map(|_| rng.gen_range(0..2u8)));
    w
}

#[test]
fn copied_block_example() {
    let shift = FullShift::binary();
    let big: Vec<u8> = [0u8, 1].repeat(8).into_iter().chain([1, 1]).collect();
    let small = vec![0u8, 1];
    let (k, delta, psi) = oracle_kappa(&big, &small, 0.125);
    let ga = verify_good_approximation_words(&shift, &big, &small, 0.125f64, 0.5).unwrap();
    assert_eq!((ga.kappa, &ga.delta_set, &ga.psi), (k, &delta, &psi));
    assert!(k >= 0.5);
    let bad = verify_good_approximation_words(&shift, &[1, 1], &[0, 0], 0.5f64, 0.5);
    assert!(matches!(bad, Err(FkError::NotGoodApproximation { .. })));
}

#[test]
fn verifiers_agree_with_direct_definition() {
    let shift = FullShift::binary();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut accepted = 0;
    for _ in 0..150 {
        let q = rng.gen_range(1..=5);
        let lw = primitive_word(&mut rng, q);
        let reps = rng.gen_range(2..=8);
        let (flips, tail) = (rng.gen_range(0..3), rng.gen_range(0..4));
        let gw = noisy_power(&mut rng, &lw, reps, flips, tail);
        let gamma = [0.5, 0.25, 0.125, 0.3][rng.gen_range(0..4)];
        let (k, delta, psi) = oracle_kappa(&gw, &lw, gamma);
        let kappa = 0.3;
        let words = verify_good_approximation_words(&shift, &gw, &lw, gamma, kappa);
        let (go, lo) = (PeriodicOrbit::from_word(&gw).unwrap(), PeriodicOrbit::from_word(&lw).unwrap());
        let generic = verify_good_approximation(&shift, &go, &lo, gamma, kappa);
        if k > 0.0 && k >= kappa {
            accepted += 1;
            for ga in [words.unwrap(), generic.unwrap()] {
                assert_eq!((ga.kappa, &ga.delta_set, &ga.psi), (k, &delta, &psi));
                ga.check().unwrap();
                ga.check_shadowing(&shift, &go, &lo).unwrap();
            }
        } else {
            for r in [words, generic] {
                match r {
                    Err(FkError::NotGoodApproximation { best_kappa }) => assert_eq!(best_kappa, k),
                    other => panic!("expected rejection, got {other:?}"),
                }
            }
        }
    }
    assert!(accepted > 30, "only {accepted} accepted instances");
}

/// Random `ψ` with equal fibers on a random `Δ` covering a `κ` fraction of `Γ`,
/// with no relation to orbit order.
fn scrambled_projection(rng: &mut ChaCha8Rng, big: usize, q: usize, kappa: f64) -> GoodApproximation<f64> {
    let c = ((kappa * big as f64) / q as f64).ceil() as usize;
    let mut phases: Vec<usize> = (0..big).collect();
    phases.shuffle(rng);
    let mut delta_set = phases[..c * q].to_vec();
    delta_set.sort_unstable();
    let mut psi: Vec<usize> = (0..q).flat_map(|l| std::iter::repeat_n(l, c)).collect();
    psi.shuffle(rng);
    finish(delta_set, psi, big, q, c)
}

/// `Δ` made of runs whose `ψ`-phases advance with the orbit, as a shadowing
/// projection would have; run lengths are multiples of `q` so fibers are equal.
fn run_projection(rng: &mut ChaCha8Rng, big: usize, q: usize, kappa: f64) -> GoodApproximation<f64> {
    let need = ((kappa * big as f64) / q as f64).ceil() as usize;
    let blocks = big / q;
    // Choose which q-blocks of Γ are covered, then shift each run start a little.
    let mut chosen: Vec<usize> = (0..blocks).collect();
    chosen.shuffle(rng);
    chosen.truncate(need);
    chosen.sort_unstable();
    let (mut delta_set, mut psi) = (Vec::new(), Vec::new());
    let mut k = 0;
    while k < chosen.len() {
        let mut end = k + 1;
        while end < chosen.len() && chosen[end] == chosen[end - 1] + 1 {
            end += 1;
        }
        let phase = rng.gen_range(0..q);
        let start = chosen[k] * q;
        for i in 0..(end - k) * q {
            delta_set.push(start + i);
            psi.push((phase + i) % q);
        }
        k = end;
    }
    finish(delta_set, psi, big, q, need)
}

fn finish(delta_set: Vec<usize>, psi: Vec<usize>, big: usize, q: usize, c: usize) -> GoodApproximation<f64> {
    GoodApproximation {
        gamma: 0.5,
        kappa: (c * q) as f64 / big as f64,
        delta_set,
        psi,
        fiber_size: c,
        gamma_period: big,
        lambda_period: q,
    }
}

#[test]
fn synthetic_projections_give_large_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let q = rng.gen_range(1..=6);
        let big = q * rng.gen_range(2..=10);
        let p = 4 * big;
        let ga = run_projection(&mut rng, big, q, 0.75);
        ga.check().unwrap();
        let pm = projection_to_match(&ga, p, q).unwrap();
        pm.matching.check_structure().unwrap();
        assert_eq!(pm.matching.n, p + q);
        assert!(pm.matching.fit() as f64 >= ga.kappa * p as f64, "fit {} < {}·{p}", pm.matching.fit(), ga.kappa);
        let ind = inductive_projection_match(&ga, p, q).unwrap();
        ind.matching.check_structure().unwrap();
        assert!(ind.matching.fit() <= pm.matching.fit());

        let ga = scrambled_projection(&mut rng, big, q, 0.75);
        ga.check().unwrap();
        let pm = projection_to_match(&ga, p, q).unwrap();
        pm.matching.check_structure().unwrap();
        assert!(inductive_projection_match(&ga, p, q).unwrap().matching.fit() <= pm.matching.fit());
    }
}

#[test]
fn verified_projections_give_valid_matches() {
    let shift = FullShift::binary();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut used = 0;
    for _ in 0..120 {
        let q = rng.gen_range(2..=5);
        let lw = primitive_word(&mut rng, q);
        let (reps, flips) = (rng.gen_range(4..=10), rng.gen_range(0..2));
        let gw = noisy_power(&mut rng, &lw, reps, flips, q);
        let gamma = [0.5, 0.25, 0.125][rng.gen_range(0..3)];
        let Ok(ga) = verify_good_approximation_words(&shift, &gw, &lw, gamma, 0.75) else { continue };
        used += 1;
        let p = 4 * gw.len();
        let pm = projection_to_match(&ga, p, q).unwrap();
        let (go, lo) = (PeriodicOrbit::from_word(&gw).unwrap(), PeriodicOrbit::from_word(&lw).unwrap());
        let x = go.segment(pm.x_start, p + q);
        let z = lo.segment(pm.z_start, p + q);
        pm.matching.validate(&shift, &x, &z).unwrap();
        assert!(pm.matching.fit() as f64 >= ga.kappa * p as f64);
        let best = max_match(&shift, &x, &z, p + q, gamma, MatchMode::Dp).unwrap();
        assert!(pm.matching.fit() <= best.fit());
    }
    assert!(used > 20, "only {used} usable instances");
}

fn signed_weights() -> BTreeMap<u8, f64> {
    BTreeMap::from([(0, 1.0), (1, -1.0)])
}

#[test]
fn synthesized_tower_properties() {
    let cfg = SynthConfig::<f64>::geometric(vec![0], 4);
    let gs = synthesize_gikn(&cfg).unwrap();
    gs.validate().unwrap();
    let periods = gs.periods();
    assert!(periods.windows(2).all(|w| w[0] < w[1]));
    let shift = gs.shift();
    for n in 0..gs.len() - 1 {
        let (g, l) = (&gs.levels[n + 1].word, &gs.levels[n].word);
        let gamma = 0.25f64.powi(n as i32);
        let floor = 1.0 - 0.5f64.powi(n as i32 + 1);
        let ga = verify_good_approximation_words(&shift, g, l, gamma, floor).unwrap();
        ga.check_shadowing(&shift, &gs.orbit(n + 1), &gs.orbit(n)).unwrap();
    }
    let report = verify_cauchy(&gs, 1e-3).unwrap();
    assert!(report.ok(), "{:?}", report.violations);
    assert_eq!(report.separation.len(), gs.len());
    for ((sep, &per), lvl) in report.separation.iter().zip(&periods).zip(&gs.levels) {
        assert_eq!(sep.pass.is_some(), lvl.gamma.is_some());
        // Rotations of longer words can agree on the whole metric depth.
        if per <= 64 {
            assert!(sep.min_distance > 0.0, "{sep:?}");
        }
    }
}

#[test]
fn signed_tower_decays() {
    let cfg = SynthConfig {
        weights: signed_weights(),
        gamma_budget: vec![1.0; 5],
        kappa_floor: vec![0.5; 5],
        ..SynthConfig::<f64>::geometric(vec![0], 6)
    };
    let gs = synthesize_gikn(&cfg).unwrap();
    let chi = gs.exponents();
    for w in chi.windows(2) {
        assert!(w[1].abs() < 0.5 * w[0].abs(), "{chi:?}");
    }
    assert!(exponent_decay(&gs, 0.5).iter().all(|&b| b));
    // Exponents recomputed from the words.
    for lvl in &gs.levels {
        let s: f64 = lvl.word.iter().map(|&c| if c == 0 { 1.0 } else { -1.0 }).sum();
        assert!((lvl.chi - s / lvl.word.len() as f64).abs() < 1e-12);
    }
    let back = GiknSequence::<f64>::from_json(&gs.to_json()).unwrap();
    assert_eq!(back.exponents(), chi);
}

#[test]
fn empirical_measures_approach_limit() {
    let gs = synthesize_gikn(&SynthConfig::<f64>::geometric(vec![0], 4)).unwrap();
    let total = 20 * gs.periods().last().unwrap();
    let q = limit_quasi_orbit(&gs, total).unwrap();
    let shift = gs.shift();
    let limit = empirical_measure::<f64, _>(&shift, q.points.points(), total).unwrap();
    let d: Vec<f64> = (0..gs.len())
        .map(|n| {
            let o = gs.orbit(n);
            let m = empirical_measure::<f64, _>(&shift, o.block().points(), o.period()).unwrap();
            prokhorov(&shift, &m, &limit).unwrap()
        })
        .collect();
    for w in d.windows(2) {
        assert!(w[1] <= 2.0 * w[0], "{d:?}");
    }
    assert!(d.last().unwrap() < d.first().unwrap(), "{d:?}");
}
