use fkdyn_core::seqcore::{
    assemble_quasi_orbit, orbit_segment, periodic_orbit, shift_metric, CircleRotation, CountableProduct, FullShift,
    MetricSystem, PeriodicOrbit, PointSeq, RealLine, SymbolicPoint, ValueSeq,
};
use fkdyn_core::FkError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn word_point(w: &[u8]) -> SymbolicPoint {
    SymbolicPoint::periodic(w).unwrap()
}

/// `2^{-j}` for the first index where the two periodic words differ, scanning explicitly.
fn naive_shift_distance(a: &[u8], b: &[u8], depth: usize) -> f64 {
    for j in 0..depth {
        if a[j % a.len()] != b[j % b.len()] {
            return 0.5f64.powi(j as i32);
        }
    }
    0.0
}

fn random_word(rng: &mut ChaCha8Rng, alphabet: u8, max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| rng.gen_range(0..alphabet)).collect()
}

#[test]
fn shift_metric_examples_and_oracle() {
    let d = |a: &[u8], b: &[u8]| shift_metric::<f64>(&word_point(a), &word_point(b), 64).value;
    assert_eq!(d(&[0], &[0]), 0.0);
    let a = SymbolicPoint::new(vec![0], vec![1]).unwrap();
    let b = word_point(&[1]);
    assert_eq!(shift_metric::<f64>(&a, &b, 64).value, 1.0);
    let a = SymbolicPoint::new(vec![0, 1, 0], vec![0]).unwrap();
    let b = SymbolicPoint::new(vec![0, 1, 1], vec![0]).unwrap();
    assert_eq!(shift_metric::<f64>(&a, &b, 64).value, 0.25);

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let (u, w) = (random_word(&mut rng, 2, 6), random_word(&mut rng, 2, 6));
        assert_eq!(d(&u, &w), naive_shift_distance(&u, &w, 64), "{u:?} {w:?}");
    }
}

fn triangle_on<M: MetricSystem<f64>>(sys: &M, pts: &[M::Point], rng: &mut ChaCha8Rng, slack: f64) {
    for _ in 0..1000 {
        let (p, q, r) = (
            &pts[rng.gen_range(0..pts.len())],
            &pts[rng.gen_range(0..pts.len())],
            &pts[rng.gen_range(0..pts.len())],
        );
        assert!(sys.distance(p, r) <= sys.distance(p, q) + sys.distance(q, r) + slack);
        assert_eq!(sys.distance(p, q), sys.distance(q, p));
        assert_eq!(sys.distance(p, p), 0.0);
    }
}

#[test]
fn metric_axioms_on_sampled_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shift = FullShift::new(3);
    let pts: Vec<SymbolicPoint> = (0..200)
        .map(|_| {
            let pre = random_word(&mut rng, 3, 4);
            SymbolicPoint::new(pre, random_word(&mut rng, 3, 5)).unwrap()
        })
        .collect();
    triangle_on(&shift, &pts, &mut rng, 0.0);

    let circle = CircleRotation::new(0.3);
    let pts: Vec<f64> = (0..200).map(|_| rng.gen::<f64>()).collect();
    triangle_on(&circle, &pts, &mut rng, 1e-12);

    let line = RealLine::new(10.0);
    let pts: Vec<f64> = (0..200).map(|_| rng.gen_range(-5.0..5.0)).collect();
    triangle_on(&line, &pts, &mut rng, 1e-12);

    let prod = CountableProduct::default();
    let pts: Vec<ValueSeq<f64>> = (0..200)
        .map(|_| {
            let c: Vec<f64> = (0..rng.gen_range(1..5)).map(|_| 1.0 / rng.gen_range(1..9) as f64).collect();
            ValueSeq::periodic(&c).unwrap()
        })
        .collect();
    triangle_on(&prod, &pts, &mut rng, 1e-12);
}

#[test]
fn orbit_segments() {
    let rot = CircleRotation::new(0.25f64);
    assert_eq!(orbit_segment(&rot, &0.0, 4).unwrap().points(), &[0.0, 0.25, 0.5, 0.75]);
    let shift = FullShift::binary();
    let seg = orbit_segment::<f64, _>(&shift, &word_point(&[0, 1]), 2).unwrap();
    assert_eq!(seg.points(), &[word_point(&[0, 1]), word_point(&[1, 0])]);
    assert_eq!(orbit_segment(&rot, &0.3, 1).unwrap().points(), &[0.3]);

    // Concatenation property.
    let start = SymbolicPoint::new(vec![1, 1, 0], vec![0, 1, 1]).unwrap();
    for (n, m) in [(1, 1), (3, 5), (7, 2)] {
        let whole = orbit_segment::<f64, _>(&shift, &start, n + m).unwrap();
        let head = orbit_segment::<f64, _>(&shift, &start, n).unwrap();
        let tail = orbit_segment::<f64, _>(&shift, &whole[n], m).unwrap();
        let joined: Vec<_> = head.points().iter().chain(tail.points()).cloned().collect();
        assert_eq!(whole.points(), joined.as_slice());
    }
}

#[test]
fn periodic_orbit_construction() {
    let shift = FullShift::binary();
    let o = periodic_orbit::<f64, _>(&shift, orbit_segment::<f64, _>(&shift, &word_point(&[0, 1]), 2).unwrap()).unwrap();
    assert_eq!(o.period(), 2);
    let o = periodic_orbit::<f64, _>(&shift, PointSeq::new(vec![word_point(&[0])]).unwrap()).unwrap();
    assert_eq!(o.period(), 1);
    let rot = CircleRotation::new(1.0f64 / 3.0);
    let o = periodic_orbit(&rot, PointSeq::new(vec![0.0, 1.0 / 3.0, 2.0 / 3.0]).unwrap()).unwrap();
    assert_eq!(o.period(), 3);
    let bad = periodic_orbit(&rot, PointSeq::new(vec![0.0, 0.3]).unwrap());
    assert!(matches!(bad, Err(FkError::NotPeriodic { .. })));
    assert!(PointSeq::<f64>::new(vec![]).is_err());
}

#[test]
fn quasi_orbit_assembly() {
    let a = PeriodicOrbit::from_word(&[0]).unwrap();
    let b = PeriodicOrbit::from_word(&[0, 1]).unwrap();
    let q = assemble_quasi_orbit(std::slice::from_ref(&a), &[100]).unwrap();
    assert!(q.switch_indices.is_empty());
    let q = assemble_quasi_orbit(&[a.clone(), b.clone()], &[4, 8]).unwrap();
    assert_eq!(q.len(), 12);
    assert_eq!(q.switch_indices, vec![4]);
    assert!((q.switch_density(12) - 1.0 / 12.0).abs() < 1e-15);
    // Away from switches the points follow the shift.
    let shift = FullShift::binary();
    for i in 0..11 {
        let follows = MetricSystem::<f64>::same_point(&shift, &MetricSystem::<f64>::step(&shift, &q.points[i]), &q.points[i + 1]);
        assert_eq!(follows, !q.is_switch(i + 1), "index {i}");
    }
    assert!(matches!(assemble_quasi_orbit(&[a.clone(), b.clone()], &[4, 4]), Err(FkError::BadSchedule(_))));
    assert!(matches!(assemble_quasi_orbit(&[a, b], &[4, 7]), Err(FkError::BadSchedule(_))));
}

#[test]
fn switch_density_settles_after_last_segment() {
    let words: [&[u8]; 3] = [&[0], &[0, 1], &[0, 0, 1]];
    let orbits: Vec<_> = words.iter().map(|w| PeriodicOrbit::from_word(w).unwrap()).collect();
    let q = assemble_quasi_orbit(&orbits, &[2, 6, 600]).unwrap();
    let last = *q.switch_indices.last().unwrap();
    let curve = q.switch_density_curve();
    let tail: Vec<_> = curve.iter().filter(|&&(m, _)| m > last).collect();
    for w in tail.windows(2) {
        assert!(w[1].1 <= w[0].1, "{curve:?}");
    }
    for &(m, d) in &curve {
        let direct = (1..m).filter(|&i| q.is_switch(i)).count() as f64 / m as f64;
        assert_eq!(d, direct);
    }
}
