use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::{dyadic_depth, Scalar};
use crate::seqcore::{FullShift, MetricSystem, PeriodicOrbit};

/// A `(γ, κ)`-projection `ψ: Δ → Λ` from a subset of `Γ` onto `Λ`.
///
/// Points are identified by their phase in the respective base block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodApproximation<S> {
    pub gamma: S,
    /// Achieved `|Δ| / |Γ|` after fiber trimming.
    pub kappa: S,
    /// Phases of `Γ` in `Δ`, increasing.
    pub delta_set: Vec<usize>,
    /// `psi[i]` is the `Λ`-phase assigned to `delta_set[i]`.
    pub psi: Vec<usize>,
    pub fiber_size: usize,
    pub gamma_period: usize,
    pub lambda_period: usize,
}

impl<S: Scalar> GoodApproximation<S> {
    /// Structural invariants: sizes, surjectivity and equal fibers.
    pub fn check(&self) -> Result<()> {
        if self.delta_set.len() != self.psi.len() {
            return Err(FkError::Invalid("Δ and ψ differ in length".into()));
        }
        if self.delta_set.windows(2).any(|w| w[0] >= w[1]) || self.delta_set.iter().any(|&d| d >= self.gamma_period) {
            return Err(FkError::Invalid("Δ is not an increasing set of Γ-phases".into()));
        }
        let mut fibers = vec![0usize; self.lambda_period];
        for &l in &self.psi {
            if l >= self.lambda_period {
                return Err(FkError::Invalid(format!("ψ value {l} outside Λ")));
            }
            fibers[l] += 1;
        }
        if fibers.iter().any(|&f| f != self.fiber_size) || self.fiber_size == 0 {
            return Err(FkError::Invalid("ψ is not a constant-to-one surjection".into()));
        }
        let k = S::count(self.delta_set.len()) / S::count(self.gamma_period);
        if (k - self.kappa).abs() > S::lit(1e-12) {
            return Err(FkError::Invalid("recorded κ differs from |Δ|/|Γ|".into()));
        }
        Ok(())
    }

    /// Checks `ρ(T^j y, T^j ψ(y)) < γ` for every `y ∈ Δ` and `j < |Λ|` directly.
    pub fn check_shadowing<M: MetricSystem<S>>(&self, sys: &M, gamma_orbit: &PeriodicOrbit<M::Point>, lambda_orbit: &PeriodicOrbit<M::Point>) -> Result<()> {
        for (&y, &l) in self.delta_set.iter().zip(&self.psi) {
            for j in 0..self.lambda_period {
                let d = sys.distance(gamma_orbit.point(y + j), lambda_orbit.point(l + j));
                if d >= self.gamma {
                    return Err(FkError::Invalid(format!("phase {y} leaves the γ-tube at step {j}")));
                }
            }
        }
        Ok(())
    }
}

/// Trims every fiber of a candidate projection to the smallest fiber size,
/// keeping the earliest `Γ`-phases, and accepts if the result reaches `kappa`.
fn trim_and_accept<S: Scalar>(
    cand: &[Option<usize>],
    q: usize,
    gamma: S,
    kappa: S,
) -> Result<GoodApproximation<S>> {
    let p = cand.len();
    let mut fibers = vec![0usize; q];
    for &l in cand.iter().flatten() {
        fibers[l] += 1;
    }
    let c = fibers.iter().copied().min().unwrap_or(0);
    let best = S::count(c * q) / S::count(p);
    if c == 0 || best < kappa {
        return Err(FkError::NotGoodApproximation { best_kappa: best.as_f64() });
    }
    let mut used = vec![0usize; q];
    let mut delta_set = Vec::with_capacity(c * q);
    let mut psi = Vec::with_capacity(c * q);
    for (y, l) in cand.iter().enumerate() {
        if let Some(l) = *l {
            if used[l] < c {
                used[l] += 1;
                delta_set.push(y);
                psi.push(l);
            }
        }
    }
    Ok(GoodApproximation {
        gamma,
        kappa: best,
        delta_set,
        psi,
        fiber_size: c,
        gamma_period: p,
        lambda_period: q,
    })
}

/// Greedy verification in an arbitrary metric system: each `y ∈ Γ` is sent to
/// the `Λ`-point minimising `max_{j<|Λ|} ρ(T^j y, T^j λ)`, kept if that is `< γ`.
pub fn verify_good_approximation<S: Scalar, M: MetricSystem<S>>(
    sys: &M,
    gamma_orbit: &PeriodicOrbit<M::Point>,
    lambda_orbit: &PeriodicOrbit<M::Point>,
    gamma: S,
    kappa: S,
) -> Result<GoodApproximation<S>> {
    check_budgets(gamma, kappa)?;
    let (p, q) = (gamma_orbit.period(), lambda_orbit.period());
    let mut cand = vec![None; p];
    for (y, slot) in cand.iter_mut().enumerate() {
        let mut best: Option<(S, usize)> = None;
        for l in 0..q {
            let mut worst = S::zero();
            for j in 0..q {
                worst = worst.max(sys.distance(gamma_orbit.point(y + j), lambda_orbit.point(l + j)));
                if best.is_some_and(|(b, _)| worst >= b) {
                    break;
                }
            }
            if best.is_none_or(|(b, _)| worst < b) {
                best = Some((worst, l));
            }
        }
        if let Some((w, l)) = best {
            if w < gamma {
                *slot = Some(l);
            }
        }
    }
    trim_and_accept(&cand, q, gamma, kappa)
}

fn check_budgets<S: Scalar>(gamma: S, kappa: S) -> Result<()> {
    if !(gamma > S::zero()) || !(kappa > S::zero() && kappa <= S::one()) {
        return Err(FkError::Invalid(format!("need γ > 0 and κ ∈ (0, 1], got γ = {gamma}, κ = {kappa}")));
    }
    Ok(())
}

const HASH_MOD: u64 = (1 << 61) - 1;
const HASH_BASE: u64 = 1_000_003;

fn mulmod(a: u64, b: u64) -> u64 {
    let r = (a as u128 * b as u128) % HASH_MOD as u128;
    r as u64
}

/// Prefix hashes of `s` and powers of the base, for O(1) substring hashes.
struct Rolling {
    pre: Vec<u64>,
    pow: Vec<u64>,
}

impl Rolling {
    fn new(s: impl Iterator<Item = u8>, len: usize) -> Self {
        let mut pre = Vec::with_capacity(len + 1);
        let mut pow = Vec::with_capacity(len + 1);
        pre.push(0);
        pow.push(1);
        for c in s.take(len) {
            let h = (mulmod(*pre.last().unwrap(), HASH_BASE) + c as u64 + 1) % HASH_MOD;
            pre.push(h);
            pow.push(mulmod(*pow.last().unwrap(), HASH_BASE));
        }
        Self { pre, pow }
    }

    fn hash(&self, i: usize, len: usize) -> u64 {
        (self.pre[i + len] + HASH_MOD - mulmod(self.pre[i], self.pow[len])) % HASH_MOD
    }
}

/// Verification for full-shift orbits given by their words.
///
/// `ρ(T^j y, T^j λ) < γ` for all `j < |Λ|` holds exactly when the windows of
/// length `|Λ| + k − 1` at `y` and `λ` agree, with `k` the dyadic depth of `γ`.
/// A window equals some `Λ`-window iff it is `|Λ|`-periodic and starts with a
/// rotation of `Λ`; runs of matches are extended one symbol at a time.
pub fn verify_good_approximation_words<S: Scalar>(
    shift: &FullShift,
    gamma_word: &[u8],
    lambda_word: &[u8],
    gamma: S,
    kappa: S,
) -> Result<GoodApproximation<S>> {
    check_budgets(gamma, kappa)?;
    shift.check_word(gamma_word)?;
    shift.check_word(lambda_word)?;
    let (p, q) = (gamma_word.len(), lambda_word.len());
    let k = dyadic_depth(gamma).min(shift.depth);
    if k == 0 {
        // Every pair is γ-close; fall back to the greedy choice of best shadow.
        let (go, lo) = (PeriodicOrbit::from_word(gamma_word)?, PeriodicOrbit::from_word(lambda_word)?);
        return verify_good_approximation(shift, &go, &lo, gamma, kappa);
    }
    let w = q + k - 1;
    let g = |i: usize| gamma_word[i % p];
    let l = |i: usize| lambda_word[i % q];

    // bad[i] counts positions i' < i of Γ^∞ with Γ^∞[i'] ≠ Γ^∞[i' + q].
    let span = p + w;
    let mut bad = vec![0u32; span + 1];
    for i in 0..span {
        bad[i + 1] = bad[i] + u32::from(g(i) != g(i + q));
    }
    let gh = Rolling::new((0..).map(g), p + q);
    let lh = Rolling::new((0..).map(l), 2 * q);
    let mut rotations: HashMap<u64, usize> = HashMap::with_capacity(q);
    for phi in (0..q).rev() {
        rotations.insert(lh.hash(phi, q), phi);
    }
    let matches_at = |y: usize, phi: usize| (0..w).all(|j| g(y + j) == l(phi + j));

    let mut cand = vec![None; p];
    let mut prev: Option<usize> = None;
    for (y, slot) in cand.iter_mut().enumerate() {
        let next = match prev {
            Some(phi) if g(y + w - 1) == l(phi + w) => Some((phi + 1) % q),
            _ => {
                let periodic = bad[y + w - q] == bad[y];
                match (periodic, rotations.get(&gh.hash(y, q))) {
                    (true, Some(&phi)) if matches_at(y, phi) => Some(phi),
                    _ => None,
                }
            }
        };
        *slot = next;
        prev = next;
    }
    trim_and_accept(&cand, q, gamma, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::parse_word;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_projection() {
        let shift = FullShift::binary();
        let w = parse_word("0010111").unwrap();
        let ga = verify_good_approximation_words(&shift, &w, &w, 0.01f64, 1.0).unwrap();
        assert_eq!(ga.fiber_size, 1);
        assert_eq!(ga.psi, (0..7).collect::<Vec<_>>());
        ga.check().unwrap();
    }

    #[test]
    fn copied_positions_shadow() {
        let shift = FullShift::binary();
        let big = parse_word(&format!("{}11", "01".repeat(8))).unwrap();
        let small = parse_word("01").unwrap();
        let ga = verify_good_approximation_words(&shift, &big, &small, 0.125f64, 0.5).unwrap();
        ga.check().unwrap();
        let (g, l) = (PeriodicOrbit::from_word(&big).unwrap(), PeriodicOrbit::from_word(&small).unwrap());
        ga.check_shadowing(&shift, &g, &l).unwrap();
        let slow = verify_good_approximation(&shift, &g, &l, 0.125f64, 0.5).unwrap();
        assert_eq!(slow, ga);

        let far = verify_good_approximation_words(&shift, &[1, 1], &[0, 0], 0.5f64, 0.1);
        assert!(matches!(far, Err(FkError::NotGoodApproximation { .. })));
    }

    #[test]
    fn fast_path_agrees_with_definition() {
        let shift = FullShift::binary();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut accepted = 0;
        for _ in 0..300 {
            let q = rng.gen_range(1..5);
            let lambda: Vec<u8> = (0..q).map(|_| rng.gen_range(0..2)).collect();
            if !crate::seqcore::is_primitive(&lambda) {
                continue;
            }
            let reps = rng.gen_range(1..5);
            let mut big: Vec<u8> = lambda.repeat(reps);
            big.extend((0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2u8)));
            let gamma = [0.3, 0.5, 0.2, 0.1, 1.5][rng.gen_range(0..5)];
            let (g, l) = (PeriodicOrbit::from_word(&big).unwrap(), PeriodicOrbit::from_word(&lambda).unwrap());
            let slow = verify_good_approximation(&shift, &g, &l, gamma, 0.01f64);
            let fast = verify_good_approximation_words(&shift, &big, &lambda, gamma, 0.01f64);
            match (slow, fast) {
                (Ok(a), Ok(b)) => {
                    b.check_shadowing(&shift, &g, &l).unwrap();
                    assert_eq!(a.kappa, b.kappa, "{big:?} {lambda:?} {gamma}");
                    accepted += 1;
                }
                (Err(a), Err(b)) => assert_eq!(a, b),
                (a, b) => panic!("{big:?} {lambda:?} {gamma}: {a:?} vs {b:?}"),
            }
        }
        assert!(accepted > 50);
    }
}
