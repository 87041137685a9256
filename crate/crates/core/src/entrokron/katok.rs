use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::measurekit::BlockDistribution;
use crate::scalar::Scalar;

/// Per-symbol occurrence bitmasks of a word, for bit-parallel LCS against it.
struct WordMasks {
    words: usize,
    masks: Vec<u64>,
}

impl WordMasks {
    fn new(w: &[u8], alphabet: usize) -> Self {
        let n = w.len();
        let words = n.div_ceil(64).max(1);
        let mut masks = vec![0u64; alphabet * words];
        for (j, &c) in w.iter().enumerate() {
            masks[c as usize * words + j / 64] |= 1 << (j % 64);
        }
        Self { words, masks }
    }

    fn lcs(&self, a: &[u8], v: &mut Vec<u64>) -> usize {
        let w = self.words;
        v.clear();
        v.resize(w, !0);
        for &c in a {
            let m = &self.masks[c as usize * w..(c as usize + 1) * w];
            let mut carry = 0u64;
            for k in 0..w {
                let u = v[k] & m[k];
                let (s1, c1) = v[k].overflowing_add(u);
                let (s2, c2) = s1.overflowing_add(carry);
                carry = u64::from(c1 || c2);
                v[k] = s2 | (v[k] & !m[k]);
            }
        }
        // Bits above n start as ones and stay ones (their masks are zero).
        v.iter().map(|x| x.count_zeros() as usize).sum()
    }
}

fn alphabet_of<'a, I: IntoIterator<Item = &'a Vec<u8>>>(words: I) -> usize {
    words.into_iter().flatten().copied().max().map_or(1, |m| m as usize + 1)
}

/// Largest number of candidate witnesses tried when the search is not exhaustive.
pub const MAX_WITNESS_CANDIDATES: usize = 512;
/// Bit-operation budget for the non-exhaustive witness search.
const WITNESS_WORK: f64 = 4e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KatokReport<S> {
    pub n: usize,
    pub epsilon: S,
    /// `ball_mass ≥ 1 − ε` for the witness.
    pub trivial: bool,
    pub witness: Vec<u8>,
    /// `μ{u : f̄_n(ω, u) < ε}`.
    pub ball_mass: S,
    /// `Σ μ(u) f̄_n(ω, u)`.
    pub beta: S,
    /// `β < ε²`, which forces the ball of radius `ε` to carry mass above `1 − ε`.
    pub sqrt_beta_trivial: bool,
    /// Every word of length `n` was tried, so "not trivial" is exact.
    pub exhaustive: bool,
    pub candidates: usize,
    /// Support blocks at distance exactly `ε` from the witness, excluded from the ball.
    pub boundary_blocks: usize,
}

/// Searches a word `ω` whose `f̄_n`-ball of radius `ε` carries mass at least `1 − ε`.
///
/// Binary distributions with `n ≤ 12` are searched over all `2^n` words;
/// otherwise candidates are the support ranked by probability (capped) plus the
/// word of per-position most frequent symbols.
pub fn katok_trivial<S: Scalar>(bd: &BlockDistribution<S>, epsilon: S) -> KatokReport<S> {
    let n = bd.n;
    let support: Vec<(&[u8], S)> = bd.ranked();
    let alphabet = alphabet_of(bd.probs.keys());
    let exhaustive = alphabet <= 2 && n <= 12;
    // Exhaustive candidates use both binary symbols even if only one is observed.
    let alphabet = if exhaustive { 2 } else { alphabet };
    let candidates: Vec<Vec<u8>> = if exhaustive {
        (0..1u32 << n).map(|c| (0..n).map(|j| ((c >> (n - 1 - j)) & 1) as u8).collect()).collect()
    } else {
        let per = (support.len() as f64) * (n as f64) * (n.div_ceil(64) as f64);
        let cap = ((WITNESS_WORK / per.max(1.0)) as usize).clamp(1, MAX_WITNESS_CANDIDATES);
        let mut c: Vec<Vec<u8>> = support.iter().take(cap).map(|(w, _)| w.to_vec()).collect();
        let modal = modal_word(bd, alphabet);
        if !c.contains(&modal) {
            c.push(modal);
        }
        c
    };
    let threshold = S::one() - epsilon;
    let mut v = Vec::new();
    let mut best: Option<(S, S, usize, usize)> = None;
    for (ci, cand) in candidates.iter().enumerate() {
        let masks = WordMasks::new(cand, alphabet);
        let (mut mass, mut beta, mut edge) = (S::zero(), S::zero(), 0usize);
        for &(u, p) in &support {
            let f = S::count(n - masks.lcs(u, &mut v)) / S::count(n);
            beta = beta + p * f;
            if f < epsilon {
                mass = mass + p;
            } else if f == epsilon {
                edge += 1;
            }
        }
        let better = match best {
            None => true,
            Some((bm, bb, _, _)) => mass > bm || (mass == bm && beta < bb),
        };
        if better {
            best = Some((mass, beta, ci, edge));
        }
    }
    let (ball_mass, beta, ci, boundary_blocks) = best.expect("at least one candidate");
    KatokReport {
        n,
        epsilon,
        trivial: ball_mass >= threshold,
        witness: candidates[ci].clone(),
        ball_mass,
        beta,
        sqrt_beta_trivial: beta < epsilon * epsilon,
        exhaustive,
        candidates: candidates.len(),
        boundary_blocks,
    }
}

fn modal_word<S: Scalar>(bd: &BlockDistribution<S>, alphabet: usize) -> Vec<u8> {
    let mut weight = vec![S::zero(); bd.n * alphabet];
    for (w, &p) in &bd.probs {
        for (j, &c) in w.iter().enumerate() {
            weight[j * alphabet + c as usize] = weight[j * alphabet + c as usize] + p;
        }
    }
    (0..bd.n)
        .map(|j| {
            let row = &weight[j * alphabet..(j + 1) * alphabet];
            let mut best = 0;
            for c in 1..alphabet {
                if row[c] > row[best] {
                    best = c;
                }
            }
            best as u8
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KroneckerRow<S> {
    pub n: usize,
    /// Empirical mass of a set of observed `n`-blocks with pairwise `f̄_n < ε`.
    pub mass: S,
    pub set_size: usize,
    /// `mass > 1 − ε`.
    pub pass: bool,
    pub witness: Vec<u8>,
}

/// Pair-check budget for growing a set beyond the half-radius ball.
const GROW_WORK: f64 = 2e9;

/// For each `n`, grows a set of observed `n`-blocks with pairwise `f̄_n < ε`:
/// first the ball of radius `ε/2` around the Katok witness (pairwise close by
/// the triangle inequality), then further blocks by decreasing frequency when
/// close to every member.
pub fn loosely_kronecker_diagnostic<S: Scalar>(stream: &[u8], epsilon: S, n_list: &[usize]) -> Result<Vec<KroneckerRow<S>>> {
    let nmax = n_list.iter().copied().max().unwrap_or(0);
    if n_list.contains(&0) {
        return Err(FkError::Invalid("block lengths must be positive".into()));
    }
    let needed = nmax.saturating_mul(100);
    if stream.len() < needed || stream.is_empty() {
        return Err(FkError::HorizonTooShort { needed: needed.max(1), available: stream.len() });
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let bd = BlockDistribution::<S>::from_stream(stream, n)?;
        let katok = katok_trivial(&bd, epsilon);
        let ranked = bd.ranked();
        let alphabet = alphabet_of(bd.probs.keys()).max(alphabet_of([&katok.witness]));
        let centre = WordMasks::new(&katok.witness, alphabet);
        let half = epsilon / S::lit(2.0);
        let dist = |m: &WordMasks, u: &[u8], v: &mut Vec<u64>| S::count(n - m.lcs(u, v)) / S::count(n);
        let mut v = Vec::new();
        let mut members: Vec<usize> = Vec::new();
        let mut rest: Vec<usize> = Vec::new();
        for (i, (u, _)) in ranked.iter().enumerate() {
            if dist(&centre, u, &mut v) < half {
                members.push(i);
            } else {
                rest.push(i);
            }
        }
        let mut member_masks: Vec<WordMasks> = members.iter().map(|&i| WordMasks::new(ranked[i].0, alphabet)).collect();
        let cost = (n as f64) * (n.div_ceil(64) as f64);
        let mut work = 0.0f64;
        for i in rest {
            if work > GROW_WORK {
                break;
            }
            let u = ranked[i].0;
            work += cost * member_masks.len() as f64;
            if member_masks.iter().all(|m| dist(m, u, &mut v) < epsilon) {
                members.push(i);
                member_masks.push(WordMasks::new(u, alphabet));
            }
        }
        let mass = members.iter().fold(S::zero(), |a, &i| a + ranked[i].1);
        rows.push(KroneckerRow { n, mass, set_size: members.len(), pass: mass > S::one() - epsilon, witness: katok.witness });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchkit::word_lcs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bit_parallel_lcs_matches_dp() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut v = Vec::new();
        for n in [1usize, 5, 63, 64, 65, 130] {
            for _ in 0..20 {
                let a: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                let b: Vec<u8> = (0..n).map(|_| rng.gen_range(0..3)).collect();
                assert_eq!(WordMasks::new(&b, 3).lcs(&a, &mut v), word_lcs(&a, &b), "n = {n}");
            }
        }
    }

    #[test]
    fn point_mass_is_trivial() {
        let bd = BlockDistribution::<f64>::point_mass(&[0, 1, 1, 0]);
        let r = katok_trivial(&bd, 0.01);
        assert!(r.trivial && r.sqrt_beta_trivial);
        assert_eq!((r.ball_mass, r.beta), (1.0, 0.0));
        assert_eq!(r.witness, vec![0, 1, 1, 0]);
    }

    #[test]
    fn constant_stream_is_kronecker() {
        let rows = loosely_kronecker_diagnostic::<f64>(&[1; 2000], 0.1, &[1, 5, 20]).unwrap();
        assert!(rows.iter().all(|r| r.mass == 1.0 && r.pass));
    }
}
