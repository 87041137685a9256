use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::scalar::Scalar;
use crate::seqcore::{format_word, is_primitive, parse_word, FullShift, PeriodicOrbit, SymbolicPoint};

use super::approx::{verify_good_approximation_words, GoodApproximation};

/// One periodic orbit of a tower, with the budgets of its approximation by the next level.
#[derive(Debug, Clone, PartialEq)]
pub struct GiknLevel<S> {
    pub word: Vec<u8>,
    pub chi: S,
    /// `γ_n` and `κ_n` declared for "level `n + 1` approximates level `n`"; `None` on the top level.
    pub gamma: Option<S>,
    pub kappa: Option<S>,
    /// The verified projection from the next level onto this one, when it exists.
    pub approx: Option<GoodApproximation<S>>,
    /// How this level's word was built from the previous one: `w_{n−1}^m · t`.
    pub repetitions: Option<usize>,
    pub tail: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GiknSequence<S> {
    pub alphabet: usize,
    pub levels: Vec<GiknLevel<S>>,
    pub weights: BTreeMap<u8, S>,
}

/// Mean of the symbol weights over one period.
pub fn cocycle_exponent<S: Scalar>(weights: &BTreeMap<u8, S>, word: &[u8]) -> Result<S> {
    if word.is_empty() {
        return Err(FkError::Invalid("empty word".into()));
    }
    let mut sum = S::zero();
    for s in word {
        sum = sum + *weights.get(s).ok_or(FkError::MissingWeight(*s))?;
    }
    Ok(sum / S::count(word.len()))
}

impl<S: Scalar> GiknSequence<S> {
    /// A tower from explicit words; projections are verified at the declared budgets
    /// and left empty where verification fails.
    pub fn from_words(alphabet: usize, words: Vec<Vec<u8>>, gammas: &[S], kappas: &[S], weights: BTreeMap<u8, S>) -> Result<Self> {
        if words.is_empty() {
            return Err(FkError::Invalid("tower needs at least one level".into()));
        }
        let shift = FullShift::new(alphabet);
        let mut levels = Vec::with_capacity(words.len());
        for (n, word) in words.iter().enumerate() {
            shift.check_word(word)?;
            let chi = cocycle_exponent(&weights, word)?;
            let (gamma, kappa) = if n + 1 < words.len() {
                (gammas.get(n).copied(), kappas.get(n).copied())
            } else {
                (None, None)
            };
            let approx = match (gamma, kappa) {
                (Some(g), Some(k)) => verify_good_approximation_words(&shift, &words[n + 1], word, g, k).ok(),
                _ => None,
            };
            levels.push(GiknLevel { word: word.clone(), chi, gamma, kappa, approx, repetitions: None, tail: Vec::new() });
        }
        let gs = Self { alphabet, levels, weights };
        gs.check_lengths()?;
        Ok(gs)
    }

    fn check_lengths(&self) -> Result<()> {
        if self.levels.windows(2).any(|w| w[1].word.len() <= w[0].word.len()) {
            return Err(FkError::Invalid("orbit lengths must increase strictly".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn shift(&self) -> FullShift {
        FullShift::new(self.alphabet)
    }

    pub fn orbit(&self, n: usize) -> PeriodicOrbit<SymbolicPoint> {
        PeriodicOrbit::from_word(&self.levels[n].word).expect("tower words are nonempty")
    }

    pub fn periods(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.word.len()).collect()
    }

    pub fn exponents(&self) -> Vec<S> {
        self.levels.iter().map(|l| l.chi).collect()
    }

    /// `Σ γ_n` over declared budgets.
    pub fn gamma_sum(&self) -> S {
        self.levels.iter().filter_map(|l| l.gamma).fold(S::zero(), |a, g| a + g)
    }

    /// `Π κ_n` over declared floors.
    pub fn kappa_product(&self) -> S {
        self.levels.iter().filter_map(|l| l.kappa).fold(S::one(), |a, k| a * k)
    }

    /// Lengths increase, each `χ_n` is the block mean of its word, and every
    /// recorded projection is structurally valid and meets its floor.
    pub fn validate(&self) -> Result<()> {
        self.check_lengths()?;
        for (n, l) in self.levels.iter().enumerate() {
            if cocycle_exponent(&self.weights, &l.word)? != l.chi {
                return Err(FkError::Invalid(format!("level {n}: recorded χ is not the block mean")));
            }
            if let (Some(ga), Some(k)) = (&l.approx, l.kappa) {
                ga.check()?;
                if ga.kappa < k {
                    return Err(FkError::Invalid(format!("level {n}: projection below its κ floor")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = TowerFile {
            alphabet: Some(self.alphabet),
            levels: self
                .levels
                .iter()
                .map(|l| TowerLevel {
                    word: format_word(&l.word),
                    gamma: l.gamma.map(|g| g.as_f64()),
                    kappa: l.kappa.map(|k| k.as_f64()),
                    chi: l.chi.as_f64(),
                })
                .collect(),
            weights: self.weights.iter().map(|(k, v)| (format_word(&[*k]), v.as_f64())).collect(),
        };
        serde_json::to_value(file).expect("tower serialises")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: TowerFile = serde_json::from_value(value.clone()).map_err(|e| FkError::Invalid(format!("tower file: {e}")))?;
        let mut weights = BTreeMap::new();
        for (k, v) in &file.weights {
            let sym = parse_word(k)?;
            if sym.len() != 1 {
                return Err(FkError::Invalid(format!("weight key {k:?} is not a single symbol")));
            }
            weights.insert(sym[0], S::lit(*v));
        }
        let words = file.levels.iter().map(|l| parse_word(&l.word)).collect::<Result<Vec<_>>>()?;
        let alphabet = file
            .alphabet
            .unwrap_or_else(|| words.iter().flatten().copied().max().map_or(2, |m| m as usize + 1).max(2));
        let gammas: Vec<S> = file.levels.iter().filter_map(|l| l.gamma.map(S::lit)).collect();
        let kappas: Vec<S> = file.levels.iter().filter_map(|l| l.kappa.map(S::lit)).collect();
        Self::from_words(alphabet, words, &gammas, &kappas, weights)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<usize>,
    levels: Vec<TowerLevel>,
    weights: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerLevel {
    word: String,
    gamma: Option<f64>,
    kappa: Option<f64>,
    chi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig<S> {
    pub alphabet: usize,
    pub seed_word: Vec<u8>,
    pub levels: usize,
    /// `γ_n` for the step from level `n` to level `n + 1`.
    pub gamma_budget: Vec<S>,
    pub kappa_floor: Vec<S>,
    pub weights: BTreeMap<u8, S>,
    pub alpha: S,
    pub min_tail: usize,
    pub max_tail: usize,
    pub max_repetitions: usize,
}

impl<S: Scalar> SynthConfig<S> {
    /// Budgets `γ_n = 4^{−n}`, `κ_n = 1 − 2^{−n−1}` and zero weights.
    pub fn geometric(seed_word: Vec<u8>, levels: usize) -> Self {
        let steps = levels.saturating_sub(1);
        Self {
            alphabet: 2,
            seed_word,
            levels,
            gamma_budget: (0..steps).map(|n| S::lit(0.25f64.powi(n as i32))).collect(),
            kappa_floor: (0..steps).map(|n| S::one() - S::lit(0.5f64.powi(n as i32 + 1))).collect(),
            weights: BTreeMap::from([(0, S::zero()), (1, S::zero())]),
            alpha: S::lit(0.5),
            min_tail: 1,
            max_tail: 64,
            max_repetitions: 4096,
        }
    }
}

/// Reachable sums of `r` symbol weights, sorted.
fn reachable_sums<S: Scalar>(values: &[S], r: usize) -> Vec<S> {
    let mut cur = vec![S::zero()];
    for _ in 0..r {
        let mut next: Vec<S> = cur.iter().flat_map(|&c| values.iter().map(move |&v| c + v)).collect();
        next.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
        next.dedup();
        cur = next;
    }
    cur
}

/// Which tail sums keep the exponent decaying.
#[derive(Clone, Copy)]
enum TailTarget<S> {
    /// `χ_n = 0`: the tail must keep the total weight at exactly zero.
    Exact(S),
    /// Open interval `(lo, hi)` minus one excluded value.
    Open(S, S, S),
}

impl<S: Scalar> TailTarget<S> {
    fn admits(&self, v: S) -> bool {
        match *self {
            TailTarget::Exact(x) => v == x,
            TailTarget::Open(lo, hi, skip) => lo < v && v < hi && v != skip,
        }
    }

    fn any_in(&self, base: S, sorted: &[S]) -> bool {
        match *self {
            TailTarget::Exact(x) => sorted.binary_search_by(|v| (base + *v).partial_cmp(&x).unwrap()).is_ok(),
            TailTarget::Open(lo, hi, skip) => {
                let i = sorted.partition_point(|v| base + *v <= lo);
                sorted[i..].iter().map(|v| base + *v).take_while(|&t| t < hi).any(|t| t != skip)
            }
        }
    }
}

/// Lexicographically least tail of length `s` whose weight sum is admitted and
/// which makes `prefix · tail` primitive (unless the tail is empty).
fn find_tail<S: Scalar>(
    prefix: &[u8],
    alphabet: usize,
    weights: &BTreeMap<u8, S>,
    s: usize,
    target: TailTarget<S>,
    sums: &[Vec<S>],
) -> Option<Vec<u8>> {
    if s == 0 {
        return target.admits(S::zero()).then(Vec::new);
    }
    let mut tail = Vec::with_capacity(s);
    let mut word = prefix.to_vec();
    let mut budget = 200_000usize;
    fn dfs<S: Scalar>(
        depth: usize,
        partial: S,
        s: usize,
        alphabet: usize,
        weights: &BTreeMap<u8, S>,
        target: TailTarget<S>,
        sums: &[Vec<S>],
        tail: &mut Vec<u8>,
        word: &mut Vec<u8>,
        budget: &mut usize,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if depth == s {
            return is_primitive(word);
        }
        for sym in 0..alphabet as u8 {
            let v = partial + weights[&sym];
            if !target.any_in(v, &sums[s - depth - 1]) {
                continue;
            }
            tail.push(sym);
            word.push(sym);
            if dfs(depth + 1, v, s, alphabet, weights, target, sums, tail, word, budget) {
                return true;
            }
            tail.pop();
            word.pop();
        }
        false
    }
    dfs(0, S::zero(), s, alphabet, weights, target, sums, &mut tail, &mut word, &mut budget).then_some(tail)
}

/// Builds `w_{n+1} = w_n^{m} · t_n` level by level.
///
/// For each level the repetition count `m` is tried in increasing order; for
/// each `m` the shortest, then lexicographically least, tail is chosen that
/// keeps `0 < |χ_{n+1}| < α |χ_n|` (or `χ_{n+1} = 0` once `χ_n = 0`) and makes the
/// word primitive. The first `m` whose projection onto `w_n` verifies at
/// `(γ_n, κ_n)` is kept.
pub fn synthesize_gikn<S: Scalar>(cfg: &SynthConfig<S>) -> Result<GiknSequence<S>> {
    let shift = FullShift::new(cfg.alphabet);
    shift.check_word(&cfg.seed_word)?;
    if cfg.levels == 0 {
        return Err(FkError::Invalid("need at least one level".into()));
    }
    let steps = cfg.levels - 1;
    if cfg.gamma_budget.len() < steps || cfg.kappa_floor.len() < steps {
        return Err(FkError::Invalid(format!(
            "{} levels need {steps} budgets, got {} γ and {} κ",
            cfg.levels,
            cfg.gamma_budget.len(),
            cfg.kappa_floor.len()
        )));
    }
    if !(cfg.alpha > S::zero() && cfg.alpha < S::one()) {
        return Err(FkError::Invalid(format!("α must lie in (0, 1), got {}", cfg.alpha)));
    }
    for sym in 0..cfg.alphabet as u8 {
        if !cfg.weights.contains_key(&sym) {
            return Err(FkError::MissingWeight(sym));
        }
    }
    let mut values: Vec<S> = cfg.weights.values().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
    values.dedup();
    let sums: Vec<Vec<S>> = (0..=cfg.max_tail).map(|r| reachable_sums(&values, r)).collect();

    let mut words = vec![cfg.seed_word.clone()];
    let mut built: Vec<(usize, Vec<u8>, GoodApproximation<S>)> = Vec::new();
    for n in 0..steps {
        let w = words[n].clone();
        let len = w.len();
        let sum_n: S = w.iter().fold(S::zero(), |a, s| a + cfg.weights[s]);
        let (gamma, kappa) = (cfg.gamma_budget[n], cfg.kappa_floor[n]);
        let mut found = None;
        let mut decay_possible = false;
        'reps: for m in 1..=cfg.max_repetitions {
            let base = S::count(m) * sum_n;
            let prefix = w.repeat(m);
            for s in cfg.min_tail..=cfg.max_tail {
                let total = S::count(m * len + s);
                // |base + tail| · len < α |sum_n| · total, i.e. |χ_{n+1}| < α |χ_n|.
                let target = if sum_n == S::zero() {
                    TailTarget::Exact(-base)
                } else {
                    let r = cfg.alpha * sum_n.abs() * total / S::count(len);
                    // A tail zeroing the exponent would end strict decay at the next level.
                    TailTarget::Open(-r - base, r - base, -base)
                };
                let Some(tail) = find_tail(&prefix, cfg.alphabet, &cfg.weights, s, target, &sums) else {
                    continue;
                };
                decay_possible = true;
                let mut next = prefix.clone();
                next.extend_from_slice(&tail);
                if next.len() <= len {
                    continue;
                }
                match verify_good_approximation_words(&shift, &next, &w, gamma, kappa) {
                    Ok(ga) => {
                        found = Some((m, tail, next, ga));
                        break 'reps;
                    }
                    // Longer tails only lower κ for this m.
                    Err(FkError::NotGoodApproximation { .. }) => continue 'reps,
                    Err(e) => return Err(e),
                }
            }
        }
        let Some((m, tail, next, ga)) = found else {
            let constraint = if decay_possible {
                format!("no repetition count up to {} reaches κ = {kappa} at γ = {gamma}", cfg.max_repetitions)
            } else {
                format!("no tail up to length {} gives decay factor α = {}", cfg.max_tail, cfg.alpha)
            };
            return Err(FkError::BudgetInfeasible { level: n, constraint });
        };
        words.push(next);
        built.push((m, tail, ga));
    }

    let mut levels = Vec::with_capacity(words.len());
    for (n, word) in words.into_iter().enumerate() {
        let chi = cocycle_exponent(&cfg.weights, &word)?;
        let (gamma, kappa) = if n < steps { (Some(cfg.gamma_budget[n]), Some(cfg.kappa_floor[n])) } else { (None, None) };
        let approx = built.get(n).map(|b| b.2.clone());
        let (repetitions, tail) = match n.checked_sub(1).and_then(|k| built.get(k)) {
            Some((m, t, _)) => (Some(*m), t.clone()),
            None => (None, Vec::new()),
        };
        levels.push(GiknLevel { word, chi, gamma, kappa, approx, repetitions, tail });
    }
    Ok(GiknSequence { alphabet: cfg.alphabet, levels, weights: cfg.weights.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed() -> BTreeMap<u8, f64> {
        BTreeMap::from([(0, -1.0), (1, 1.0)])
    }

    #[test]
    fn exponents() {
        let w = signed();
        assert_eq!(cocycle_exponent(&w, &[0, 1]).unwrap(), 0.0);
        assert_eq!(cocycle_exponent(&w, &[0, 0, 1]).unwrap(), -1.0 / 3.0);
        assert_eq!(cocycle_exponent(&w, &[0, 0, 1, 1]).unwrap(), 0.0);
        assert!(matches!(cocycle_exponent(&w, &[2]), Err(FkError::MissingWeight(2))));
    }

    #[test]
    fn decay_with_signed_weights() {
        let cfg = SynthConfig {
            alphabet: 2,
            seed_word: vec![0],
            levels: 3,
            gamma_budget: vec![1.0, 0.5],
            kappa_floor: vec![0.5, 0.5],
            weights: signed(),
            alpha: 0.5,
            min_tail: 1,
            max_tail: 64,
            max_repetitions: 256,
        };
        let gs = synthesize_gikn(&cfg).unwrap();
        gs.validate().unwrap();
        let chi = gs.exponents();
        assert_eq!(chi[0], -1.0);
        assert!(chi[1].abs() < 0.5 && chi[2].abs() < 0.25, "{chi:?}");
    }

    #[test]
    fn degenerate_powers_of_seed() {
        let mut cfg = SynthConfig::<f64>::geometric(vec![0, 1], 3);
        cfg.kappa_floor = vec![1.0, 1.0];
        cfg.min_tail = 0;
        let gs = synthesize_gikn(&cfg).unwrap();
        let chi = gs.exponents();
        assert!(chi.iter().all(|&c| c == chi[0]));
        for l in &gs.levels[1..] {
            assert!(l.tail.is_empty());
            assert_eq!(l.word, [0, 1].repeat(l.word.len() / 2));
        }
    }

    #[test]
    fn json_roundtrip() {
        let gs = synthesize_gikn(&SynthConfig::<f64>::geometric(vec![0], 4)).unwrap();
        let back = GiknSequence::<f64>::from_json(&gs.to_json()).unwrap();
        assert_eq!(back.periods(), gs.periods());
        assert_eq!(back.exponents(), gs.exponents());
        assert!(back.levels[..3].iter().all(|l| l.approx.is_some()));
    }
}
