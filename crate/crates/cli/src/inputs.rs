use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use fkdyn_core::ergodiag::TestFunction;
use fkdyn_core::gikn::SynthConfig;
use fkdyn_core::measurekit::BlockDistribution;
use fkdyn_core::seqcore::parse_word;
use fkdyn_core::SymbolicPoint;

use crate::config::Params;
use crate::error::{CliError, Result};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// A word over `0-9a-z`; whitespace (including line breaks) is ignored.
pub fn read_word(path: &Path) -> Result<Vec<u8>> {
    let text: String = read(path)?.chars().filter(|c| !c.is_whitespace()).collect();
    let w = parse_word(&text)?;
    if w.is_empty() {
        return Err(CliError::config(path.display().to_string(), "empty word"));
    }
    Ok(w)
}

/// Real numbers separated by whitespace or commas.
pub fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    read(path)?
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| CliError::config(path.display().to_string(), format!("{t:?}: {e}"))))
        .collect()
}

/// CSV with header `word,prob`; all words must have the same length.
pub fn read_blocks(path: &Path) -> Result<BlockDistribution<f64>> {
    #[derive(Deserialize)]
    struct Row {
        word: String,
        prob: f64,
    }
    let mut r = csv::Reader::from_path(path)?;
    let mut probs = BTreeMap::new();
    for row in r.deserialize() {
        let row: Row = row?;
        let w = parse_word(&row.word)?;
        *probs.entry(w).or_insert(0.0) += row.prob;
    }
    let n = probs.keys().next().map_or(0, |w: &Vec<u8>| w.len());
    if let Some(w) = probs.keys().find(|w| w.len() != n) {
        return Err(fkdyn_core::FkError::LengthMismatch(n, w.len()).into());
    }
    Ok(BlockDistribution::new(n, probs)?)
}

/// `coord:I`, `cyl:WORD` or `weight:0=0.5,1=-1`.
pub fn parse_phi(spec: &str, alphabet: usize) -> Result<TestFunction<SymbolicPoint, f64>> {
    let bad = |m: &str| CliError::config("phi", format!("{spec:?}: {m}"));
    let (kind, arg) = spec.split_once(':').ok_or_else(|| bad("expected KIND:ARG"))?;
    match kind {
        "coord" => Ok(TestFunction::coordinate(alphabet, arg.parse().map_err(|_| bad("bad index"))?)),
        "cyl" => Ok(TestFunction::smoothed_cylinder(parse_word(arg)?)?),
        "weight" => {
            let mut weights = BTreeMap::new();
            for item in arg.split(',') {
                let (s, v) = item.split_once('=').ok_or_else(|| bad("expected SYMBOL=VALUE"))?;
                let sym = parse_word(s)?;
                if sym.len() != 1 {
                    return Err(bad("weight keys must be single symbols"));
                }
                weights.insert(sym[0], v.trim().parse::<f64>().map_err(|_| bad("bad weight"))?);
            }
            Ok(TestFunction::symbol_weight(weights)?)
        }
        _ => Err(bad("unknown kind (coord, cyl, weight)")),
    }
}

/// Synthesis parameters as written in configs: words as strings, weights keyed by symbol.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub alphabet: usize,
    pub seed_word: String,
    pub levels: usize,
    pub gamma_budget: Vec<f64>,
    pub kappa_floor: Vec<f64>,
    pub weights: BTreeMap<String, f64>,
    pub alpha: f64,
    pub min_tail: usize,
    pub max_tail: usize,
    pub max_repetitions: usize,
}

impl Params for SynthSpec {
    const KEYS: &'static [&'static str] = &[
        "alphabet",
        "seed_word",
        "levels",
        "gamma_budget",
        "kappa_floor",
        "weights",
        "alpha",
        "min_tail",
        "max_tail",
        "max_repetitions",
    ];
}

impl SynthSpec {
    pub fn to_config(&self, path: &str) -> Result<SynthConfig<f64>> {
        let mut weights = BTreeMap::new();
        for (k, &v) in &self.weights {
            let sym = parse_word(k)
                .ok()
                .filter(|w| w.len() == 1)
                .ok_or_else(|| CliError::config(format!("{path}.weights.{k}"), "weight keys must be single symbols"))?;
            weights.insert(sym[0], v);
        }
        let seed_word = parse_word(&self.seed_word).map_err(|e| CliError::config(format!("{path}.seed_word"), e.to_string()))?;
        Ok(SynthConfig {
            alphabet: self.alphabet,
            seed_word,
            levels: self.levels,
            gamma_budget: self.gamma_budget.clone(),
            kappa_floor: self.kappa_floor.clone(),
            weights,
            alpha: self.alpha,
            min_tail: self.min_tail,
            max_tail: self.max_tail,
            max_repetitions: self.max_repetitions,
        })
    }
}
