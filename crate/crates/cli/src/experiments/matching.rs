use rand::Rng;
use serde::Deserialize;

use fkdyn_core::matchkit::{max_match, word_metrics, MatchMode, BRUTE_MAX};
use fkdyn_core::seqcore::format_word;
use fkdyn_core::RealLine;

use super::{Check, Outcome, Streams, Table};
use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, Result};
use crate::row;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct P {
    instances: usize,
    n_max: usize,
    delta_min: f64,
    delta_max: f64,
    word_pairs: usize,
    word_n_max: usize,
}

impl Params for P {
    const KEYS: &'static [&'static str] = &["instances", "n_max", "delta_min", "delta_max", "word_pairs", "word_n_max"];
}

const WORD_MAX: usize = 16;

/// LCS by trying every subsequence of `u`, longest first.
fn subset_lcs(u: &[u8], w: &[u8]) -> usize {
    let n = u.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k <= best {
            continue;
        }
        let mut it = w.iter();
        if (0..n).filter(|&i| mask >> i & 1 == 1).all(|i| it.any(|&c| c == u[i])) {
            best = k;
        }
    }
    best
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p: P = cfg.params()?;
    if p.n_max == 0 || p.n_max > BRUTE_MAX {
        return Err(CliError::config("params.n_max", format!("must lie in 1..={BRUTE_MAX}")));
    }
    if p.word_n_max == 0 || p.word_n_max > WORD_MAX {
        return Err(CliError::config("params.word_n_max", format!("must lie in 1..={WORD_MAX}")));
    }
    if !(0.0 < p.delta_min && p.delta_min < p.delta_max) {
        return Err(CliError::config("params.delta_min", "need 0 < delta_min < delta_max"));
    }
    let mut streams = Streams::new(cfg.require_seed()?, &cfg.name);
    let mut table = Table::new(&["kind", "instance", "n", "delta", "computed", "oracle", "agree"]);

    let sys = RealLine::new(1.0f64);
    let (mut mismatched, mut invalid) = (0, 0);
    for i in 0..p.instances {
        let mut rng = streams.instance();
        let n = rng.gen_range(1..=p.n_max);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let delta = rng.gen_range(p.delta_min..p.delta_max);
        let dp = max_match(&sys, &x, &z, n, delta, MatchMode::Dp)?;
        let brute = max_match(&sys, &x, &z, n, delta, MatchMode::Brute)?;
        if dp.validate(&sys, &x, &z).is_err() || brute.validate(&sys, &x, &z).is_err() {
            invalid += 1;
        }
        let agree = dp.fit() == brute.fit();
        mismatched += usize::from(!agree);
        table.push(row!["real", i, n, delta, dp.fit(), brute.fit(), agree]);
    }

    let mut word_mismatched = 0;
    for i in 0..p.word_pairs {
        let mut rng = streams.instance();
        let n = rng.gen_range(1..=p.word_n_max);
        let u: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let w: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let edit = word_metrics::<f64>(&u, &w)?.edit;
        let oracle = (n - subset_lcs(&u, &w)) as f64 / n as f64;
        let agree = edit == oracle;
        word_mismatched += usize::from(!agree);
        let words = format!("{}|{}", format_word(&u), format_word(&w));
        table.push(row!["word", i, n, words, edit, oracle, agree]);
    }

    let checks = vec![
        Check::none("real.dp_equals_brute", mismatched),
        Check::none("real.matches_valid", invalid),
        Check::none("word.edit_equals_brute_lcs", word_mismatched),
    ];
    Ok(Outcome { table, checks, files: Vec::new() })
}
