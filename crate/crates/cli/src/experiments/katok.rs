use std::collections::BTreeMap;

use rand::Rng;
use serde::Deserialize;

use fkdyn_core::entrokron::{katok_trivial, KatokReport};
use fkdyn_core::measurekit::{BlockDistribution, ProductSpec};
use fkdyn_core::seqcore::format_word;
use fkdyn_core::CircleRotation;

use super::{Check, Outcome, Relation, Streams, Table};
use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, Result};
use crate::row;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct P {
    bernoulli_n: Vec<usize>,
    bernoulli_eps: f64,
    bernoulli_bound: f64,
    sturmian_length: usize,
    sturmian_n: usize,
    sturmian_eps: f64,
    random_cases: usize,
    random_n_max: usize,
}

impl Params for P {
    const KEYS: &'static [&'static str] = &[
        "bernoulli_n",
        "bernoulli_eps",
        "bernoulli_bound",
        "sturmian_length",
        "sturmian_n",
        "sturmian_eps",
        "random_cases",
        "random_n_max",
    ];
}

/// `β < ε²` must force a ball of mass at least `1 − ε`.
fn inconsistent(r: &KatokReport<f64>) -> bool {
    r.sqrt_beta_trivial && r.ball_mass < 1.0 - r.epsilon
}

fn push(table: &mut Table, case: &str, r: &KatokReport<f64>) {
    table.push(row![
        case,
        r.n,
        r.epsilon,
        format_word(&r.witness),
        r.ball_mass,
        r.beta,
        r.trivial,
        r.sqrt_beta_trivial,
        r.exhaustive
    ]);
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p: P = cfg.params()?;
    if p.bernoulli_n.iter().any(|&n| n == 0 || n > 12) {
        return Err(CliError::config("params.bernoulli_n", "block lengths must lie in 1..=12"));
    }
    if p.sturmian_n == 0 || p.sturmian_length < p.sturmian_n {
        return Err(CliError::config("params.sturmian_n", "need 1 ≤ sturmian_n ≤ sturmian_length"));
    }
    if p.random_n_max < 2 {
        return Err(CliError::config("params.random_n_max", "must be at least 2"));
    }
    let mut streams = Streams::new(cfg.require_seed()?, &cfg.name);
    let mut table = Table::new(&[
        "case", "n", "epsilon", "witness", "ball_mass", "beta", "trivial", "sqrt_beta_trivial", "exhaustive",
    ]);
    let mut checks = Vec::new();
    let mut violations = 0;

    let coin = ProductSpec::<f64>::bernoulli(0.5);
    for &n in &p.bernoulli_n {
        let r = katok_trivial(&coin.block_distribution(n)?, p.bernoulli_eps);
        push(&mut table, "bernoulli", &r);
        violations += usize::from(inconsistent(&r));
        checks.push(Check::new(format!("bernoulli.n{n}.exhaustive"), f64::from(u8::from(r.exhaustive)), Relation::Eq, 1.0));
        checks.push(Check::new(format!("bernoulli.n{n}.ball_mass"), r.ball_mass, Relation::Lt, p.bernoulli_bound));
    }

    let stream = CircleRotation::<f64>::golden().sturmian_coding(0.0, p.sturmian_length);
    let r = katok_trivial(&BlockDistribution::from_stream(&stream, p.sturmian_n)?, p.sturmian_eps);
    push(&mut table, "sturmian", &r);
    violations += usize::from(inconsistent(&r));
    checks.push(Check::new("sturmian.ball_mass", r.ball_mass, Relation::Ge, 1.0 - p.sturmian_eps));

    for _ in 0..p.random_cases {
        let mut rng = streams.instance();
        let n = rng.gen_range(2..=p.random_n_max);
        let bias = rng.gen_range(0.0..0.5);
        let mut raw: BTreeMap<Vec<u8>, u32> = BTreeMap::new();
        for _ in 0..rng.gen_range(1..30) {
            let w: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(bias))).collect();
            *raw.entry(w).or_insert(0) += rng.gen_range(1..5);
        }
        let total: u32 = raw.values().sum();
        let bd = BlockDistribution::new(n, raw.into_iter().map(|(w, c)| (w, c as f64 / total as f64)).collect())?;
        let r = katok_trivial(&bd, rng.gen_range(0.05..0.6));
        push(&mut table, "random", &r);
        violations += usize::from(inconsistent(&r));
    }
    checks.push(Check::none("lemma.beta_implies_ball", violations));
    Ok(Outcome { table, checks, files: Vec::new() })
}
