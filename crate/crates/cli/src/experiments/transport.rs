use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use fkdyn_core::measurekit::{transport_block_distance, BlockDistribution, CostKind, ProductSpec};

use super::{Check, Outcome, Relation, Streams, Table};
use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, Result};
use crate::row;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct P {
    bernoulli_pairs: usize,
    random_pairs: usize,
    n_max: usize,
    tol: f64,
    curve_p: f64,
    curve_q: f64,
    curve_n_max: usize,
}

impl Params for P {
    const KEYS: &'static [&'static str] =
        &["bernoulli_pairs", "random_pairs", "n_max", "tol", "curve_p", "curve_q", "curve_n_max"];
}

fn random_blocks(rng: &mut ChaCha8Rng, n: usize) -> Result<BlockDistribution<f64>> {
    let k = rng.gen_range(1..=6);
    let mut raw: BTreeMap<Vec<u8>, u32> = BTreeMap::new();
    for _ in 0..k {
        let w: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        *raw.entry(w).or_insert(0) += rng.gen_range(1..10);
    }
    let total: u32 = raw.values().sum();
    Ok(BlockDistribution::new(n, raw.into_iter().map(|(w, c)| (w, c as f64 / total as f64)).collect())?)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p: P = cfg.params()?;
    if p.n_max == 0 || p.n_max > 10 {
        return Err(CliError::config("params.n_max", "must lie in 1..=10"));
    }
    if p.curve_n_max > 10 {
        return Err(CliError::config("params.curve_n_max", "must be at most 10"));
    }
    for (key, v) in [("curve_p", p.curve_p), ("curve_q", p.curve_q)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(CliError::config(format!("params.{key}"), "must lie in [0, 1]"));
        }
    }
    let mut streams = Streams::new(cfg.require_seed()?, &cfg.name);
    let mut table = Table::new(&["kind", "instance", "n", "p", "q", "edit", "hamming", "reference", "marginal_error"]);

    let mut worst_single = 0.0f64;
    for i in 0..p.bernoulli_pairs {
        let mut rng = streams.instance();
        let (a, b): (f64, f64) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
        let mu = ProductSpec::bernoulli(a).block_distribution(1)?;
        let nu = ProductSpec::bernoulli(b).block_distribution(1)?;
        let e = transport_block_distance(&mu, &nu, CostKind::Edit)?;
        let h = transport_block_distance(&mu, &nu, CostKind::Hamming)?;
        let reference = (a - b).abs();
        worst_single = worst_single.max((e.value - reference).abs()).max((h.value - reference).abs());
        let err = e.plan.marginal_error(&mu, &nu).max(h.plan.marginal_error(&mu, &nu));
        table.push(row!["bernoulli", i, 1, a, b, e.value, h.value, reference, err]);
    }

    let (mut above, mut worst_marginal) = (0, 0.0f64);
    for i in 0..p.random_pairs {
        let mut rng = streams.instance();
        let n = rng.gen_range(1..=p.n_max);
        let (mu, nu) = (random_blocks(&mut rng, n)?, random_blocks(&mut rng, n)?);
        let e = transport_block_distance(&mu, &nu, CostKind::Edit)?;
        let h = transport_block_distance(&mu, &nu, CostKind::Hamming)?;
        above += usize::from(e.value > h.value);
        let err = e.plan.marginal_error(&mu, &nu).max(h.plan.marginal_error(&mu, &nu));
        worst_marginal = worst_marginal.max(err);
        table.push(row!["random", i, n, "", "", e.value, h.value, "", err]);
    }

    // Distance between two Bernoulli processes as the block length grows.
    let (cp, cq) = (ProductSpec::bernoulli(p.curve_p), ProductSpec::bernoulli(p.curve_q));
    for n in 1..=p.curve_n_max {
        let (mu, nu) = (cp.block_distribution(n)?, cq.block_distribution(n)?);
        let e = transport_block_distance(&mu, &nu, CostKind::Edit)?;
        let h = transport_block_distance(&mu, &nu, CostKind::Hamming)?;
        let err = e.plan.marginal_error(&mu, &nu).max(h.plan.marginal_error(&mu, &nu));
        worst_marginal = worst_marginal.max(err);
        table.push(row!["curve", n - 1, n, p.curve_p, p.curve_q, e.value, h.value, "", err]);
    }

    let checks = vec![
        Check::new("bernoulli.single_symbol_error", worst_single, Relation::Le, p.tol),
        Check::none("random.edit_above_hamming", above),
        Check::new("marginals.max_error", worst_marginal, Relation::Le, p.tol),
    ];
    Ok(Outcome { table, checks, files: Vec::new() })
}
