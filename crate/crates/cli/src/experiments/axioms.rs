use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use fkdyn_core::matchkit::{fbar_doubling_sequence, fk_distance, FkOptions};
use fkdyn_core::seqcore::format_word;
use fkdyn_core::{FullShift, PeriodicOrbit, SymbolicPoint};

use super::{Check, Outcome, Relation, Streams, Table};
use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, Result};
use crate::row;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct P {
    triples: usize,
    max_period: usize,
    tol: f64,
    doubling_pairs: usize,
    doubling_levels: usize,
    delta_max: f64,
}

impl Params for P {
    const KEYS: &'static [&'static str] = &["triples", "max_period", "tol", "doubling_pairs", "doubling_levels", "delta_max"];
}

fn random_word(rng: &mut ChaCha8Rng, max_period: usize) -> Vec<u8> {
    let p = rng.gen_range(1..=max_period);
    (0..p).map(|_| rng.gen_range(0..2)).collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p: P = cfg.params()?;
    if p.max_period == 0 || p.max_period > 16 {
        return Err(CliError::config("params.max_period", "must lie in 1..=16"));
    }
    if !(p.tol > 0.0) {
        return Err(CliError::config("params.tol", "must be positive"));
    }
    if !(p.delta_max > 0.0) {
        return Err(CliError::config("params.delta_max", "must be positive"));
    }
    let mut streams = Streams::new(cfg.require_seed()?, &cfg.name);
    let sys = FullShift::binary();
    let opts = FkOptions::with_tol(p.tol);
    let mut table = Table::new(&["kind", "instance", "words", "delta", "values", "pass"]);

    let (mut asymmetric, mut worst_excess, mut worst_self) = (0, f64::NEG_INFINITY, 0.0f64);
    for i in 0..p.triples {
        let mut rng = streams.instance();
        let words: Vec<Vec<u8>> = (0..3).map(|_| random_word(&mut rng, p.max_period)).collect();
        let orbits: Vec<PeriodicOrbit<SymbolicPoint>> =
            words.iter().map(|w| PeriodicOrbit::from_word(w)).collect::<fkdyn_core::Result<_>>()?;
        let mut d = [[0.0f64; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                d[a][b] = fk_distance(&sys, &orbits[a], &orbits[b], &opts)?.value;
            }
        }
        let symmetric = (0..3).all(|a| (0..3).all(|b| d[a][b] == d[b][a]));
        asymmetric += usize::from(!symmetric);
        let mut excess = f64::NEG_INFINITY;
        for (a, b, c) in [(0, 1, 2), (0, 2, 1), (1, 0, 2)] {
            excess = excess.max(d[a][c] - d[a][b] - d[b][c]);
        }
        worst_excess = worst_excess.max(excess);
        worst_self = (0..3).map(|a| d[a][a]).fold(worst_self, f64::max);
        let names: Vec<String> = words.iter().map(|w| format_word(w)).collect();
        let flat: Vec<f64> = d.iter().flatten().copied().collect();
        let pass = symmetric && excess <= 3.0 * p.tol;
        table.push(row!["triple", i, names.join("|"), "", join(&flat), pass]);
    }

    let mut increases = 0;
    for i in 0..p.doubling_pairs {
        let mut rng = streams.instance();
        let (x, z) = (random_word(&mut rng, p.max_period), random_word(&mut rng, p.max_period));
        let delta = p.delta_max * (1.0 - rng.gen_range(0.0..1.0));
        let seq = fbar_doubling_sequence(&sys, &PeriodicOrbit::from_word(&x)?, &PeriodicOrbit::from_word(&z)?, delta, p.doubling_levels)?;
        let values: Vec<f64> = seq.iter().map(|g| g.value).collect();
        let up = values.windows(2).filter(|w| w[1] > w[0]).count();
        increases += up;
        let words = format!("{}|{}", format_word(&x), format_word(&z));
        table.push(row!["doubling", i, words, delta, join(&values), up == 0]);
    }

    let mut checks = Vec::new();
    if p.triples > 0 {
        checks.push(Check::none("axioms.symmetry", asymmetric));
        checks.push(Check::new("axioms.triangle_excess", worst_excess, Relation::Le, 3.0 * p.tol));
        checks.push(Check::new("axioms.self_distance", worst_self, Relation::Le, p.tol));
    }
    checks.push(Check::none("doubling.nonincreasing", increases));
    Ok(Outcome { table, checks, files: Vec::new() })
}
