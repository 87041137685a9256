use serde::Deserialize;

use fkdyn_core::entrokron::{countable_alphabet_example, MAX_LEVEL};
use fkdyn_core::matchkit::FkOptions;

use super::{Check, Outcome, Relation, Streams, Table};
use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, Result};
use crate::row;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct P {
    levels: usize,
    sample_len: usize,
    tol: f64,
}

impl Params for P {
    const KEYS: &'static [&'static str] = &["levels", "sample_len", "tol"];
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p: P = cfg.params()?;
    if p.levels == 0 || p.levels > MAX_LEVEL {
        return Err(CliError::config("params.levels", format!("must lie in 1..={MAX_LEVEL}")));
    }
    if !(p.tol > 0.0) {
        return Err(CliError::config("params.tol", "must be positive"));
    }
    let mut streams = Streams::new(cfg.require_seed()?, &cfg.name);
    let opts = FkOptions::with_tol(p.tol);
    let mut table = Table::new(&["n", "entropy_nats", "n_log2", "fk_value", "fk_lower", "fk_upper", "certified"]);
    let mut checks = Vec::new();
    let mut prev: Option<f64> = None;
    for n in 1..=p.levels {
        let ex = countable_alphabet_example::<f64>(n, p.sample_len, streams.next_seed(), &opts)?;
        let exact = n as f64 * std::f64::consts::LN_2;
        let fk = ex.fk_to_fixed_point;
        let cert = serde_json::to_value(fk.certified)?;
        table.push(row![n, ex.entropy_rate, exact, fk.value, fk.bracket.0, fk.bracket.1, cert.as_str().unwrap_or("")]);
        checks.push(Check::new(format!("entropy.level{n}"), ex.entropy_rate, Relation::Eq, exact));
        if let Some(before) = prev {
            checks.push(Check::new(format!("fk.level{n}"), fk.value, Relation::Lt, before));
        }
        prev = Some(fk.value);
    }
    Ok(Outcome { table, checks, files: Vec::new() })
}
