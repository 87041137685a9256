use rand::Rng;
use serde::Deserialize;

use fkdyn_core::matchkit::gap;
use fkdyn_core::measurekit::{empirical_measure, prokhorov};
use fkdyn_core::RealLine;

use super::{Check, Outcome, Relation, Streams, Table};
use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, Result};
use crate::row;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct P {
    pairs: usize,
    n_min: usize,
    n_max: usize,
    delta_min: f64,
    delta_max: f64,
    eps_slack_max: f64,
}

impl Params for P {
    const KEYS: &'static [&'static str] = &["pairs", "n_min", "n_max", "delta_min", "delta_max", "eps_slack_max"];
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p: P = cfg.params()?;
    if p.n_min == 0 || p.n_min > p.n_max || p.n_max > 200 {
        return Err(CliError::config("params.n_max", "need 1 ≤ n_min ≤ n_max ≤ 200"));
    }
    if !(0.0 < p.delta_min && p.delta_min < p.delta_max) {
        return Err(CliError::config("params.delta_min", "need 0 < delta_min < delta_max"));
    }
    if !(p.eps_slack_max > 0.0) {
        return Err(CliError::config("params.eps_slack_max", "must be positive"));
    }
    let mut streams = Streams::new(cfg.require_seed()?, &cfg.name);
    let line = RealLine::new(1.0f64);
    let mut table = Table::new(&["instance", "n", "delta", "gap", "epsilon", "prokhorov", "bound", "pass"]);
    let (mut worst, mut failures) = (f64::NEG_INFINITY, 0);
    for i in 0..p.pairs {
        let mut rng = streams.instance();
        let n = rng.gen_range(p.n_min..=p.n_max);
        // A lattice sequence and a lagged, jittered copy with some fresh points.
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..16) as f64 / 16.0).collect();
        let lag = rng.gen_range(0..3);
        let z: Vec<f64> = (0..n)
            .map(|j| {
                if rng.gen_bool(0.1) || j + lag >= n {
                    rng.gen_range(0.0..1.0)
                } else {
                    x[j + lag] + rng.gen_range(-0.02..0.02)
                }
            })
            .collect();
        let delta = rng.gen_range(p.delta_min..p.delta_max);
        let g = gap(&line, &x, &z, n, delta)?.value;
        let eps = g + p.eps_slack_max * (1.0 - rng.gen_range(0.0..1.0));
        let mx = empirical_measure::<f64, _>(&line, &x, n)?;
        let mz = empirical_measure::<f64, _>(&line, &z, n)?;
        let dp = prokhorov(&line, &mx, &mz)?;
        let bound = delta.max(eps);
        let pass = g < eps && dp < bound;
        failures += usize::from(!pass);
        worst = worst.max(dp - bound);
        table.push(row![i, n, delta, g, eps, dp, bound, pass]);
    }
    let checks = vec![
        Check::none("prokhorov.instances_failing", failures),
        Check::new("prokhorov.max_excess", worst, Relation::Lt, 0.0),
    ];
    Ok(Outcome { table, checks, files: Vec::new() })
}
