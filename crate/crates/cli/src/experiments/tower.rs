use serde::Deserialize;

use fkdyn_core::entrokron::block_entropy_rate;
use fkdyn_core::gikn::{exponent_decay, limit_quasi_orbit, synthesize_gikn, verify_cauchy_with};
use fkdyn_core::matchkit::FkOptions;
use fkdyn_core::measurekit::BlockSource;

use super::{Check, Outcome, Relation, Table};
use crate::config::{decode, ExperimentConfig, Params};
use crate::inputs::SynthSpec;
use crate::error::{CliError, Result};
use crate::row;

#[derive(Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum CauchyMode {
    None,
    Consecutive,
    AllPairs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Limit {
    length: usize,
    m_max: usize,
    bound: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct P {
    tower: serde_json::Value,
    tol: f64,
    cauchy: CauchyMode,
    limit: Option<Limit>,
}

impl Params for P {
    const KEYS: &'static [&'static str] = &["tower", "tol", "cauchy", "limit"];
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p: P = cfg.params()?;
    if !(p.tol > 0.0) {
        return Err(CliError::config("params.tol", "must be positive"));
    }
    let spec: SynthSpec = decode(&p.tower, "params.tower")?;
    let gs = synthesize_gikn(&spec.to_config("params.tower")?)?;
    let mut table = Table::new(&["section", "level", "other", "value", "bound", "pass"]);
    let mut checks = vec![Check::none("tower.invalid", usize::from(gs.validate().is_err()))];
    for (n, l) in gs.levels.iter().enumerate() {
        table.push(row!["period", n, "", l.word.len(), "", ""]);
    }

    if p.cauchy != CauchyMode::None {
        let report = verify_cauchy_with(&gs, &FkOptions::with_tol(p.tol), p.cauchy == CauchyMode::AllPairs)?;
        for c in &report.consecutive {
            let v = c.fk.bracket.1;
            table.push(row!["cauchy", c.n, c.m, v, c.bound, c.pass]);
            checks.push(Check::new(format!("cauchy.level{}", c.n), v, Relation::Lt, c.bound));
        }
        for c in &report.pairs {
            let v = c.fk.bracket.1;
            table.push(row!["telescoped", c.n, c.m, v, c.bound, c.pass]);
            checks.push(Check::new(format!("cauchy.pair{}-{}", c.n, c.m), v, Relation::Le, c.bound));
        }
        // Reported, not checked: rotations of long words can agree on the whole metric depth.
        for s in &report.separation {
            let pass = s.pass.map_or(String::new(), |b| b.to_string());
            table.push(row!["separation", s.level, "", s.min_distance, s.threshold, pass]);
        }
    }

    let chi = gs.exponents();
    let decay = exponent_decay(&gs, spec.alpha);
    table.push(row!["chi", 0, "", chi[0], "", ""]);
    for (n, ok) in decay.iter().enumerate() {
        let bound = spec.alpha * chi[n].abs();
        table.push(row!["chi", n + 1, "", chi[n + 1], bound, ok]);
        let name = format!("decay.level{}", n + 1);
        // Once an exponent is zero, decay means staying at zero.
        let c = if chi[n] == 0.0 {
            Check::new(name, chi[n + 1].abs(), Relation::Eq, 0.0)
        } else {
            Check::new(name, chi[n + 1].abs(), Relation::Lt, bound)
        };
        debug_assert_eq!(c.pass, *ok);
        checks.push(c);
    }

    if let Some(lim) = &p.limit {
        if lim.m_max == 0 {
            return Err(CliError::config("params.limit.m_max", "must be positive"));
        }
        let stream = limit_quasi_orbit(&gs, lim.length)?.points.symbols();
        let (est, _) = block_entropy_rate::<f64>(BlockSource::Stream(&stream), lim.m_max)?;
        for e in &est {
            table.push(row!["entropy", "", e.m, e.per_symbol, "", ""]);
        }
        let rise = est.windows(2).map(|w| w[1].per_symbol - w[0].per_symbol).fold(f64::NEG_INFINITY, f64::max);
        if est.len() > 1 {
            checks.push(Check::new("limit.entropy_rise", rise, Relation::Le, 0.0));
        }
        let last = est.last().expect("m_max ≥ 1").per_symbol;
        checks.push(Check::new(format!("limit.entropy_rate_m{}", lim.m_max), last, Relation::Lt, lim.bound));
    }

    let tower = serde_json::to_string_pretty(&gs.to_json())? + "\n";
    Ok(Outcome { table, checks, files: vec![("tower.json", tower)] })
}
