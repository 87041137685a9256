use serde::Deserialize;

use fkdyn_core::ergodiag::{bad_segment_density, TestFunction};
use fkdyn_core::{CircleRotation, PeriodicOrbit};

use super::{Check, Outcome, Relation, Table};
use crate::config::{ExperimentConfig, Params};
use crate::error::{CliError, Result};
use crate::row;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct P {
    length: usize,
    alpha: f64,
    k_list: Vec<usize>,
    rotation_bound: f64,
    mixture_length: usize,
    mixture_k: Vec<usize>,
    mixture_floor: f64,
}

impl Params for P {
    const KEYS: &'static [&'static str] =
        &["length", "alpha", "k_list", "rotation_bound", "mixture_length", "mixture_k", "mixture_floor"];
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let p: P = cfg.params()?;
    if p.length == 0 || p.mixture_length < 2 {
        return Err(CliError::config("params.length", "sequences must be nonempty"));
    }
    let phi = TestFunction::<_, f64>::coordinate(2, 0);
    let mut table = Table::new(&["sequence", "k", "density", "bound", "pass"]);
    let mut checks = Vec::new();

    let coding = CircleRotation::<f64>::golden().sturmian_coding(0.0, p.length);
    let pts = PeriodicOrbit::from_word(&coding)?.segment(0, p.length);
    for d in bad_segment_density(&pts, &phi, p.alpha, &p.k_list)? {
        let c = Check::new(format!("rotation.k{}", d.k), d.density, Relation::Lt, p.rotation_bound);
        table.push(row!["golden-rotation", d.k, d.density, p.rotation_bound, c.pass]);
        checks.push(c);
    }

    // Two constant halves: a quasi-orbit of the non-ergodic mixture of two fixed points.
    let half = p.mixture_length / 2;
    let mixture: Vec<u8> = [vec![0u8; half], vec![1u8; p.mixture_length - half]].concat();
    let pts = PeriodicOrbit::from_word(&mixture)?.segment(0, p.mixture_length);
    for d in bad_segment_density(&pts, &phi, p.alpha, &p.mixture_k)? {
        let c = Check::new(format!("mixture.k{}", d.k), d.density, Relation::Ge, p.mixture_floor);
        table.push(row!["two-block-mixture", d.k, d.density, p.mixture_floor, c.pass]);
        checks.push(c);
    }
    Ok(Outcome { table, checks, files: Vec::new() })
}
