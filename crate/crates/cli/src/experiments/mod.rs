use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

mod axioms;
mod entropy;
mod katok;
mod matching;
mod oxtoby;
mod prokhorov;
mod tower;
mod transport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Relation::Lt => value < bound,
            Relation::Le => value <= bound,
            Relation::Eq => value == bound,
            Relation::Ge => value >= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Self {
        Self { name: name.into(), value, relation, bound, pass: relation.holds(value, bound) }
    }

    /// A count of failed instances that must be zero.
    pub fn none(name: impl Into<String>, failures: usize) -> Self {
        Self::new(name, failures as f64, Relation::Eq, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub seed: Option<u64>,
    pub status: String,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Rows of `results.csv`.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}

/// Shorthand for turning CSV cells into strings.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($x.to_string()),*] };
}

pub struct Outcome {
    pub table: Table,
    pub checks: Vec<Check>,
    /// Extra files written next to `results.csv`.
    pub files: Vec<(&'static str, String)>,
}

/// Per-instance generators split from one stream keyed by seed and experiment name.
pub struct Streams {
    root: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64, name: &str) -> Self {
        let mut root = ChaCha8Rng::seed_from_u64(seed);
        // FNV-1a of the name selects the stream.
        let key = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        root.set_stream(key);
        Self { root }
    }

    pub fn next_seed(&mut self) -> u64 {
        self.root.next_u64()
    }

    pub fn instance(&mut self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.next_seed())
    }
}

pub struct Experiment {
    pub name: &'static str,
    pub randomized: bool,
    run: fn(&ExperimentConfig) -> Result<Outcome>,
}

pub const REGISTRY: &[Experiment] = &[
    Experiment { name: "match-oracle", randomized: true, run: matching::run },
    Experiment { name: "pseudometric-axioms", randomized: true, run: axioms::run },
    Experiment { name: "prokhorov-bound", randomized: true, run: prokhorov::run },
    Experiment { name: "gikn-tower", randomized: false, run: tower::run },
    Experiment { name: "oxtoby", randomized: false, run: oxtoby::run },
    Experiment { name: "entropy-discontinuity", randomized: true, run: entropy::run },
    Experiment { name: "katok-sweep", randomized: true, run: katok::run },
    Experiment { name: "transport-curve", randomized: true, run: transport::run },
];

pub fn lookup(name: &str) -> Result<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = REGISTRY.iter().map(|e| e.name).collect();
        CliError::UnknownExperiment(name.to_string(), names.join(", "))
    })
}

/// Runs a registered experiment and writes `results.csv` and `summary.json`
/// (plus any extra files) into the configured output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Summary> {
    let exp = lookup(&cfg.name)?;
    if exp.randomized {
        cfg.require_seed()?;
    }
    let out = (exp.run)(cfg)?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    out.table.write_to(&dir.join("results.csv"))?;
    let mut summary = Summary { experiment: cfg.name.clone(), seed: cfg.seed, status: String::new(), checks: out.checks };
    summary.status = if summary.passed() { "pass" } else { "fail" }.into();
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    for (name, body) in &out.files {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| CliError::io(&p, e))?;
    }
    Ok(summary)
}
