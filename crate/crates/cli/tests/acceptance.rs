//! Runs the acceptance criteria through the registered experiments and prints
//! one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use fkdyn::{run_experiment, Check, ExperimentConfig, Summary, REGISTRY};

const CONFIGS: &[&str] = &[
    "match-oracle",
    "pseudometric-axioms",
    "prokhorov-bound",
    "gikn-tower",
    "gikn-tower-signed",
    "gikn-tower-limit",
    "oxtoby",
    "entropy-discontinuity",
    "katok-sweep",
    "transport-curve",
];

fn config(file: &str, out: &Path) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{file}.json"));
    let mut cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    cfg.output_dir = out.join(file);
    cfg
}

struct Verdict {
    pass: bool,
    detail: String,
}

/// All checks of `summary` whose names start with one of `prefixes`; at least one must exist.
fn from_checks(summary: &Summary, prefixes: &[&str]) -> Verdict {
    let picked: Vec<&Check> = summary.checks.iter().filter(|c| prefixes.iter().any(|p| c.name.starts_with(p))).collect();
    let failed: Vec<String> = picked.iter().filter(|c| !c.pass).map(|c| format!("{}={}", c.name, c.value)).collect();
    let pass = !picked.is_empty() && failed.is_empty();
    let detail = if picked.is_empty() {
        "no matching checks".to_string()
    } else if failed.is_empty() {
        format!("{} checks", picked.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    Verdict { pass, detail }
}

fn files_of(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let tmp = tempfile::tempdir().expect("temp dir");
    let (first, second): (PathBuf, PathBuf) = (tmp.path().join("a"), tmp.path().join("b"));

    let mut runs: BTreeMap<&str, Summary> = BTreeMap::new();
    let mut errors = Vec::new();
    for &file in CONFIGS {
        let t = Instant::now();
        match run_experiment(&config(file, &first)) {
            Ok(s) => {
                println!("ran {file}: {} in {:.1?}", s.status, t.elapsed());
                runs.insert(file, s);
            }
            Err(e) => {
                println!("ran {file}: error {e}");
                errors.push(file);
            }
        }
    }

    let crit = |file: &str, prefixes: &[&str]| -> Verdict {
        match runs.get(file) {
            Some(s) => from_checks(s, prefixes),
            None => Verdict { pass: false, detail: format!("{file} did not run") },
        }
    };
    let mut verdicts: Vec<(u32, &str, Verdict)> = vec![
        (1, "match oracle equivalence", crit("match-oracle", &["real."])),
        (2, "word edit distance", crit("match-oracle", &["word."])),
        (3, "pseudometric axioms", crit("pseudometric-axioms", &["axioms."])),
        (4, "Prokhorov bound", crit("prokhorov-bound", &["prokhorov."])),
        (5, "Fekete monotonicity", crit("pseudometric-axioms", &["doubling."])),
        (6, "GIKN tower Cauchy bounds", crit("gikn-tower", &["cauchy."])),
        (7, "Lyapunov decay", crit("gikn-tower-signed", &["decay."])),
        (8, "ergodicity diagnostic", crit("oxtoby", &["rotation.", "mixture."])),
        (9, "entropy discontinuity", crit("entropy-discontinuity", &["entropy.", "fk."])),
        (10, "zero-entropy trend of the limit", crit("gikn-tower-limit", &["limit."])),
        (11, "Katok triviality", crit("katok-sweep", &["bernoulli.", "sturmian.", "lemma."])),
        (12, "transport distances", crit("transport-curve", &["bernoulli.", "random.", "marginals."])),
    ];

    // Determinism: every config rerun into a fresh directory, compared byte for byte.
    let mut differing = Vec::new();
    for &file in CONFIGS {
        if errors.contains(&file) {
            continue;
        }
        let cfg = config(file, &second);
        if run_experiment(&cfg).is_err() || files_of(&first.join(file)) != files_of(&second.join(file)) {
            differing.push(file);
        }
    }
    let covered: Vec<&str> = REGISTRY
        .iter()
        .map(|e| e.name)
        .filter(|n| !CONFIGS.iter().any(|&f| runs.get(f).is_some_and(|s| s.experiment == *n)))
        .collect();
    let det_pass = differing.is_empty() && covered.is_empty() && errors.is_empty();
    let det_detail = if det_pass {
        format!("{} configs over {} experiments identical", CONFIGS.len(), REGISTRY.len())
    } else {
        format!("differing {differing:?}, not run {covered:?}, errors {errors:?}")
    };
    verdicts.push((13, "determinism", Verdict { pass: det_pass, detail: det_detail }));

    println!();
    for (id, title, v) in &verdicts {
        println!("{} criterion {id:>2} ({title}): {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    let failed = verdicts.iter().filter(|v| !v.2.pass).count();
    println!("\nacceptance: {} of {} criteria pass in {:.1?}", verdicts.len() - failed, verdicts.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
