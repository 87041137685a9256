use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use fkdyn::inputs::{parse_phi, read_blocks, read_numbers, read_word, SynthSpec};
use fkdyn::{config::decode, run_experiment, ExperimentConfig, REGISTRY};
use fkdyn_core::entrokron::{block_entropy_rate, katok_trivial, loosely_kronecker_diagnostic};
use fkdyn_core::ergodiag::bad_segment_density;
use fkdyn_core::gikn::{synthesize_gikn, verify_cauchy_with, GiknSequence};
use fkdyn_core::matchkit::{fk_distance, max_match, FkOptions, Match, MatchMode};
use fkdyn_core::measurekit::BlockSource;
use fkdyn_core::seqcore::format_word;
use fkdyn_core::{CircleRotation, FullShift, MetricSystem, PeriodicOrbit, RealLine};

#[derive(Parser)]
#[command(name = "fkdyn", version, about = "Feldman-Katok distances, GIKN towers and finite-scale diagnostics")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    /// Words over 0-9a-z, read as periodic points of the full shift.
    Shift,
    /// Real numbers with |x − y|.
    Real,
    /// Numbers mod 1 with the circle distance.
    Circle,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a registered experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List registered experiments.
    List,
    /// Maximal (n, δ)-match between two sequences.
    Match {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        z: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value = "shift")]
        system: System,
    },
    /// F̄_K distance between two periodic words.
    Fk {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        z: PathBuf,
        #[arg(long)]
        tol: f64,
    },
    /// GIKN tower synthesis and verification.
    Gikn {
        #[command(subcommand)]
        cmd: GiknCmd,
    },
    /// Bad-segment densities of a word, CSV (k, density).
    Oxtoby {
        #[arg(long)]
        seq: PathBuf,
        /// coord:I, cyl:WORD or weight:0=0,1=1
        #[arg(long)]
        phi: String,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        klist: Vec<usize>,
    },
    /// Block entropies of a stream, CSV (m, H_m, H_m/m) in nats.
    Entropy {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        mmax: usize,
    },
    /// Katok triviality of a block distribution (CSV `word,prob`).
    Katok {
        #[arg(long)]
        blocks: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Loosely Kronecker diagnostic of a stream.
    Kronecker {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        nlist: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum GiknCmd {
    /// Synthesize a tower; writes tower JSON.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the Cauchy bounds of a tower JSON; exits 1 on violations.
    Verify {
        #[arg(long)]
        tower: PathBuf,
        #[arg(long)]
        tol: f64,
        #[arg(long)]
        all_pairs: bool,
    },
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn match_json<M: MetricSystem<f64>>(sys: &M, x: &[M::Point], z: &[M::Point], n: usize, delta: f64) -> anyhow::Result<serde_json::Value> {
    let m: Match<f64> = max_match(sys, x, z, n, delta, MatchMode::Dp)?;
    Ok(json!({ "n": n, "delta": delta, "fit": m.fit(), "gap": m.gap(), "pairs": m.pairs }))
}

fn csv_out() -> csv::Writer<std::io::Stdout> {
    csv::Writer::from_writer(std::io::stdout())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Run { config, out } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(o) = out {
                cfg.output_dir = o;
            }
            let summary = run_experiment(&cfg)?;
            for c in &summary.checks {
                let rel = serde_json::to_value(c.relation)?;
                let mark = if c.pass { "PASS" } else { "FAIL" };
                println!("{mark} {} = {} {} {}", c.name, c.value, rel.as_str().unwrap_or("?"), c.bound);
            }
            println!("{}: {} (artifacts in {})", summary.experiment, summary.status, cfg.output_dir.display());
            return Ok(if summary.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Cmd::List => {
            for e in REGISTRY {
                println!("{}{}", e.name, if e.randomized { " (seeded)" } else { "" });
            }
        }
        Cmd::Match { x, z, n, delta, system } => {
            let v = match system {
                System::Shift => {
                    let (xw, zw) = (read_word(&x)?, read_word(&z)?);
                    let xs = PeriodicOrbit::from_word(&xw)?.segment(0, xw.len());
                    let zs = PeriodicOrbit::from_word(&zw)?.segment(0, zw.len());
                    let alphabet = xw.iter().chain(&zw).copied().max().unwrap_or(1) as usize + 1;
                    match_json(&FullShift::new(alphabet.max(2)), &xs, &zs, n, delta)?
                }
                System::Real => {
                    let (xs, zs) = (read_numbers(&x)?, read_numbers(&z)?);
                    let bound = xs.iter().chain(&zs).fold(0.0f64, |a, v| a.max(v.abs()));
                    match_json(&RealLine::new(bound.max(1.0)), &xs, &zs, n, delta)?
                }
                System::Circle => {
                    let (xs, zs) = (read_numbers(&x)?, read_numbers(&z)?);
                    match_json(&CircleRotation::new(0.0), &xs, &zs, n, delta)?
                }
            };
            print_json(&v)?;
        }
        Cmd::Fk { x, z, tol } => {
            let (xw, zw) = (read_word(&x)?, read_word(&z)?);
            let alphabet = xw.iter().chain(&zw).copied().max().unwrap_or(1) as usize + 1;
            let sys = FullShift::new(alphabet.max(2));
            let r = fk_distance(&sys, &PeriodicOrbit::from_word(&xw)?, &PeriodicOrbit::from_word(&zw)?, &FkOptions::with_tol(tol))?;
            print_json(&json!({ "value": r.value, "certified": r.certified, "bracket": [r.bracket.0, r.bracket.1] }))?;
        }
        Cmd::Gikn { cmd: GiknCmd::Synth { config, out } } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let spec: SynthSpec = decode(&serde_json::from_str(&text)?, "tower")?;
            let gs = synthesize_gikn(&spec.to_config("tower")?)?;
            let body = serde_json::to_string_pretty(&gs.to_json())? + "\n";
            match out {
                Some(p) => std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{body}"),
            }
        }
        Cmd::Gikn { cmd: GiknCmd::Verify { tower, tol, all_pairs } } => {
            let text = std::fs::read_to_string(&tower).with_context(|| format!("reading {}", tower.display()))?;
            let gs = GiknSequence::<f64>::from_json(&serde_json::from_str(&text)?)?;
            let report = verify_cauchy_with(&gs, &FkOptions::with_tol(tol), all_pairs)?;
            print_json(&serde_json::to_value(&report)?)?;
            return Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Cmd::Oxtoby { seq, phi, alpha, klist } => {
            let w = read_word(&seq)?;
            let alphabet = w.iter().copied().max().unwrap_or(1) as usize + 1;
            let phi = parse_phi(&phi, alphabet.max(2))?;
            let pts = PeriodicOrbit::from_word(&w)?.segment(0, w.len());
            let mut out = csv_out();
            out.write_record(["k", "density"])?;
            for d in bad_segment_density(&pts, &phi, alpha, &klist)? {
                out.write_record([d.k.to_string(), d.density.to_string()])?;
            }
            out.flush()?;
        }
        Cmd::Entropy { stream, mmax } => {
            let s = read_word(&stream)?;
            let (est, warnings) = block_entropy_rate::<f64>(BlockSource::Stream(&s), mmax)?;
            warnings.iter().for_each(|w| eprintln!("warning: {w}"));
            let mut out = csv_out();
            out.write_record(["m", "H_m_nats", "H_m_over_m"])?;
            for e in est {
                out.write_record([e.m.to_string(), e.block_entropy.to_string(), e.per_symbol.to_string()])?;
            }
            out.flush()?;
        }
        Cmd::Katok { blocks, eps } => {
            let r = katok_trivial(&read_blocks(&blocks)?, eps);
            let mut out = csv_out();
            out.write_record(["n", "witness", "ball_mass", "beta", "trivial", "exhaustive"])?;
            out.write_record([
                r.n.to_string(),
                format_word(&r.witness),
                r.ball_mass.to_string(),
                r.beta.to_string(),
                r.trivial.to_string(),
                r.exhaustive.to_string(),
            ])?;
            out.flush()?;
        }
        Cmd::Kronecker { stream, eps, nlist } => {
            let s = read_word(&stream)?;
            let rows = loosely_kronecker_diagnostic::<f64>(&s, eps, &nlist)?;
            let mut out = csv_out();
            out.write_record(["n", "witness", "mass", "set_size", "pass"])?;
            for r in rows {
                out.write_record([
                    r.n.to_string(),
                    format_word(&r.witness),
                    r.mass.to_string(),
                    r.set_size.to_string(),
                    r.pass.to_string(),
                ])?;
            }
            out.flush()?;
        }
    }
    std::io::stdout().flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
