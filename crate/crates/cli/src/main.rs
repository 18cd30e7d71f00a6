use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use mesostab::analysis::{self, AnalysisOptions, Target};
use mesostab::io;
use mesostab::kuramoto::{NewtonOptions, PhaseState};
use mesostab::sylvester::{SylvesterOptions, DEFAULT_NMAX};
use mesostab::Tolerances;

mod render;
mod selftest;

const SCHEMA: &str = "mesostab/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "mesostab", version, about = "Semi-definiteness diagnostics for zero-row-sum matrices and Kuramoto equilibria")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,

    /// Largest dimension for exhaustive principal-minor sweeps.
    #[arg(long, default_value_t = DEFAULT_NMAX, global = true)]
    nmax: usize,

    /// Relative tolerance for minor signs, row sums and identity residuals.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a symmetric matrix (CSV) for semi-definiteness.
    AnalyzeMatrix {
        input: PathBuf,
        /// Test for negative instead of positive semi-definiteness.
        #[arg(long)]
        nsd: bool,
    },
    /// Test the Laplacian of a weighted graph (edge list).
    AnalyzeGraph { input: PathBuf },
    /// Find a phase-locked state and test its Jacobian.
    Kuramoto {
        input: PathBuf,
        /// Initial phases for the Newton iteration (default: all zero).
        #[arg(long)]
        seed_phases: Option<PathBuf>,
    },
    /// Evaluate the alternating cut identity on a graph.
    VerifyIdentity {
        input: PathBuf,
        /// Comma-separated 1-based vertex labels of V1. Every proper
        /// non-empty subset is checked when omitted.
        #[arg(long, value_delimiter = ',')]
        v1: Vec<usize>,
    },
    /// Run built-in consistency checks.
    SelfTest,
}

#[derive(Serialize)]
struct OptionsEcho {
    nmax: usize,
    tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<Target>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    input_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed_digest: Option<String>,
    options: OptionsEcho,
    report: T,
}

fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn read(path: &Path) -> anyhow::Result<(String, String)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let d = digest(&bytes);
    let text = String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    Ok((text, d))
}

fn parsed<T>(path: &Path, r: mesostab::Result<T>) -> anyhow::Result<T> {
    r.with_context(|| format!("failed to parse {}", path.display()))
}

struct Output<'a> {
    format: Format,
    command: &'a str,
    options: OptionsEcho,
    input_digest: Option<String>,
    seed_digest: Option<String>,
}

impl Output<'_> {
    fn emit<T: Serialize>(self, report: &T, text: impl FnOnce() -> String, started: Instant) -> anyhow::Result<()> {
        match self.format {
            Format::Json => {
                let envelope = Envelope {
                    schema: SCHEMA,
                    tool: "mesostab",
                    version: env!("CARGO_PKG_VERSION"),
                    command: self.command,
                    input_digest: self.input_digest,
                    seed_digest: self.seed_digest,
                    options: self.options,
                    report,
                };
                write_stdout(&(serde_json::to_string_pretty(&envelope)? + "\n"))
            }
            Format::Text => {
                let mut out = text();
                if let Some(d) = &self.input_digest {
                    out += &format!("input: {d}\n");
                }
                out += &format!("elapsed: {:.3} ms\n", started.elapsed().as_secs_f64() * 1e3);
                write_stdout(&out)
            }
        }
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn write_stdout(text: &str) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let started = Instant::now();
    let mut tol = Tolerances::default();
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            bail!("--tol must be a positive number, got {t}");
        }
        tol.relative = t;
    }
    let sylvester = SylvesterOptions { nmax: cli.nmax, tol };
    let echo = |target| OptionsEcho { nmax: cli.nmax, tol: tol.relative, target };

    match &cli.command {
        Command::AnalyzeMatrix { input, nsd } => {
            let (text, d) = read(input)?;
            let m = parsed(input, io::parse_matrix_csv(&text))?;
            let target = if *nsd { Target::Nsd } else { Target::Psd };
            let report = analysis::analyze_matrix(&m, &AnalysisOptions { sylvester, target })?;
            let out = Output {
                format: cli.format,
                command: "analyze-matrix",
                options: echo(Some(target)),
                input_digest: Some(d),
                seed_digest: None,
            };
            out.emit(&report, || render::stability(&report), started)?;
            Ok(report.verdict.exit_code() as u8)
        }
        Command::AnalyzeGraph { input } => {
            let (text, d) = read(input)?;
            let g = parsed(input, io::parse_edge_list(&text))?;
            let report = analysis::analyze_graph(&g, &AnalysisOptions { sylvester, target: Target::Psd })?;
            let out = Output {
                format: cli.format,
                command: "analyze-graph",
                options: echo(None),
                input_digest: Some(d),
                seed_digest: None,
            };
            out.emit(&report, || render::stability(&report), started)?;
            Ok(report.verdict.exit_code() as u8)
        }
        Command::Kuramoto { input, seed_phases } => {
            let (text, d) = read(input)?;
            let sys = parsed(input, io::parse_kuramoto(&text))?;
            let (seed, seed_digest) = match seed_phases {
                Some(path) => {
                    let (text, d) = read(path)?;
                    (parsed(path, io::parse_phases(&text))?, Some(d))
                }
                None => (PhaseState::new(vec![0.0; sys.len()]), None),
            };
            if seed.len() != sys.len() {
                bail!("seed has {} phases but the system has {} oscillators", seed.len(), sys.len());
            }
            let report = analysis::analyze_kuramoto(
                &sys,
                &seed,
                &NewtonOptions::default(),
                &AnalysisOptions { sylvester, target: Target::Psd },
            )?;
            let out = Output {
                format: cli.format,
                command: "kuramoto",
                options: echo(None),
                input_digest: Some(d),
                seed_digest,
            };
            out.emit(&report, || render::stability(&report), started)?;
            Ok(report.verdict.exit_code() as u8)
        }
        Command::VerifyIdentity { input, v1 } => {
            let (text, d) = read(input)?;
            let g = parsed(input, io::parse_edge_list(&text))?;
            let sides = if v1.is_empty() {
                None
            } else {
                let n = g.vertex_count();
                if let Some(&bad) = v1.iter().find(|&&x| x == 0 || x > n) {
                    bail!("--v1 label {bad} outside 1..={n}");
                }
                Some(vec![v1.iter().map(|x| x - 1).collect()])
            };
            let report = analysis::identity_report(&g, sides, &sylvester)?;
            let out = Output {
                format: cli.format,
                command: "verify-identity",
                options: echo(None),
                input_digest: Some(d),
                seed_digest: None,
            };
            out.emit(&report, || render::identity(&report), started)?;
            Ok(if report.all_hold { 0 } else { 1 })
        }
        Command::SelfTest => {
            let report = selftest::run();
            let out = Output {
                format: cli.format,
                command: "self-test",
                options: echo(None),
                input_digest: None,
                seed_digest: None,
            };
            out.emit(&report, || render::self_test(&report), started)?;
            Ok(if report.all_passed { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
