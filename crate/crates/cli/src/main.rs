//! `qspec`: spectra, orthogonality measures and verification suites for the
//! symmetric Al-Salam–Chihara difference operator.
//!
//! Exit codes: 0 success, 1 verification or solver failure, 2 usage or
//! configuration error.

mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use config::{Format, HalfWidth, Overrides, RunConfig, TOL_ENV};
use verify::Suite;

#[derive(Debug, Parser)]
#[command(name = "qspec", version, about = "Spectral data of the symmetric Al-Salam–Chihara operator")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Base, 0 < q < 1 [default: 0.5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    q: Option<f64>,
    /// Grid parameter, nonzero [default: 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// beta >= 0 [default: 0.5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Series and truncation tolerance [default: 1e-13, or $QSPEC_TOL]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation half-width N (window l = -N..N) or "auto"
    #[arg(long, global = true)]
    half_width: Option<HalfWidth>,
    /// Artifact format [default: json]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Artifact path [default: stdout]
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for sampled parameter points [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// key=value file with the same keys as the flags; flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for independent checks [default: 1]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Replaces every per-check threshold of a verification suite
    #[arg(long, global = true)]
    threshold: Option<f64>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            q: self.q,
            alpha: self.alpha,
            beta: self.beta,
            tol: self.tol,
            half_width: self.half_width,
            format: self.format,
            output: self.output.clone(),
            seed: self.seed,
            jobs: self.jobs,
            threshold: self.threshold,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues of the truncated operator against q^n and -beta q^{n+1}
    Spectrum {
        /// Levels per eigenvalue sequence
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
    /// Support points and masses of the orthogonality measure
    Measure {
        /// Also emit the Gram matrix of h_0..h_d
        #[arg(long)]
        gram_degree: Option<usize>,
    },
    /// Run a verification suite; exit 1 if any check fails
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
    Verification(usize),
}

fn resolve(args: &GlobalArgs) -> anyhow::Result<RunConfig> {
    let file = match &args.config {
        Some(path) => config::read_config(path)?,
        None => Overrides::default(),
    };
    let env_tol = std::env::var(TOL_ENV).ok();
    RunConfig::resolve(file, args.overrides(), env_tol.as_deref())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = resolve(&cli.global).map_err(Failure::Usage)?;
    match cli.command {
        Command::Spectrum { levels } => {
            let (table, n) = commands::spectrum(&config, levels).map_err(Failure::Runtime)?;
            output::emit(&table, &config, &Value::from(n)).map_err(Failure::Runtime)
        }
        Command::Measure { gram_degree } => {
            let (table, n) = commands::measure(&config, gram_degree).map_err(Failure::Runtime)?;
            output::emit(&table, &config, &Value::from(n)).map_err(Failure::Runtime)
        }
        Command::Verify { suite } => {
            if suite.requires_beta() && config.params.beta() == 0.0 {
                return Err(Failure::Usage(anyhow::anyhow!(
                    "suite {} needs beta > 0",
                    clap::ValueEnum::to_possible_value(&suite).map(|v| v.get_name().to_string()).unwrap_or_default()
                )));
            }
            let checks = verify::run(suite, &config).map_err(Failure::Runtime)?;
            let table = verify::table(&checks, config.threshold);
            let hw = match config.half_width {
                HalfWidth::Auto => Value::from("auto"),
                HalfWidth::Fixed(n) => Value::from(n),
            };
            output::emit(&table, &config, &hw).map_err(Failure::Runtime)?;
            let failed = checks.iter().filter(|c| !c.passes(config.threshold)).count();
            if failed > 0 {
                return Err(Failure::Verification(failed));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("qspec: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("qspec: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(n)) => {
            eprintln!("qspec: {n} check(s) failed");
            ExitCode::from(1)
        }
    }
}
