//! `hyperarith`: batch front end over hyperarith-core.
//!
//! Every command prints one JSON document on stdout (or a short summary with
//! `--pretty`) and nothing at all when it fails; errors go to stderr.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{Config, Overrides};

/// Exit status and message of a failed command.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_ZERO: u8 = 3;
pub const EXIT_DATASET: u8 = 5;
pub const EXIT_UNSUPPORTED: u8 = 6;
pub const EXIT_SCENARIO: u8 = 7;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure::new(EXIT_INPUT, message)
    }
}

/// What a successful command produced.
pub struct Output {
    pub json: serde_json::Value,
    pub summary: String,
    pub code: u8,
}

#[derive(Parser)]
#[command(name = "hyperarith", version, about = "Exact arithmetic, formulas, elliptic curves and ultrapower simulation")]
struct Cli {
    /// Print a human-readable summary instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Add wall-clock times to the output.
    #[arg(long, global = true)]
    timings: bool,
    /// TOML config file; defaults to $HYPERARITH_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    sieve_bound: Option<u64>,
    /// Height bound for quantifier search.
    #[arg(long, global = true, value_name = "N", alias = "bound")]
    search_bound: Option<u64>,
    /// Largest window accepted from semigroup scenarios.
    #[arg(long, global = true, value_name = "N")]
    window: Option<u64>,
    /// Number of leading components shown for hyperrationals.
    #[arg(long, global = true, value_name = "N")]
    scan_bound: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Sign and prime exponents of a nonzero rational.
    Factor {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Evaluate a formula: exit 0 true, 1 false, 4 unknown.
    Eval {
        /// Evaluate this builtin instead of formula text.
        #[arg(long, value_name = "NAME")]
        builtin: Option<String>,
        /// Formula text (unless --builtin) followed by name=value bindings.
        args: Vec<String>,
    },
    /// Elliptic curve operations on y^2 = x^3 + Ax + B.
    Curve {
        #[command(subcommand)]
        op: CurveCmd,
    },
    /// Hyperrationals given by closed-form sequences.
    Hyper {
        #[command(subcommand)]
        op: HyperCmd,
    },
    /// Run a semigroup scenario file.
    Semigroup { scenario: PathBuf },
    /// Validate a curve dataset (the bundled one by default).
    DatasetValidate { path: Option<PathBuf> },
    /// Run the acceptance battery.
    Suite {
        /// Comma-separated check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Subcommand)]
pub enum CurveCmd {
    /// A=.. B=.. P=x,y Q=x,y
    Add {
        args: Vec<String>,
    },
    /// A=.. B=.. n=.. P=x,y
    Mul {
        args: Vec<String>,
    },
    /// A=.. B=..
    Torsion {
        args: Vec<String>,
    },
    /// A=.. B=..: affine points with x of height up to the search bound.
    Search {
        args: Vec<String>,
    },
    /// n=.. and record=IDX or label=..: E/nE for a dataset record.
    Weakmw {
        #[arg(long, value_name = "PATH")]
        dataset: Option<PathBuf>,
        args: Vec<String>,
    },
}

#[derive(Subcommand)]
pub enum HyperCmd {
    /// Truth of a quantifier-free formula in the ultrapower: exit 0 true, 1 false.
    Eval {
        /// principal:N or lazy.
        #[arg(long, default_value = "lazy")]
        oracle: String,
        /// Resume a lazy oracle from this decision log.
        #[arg(long, value_name = "PATH")]
        log: Option<PathBuf>,
        formula: String,
        /// name=sequence bindings, e.g. x="i^2 + 1".
        bindings: Vec<String>,
    },
    /// Hyper-valuation d_p of a sequence.
    Dp {
        p: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Check a lazy oracle log and replay it; optionally decide further sets.
    OracleReplay {
        log: PathBuf,
        /// Periodic sets such as "[0] mod 2 +[3]".
        #[arg(long = "query")]
        queries: Vec<String>,
    },
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let cfg = Config::load(&Overrides {
        path: cli.config,
        sieve_bound: cli.sieve_bound,
        search_bound: cli.search_bound,
        window: cli.window,
        scan_bound: cli.scan_bound,
    })?;
    commands::dispatch(cli.cmd, &cfg, cli.timings)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (pretty, timings) = (cli.pretty, cli.timings);
    let start = Instant::now();
    match run(cli) {
        Ok(mut out) => {
            if timings {
                if let Some(obj) = out.json.as_object_mut() {
                    obj.entry("elapsed_ms").or_insert_with(|| (start.elapsed().as_millis() as u64).into());
                }
            }
            if pretty {
                println!("{}", out.summary.trim_end());
            } else {
                println!("{}", out.json);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("hyperarith: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
