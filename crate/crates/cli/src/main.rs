//! `fpp`: exact tables, single runs and replicated experiments.
//!
//! Exit codes: 0 success or passing verdict, 1 failing verdict, 2 usage
//! error, 3 runtime error (vertex cap, precision, insufficient data, I/O).

mod commands;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use params::Params;

#[derive(Debug)]
pub struct UsageError(pub String);

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<fpp_core::Error> for Failure {
    fn from(e: fpp_core::Error) -> Self {
        use fpp_core::Error::*;
        match e {
            Validation(_) | Domain { .. } | Supercritical { .. } => Failure::Usage(e.to_string()),
            VertexCap { .. } | OutOfHorizon { .. } | Precision { .. } | InsufficientData(_) => {
                Failure::Runtime(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "fpp", version, about = "First passage percolation with recovery: exact tables, runs and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form tables
    Exact {
        #[arg(value_enum)]
        op: ExactOp,
        #[command(flatten)]
        flags: Flags,
    },
    /// A single simulated run
    Sim {
        #[arg(value_enum)]
        op: SimOp,
        #[command(flatten)]
        flags: Flags,
    },
    /// Replicated Monte Carlo experiments with verdicts
    Mc {
        #[arg(value_enum)]
        op: McOp,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactOp {
    Pi,
    Nu,
    Sell,
    Constants,
    Curves,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimOp {
    Run,
    Snapshot,
    Wchain,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum McOp {
    Tail,
    Nu,
    Eta,
    Boundary,
    Growth,
    Trend,
    Containment,
    Percolation,
    Wchain,
}

macro_rules! flags {
    ($($field:ident => $key:literal: $help:literal),* $(,)?) => {
        #[derive(Args, Debug, Default)]
        struct Flags {
            /// Flat key=value file; flags override its values
            #[arg(long)]
            config: Option<PathBuf>,
            $(
                #[doc = $help]
                #[arg(long = $key, value_name = "VALUE")]
                $field: Option<String>,
            )*
        }

        impl Flags {
            fn entries(&self) -> Vec<(&'static str, &Option<String>)> {
                vec![$(($key, &self.$field)),*]
            }
        }
    };
}

flags! {
    gamma => "gamma": "Recovery rate",
    graph => "graph": "Offspring law: semiline, det:d, bin:n:p, pois:l, geom:p, pmf:p0,p1,...",
    n => "n": "Vertex index / count (meaning depends on the operation)",
    m => "m": "Threshold on H or M",
    m_max => "m-max": "Largest m of a tail table",
    t => "t": "Query time",
    t_max => "t-max": "Stop at this time",
    n_max => "n-max": "Stop after this many activations",
    reps => "reps": "Replications",
    seed => "seed": "Master seed (default: FPP_SEED, then 0)",
    jobs => "jobs": "Worker threads (never changes results)",
    format => "format": "csv or json",
    out => "out": "Output file (default: standard output)",
    delta => "delta": "Tree degree of the percolation coupling",
    p => "p": "Site percolation parameter",
    depth => "depth": "Truncation depth",
    eps => "eps": "Target of the rate condition",
    slack => "slack": "Relative slack of the trend checks",
    l => "l": "Composition length",
    c => "c": "Radius constant of the containment check",
    c_bar => "c-bar": "Constant c-bar of the percolation curve and rate condition",
    tol => "tol": "Bisection tolerance",
    curve => "curve": "limsup, h-liminf, m-liminf, log-volume, eta-h, eta-m, percolation",
    alpha => "alpha": "Growth rate for curves (default: offspring mean - 1)",
    r => "r": "Factor r of the eta curves",
    x_grid => "x-grid": "Grid of arguments",
    n_grid => "n-grid": "Grid of vertex counts",
    t_grid => "t-grid": "Grid of times",
    times => "times": "Snapshot times",
    observable => "observable": "H or M",
    requirement => "requirement": "Vertices a run must reach to count as surviving",
    conditioning => "conditioning": "survival or none",
    ks_n => "ks-n": "Step of the exploration-chain KS test (0 disables)",
    ks_samples => "ks-samples": "Samples per side of the KS test",
    min_obs => "min-obs": "Observations before a jump-chain state is checked",
    band => "band": "Tolerance of the percolation check",
    level => "level": "Lower quantile of the trend checks",
    vertex_cap => "vertex-cap": "Safety limit on activations per run",
    precision => "precision": "double or high (exact nu)",
}

fn effective_params(flags: &Flags) -> Result<Params, Failure> {
    let mut params = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Params::from_config_text(&text)?
        }
        None => Params::default(),
    };
    for (key, value) in flags.entries() {
        if let Some(v) = value {
            params.set(key, v)?;
        }
    }
    if !params.contains("seed") {
        if let Ok(seed) = std::env::var("FPP_SEED") {
            params
                .set("seed", &seed)
                .map_err(|e| Failure::Usage(format!("FPP_SEED: {}", e.0)))?;
        }
    }
    Ok(params)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (name, flags) = match &cli.command {
        Command::Exact { op, flags } => (format!("exact {}", op.to_possible_value().unwrap().get_name()), flags),
        Command::Sim { op, flags } => (format!("sim {}", op.to_possible_value().unwrap().get_name()), flags),
        Command::Mc { op, flags } => (format!("mc {}", op.to_possible_value().unwrap().get_name()), flags),
    };
    let mut params = effective_params(flags)?;
    // every run records its seed, even when nothing random happens
    params.or("seed", 0u64)?;
    let out = match &cli.command {
        Command::Exact { op, .. } => commands::exact(*op, &mut params)?,
        Command::Sim { op, .. } => commands::sim(*op, &mut params)?,
        Command::Mc { op, .. } => commands::mc(*op, &mut params)?,
    };
    let passed = out.passed();
    output::emit(&name, &params, out)?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("fpp: {msg}");
            eprintln!("run `fpp --help` for usage");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("fpp: {msg}");
            ExitCode::from(3)
        }
    }
}
