//! `fracpois`: distribution tables and Monte Carlo verification reports
//! for the fractional Poisson process.

mod commands;
mod report;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Manifest;

#[derive(Parser, Debug)]
#[command(
    name = "fracpois",
    version,
    about = "Distribution tables and moment checks for the fractional Poisson process"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Process {
    /// Fractional order ν in (0, 1]; 1 is the Poisson process.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Rate λ.
    #[arg(long)]
    pub lambda: f64,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Sim {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples per estimate (accepted paths for conditional moments).
    #[arg(long)]
    pub n_paths: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tabulate Pr{N(t) = k} for k = 0..=kmax.
    Pmf {
        #[command(flatten)]
        process: Process,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10)]
        kmax: u32,
    },
    /// Tabulate Pr{N(s) = k, N(t) = r} for 0 <= k <= r <= --r.
    Bivariate {
        #[command(flatten)]
        process: Process,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        /// Largest r in the grid.
        #[arg(long, default_value_t = 4)]
        r: u32,
    },
    /// Interarrival and k-th waiting-time densities on the grid t·i/points.
    Waiting {
        #[command(flatten)]
        process: Process,
        /// Right end of the time grid.
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 100)]
        points: u32,
    },
    /// Every closed-form moment available for the given parameters.
    Moments {
        #[command(flatten)]
        process: Process,
        /// Riemann–Liouville order α.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        /// Conditioning count for conditional moments.
        #[arg(long, default_value_t = 1)]
        n: u64,
        /// Power of the integrated-power moments.
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Monte Carlo check of every moment; exits 1 if some |z| exceeds the limit.
    Verify {
        #[command(flatten)]
        process: Process,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[command(flatten)]
        sim: Sim,
        #[arg(long, default_value_t = 4.0)]
        z_limit: f64,
    },
    /// Raw simulated samples, one row per path.
    Simulate {
        #[command(flatten)]
        process: Process,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        sim: Sim,
    },
    /// Difference of Poisson processes with rates λ and β: the count pmf for
    /// |r| <= --r, or with --verify a Monte Carlo check of the integral.
    Skellam {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10)]
        r: u32,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        sim: Sim,
        #[arg(long, default_value_t = 4.0)]
        z_limit: f64,
    },
}

/// Why a run did not finish cleanly.
#[derive(Debug)]
pub enum Failure {
    /// Bad parameters; exit code 2.
    Usage(String),
    /// Numerical or I/O failure; exit code 1.
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "invalid arguments: {m}"),
            Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<fracpois::Error> for Failure {
    fn from(e: fracpois::Error) -> Self {
        match e {
            fracpois::Error::InvalidParam(_) | fracpois::Error::InvalidInterval { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn emit(cli: &Cli) -> Result<bool, Failure> {
    let output = cli.output.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string());
    let outcome = commands::run(&cli.command)?;
    let report = report::Report {
        manifest: Manifest { command: outcome.command, params: outcome.params, format: cli.format.name(), output },
        table: outcome.table,
    };
    let sink: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(File::create(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match cli.format {
        Format::Csv => report.write_csv(&mut sink)?,
        Format::Json => report.write_json(&mut sink)?,
    }
    sink.flush()?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match emit(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fracpois: verification failed");
            ExitCode::from(1)
        }
        Err(failure) => {
            eprintln!("fracpois: {failure}");
            ExitCode::from(match failure {
                Failure::Usage(_) => 2,
                Failure::Runtime(_) => 1,
            })
        }
    }
}
