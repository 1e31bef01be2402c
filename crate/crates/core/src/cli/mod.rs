//! The `apotential` command line: argument types, dispatch and exit codes.
//!
//! Exit code 0 when every check passes, 1 when a verification or inequality check
//! fails, 2 on malformed input or precondition errors. Each run prints one
//! `key=value` summary line on stdout; outputs are written atomically.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use output::{float, Csv, Summary};

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass = 0,
    CheckFailed = 1,
    BadInput = 2,
}

#[derive(Debug, Parser)]
#[command(
    name = "apotential",
    version,
    about = "Potential operators, torus solvers and variational experiments"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

/// Where the operator 𝒜 (and possibly its synthesized triple) comes from.
#[derive(Debug, Clone, Args)]
pub struct OperatorSource {
    /// Operator JSON file {"d","k","N","m","terms"}.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["fixture", "triple"])]
    pub operator: Option<PathBuf>,
    /// Bundled operator: div2, div3, symdiv2, symdiv3, curl2 or curl3.
    #[arg(long, value_name = "NAME", conflicts_with = "triple")]
    pub fixture: Option<String>,
    /// Triple JSON written by `synth`; L and G are taken as given.
    #[arg(long, value_name = "PATH")]
    pub triple: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize the potential ℒ and annihilator 𝒢 of a constant-rank operator.
    Synth {
        #[command(flatten)]
        source: OperatorSource,
        /// Triple JSON output.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Human-readable report output.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Check 𝒜ℒ = 0, ℒ𝒢 = 0, the rank counts and the expansion of 𝒢 for a triple.
    Verify {
        #[command(flatten)]
        source: OperatorSource,
        /// Number of sampled lattice frequencies.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Solve ℒΦ = U, 𝒢Φ = 0 spectrally for an A-free field.
    Solve {
        #[command(flatten)]
        source: OperatorSource,
        /// Input AFLD field U.
        #[arg(long, value_name = "PATH")]
        field: PathBuf,
        /// Output AFLD potential Φ.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Relative tolerance for the zero-mean and A-free preconditions.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Draw a band-limited A-free field with zero mean and unit L² norm.
    Genfree {
        #[command(flatten)]
        source: OperatorSource,
        /// Points per axis, or a comma-separated list of dims.
        #[arg(long, value_name = "N[,N...]")]
        grid: String,
        /// Largest |ξ_i| of the drawn frequencies.
        #[arg(long)]
        band: usize,
        #[arg(long)]
        seed: u64,
        /// Output AFLD field.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// L^p and W^{l,p} norms of a field.
    Norm {
        /// Input AFLD field.
        #[arg(long, value_name = "PATH")]
        field: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Derivative order l of the Sobolev norm.
        #[arg(long, default_value_t = 0)]
        sobolev: u32,
    },
    /// Jensen inequality ⨍det^{1/(d−1)}(U) ≤ det^{1/(d−1)}(⨍U) over seeded DPT fields.
    ///
    /// Report columns: trial, seed, lhs, rhs, gap = lhs − rhs, satisfied.
    Jensen {
        /// Matrix dimension d_m (2 or 3).
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        trials: usize,
        /// Points per axis.
        #[arg(long)]
        grid: usize,
        #[arg(long)]
        band: usize,
        #[arg(long)]
        seed: u64,
        /// Identity shift c; oscillations are scaled to spectral radius c/2.
        #[arg(long, default_value_t = 1.0)]
        shift: f64,
        /// CSV report output.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Semicontinuity along U_n(x) = U(nx) compared with F of the weak limit.
    ///
    /// Report columns: n, integral, weak_limit, satisfied.
    Lsc {
        #[command(flatten)]
        source: OperatorSource,
        /// detpow<d>, negdetpow<d>, pnorm<p> or negsq.
        #[arg(long)]
        functional: String,
        /// Base AFLD field, A-free and in the domain of F.
        #[arg(long, value_name = "PATH")]
        base: PathBuf,
        /// Dilation factors, each dividing every grid dimension.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        nlist: Vec<usize>,
        /// Expected ordering, lsc or usc; defaults to usc for det powers and −|v|², lsc otherwise.
        #[arg(long)]
        mode: Option<String>,
        /// CSV report output.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Search for K-𝒜-quasiconvexity violations F(ζ) > ⨍F(ζ + ℒΦ) with K the PSD cone.
    ///
    /// Report columns: trial, seed, amplitude, f_zeta, average, violated.
    Probe {
        #[command(flatten)]
        source: OperatorSource,
        /// detpow<d>, negdetpow<d>, pnorm<p> or negsq.
        #[arg(long)]
        functional: String,
        /// `id` or comma-separated components of ζ.
        #[arg(long, default_value = "id")]
        zeta: String,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Points per axis.
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        band: usize,
        /// CSV report output.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
    /// Write the bundled operator JSON files and selected triples.
    Fixtures {
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Fixtures whose triples are synthesized as well.
        #[arg(long, value_delimiter = ',', default_value = "div2")]
        triples: Vec<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Synth { .. } => "synth",
            Command::Verify { .. } => "verify",
            Command::Solve { .. } => "solve",
            Command::Genfree { .. } => "genfree",
            Command::Norm { .. } => "norm",
            Command::Jensen { .. } => "jensen",
            Command::Lsc { .. } => "lsc",
            Command::Probe { .. } => "probe",
            Command::Fixtures { .. } => "fixtures",
        }
    }
}

/// Executes one command and returns its status with the summary line.
pub fn run(config: RunConfig) -> (Status, Summary) {
    let name = config.command.name();
    match commands::execute(config.command) {
        Ok(summary) => {
            let status = if summary.status() == "ok" {
                Status::Pass
            } else {
                Status::CheckFailed
            };
            (status, summary)
        }
        Err(e) => {
            let mut s = Summary::new("error", name);
            s.push("message", e.to_string());
            eprintln!("error: {e}");
            (Status::BadInput, s)
        }
    }
}

/// Runs and prints the summary; the binary's entry point.
pub fn main_with(config: RunConfig) -> ExitCode {
    let (status, summary) = run(config);
    println!("{}", summary.line());
    ExitCode::from(status as u8)
}
