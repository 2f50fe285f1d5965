//! `kramer`: sampling sets, reconstructions and invariant checks from the
//! command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 internal
//! assertion.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "kramer", version, about = "Kramer sampling series for Jacobi and Paley-Wiener models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sampling set of one extension as CSV: index, x, kernel_norm, weight.
    Points(PointsArgs),
    /// Kernel and Lagrange series against the exact transform on a grid, as CSV.
    Reconstruct(ReconstructArgs),
    /// Boundary angle whose spectrum contains --x-star, as JSON.
    Place(PlaceArgs),
    /// Seeded invariant suite; exits 1 if any group fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model file (JSON). Jacobi: {"b": [..], "q": [..]} or {"rule": .., "n": ..};
    /// Paley-Wiener: {"a": .., "cutoff": ..}.
    #[arg(long)]
    model: PathBuf,
    /// Jacobi truncation order (defaults to the number of coefficients).
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct ExtensionArgs {
    /// Jacobi boundary angle in [0, pi).
    #[arg(long, conflicts_with = "theta", allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Paley-Wiener boundary phase in [0, 2 pi).
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Paley-Wiener sampling window: points with |n| <= window.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PointsArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    ext: ExtensionArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// State file (JSON). Jacobi: {"coeffs": [[re, im], ..]};
    /// Paley-Wiener: {"a": .., "modes": [{"k": .., "re": .., "im": ..}]}.
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    ext: ExtensionArgs,
    /// Number of series terms, nearest the origin first (default: all).
    #[arg(long)]
    terms: Option<usize>,
    /// Evaluation grid lo:hi:n[,imag].
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Use the sampling set from a `points` CSV instead of computing it.
    #[arg(long)]
    points: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct PlaceArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Real point that must belong to the sampling set.
    #[arg(long = "x-star", allow_negative_numbers = true)]
    x_star: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Seed of the check generator.
    #[arg(long, default_value_t = kramer_core::rng::DEFAULT_SEED)]
    seed: u64,
    /// Replace every error tolerance with this value.
    #[arg(long)]
    tol: Option<f64>,
    /// Optional model to check in addition to the built-in instances.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Jacobi truncation order for --model.
    #[arg(long)]
    n: Option<usize>,
    /// Boundary angle for a Jacobi --model.
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

/// An error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn internal(message: String) -> Self {
        Self { code: 3, message }
    }
}

impl From<kramer_core::Error> for Failure {
    fn from(e: kramer_core::Error) -> Self {
        use kramer_core::Error::*;
        let code = match e {
            BasisMismatch { .. }
            | InvalidAnchor(_)
            | DegreeOverflow
            | InvalidCoefficients(_)
            | LengthMismatch { .. }
            | Precondition(_) => 2,
            GaugeSingular { .. } | SingularSolve { .. } | NotEigenvalue { .. } | DegenerateNode { .. } => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Points(a) => commands::points(&a),
        Command::Reconstruct(a) => commands::reconstruct(&a),
        Command::Place(a) => commands::place(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("kramer: {}", f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
