use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod settings;

use settings::Settings;

/// Two-qubit triple uncertainty relations: optimizer sweeps, tightness scans
/// and simulated tomography.
#[derive(Parser, Debug)]
#[command(name = "tur", version)]
struct Cli {
    /// `key = value` file; keys are the long flag names. Flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maxima of f, g, h, k and the concurrence over an alpha grid.
    Sweep(SweepArgs),
    /// Monte Carlo scan of the lambda ratios over the symmetric family.
    ScanLambda(ScanArgs),
    /// Both sides of the J product relation on the equality state.
    VerifyEquality(VerifyArgs),
    /// Simulated tomography with Monte Carlo error bars.
    Tomo(TomoArgs),
    /// Concurrence of a state family over an alpha grid, or of a state file.
    Concurrence(ConcurrenceArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct GridArgs {
    /// `bell` or `werner`.
    #[arg(long)]
    pub family: Option<String>,
    /// Degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_stop: Option<f64>,
    #[arg(long)]
    pub alpha_step: Option<f64>,
    /// Werner mixing fraction.
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated subset of f,g,h,k,C.
    #[arg(long)]
    pub functions: Option<String>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// j-product, j-additive, k-product, k-additive or all.
    #[arg(long)]
    pub form: Option<String>,
    /// Number of uniform draws.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Write every accepted sample instead of the summary.
    #[arg(long)]
    pub dump_samples: bool,
    /// Also write the ratio histogram here.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Shots per setting for Monte Carlo error bars.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub resamples: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct TomoArgs {
    /// `bell` or `werner`.
    #[arg(long)]
    pub family: Option<String>,
    /// Degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Shots per measurement setting.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Use expected counts instead of sampled ones.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub resamples: Option<usize>,
    /// Comma-separated subset of f,g,h,k,C,j_product_lhs,j_product_rhs.
    #[arg(long)]
    pub functions: Option<String>,
    /// Write the reconstructed density matrix here.
    #[arg(long)]
    pub rho_out: Option<PathBuf>,
    /// Write the simulated counts of the main reconstruction here.
    #[arg(long)]
    pub counts_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConcurrenceArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Density matrix file of `row col re im` lines; replaces the grid.
    #[arg(long)]
    pub rho: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match Settings::load(cli.config.as_deref()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let ctx = commands::Context {
        settings,
        seed: cli.seed,
        out: cli.out,
    };
    let result = match &cli.command {
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::ScanLambda(a) => commands::scan_lambda(&ctx, a),
        Command::VerifyEquality(a) => commands::verify_equality(&ctx, a),
        Command::Tomo(a) => commands::tomo(&ctx, a),
        Command::Concurrence(a) => commands::concurrence(&ctx, a),
    };
    match result {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in failures {
                eprintln!("validation failed: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
