use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use germforge::job::{run, Command, JobSpec};

/// Formal curves and finite type for real hypersurfaces given by Hermitian forms.
///
/// Exit status: 0 when a witness is certified (or a command succeeds),
/// 2 when no witness was found at the given bounds, 1 on errors.
#[derive(Parser, Debug)]
#[command(name = "germforge", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Input files; see the README for the formats each command takes.
    inputs: Vec<PathBuf>,
    /// Working precision N.
    #[arg(long = "N")]
    precision: Option<u32>,
    /// Largest exponent in the curve search.
    #[arg(long = "A", default_value_t = 3)]
    max_exponent: u32,
    /// Number of correction terms per component in the curve search.
    #[arg(long = "d", default_value_t = 2)]
    max_coeff_degree: u32,
    /// Largest discriminant power tried by associated membership.
    #[arg(long, default_value_t = 2)]
    maxnu: u32,
    /// Degree bound for codimension computations.
    #[arg(long, default_value_t = 12)]
    bound: u32,
    /// Exact unitary block for the pipeline.
    #[arg(long)]
    unitary: Option<PathBuf>,
    /// Drop floating Newton-Puiseux branches.
    #[arg(long)]
    exact_only: bool,
    /// Write a certificate document to this path.
    #[arg(long, value_name = "PATH")]
    emit_certificate: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let job = JobSpec {
        command: cli.command,
        inputs: cli.inputs,
        precision: cli.precision,
        max_exponent: cli.max_exponent,
        max_coeff_degree: cli.max_coeff_degree,
        maxnu: cli.maxnu,
        bound: cli.bound,
        unitary: cli.unitary,
        exact_only: cli.exact_only,
        emit_certificate: cli.emit_certificate,
    };
    match run(&job) {
        Ok(o) => {
            print!("{}", o.output);
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("germforge: {e}");
            ExitCode::from(1)
        }
    }
}
