mod commands;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Critical points of coupled Kirchhoff systems on weighted graphs.
#[derive(Debug, Parser)]
#[command(name = "kgs", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Graph JSON (vertices, edges, omega).
    pub graph: PathBuf,
    /// Instance JSON (params, coefficients).
    pub instance: PathBuf,
    /// Directory that receives one subdirectory per run.
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    /// Base seed for random starts. `KGS_SEED` takes precedence.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 1 runs everything sequentially and reproducibly,
    /// 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the existence hypotheses and write a report.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Compute the mountain-pass and/or ball-minimum solutions.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SolveMethod::Both)]
        method: SolveMethod,
    },
    /// Compute semi-trivial solutions with one component identically zero.
    Scalar {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        component: ComponentArg,
        /// Collect all distinct antipodal pairs instead of a single point.
        #[arg(long)]
        multiplicity: bool,
    },
    /// Search for a witness against the nonexistence condition.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = ModeArg::Integral)]
        mode: ModeArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMethod {
    MountainPass,
    Minimize,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentArg {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Integral,
    Pointwise,
    Literal,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
