use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dgbv::mc::{SolveMode, DEFAULT_ORDER};
use dgbv_cli::commands::{self, Outcome, SolveArgs, EXIT_IO};
use dgbv_cli::report::Format;
use dgbv_cli::{load_model, CliError};

#[derive(Parser)]
#[command(name = "dgbv", version, about = "Exact dGBV algebras, Maurer-Cartan solutions and Frobenius data")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text, global = true)]
    format: FormatArg,
    /// Write the dump (solve, frobenius, export) or the report (other commands) here.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Analytic,
    Normalized,
}

#[derive(Subcommand)]
enum Command {
    /// Axioms, integral and the δΔ conditions.
    Check { model: PathBuf },
    /// Solve δΓ + ½[Γ•Γ] = 0 through the given order.
    Solve {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
        mode: ModeArg,
        /// Solve even if `check` fails.
        #[arg(long)]
        force: bool,
    },
    /// Metric and structure tensor of the formal Frobenius manifold.
    Frobenius {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: u32,
        #[arg(long)]
        force: bool,
    },
    /// Dolbeault against de Rham Frobenius data of a Kähler-type model.
    Compare {
        model: PathBuf,
        #[arg(long, default_value_t = 3)]
        order: u32,
    },
    /// Print the model in explicit form (basis, product, operators).
    Export { model: PathBuf },
    /// Hard Lefschetz ranks.
    Lefschetz {
        model: PathBuf,
        /// Class such as `e1^e3,e2^e4:-1`; defaults to the model's ω.
        #[arg(long)]
        omega: Option<String>,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let solve_args = |order, mode, force| SolveArgs { order, mode, force };
    Ok(match &cli.command {
        Command::Check { model } => commands::check(&load_model(model)?),
        Command::Solve { model, order, mode, force } => {
            let mode = match mode {
                ModeArg::Analytic => SolveMode::Analytic,
                ModeArg::Normalized => SolveMode::Normalized,
            };
            commands::solve_cmd(&load_model(model)?, &solve_args(*order, mode, *force))
        }
        Command::Frobenius { model, order, force } => {
            commands::frobenius_cmd(&load_model(model)?, &solve_args(*order, SolveMode::Analytic, *force))
        }
        Command::Export { model } => commands::export(&load_model(model)?),
        Command::Compare { model, order } => commands::compare_cmd(&load_model(model)?, *order),
        Command::Lefschetz { model, omega } => commands::lefschetz_cmd(&load_model(model)?, omega.as_deref())
            .map_err(|source| CliError::Parse { path: "--omega".into(), source })?,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Machine => Format::Machine,
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let report = outcome.report.render(format, outcome.code);
    let result = match (&cli.output, outcome.artifact) {
        (Some(path), Some(dump)) => write(path, &dump).map(|_| print!("{report}")),
        (Some(path), None) => write(path, &report),
        (None, Some(dump)) if format == Format::Text => {
            print!("{report}\n{dump}");
            Ok(())
        }
        (None, _) => {
            print!("{report}");
            Ok(())
        }
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_IO as u8);
    }
    ExitCode::from(outcome.code as u8)
}
