//! Command-line front end: solve exchanges, compute egalitarian
//! allocations, check payment vectors against the core, search minimum
//! deviations, run the enumeration oracle, generate instances, and run the
//! built-in self test.
//!
//! Exit codes: 0 on success, 1 on input or validation errors (every issue
//! is listed), 2 on internal invariant violations.

use clap::{Args, Parser, Subcommand, ValueEnum};
use flowshare::egalitarian::SolveOptions;
use flowshare::exchange::{validate_instance, ExchangeInstance, InstanceDoc};
use flowshare::gen::{generate, GenParams};
use flowshare::report::{self, PipelineError};
use std::path::PathBuf;
use std::process::ExitCode;

mod selftest;
mod table;

#[derive(Parser)]
#[command(
    name = "flowshare",
    version,
    about = "Profit sharing for exchange flow games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct IoArgs {
    /// Instance file to read.
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the exchange: optimal trades and total profit.
    Solve {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Compute the egalitarian allocation with its trace and checks.
    Ea {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Check a payment vector for core membership.
    CoreCheck {
        #[command(flatten)]
        io: IoArgs,
        /// Payment vector, e.g. A=8,B=0,C=1/2.
        #[arg(long)]
        vector: String,
    },
    /// Find the smallest payment window width admitting full value.
    MinDeviation {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Egalitarian allocation via coalition enumeration.
    Oracle {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Generate a random instance.
    Gen {
        /// Write the instance here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        players: usize,
        #[arg(long, default_value_t = 8)]
        trades: usize,
        #[arg(long, default_value_t = 10)]
        max_capacity: u64,
        #[arg(long, default_value_t = 10)]
        max_profit: u64,
    },
    /// Run the built-in fixture assertions.
    Selftest {
        /// Report format.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Input/validation failure: exit 1.
struct UserError(Vec<String>);

/// Broken internal invariant: exit 2.
struct InternalError(String);

enum Failure {
    User(UserError),
    Internal(InternalError),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.is_internal() {
            Failure::Internal(InternalError(e.to_string()))
        } else {
            Failure::User(UserError(vec![e.to_string()]))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are not errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(UserError(issues))) => {
            for issue in issues {
                eprintln!("error: {issue}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Internal(InternalError(msg))) => {
            eprintln!("internal invariant violated: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_instance(path: &PathBuf) -> Result<ExchangeInstance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::User(UserError(vec![format!("cannot read {}: {e}", path.display())]))
    })?;
    let doc = InstanceDoc::from_json(&text).map_err(user_error)?;
    validate_instance(&doc).map_err(user_error)
}

fn user_error(e: flowshare::exchange::ExchangeError) -> Failure {
    use flowshare::exchange::ExchangeError;
    match e {
        ExchangeError::Validation(issues) => Failure::User(UserError(issues)),
        other => Failure::User(UserError(vec![other.to_string()])),
    }
}

fn emit(io_output: &Option<PathBuf>, text: String) -> Result<(), Failure> {
    match io_output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Failure::User(UserError(vec![format!(
                "cannot write {}: {e}",
                path.display()
            )]))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { io } => {
            let inst = load_instance(&io.input)?;
            let sol = flowshare::exchange::solve_exchange(&inst).map_err(user_error)?;
            let report = report::solve_report(&sol);
            let text = match io.format {
                Format::Json => report::to_json(&report),
                Format::Table => table::solve_table(&report),
            };
            emit(&io.output, text)
        }
        Command::Ea { io } => {
            let inst = load_instance(&io.input)?;
            let report = report::run_ea_analysis(&inst, &SolveOptions::default(), io.seed)?;
            let text = match io.format {
                Format::Json => report::to_json(&report),
                Format::Table => table::ea_table(&report),
            };
            emit(&io.output, text)
        }
        Command::CoreCheck { io, vector } => {
            let inst = load_instance(&io.input)?;
            let payments = report::parse_vector(&vector)
                .map_err(|e| Failure::User(UserError(vec![e])))?;
            let report = report::run_core_check(&inst, &payments, io.seed)?;
            let text = match io.format {
                Format::Json => report::to_json(&report),
                Format::Table => table::core_check_table(&report),
            };
            emit(&io.output, text)
        }
        Command::MinDeviation { io } => {
            let inst = load_instance(&io.input)?;
            let report = report::run_min_deviation(&inst)?;
            let text = match io.format {
                Format::Json => report::to_json(&report),
                Format::Table => table::min_deviation_table(&report),
            };
            emit(&io.output, text)
        }
        Command::Oracle { io } => {
            let inst = load_instance(&io.input)?;
            let report = report::run_oracle(&inst)?;
            let text = match io.format {
                Format::Json => report::to_json(&report),
                Format::Table => table::oracle_table(&report),
            };
            emit(&io.output, text)
        }
        Command::Gen {
            output,
            seed,
            players,
            trades,
            max_capacity,
            max_profit,
        } => {
            if players < 2 {
                return Err(Failure::User(UserError(vec![
                    "--players must be at least 2".into(),
                ])));
            }
            if max_capacity < 1 {
                return Err(Failure::User(UserError(vec![
                    "--max-capacity must be at least 1".into(),
                ])));
            }
            let params = GenParams {
                players,
                trades,
                max_capacity,
                max_profit,
            };
            let doc = generate(&params, seed);
            emit(&output, doc.to_json())
        }
        Command::Selftest { format, output } => {
            let results = selftest::run();
            let ok = results.iter().all(|r| r.ok);
            let text = match format {
                Format::Json => report::to_json(&results),
                Format::Table => table::selftest_table(&results),
            };
            emit(&output, text)?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Internal(InternalError(
                    "self test failed; see report".into(),
                )))
            }
        }
    }
}
