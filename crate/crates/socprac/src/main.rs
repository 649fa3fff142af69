use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use socprac::commands::{self, CheckArgs, CliError, EvalArgs, Format, Output, SimArgs};
use socprac_core::checker::EvalOptions;

#[derive(Parser)]
#[command(name = "socprac", version, about = "Model checking and simulation of social practices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Jsonl,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Jsonl => Format::Jsonl,
        }
    }
}

#[derive(clap::Args, Clone)]
struct Bounds {
    /// Operator depth of the action repertoire.
    #[arg(long, default_value_t = 2)]
    bound: usize,
    /// Longest trace an event may denote.
    #[arg(long, default_value_t = 8)]
    trace_bound: usize,
    /// Longest execution searched for the practice executions.
    #[arg(long, default_value_t = 12)]
    depth: usize,
}

impl Bounds {
    fn options(&self) -> EvalOptions {
        EvalOptions { bound: self.bound, trace_bound: self.trace_bound, delta_depth: self.depth, ..EvalOptions::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the frame conditions of a model (and practice records).
    Validate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        practice: Vec<PathBuf>,
    },
    /// Evaluate queries at named worlds.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        practice: Vec<PathBuf>,
        /// A query file with `WORLD: assertion` lines.
        queries: Option<PathBuf>,
        #[arg(long)]
        world: Option<String>,
        #[arg(long)]
        formula: Option<String>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Report whether practices are feasible, normative and complete.
    CheckPractice {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        practice: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Build the practice based on several instances.
    Generalize {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        practices: Vec<PathBuf>,
        #[arg(long, default_value = "generalized")]
        name: String,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Run agents through a practice.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        practice: PathBuf,
        /// Start world; the first start-condition world by default.
        #[arg(long)]
        world: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        ticks: Option<usize>,
        /// Participating agents (comma separated); all practice actors by default.
        #[arg(long, value_delimiter = ',')]
        agents: Vec<String>,
        /// Agents allowed to break norms.
        #[arg(long, value_delimiter = ',')]
        violating: Vec<String>,
        /// Branch preference order.
        #[arg(long, value_delimiter = ',')]
        prefer: Vec<usize>,
        #[command(flatten)]
        bounds: Bounds,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Replay and print a stored JSON-lines trace.
    Trace {
        #[arg(long)]
        model: PathBuf,
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Validate { model, practice } => commands::validate(&model, &practice),
        Command::Eval { model, practice, queries, world, formula, bounds } => commands::eval(&EvalArgs {
            model,
            practices: practice,
            queries,
            world,
            formula,
            options: bounds.options(),
        }),
        Command::CheckPractice { model, practice, bounds, format } => {
            commands::check_practice(&CheckArgs { model, practice, options: bounds.options(), format: format.into() })
        }
        Command::Generalize { model, practices, name, format } => {
            commands::generalize(&model, &practices, &name, format.into())
        }
        Command::Simulate { model, practice, world, seed, ticks, agents, violating, prefer, bounds, format } => {
            commands::simulate(&SimArgs {
                model,
                practice,
                world,
                seed,
                ticks,
                agents,
                violating,
                prefer,
                options: bounds.options(),
                format: format.into(),
            })
        }
        Command::Trace { model, file, format } => commands::trace(&model, &file, format.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
