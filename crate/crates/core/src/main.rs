use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use indexcode::cli::{self, CliError, Format, SelectionArg, Settings};
use indexcode::mac::DEFAULT_PRECISION_BITS;

/// Exact composite-coding rate regions for distributed index coding.
///
/// Instance and scheme arguments accept a file path or a bundled example name.
/// Without --selection, a file's own selection block is used when present and
/// every selection is enumerated otherwise.
#[derive(Parser, Debug)]
#[command(name = "indexcode", version)]
struct Cli {
    /// Worker threads for unrestricted region runs and simulation.
    #[arg(long, global = true, env = "INDEXCODE_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Bits kept when flooring MAC mutual information values.
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS, value_parser = clap::value_parser!(u32).range(1..=64))]
    precision: u32,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args, Debug, Clone)]
struct WithSelection {
    #[command(flatten)]
    common: Common,
    /// Use the file's selection (paper) or enumerate all selections.
    #[arg(long, value_enum)]
    selection: Option<ModeArg>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FormatArg {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    Paper,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Achievable rate region as a union of polyhedra.
    Region {
        instance: String,
        #[command(flatten)]
        opts: WithSelection,
    },
    /// Largest weighted sum-rate over the region.
    Sumrate {
        instance: String,
        /// Comma-separated nonnegative weights, one per message.
        #[arg(long, allow_hyphen_values = true)]
        weights: String,
        #[command(flatten)]
        opts: WithSelection,
    },
    /// Whether a rate vector lies in the region.
    Member {
        instance: String,
        /// Comma-separated rates, one per message.
        #[arg(long, allow_hyphen_values = true)]
        rates: String,
        #[command(flatten)]
        opts: WithSelection,
    },
    /// Constraint system before Fourier-Motzkin elimination.
    Constraints {
        instance: String,
        /// Print every inequality rather than per-receiver counts.
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        opts: WithSelection,
    },
    /// Exhaustive simulation of a linear scheme.
    Simulate {
        instance: String,
        scheme: String,
        #[command(flatten)]
        opts: WithSelection,
    },
    /// Full report for a bundled example.
    Example {
        name: String,
        #[command(flatten)]
        opts: WithSelection,
    },
}

fn settings(opts: &WithSelection, workers: Option<usize>) -> Settings {
    Settings {
        precision_bits: opts.common.precision,
        format: match opts.common.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        selection: opts.selection.map(|m| match m {
            ModeArg::Paper => SelectionArg::Paper,
            ModeArg::All => SelectionArg::All,
        }),
        workers,
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(n) = cli.workers {
        // later pool builds fall back to the default, so the error is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let w = cli.workers;
    match &cli.command {
        Command::Region { instance, opts } => cli::run_region(instance, &settings(opts, w)),
        Command::Sumrate {
            instance,
            weights,
            opts,
        } => cli::run_sumrate(instance, weights, &settings(opts, w)),
        Command::Member {
            instance,
            rates,
            opts,
        } => cli::run_member(instance, rates, &settings(opts, w)),
        Command::Constraints {
            instance,
            dump,
            opts,
        } => cli::run_constraints(instance, *dump, &settings(opts, w)),
        Command::Simulate {
            instance,
            scheme,
            opts,
        } => cli::run_simulate(instance, scheme, &settings(opts, w)),
        Command::Example { name, opts } => cli::run_example(name, &settings(opts, w)),
    }
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
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
