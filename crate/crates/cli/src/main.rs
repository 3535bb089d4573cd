use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "linear-ndcg",
    version,
    about = "Linear/classical NDCG, weighted pairwise loss, and their exact equivalence checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Tsv,
    Svmlight,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalarKind {
    /// Compare scores exactly as written in decimal.
    Exact,
    /// Parse scores as f64.
    F64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute per-query and aggregate metrics for a scored dataset.
    Metrics {
        /// Input file, or `-` for stdin.
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value = "tsv")]
        format: InputFormat,
        /// Companion file with one score per SVMlight data row.
        #[arg(long)]
        scores: Option<String>,
        /// Grade alphabet size L; defaults to the largest grade + 1.
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        num_grades: Option<u32>,
        #[arg(long, value_enum, default_value = "json")]
        output: OutputFormat,
        #[arg(long, value_enum, default_value = "exact")]
        scalar: ScalarKind,
    },
    /// Check the DCG-error / pairwise-loss identities on exhaustive and random instances.
    Verify {
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        max_items: usize,
        #[arg(long)]
        max_grades: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        exhaustive_limit: usize,
    },
    /// Enumerate every arrangement of a grade multiset and tabulate DCG error vs loss.
    Oracle {
        /// Comma-separated grades, e.g. `2,1,1,0`.
        #[arg(long)]
        grades: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Metrics {
            input,
            format,
            scores,
            num_grades,
            output,
            scalar,
        } => commands::metrics(&commands::MetricsArgs {
            input,
            format,
            scores,
            num_grades,
            output,
            scalar,
        }),
        Command::Verify {
            trials,
            max_items,
            max_grades,
            seed,
            exhaustive_limit,
        } => commands::verify(linear_ndcg::verify::VerifyConfig {
            trials,
            max_items,
            max_grades,
            seed,
            exhaustive_limit,
        }),
        Command::Oracle { grades } => commands::oracle(&grades),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            commands::exit_usage()
        }
    }
}
