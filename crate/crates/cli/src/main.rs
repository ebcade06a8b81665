mod cmd;
mod rundir;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "persona-rag", version, about = "Agent-based personalized RAG experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a BM25 index from a JSONL corpus.
    Index(cmd::index::Args),
    /// Query an index.
    Search(cmd::search::Args),
    /// Run a method over a QA dataset and record traces.
    Run(cmd::run::Args),
    /// Score run directories against their dataset.
    Eval(cmd::eval::Args),
    /// BLEU-2 and readability of runs against a reference run.
    Compare(cmd::compare::Args),
    /// Turn a `question<TAB>answers` file into a JSONL dataset.
    Convert(cmd::convert::Args),
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("PERSONA_RAG_LOG").unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Index(args) => cmd::index::run(args),
        Command::Search(args) => cmd::search::run(args),
        Command::Run(args) => cmd::run::run(args),
        Command::Eval(args) => cmd::eval::run(args),
        Command::Compare(args) => cmd::compare::run(args),
        Command::Convert(args) => cmd::convert::run(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
