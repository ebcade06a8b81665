use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use persona_rag::retrieval::{build_index, load_corpus, save_index};
use persona_rag::Bm25Params;

#[derive(clap::Args)]
pub struct Args {
    /// JSONL corpus, one `{"id","title","text"}` record per line.
    #[arg(long)]
    corpus: PathBuf,
    /// Index file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1.2)]
    k1: f64,
    #[arg(long, default_value_t = 0.75)]
    b: f64,
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let docs = load_corpus(&args.corpus).with_context(|| format!("reading {}", args.corpus.display()))?;
    let index = build_index(docs, Bm25Params::new(args.k1, args.b)?)?;
    save_index(&index, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    println!("indexed {} documents", index.doc_count());
    Ok(ExitCode::SUCCESS)
}
