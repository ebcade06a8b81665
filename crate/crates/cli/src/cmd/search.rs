use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use persona_rag::retrieval::load_index;
use persona_rag::ScoredPassage;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    index: PathBuf,
    #[arg(short, long, default_value_t = 3)]
    k: usize,
    /// Query text; several words are joined with spaces.
    #[arg(required = true)]
    query: Vec<String>,
}

/// Prints `rank<TAB>id<TAB>score<TAB>title` per hit.
pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let index = load_index(&args.index).with_context(|| format!("loading {}", args.index.display()))?;
    let hits: Vec<ScoredPassage> = index.search(&args.query.join(" "), args.k)?;
    for hit in hits {
        println!("{}\t{}\t{}\t{}", hit.rank, hit.doc_id, hit.score, hit.title);
    }
    Ok(ExitCode::SUCCESS)
}
