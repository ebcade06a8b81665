use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use persona_rag::eval::convert_qa_tsv;

#[derive(clap::Args)]
pub struct Args {
    /// Tab-separated `question<TAB>["answer", ...]` file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Id prefix; records become `{prefix}-0`, `{prefix}-1`, ...
    #[arg(long, default_value = "q")]
    prefix: String,
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let file = std::fs::File::open(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let records = convert_qa_tsv(BufReader::new(file), &args.prefix)?;
    let mut out = BufWriter::new(std::fs::File::create(&args.out)?);
    for r in &records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    println!("converted {} questions", records.len());
    Ok(ExitCode::SUCCESS)
}
