use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use persona_rag::eval::{avg_sentence_length, avg_syllables_per_word, min_max_normalize, similarity, SimilarityReport};
use persona_rag::pipeline::Method;
use serde::Serialize;

use crate::rundir;

#[derive(clap::Args)]
pub struct Args {
    /// Run directories; the first chain_of_note run is the reference,
    /// otherwise the first one given.
    #[arg(required = true, num_args = 2..)]
    runs: Vec<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a markdown table.
    #[arg(long)]
    markdown: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Readability {
    run: PathBuf,
    method: String,
    avg_sentence_len: f64,
    avg_syllables: f64,
    normalized_sentence_len: f64,
    normalized_syllables: f64,
}

#[derive(Debug, Serialize)]
struct CompareReport {
    reference_run: PathBuf,
    reference_method: String,
    similarity: Vec<SimilarityReport>,
    readability: Vec<Readability>,
}

struct Loaded {
    dir: PathBuf,
    method: Method,
    answers: BTreeMap<String, String>,
}

fn load(dir: &Path) -> anyhow::Result<Loaded> {
    let manifest = rundir::read_manifest(dir)?;
    let answers = rundir::read_traces(dir)?
        .into_iter()
        .map(|t| (t.id, t.final_answer))
        .collect();
    Ok(Loaded {
        dir: dir.to_path_buf(),
        method: manifest.config.method,
        answers,
    })
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let runs = args
        .runs
        .iter()
        .map(|d| load(d).with_context(|| format!("loading {}", d.display())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let ref_idx = runs.iter().position(|r| r.method == Method::ChainOfNote).unwrap_or_else(|| {
        eprintln!("warning: no chain_of_note run given; using {} as reference", runs[0].dir.display());
        0
    });
    let reference = &runs[ref_idx];
    let ids: Vec<&String> = reference.answers.keys().collect();
    let ref_texts: Vec<&str> = ids.iter().map(|id| reference.answers[*id].as_str()).collect();

    let mut sims = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        if i == ref_idx {
            continue;
        }
        let missing: Vec<&&String> = ids.iter().filter(|id| !run.answers.contains_key(**id)).collect();
        let extra: Vec<&String> = run.answers.keys().filter(|id| !reference.answers.contains_key(*id)).collect();
        if !missing.is_empty() || !extra.is_empty() {
            anyhow::bail!(
                "{} does not answer the same questions as {}; missing: {missing:?}; extra: {extra:?}",
                run.dir.display(),
                reference.dir.display()
            );
        }
        let cand: Vec<&str> = ids.iter().map(|id| run.answers[*id].as_str()).collect();
        sims.push(similarity(reference.method.as_str(), &ref_texts, run.method.as_str(), &cand)?);
    }

    let texts: Vec<Vec<&str>> = runs.iter().map(|r| r.answers.values().map(String::as_str).collect()).collect();
    let lens: Vec<f64> = texts.iter().map(|t| avg_sentence_length(t)).collect();
    let syls: Vec<f64> = texts.iter().map(|t| avg_syllables_per_word(t)).collect();
    let (norm_lens, norm_syls) = (min_max_normalize(&lens), min_max_normalize(&syls));
    let readability = runs
        .iter()
        .enumerate()
        .map(|(i, r)| Readability {
            run: r.dir.clone(),
            method: r.method.as_str().to_string(),
            avg_sentence_len: lens[i],
            avg_syllables: syls[i],
            normalized_sentence_len: norm_lens[i],
            normalized_syllables: norm_syls[i],
        })
        .collect();

    let report = CompareReport {
        reference_run: reference.dir.clone(),
        reference_method: reference.method.as_str().to_string(),
        similarity: sims,
        readability,
    };
    match &args.out {
        Some(path) => rundir::write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    if let Some(path) = &args.markdown {
        std::fs::write(path, markdown(&report))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn markdown(report: &CompareReport) -> String {
    let mut out = format!("Reference: {}\n\n", report.reference_method);
    out.push_str("| Method | BLEU-2 |\n|---|---:|\n");
    for s in &report.similarity {
        let _ = writeln!(out, "| {} | {:.4} |", s.candidate_method, s.bleu2);
    }
    out.push_str("\n| Method | Words/sentence | Syllables/word | Norm. sentence length | Norm. syllables |\n");
    out.push_str("|---|---:|---:|---:|---:|\n");
    for r in &report.readability {
        let _ = writeln!(
            out,
            "| {} | {:.2} | {:.3} | {:.3} | {:.3} |",
            r.method, r.avg_sentence_len, r.avg_syllables, r.normalized_sentence_len, r.normalized_syllables
        );
    }
    out
}
