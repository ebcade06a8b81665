use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use persona_rag::eval::{accuracy_by_id, load_dataset, render_accuracy_table, EvalReport, QAExample, ReportMeta};

use crate::rundir::{self, file_sha256};

#[derive(clap::Args)]
pub struct Args {
    /// Run directories produced by `persona-rag run`.
    #[arg(required = true)]
    runs: Vec<PathBuf>,
    /// Dataset to score against; defaults to the one named in each manifest.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Dataset label for reports; defaults to the dataset file stem.
    #[arg(long)]
    dataset_name: Option<String>,
}

/// Writes `eval.json` and `eval.md` into every run directory and prints the
/// combined method-by-dataset table.
pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let mut reports = Vec::new();
    for dir in &args.runs {
        let report = eval_run(dir, &args).with_context(|| format!("evaluating {}", dir.display()))?;
        rundir::write_json(&dir.join(rundir::EVAL_JSON), &report)?;
        let md = format!(
            "{}\n{} of {} questions matched (accuracy {:.4})\n",
            render_accuracy_table(std::slice::from_ref(&report)),
            report.matched,
            report.n,
            report.accuracy
        );
        std::fs::write(dir.join(rundir::EVAL_MD), md)?;
        reports.push(report);
    }
    print!("{}", render_accuracy_table(&reports));
    Ok(ExitCode::SUCCESS)
}

fn eval_run(dir: &std::path::Path, args: &Args) -> anyhow::Result<EvalReport> {
    let manifest = rundir::read_manifest(dir)?;
    let traces = rundir::read_traces(dir)?;
    let dataset_path = args.dataset.clone().unwrap_or_else(|| manifest.dataset.path.clone());
    if file_sha256(&dataset_path)? != manifest.dataset.sha256 {
        eprintln!(
            "warning: {} differs from the dataset recorded for {}",
            dataset_path.display(),
            dir.display()
        );
    }
    let dataset = load_dataset(&dataset_path).with_context(|| format!("reading {}", dataset_path.display()))?;

    let by_id: BTreeMap<&str, &QAExample> = dataset.iter().map(|e| (e.id.as_str(), e)).collect();
    let not_in_dataset: Vec<&String> = manifest.question_ids.iter().filter(|id| !by_id.contains_key(id.as_str())).collect();
    if !not_in_dataset.is_empty() {
        anyhow::bail!("run questions missing from {}: {not_in_dataset:?}", dataset_path.display());
    }
    let examples: Vec<QAExample> = manifest.question_ids.iter().map(|id| by_id[id.as_str()].clone()).collect();

    let mut predictions = BTreeMap::new();
    let mut failed = 0;
    for t in &traces {
        if !t.is_ok() {
            failed += 1;
        }
        if predictions.insert(t.id.clone(), t.final_answer.clone()).is_some() {
            anyhow::bail!("question {} traced twice", t.id);
        }
    }
    if failed > 0 {
        eprintln!("warning: {failed} traces in {} carry errors and count as misses", dir.display());
    }

    let dataset_name = args.dataset_name.clone().unwrap_or_else(|| {
        dataset_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });
    let meta = ReportMeta {
        method: manifest.config.method.as_str().to_string(),
        dataset: dataset_name,
        top_k: manifest.config.top_k,
    };
    Ok(accuracy_by_id(meta, &examples, &predictions)?)
}
