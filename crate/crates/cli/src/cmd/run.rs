use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use futures::StreamExt;
use persona_rag::eval::{load_dataset, sample, sampling_rate, QAExample};
use persona_rag::llm::{ChatModel, ClientConfig, OpenAiClient, ScriptedLlm, ENV_MODEL};
use persona_rag::pipeline::{Clock, Method, Pipeline, PipelineConfig, PoolPolicy};
use persona_rag::prompts::Registry;
use persona_rag::retrieval::{load_index, InvertedIndex};

use crate::rundir::{self, FileRef, RunEnd, RunManifest, RunStatus};

#[derive(Clone, Copy, clap::ValueEnum)]
enum PoolArg {
    Fresh,
    Carry,
}

#[derive(clap::Args)]
pub struct Args {
    /// One of no_rag, guideline, vanilla_rag, cot_passage, chain_of_note,
    /// self_rerank, persona_rag.
    #[arg(long)]
    method: Option<Method>,
    /// JSONL dataset of `{"id","question","answers"}` records.
    #[arg(long)]
    dataset: PathBuf,
    /// Index built by `persona-rag index`; required by retrieval methods.
    #[arg(long)]
    index: Option<PathBuf>,
    /// TOML file with pipeline settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run directory to create.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long, value_enum)]
    pool: Option<PoolArg>,
    /// Initial content of the global message pool.
    #[arg(long)]
    persona_seed: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Seed for question sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Randomly sample this many questions.
    #[arg(long)]
    sample: Option<usize>,
    /// Keep only the first N questions (after sampling).
    #[arg(long)]
    limit: Option<usize>,
    /// Replay a JSONL script of `{"match","response"}` entries instead of
    /// calling a model. Timings are recorded as zero.
    #[arg(long)]
    mock_script: Option<PathBuf>,
    /// Questions processed concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn load_config(args: &Args) -> anyhow::Result<PipelineConfig> {
    let mut config = PipelineConfig::default();
    let mut model_from_file = false;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        model_from_file = table.contains_key("model");
        config = table.try_into().with_context(|| format!("invalid config {}", path.display()))?;
    }
    if !model_from_file {
        if let Some(model) = std::env::var(ENV_MODEL).ok().filter(|m| !m.is_empty()) {
            config.model = model;
        }
    }
    if let Some(method) = args.method {
        config.method = method;
    }
    if let Some(k) = args.top_k {
        config.top_k = k;
    }
    if let Some(pool) = args.pool {
        config.pool_policy = match pool {
            PoolArg::Fresh => PoolPolicy::FreshPerQuestion,
            PoolArg::Carry => PoolPolicy::CarryAcrossQuestions,
        };
    }
    if let Some(seed) = &args.persona_seed {
        config.persona_seed = Some(seed.clone());
    }
    if let Some(model) = &args.model {
        config.model = model.clone();
    }
    config.validate().map_err(anyhow::Error::msg)?;
    Ok(config)
}

fn select_questions(args: &Args, dataset: &[QAExample]) -> anyhow::Result<Vec<QAExample>> {
    let mut questions = match args.sample {
        Some(n) => {
            let picked = sample(dataset, n, args.seed)?;
            eprintln!(
                "sampled {n} of {} questions ({}), seed {}",
                dataset.len(),
                sampling_rate(n, dataset.len()),
                args.seed
            );
            picked
        }
        None => dataset.to_vec(),
    };
    if let Some(limit) = args.limit {
        questions.truncate(limit);
    }
    Ok(questions)
}

struct Backend {
    llm: Box<dyn ChatModel>,
    name: &'static str,
    api_base: Option<String>,
    mock_script: Option<FileRef>,
}

fn backend(args: &Args) -> anyhow::Result<Backend> {
    match &args.mock_script {
        Some(path) => Ok(Backend {
            llm: Box::new(ScriptedLlm::load(path).with_context(|| format!("loading {}", path.display()))?),
            name: "mock",
            api_base: None,
            mock_script: Some(FileRef::of(path)?),
        }),
        None => {
            let config = ClientConfig::from_env()?;
            let api_base = config.base_url.clone();
            Ok(Backend {
                llm: Box::new(OpenAiClient::new(config)?),
                name: "openai",
                api_base: Some(api_base),
                mock_script: None,
            })
        }
    }
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(run_async(args))
}

async fn run_async(args: Args) -> anyhow::Result<ExitCode> {
    let config = load_config(&args)?;
    let dataset = load_dataset(&args.dataset).with_context(|| format!("reading {}", args.dataset.display()))?;
    let questions = select_questions(&args, &dataset)?;

    let index: Option<InvertedIndex> = match &args.index {
        Some(path) => Some(load_index(path).with_context(|| format!("loading {}", path.display()))?),
        None if config.method.uses_retrieval() => bail!("method {} needs --index", config.method),
        None => None,
    };

    let mut jobs = args.jobs.max(1);
    if config.pool_policy == PoolPolicy::CarryAcrossQuestions && jobs > 1 {
        eprintln!("--pool carry processes questions one at a time; ignoring --jobs {jobs}");
        jobs = 1;
    }
    if args.mock_script.is_some() && jobs > 1 {
        eprintln!("scripted replies are consumed in call order; ignoring --jobs {jobs}");
        jobs = 1;
    }

    let backend = backend(&args)?;
    let registry = Registry::builtin();
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at: rundir::now_rfc3339(),
        model: config.model.clone(),
        config: config.clone(),
        backend: backend.name.to_string(),
        api_base: backend.api_base.clone(),
        mock_script: backend.mock_script.clone(),
        seed: args.seed,
        sample: args.sample,
        limit: args.limit,
        jobs,
        dataset: FileRef::of(&args.dataset)?,
        dataset_size: dataset.len(),
        index: args.index.as_deref().map(FileRef::of).transpose()?,
        template_checksums: registry.checksums(),
        question_ids: questions.iter().map(|q| q.id.clone()).collect(),
    };
    rundir::write_json(&args.out.join(rundir::MANIFEST), &manifest)?;

    let clock = if args.mock_script.is_some() { Clock::Frozen } else { Clock::Wall };
    let mut pipeline = Pipeline::new(config, backend.llm.as_ref()).with_registry(registry).with_clock(clock);
    if let Some(index) = &index {
        pipeline = pipeline.with_index(index);
    }
    let end = process(&pipeline, &questions, jobs, &args.out).await?;
    rundir::write_json(&args.out.join(rundir::RUN_END), &end)?;

    eprintln!(
        "{} traces, {} with errors, {} model calls -> {}",
        end.traces,
        end.error_traces,
        end.llm_calls,
        args.out.display()
    );
    Ok(match end.status {
        RunStatus::Completed if end.error_traces == 0 => ExitCode::SUCCESS,
        RunStatus::Interrupted => ExitCode::from(130),
        _ => ExitCode::FAILURE,
    })
}

async fn process(pipeline: &Pipeline<'_>, questions: &[QAExample], jobs: usize, out: &Path) -> anyhow::Result<RunEnd> {
    let path = out.join(rundir::TRACES);
    let mut writer = BufWriter::new(std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    let mut end = RunEnd {
        finished_at: String::new(),
        status: RunStatus::Completed,
        traces: 0,
        error_traces: 0,
        llm_calls: 0,
        message: None,
    };

    let mut results = futures::stream::iter(questions)
        .map(|q| pipeline.run_question(&q.id, &q.question))
        .buffered(jobs);
    let ctrl_c = tokio::signal::ctrl_c();
    tokio::pin!(ctrl_c);

    loop {
        let next = tokio::select! {
            biased;
            _ = &mut ctrl_c => {
                end.status = RunStatus::Interrupted;
                end.message = Some("interrupted".into());
                break;
            }
            next = results.next() => next,
        };
        let Some(result) = next else { break };
        let (trace, fatal) = match result {
            Ok(trace) => (trace, None),
            Err(aborted) => {
                tracing::warn!("{aborted}");
                let fatal = aborted.error.is_fatal().then(|| aborted.error.to_string());
                (*aborted.trace, fatal)
            }
        };
        serde_json::to_writer(&mut writer, &trace)?;
        writer.write_all(b"\n")?;
        writer.flush()?;
        end.traces += 1;
        end.llm_calls += trace.llm_calls.len();
        if !trace.is_ok() {
            end.error_traces += 1;
        }
        if let Some(message) = fatal {
            eprintln!("stopping: {message}");
            end.status = RunStatus::Aborted;
            end.message = Some(message);
            break;
        }
    }
    writer.flush()?;
    end.finished_at = rundir::now_rfc3339();
    Ok(end)
}
