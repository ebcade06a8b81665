//! Layout of a run directory: `manifest.json`, `traces.jsonl`, `run_end.json`
//! and, after evaluation, `eval.json` and `eval.md`.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::Context;
use persona_rag::pipeline::{PipelineConfig, QuestionTrace};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";
pub const TRACES: &str = "traces.jsonl";
pub const RUN_END: &str = "run_end.json";
pub const EVAL_JSON: &str = "eval.json";
pub const EVAL_MD: &str = "eval.md";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRef {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileRef {
    pub fn of(path: &Path) -> anyhow::Result<Self> {
        Ok(Self {
            path: path.to_path_buf(),
            sha256: file_sha256(path)?,
        })
    }
}

/// Written once, before the first model call.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub started_at: String,
    pub config: PipelineConfig,
    pub model: String,
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mock_script: Option<FileRef>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    pub jobs: usize,
    pub dataset: FileRef,
    pub dataset_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<FileRef>,
    pub template_checksums: BTreeMap<String, String>,
    /// Questions scheduled for this run, in processing order.
    pub question_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Interrupted,
    Aborted,
}

/// Written when a run stops, whatever the reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunEnd {
    pub finished_at: String,
    pub status: RunStatus,
    pub traces: usize,
    pub error_traces: usize,
    pub llm_calls: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

pub fn file_sha256(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_manifest(dir: &Path) -> anyhow::Result<RunManifest> {
    let path = dir.join(MANIFEST);
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_traces(dir: &Path) -> anyhow::Result<Vec<QuestionTrace>> {
    let path = dir.join(TRACES);
    let file = std::fs::File::open(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let trace = serde_json::from_str(&line).with_context(|| format!("{} line {}", path.display(), i + 1))?;
        out.push(trace);
    }
    Ok(out)
}
