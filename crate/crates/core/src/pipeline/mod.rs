//! The question-answering workflow.
//!
//! [`Pipeline`] runs one method per question and emits a [`QuestionTrace`].
//! The agent method runs in three steps: passage retrieval, five
//! interaction-analysis agents fanned out against one snapshot of the
//! [`GlobalMessagePool`] followed by a consolidation call, and a final
//! cognitive-adaptation call that revises the chain-of-thought answer.
//! The six baseline methods reuse the same retrieval and prompting machinery.

mod agents;
mod clock;
mod config;
mod engine;
mod pool;
mod script;
mod trace;

use thiserror::Error;

use crate::llm::LlmError;
use crate::prompts::PromptError;
use crate::retrieval::RetrievalError;

pub use agents::AgentRole;
pub use clock::{Clock, Timer};
pub use config::{Method, PipelineConfig, PoolPolicy};
pub use engine::{format_agent_responses, parse_passage_selection, Pipeline};
pub use pool::{GlobalMessagePool, PoolRevision};
pub use script::ScriptBuilder;
pub use trace::{AgentResponse, InteractionEvent, LlmCall, QuestionTrace, RerankOutcome, Timings};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("retrieval failed: {0}")]
    Retrieval(#[from] RetrievalError),
    #[error("{template} call failed: {source}")]
    Llm {
        template: String,
        #[source]
        source: LlmError,
    },
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("method `{0}` needs a retrieval index")]
    MissingIndex(Method),
    #[error("expected {expected} agent responses, one per role, got {got}")]
    AgentCoverage { expected: usize, got: usize },
    #[error("method `{0}` cannot run here")]
    WrongMethod(Method),
}

impl PipelineError {
    pub fn llm_error(&self) -> Option<&LlmError> {
        match self {
            PipelineError::Llm { source, .. } => Some(source),
            _ => None,
        }
    }

    /// True when continuing with further questions is pointless.
    pub fn is_fatal(&self) -> bool {
        self.llm_error().is_some_and(LlmError::is_fatal)
    }
}

/// A question that stopped early. The trace holds everything completed
/// before the failure and has its `error` field set.
#[derive(Debug, Error)]
#[error("question `{}` aborted: {error}", trace.id)]
pub struct Aborted {
    pub trace: Box<QuestionTrace>,
    #[source]
    pub error: PipelineError,
}
