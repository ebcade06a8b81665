//! Prompt templates: the registry of named templates, placeholder
//! validation and deterministic rendering.
//!
//! Templates live as plain text files under `templates/` next to a
//! `metadata.json` sidecar that lists each template's placeholders, its
//! origin and an anchor phrase unique to it.

mod registry;
mod render;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use registry::{PromptTemplate, Registry, TemplateMeta};
pub use render::{format_passages, render, scan_slots, Bindings, NO_PASSAGES};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("missing placeholder `{0}`")]
    MissingPlaceholder(String),
    #[error("unknown placeholder `{0}`")]
    UnknownPlaceholder(String),
    #[error("no template named `{0}`")]
    UnknownTemplate(String),
    #[error("template `{name}`: {message}")]
    InvalidTemplate { name: String, message: String },
    #[error("template directory: {0}")]
    Io(String),
}

/// Where a template's wording comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// Transcribed verbatim from the published method description.
    Paper,
    /// Written for this project (baseline methods).
    Invented,
}

/// Names of the built-in templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    UserProfile,
    ContextualRetrieval,
    LiveSession,
    DocumentRanking,
    Feedback,
    GlobalMessagePool,
    ChainOfThought,
    CognitiveAgent,
    VanillaQa,
    Guideline,
    GuidelineAnswer,
    VanillaRag,
    CotPassage,
    SelfRerank,
}

impl TemplateId {
    pub const ALL: [TemplateId; 14] = [
        Self::UserProfile,
        Self::ContextualRetrieval,
        Self::LiveSession,
        Self::DocumentRanking,
        Self::Feedback,
        Self::GlobalMessagePool,
        Self::ChainOfThought,
        Self::CognitiveAgent,
        Self::VanillaQa,
        Self::Guideline,
        Self::GuidelineAnswer,
        Self::VanillaRag,
        Self::CotPassage,
        Self::SelfRerank,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::UserProfile => "user_profile",
            Self::ContextualRetrieval => "contextual_retrieval",
            Self::LiveSession => "live_session",
            Self::DocumentRanking => "document_ranking",
            Self::Feedback => "feedback",
            Self::GlobalMessagePool => "global_message_pool",
            Self::ChainOfThought => "chain_of_thought",
            Self::CognitiveAgent => "cognitive_agent",
            Self::VanillaQa => "vanilla_qa",
            Self::Guideline => "guideline",
            Self::GuidelineAnswer => "guideline_answer",
            Self::VanillaRag => "vanilla_rag",
            Self::CotPassage => "cot_passage",
            Self::SelfRerank => "self_rerank",
        }
    }
}

impl std::fmt::Display for TemplateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
