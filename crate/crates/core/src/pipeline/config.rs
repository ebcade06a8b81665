use serde::{Deserialize, Serialize};

use crate::llm::DEFAULT_MODEL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NoRag,
    Guideline,
    VanillaRag,
    CotPassage,
    ChainOfNote,
    SelfRerank,
    PersonaRag,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Self::NoRag,
        Self::Guideline,
        Self::VanillaRag,
        Self::CotPassage,
        Self::ChainOfNote,
        Self::SelfRerank,
        Self::PersonaRag,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::NoRag => "no_rag",
            Self::Guideline => "guideline",
            Self::VanillaRag => "vanilla_rag",
            Self::CotPassage => "cot_passage",
            Self::ChainOfNote => "chain_of_note",
            Self::SelfRerank => "self_rerank",
            Self::PersonaRag => "persona_rag",
        }
    }

    pub fn uses_retrieval(self) -> bool {
        !matches!(self, Self::NoRag | Self::Guideline)
    }

    /// LLM calls issued per question when nothing fails.
    pub fn calls_per_question(self) -> usize {
        match self {
            Self::NoRag | Self::VanillaRag | Self::CotPassage | Self::ChainOfNote => 1,
            Self::Guideline | Self::SelfRerank => 2,
            Self::PersonaRag => 8,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|m| m.as_str()).collect();
                format!("unknown method `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolPolicy {
    /// Every question starts from the seed pool.
    #[default]
    #[serde(alias = "fresh")]
    FreshPerQuestion,
    /// One pool accumulates over all questions of a run.
    #[serde(alias = "carry")]
    CarryAcrossQuestions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub method: Method,
    pub top_k: usize,
    pub model: String,
    pub pool_policy: PoolPolicy,
    /// Initial pool content, e.g. a known user profile.
    pub persona_seed: Option<String>,
    pub temperature: f64,
    pub max_tokens: Option<u32>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            method: Method::PersonaRag,
            top_k: 3,
            model: DEFAULT_MODEL.to_string(),
            pool_policy: PoolPolicy::FreshPerQuestion,
            persona_seed: None,
            temperature: 0.0,
            max_tokens: None,
        }
    }
}

impl PipelineConfig {
    pub fn for_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.top_k == 0 {
            return Err("top_k must be at least 1".into());
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(format!("temperature must be >= 0, got {}", self.temperature));
        }
        if self.max_tokens == Some(0) {
            return Err("max_tokens must be positive".into());
        }
        if self.model.is_empty() {
            return Err("model must not be empty".into());
        }
        Ok(())
    }
}
