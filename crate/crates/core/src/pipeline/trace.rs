use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::retrieval::ScoredPassage;

use super::{AgentRole, Method};

mod micros {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_micros(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentResponse {
    pub role: AgentRole,
    pub text: String,
    #[serde(rename = "elapsed_us", with = "micros")]
    pub elapsed: Duration,
}

/// One prompt sent to the model and the raw text it returned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmCall {
    pub template: String,
    pub prompt: String,
    pub response: String,
}

/// Outcome of the Self-Rerank filter call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RerankOutcome {
    /// Ids of the passages passed on to the answer call, in the order used.
    pub kept: Vec<String>,
    /// Set when the filter reply could not be parsed and all passages were kept.
    pub fallback: bool,
}

/// A user interaction signal (click, dwell, rating). Nothing produces these
/// yet; the field exists so recorded sessions can seed the pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    #[serde(rename = "retrieval_us", with = "micros")]
    pub retrieval: Duration,
    #[serde(rename = "generation_us", with = "micros")]
    pub generation: Duration,
    #[serde(rename = "total_us", with = "micros")]
    pub total: Duration,
}

/// Full record of one question's execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionTrace {
    pub id: String,
    pub question: String,
    pub method: Method,
    pub top_k: usize,
    pub passages: Vec<ScoredPassage<f64>>,
    pub cot_answer: Option<String>,
    pub agent_responses: Vec<AgentResponse>,
    pub pool_before: Option<String>,
    pub pool_after: Option<String>,
    pub pool_revision: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rerank: Option<RerankOutcome>,
    #[serde(default)]
    pub interactions: Vec<InteractionEvent>,
    pub final_answer: String,
    pub llm_calls: Vec<LlmCall>,
    pub timings: Timings,
    pub error: Option<String>,
}

impl QuestionTrace {
    pub fn new(id: impl Into<String>, question: impl Into<String>, method: Method, top_k: usize) -> Self {
        Self {
            id: id.into(),
            question: question.into(),
            method,
            top_k,
            passages: Vec::new(),
            cot_answer: None,
            agent_responses: Vec::new(),
            pool_before: None,
            pool_after: None,
            pool_revision: None,
            rerank: None,
            interactions: Vec::new(),
            final_answer: String::new(),
            llm_calls: Vec::new(),
            timings: Timings::default(),
            error: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn templates_called(&self) -> Vec<&str> {
        self.llm_calls.iter().map(|c| c.template.as_str()).collect()
    }
}
