use crate::llm::ScriptEntry;
use crate::prompts::{Registry, TemplateId};

use super::{AgentRole, Method};

/// Builds mock scripts keyed on each template's anchor phrase.
#[derive(Debug, Clone)]
pub struct ScriptBuilder<'r> {
    registry: &'r Registry,
    entries: Vec<ScriptEntry>,
}

impl Default for ScriptBuilder<'static> {
    fn default() -> Self {
        Self::new()
    }
}

impl ScriptBuilder<'static> {
    pub fn new() -> Self {
        Self::with_registry(Registry::builtin())
    }
}

impl<'r> ScriptBuilder<'r> {
    pub fn with_registry(registry: &'r Registry) -> Self {
        Self {
            registry,
            entries: Vec::new(),
        }
    }

    pub fn reply(mut self, template: TemplateId, response: impl Into<String>) -> Self {
        let anchor = self.registry.template(template).anchor.clone();
        self.entries.push(ScriptEntry::new(anchor, response));
        self
    }

    /// The eight replies of one agent-pipeline question, in call order.
    pub fn persona_rag(
        mut self,
        cot: &str,
        agents: [&str; 5],
        pool: &str,
        final_answer: &str,
    ) -> Self {
        self = self.reply(TemplateId::ChainOfThought, cot);
        for (role, text) in AgentRole::ALL.iter().zip(agents) {
            self = self.reply(role.template(), text);
        }
        self.reply(TemplateId::GlobalMessagePool, pool)
            .reply(TemplateId::CognitiveAgent, final_answer)
    }

    /// Replies for one question of `method` where every answer-producing
    /// call returns `answer` and intermediate calls return fixed filler.
    /// Self-Rerank's filter keeps every passage up to `top_k`.
    pub fn question(self, method: Method, top_k: usize, answer: &str) -> Self {
        match method {
            Method::NoRag => self.reply(TemplateId::VanillaQa, answer),
            Method::Guideline => self
                .reply(TemplateId::Guideline, "1. Identify the entity asked about. 2. Recall the fact.")
                .reply(TemplateId::GuidelineAnswer, answer),
            Method::VanillaRag => self.reply(TemplateId::VanillaRag, answer),
            Method::CotPassage => self.reply(TemplateId::CotPassage, answer),
            Method::ChainOfNote => self.reply(TemplateId::ChainOfThought, answer),
            Method::SelfRerank => {
                let keep: Vec<String> = (1..=top_k).map(|i| i.to_string()).collect();
                self.reply(TemplateId::SelfRerank, keep.join(","))
                    .reply(TemplateId::VanillaRag, answer)
            }
            Method::PersonaRag => self.persona_rag(
                "Initial reasoning.",
                [
                    "Profile insight.",
                    "Retrieval insight.",
                    "Session insight.",
                    "Ranking insight.",
                    "Feedback insight.",
                ],
                "Consolidated pool.",
                answer,
            ),
        }
    }

    pub fn build(self) -> Vec<ScriptEntry> {
        self.entries
    }
}
