use serde::{Deserialize, Serialize};

use crate::prompts::TemplateId;

/// The five interaction-analysis agents, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    UserProfile,
    ContextualRetrieval,
    LiveSession,
    DocumentRanking,
    Feedback,
}

impl AgentRole {
    pub const ALL: [AgentRole; 5] = [
        Self::UserProfile,
        Self::ContextualRetrieval,
        Self::LiveSession,
        Self::DocumentRanking,
        Self::Feedback,
    ];

    pub fn template(self) -> TemplateId {
        match self {
            Self::UserProfile => TemplateId::UserProfile,
            Self::ContextualRetrieval => TemplateId::ContextualRetrieval,
            Self::LiveSession => TemplateId::LiveSession,
            Self::DocumentRanking => TemplateId::DocumentRanking,
            Self::Feedback => TemplateId::Feedback,
        }
    }

    /// Placeholder of the cognitive-agent prompt that receives this agent's output.
    pub fn answer_slot(self) -> &'static str {
        match self {
            Self::UserProfile => "user_profile_answer",
            Self::ContextualRetrieval => "contextual_answer",
            Self::LiveSession => "live_session_answer",
            Self::DocumentRanking => "document_ranking_answer",
            Self::Feedback => "feedback_answer",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::UserProfile => "User Profile Agent",
            Self::ContextualRetrieval => "Contextual Retrieval Agent",
            Self::LiveSession => "Live Session Agent",
            Self::DocumentRanking => "Document Ranking Agent",
            Self::Feedback => "Feedback Agent",
        }
    }
}

impl std::fmt::Display for AgentRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
