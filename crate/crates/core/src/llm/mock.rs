use std::path::Path;
use std::sync::Mutex;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

use super::{ChatModel, CompletionRequest, CompletionResult, LlmError};

/// One scripted reply: returned for the first request whose prompt contains
/// `matcher`. Serialized as `{"match": ..., "response": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    #[serde(rename = "match")]
    pub matcher: String,
    pub response: String,
}

impl ScriptEntry {
    pub fn new(matcher: impl Into<String>, response: impl Into<String>) -> Self {
        Self {
            matcher: matcher.into(),
            response: response.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedCall {
    pub request: CompletionRequest,
    /// `None` when no entry matched.
    pub response: Option<String>,
}

#[derive(Debug)]
struct State {
    entries: Vec<(ScriptEntry, bool)>,
    /// Every entry before `head` is consumed.
    head: usize,
    log: Vec<LoggedCall>,
}

/// Deterministic stand-in for a chat model.
///
/// Each request consumes the earliest unused entry whose matcher is a
/// substring of the request's prompt text. Entries are used at most once, so
/// a script for `n` questions lists each question's replies in turn.
#[derive(Debug)]
pub struct ScriptedLlm {
    state: Mutex<State>,
}

impl ScriptedLlm {
    pub fn new(script: Vec<ScriptEntry>) -> Result<Self, LlmError> {
        if script.is_empty() {
            return Err(LlmError::InvalidConfig("mock script is empty".into()));
        }
        Ok(Self {
            state: Mutex::new(State {
                entries: script.into_iter().map(|e| (e, false)).collect(),
                head: 0,
                log: Vec::new(),
            }),
        })
    }

    /// Builds a mock from `(matcher, response)` pairs.
    pub fn from_pairs<M: Into<String>, R: Into<String>>(
        pairs: impl IntoIterator<Item = (M, R)>,
    ) -> Result<Self, LlmError> {
        Self::new(pairs.into_iter().map(|(m, r)| ScriptEntry::new(m, r)).collect())
    }

    /// Reads a newline-delimited JSON script file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| LlmError::InvalidConfig(format!("{}: {e}", path.display())))?;
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: ScriptEntry = serde_json::from_str(line)
                .map_err(|e| LlmError::InvalidConfig(format!("{} line {}: {e}", path.display(), i + 1)))?;
            entries.push(entry);
        }
        Self::new(entries)
    }

    pub fn call_log(&self) -> Vec<LoggedCall> {
        self.state.lock().unwrap().log.clone()
    }

    pub fn call_count(&self) -> usize {
        self.state.lock().unwrap().log.len()
    }

    pub fn remaining(&self) -> usize {
        self.state.lock().unwrap().entries.iter().filter(|(_, used)| !used).count()
    }
}

#[async_trait]
impl ChatModel for ScriptedLlm {
    async fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, LlmError> {
        let prompt = request.prompt_text();
        let mut state = self.state.lock().unwrap();
        let head = state.head;
        let hit = state.entries[head..]
            .iter()
            .position(|(e, used)| !used && prompt.contains(&e.matcher))
            .map(|i| i + head);
        let response = hit.map(|i| {
            state.entries[i].1 = true;
            state.entries[i].0.response.clone()
        });
        while state.head < state.entries.len() && state.entries[state.head].1 {
            state.head += 1;
        }
        state.log.push(LoggedCall {
            request: request.clone(),
            response: response.clone(),
        });
        match response {
            Some(text) => Ok(CompletionResult::text(text)),
            None => Err(LlmError::UnmatchedPrompt(prompt.chars().take(80).collect())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(prompt: &str) -> CompletionRequest {
        CompletionRequest::single_prompt("mock", prompt)
    }

    #[tokio::test]
    async fn substring_match() {
        let llm = ScriptedLlm::from_pairs([("User Profile Agent", "P1")]).unwrap();
        let r = llm.complete(&req("help the User Profile Agent now")).await.unwrap();
        assert_eq!(r.text, "P1");
    }

    #[tokio::test]
    async fn unmatched_is_logged_and_errors() {
        let llm = ScriptedLlm::from_pairs([("alpha", "A")]).unwrap();
        let err = llm.complete(&req("beta")).await.unwrap_err();
        assert!(matches!(err, LlmError::UnmatchedPrompt(_)));
        let log = llm.call_log();
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].response, None);
    }

    #[tokio::test]
    async fn entries_are_consumed_in_order() {
        let llm = ScriptedLlm::from_pairs([("x", "1"), ("y", "2"), ("x", "3")]).unwrap();
        assert_eq!(llm.complete(&req("x")).await.unwrap().text, "1");
        assert_eq!(llm.complete(&req("x")).await.unwrap().text, "3");
        assert_eq!(llm.complete(&req("y")).await.unwrap().text, "2");
        assert!(llm.complete(&req("x")).await.is_err());
        assert_eq!(llm.remaining(), 0);
    }

    #[tokio::test]
    async fn log_is_bit_exact() {
        let llm = ScriptedLlm::from_pairs([("a", "b")]).unwrap();
        let r = req("a\r\n{tricky} \u{00e9}").with_max_tokens(Some(7));
        llm.complete(&r).await.unwrap();
        assert_eq!(llm.call_log()[0].request, r);
    }

    #[test]
    fn empty_script_rejected() {
        assert!(ScriptedLlm::new(Vec::new()).is_err());
    }

    #[test]
    fn script_file_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.jsonl");
        std::fs::write(&p, "{\"match\":\"a\",\"response\":\"b\"}\n\n{\"match\":\"c\",\"response\":\"d\"}\n").unwrap();
        assert_eq!(ScriptedLlm::load(&p).unwrap().remaining(), 2);
        std::fs::write(&p, "{\"match\":1}\n").unwrap();
        assert!(ScriptedLlm::load(&p).unwrap_err().to_string().contains("line 1"));
    }
}
