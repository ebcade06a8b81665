use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolRevision {
    pub revision: u64,
    pub content: String,
}

/// Shared agent memory. Each consolidation replaces the content and bumps
/// the revision; history keeps every revision, starting with the initial one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalMessagePool {
    content: String,
    revision: u64,
    history: Vec<PoolRevision>,
}

impl GlobalMessagePool {
    pub fn new() -> Self {
        Self::seeded(String::new())
    }

    pub fn seeded(content: impl Into<String>) -> Self {
        let content = content.into();
        Self {
            history: vec![PoolRevision {
                revision: 0,
                content: content.clone(),
            }],
            content,
            revision: 0,
        }
    }

    pub fn content(&self) -> &str {
        &self.content
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn history(&self) -> &[PoolRevision] {
        &self.history
    }

    pub fn consolidate(&mut self, content: impl Into<String>) {
        self.content = content.into();
        self.revision += 1;
        self.history.push(PoolRevision {
            revision: self.revision,
            content: self.content.clone(),
        });
    }
}

impl Default for GlobalMessagePool {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starts_empty_at_zero() {
        let p = GlobalMessagePool::new();
        assert_eq!((p.content(), p.revision()), ("", 0));
        assert_eq!(p.history().len(), 1);
    }

    #[test]
    fn consolidation_appends() {
        let mut p = GlobalMessagePool::seeded("likes art");
        p.consolidate("POOL1");
        p.consolidate("POOL2");
        assert_eq!(p.revision(), 2);
        assert_eq!(p.content(), "POOL2");
        let revs: Vec<_> = p.history().iter().map(|r| (r.revision, r.content.as_str())).collect();
        assert_eq!(revs, vec![(0, "likes art"), (1, "POOL1"), (2, "POOL2")]);
    }
}
