use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::render::scan_slots;
use super::{Origin, PromptError, TemplateId};

/// Metadata sidecar entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateMeta {
    pub name: String,
    pub origin: Origin,
    pub anchor: String,
    pub placeholders: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct Sidecar {
    templates: Vec<TemplateMeta>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub name: String,
    pub body: String,
    pub required: BTreeSet<String>,
    pub origin: Origin,
    /// Phrase that occurs in this template's body and in no other template.
    pub anchor: String,
}

impl PromptTemplate {
    /// Hex SHA-256 of the body.
    pub fn checksum(&self) -> String {
        hex::encode(Sha256::digest(self.body.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    templates: BTreeMap<String, PromptTemplate>,
}

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../../templates/", $name, ".txt")))),*]
    };
}

const EMBEDDED_META: &str = include_str!("../../templates/metadata.json");
const EMBEDDED: &[(&str, &str)] = embedded!(
    "user_profile",
    "contextual_retrieval",
    "live_session",
    "document_ranking",
    "feedback",
    "global_message_pool",
    "chain_of_thought",
    "cognitive_agent",
    "vanilla_qa",
    "guideline",
    "guideline_answer",
    "vanilla_rag",
    "cot_passage",
    "self_rerank",
);

/// File contents to template body: CRLF normalised, one trailing newline dropped.
fn normalize(raw: &str) -> String {
    let text = raw.replace("\r\n", "\n");
    match text.strip_suffix('\n') {
        Some(stripped) => stripped.to_string(),
        None => text,
    }
}

impl Registry {
    /// Templates compiled into the binary.
    pub fn builtin() -> &'static Registry {
        static BUILTIN: OnceLock<Registry> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            let bodies: BTreeMap<&str, &str> = EMBEDDED.iter().copied().collect();
            Registry::assemble(EMBEDDED_META, |name| bodies.get(name).map(|b| b.to_string()))
                .expect("embedded templates are consistent")
        })
    }

    /// Loads `metadata.json` and one `<name>.txt` per entry from `dir`.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Registry, PromptError> {
        let dir = dir.as_ref();
        let meta = std::fs::read_to_string(dir.join("metadata.json"))
            .map_err(|e| PromptError::Io(format!("{}: {e}", dir.join("metadata.json").display())))?;
        Registry::assemble(&meta, |name| std::fs::read_to_string(dir.join(format!("{name}.txt"))).ok())
    }

    fn assemble(meta: &str, mut body_of: impl FnMut(&str) -> Option<String>) -> Result<Registry, PromptError> {
        let sidecar: Sidecar =
            serde_json::from_str(meta).map_err(|e| PromptError::Io(format!("metadata.json: {e}")))?;
        let mut templates = BTreeMap::new();
        for meta in sidecar.templates {
            let invalid = |message: String| PromptError::InvalidTemplate {
                name: meta.name.clone(),
                message,
            };
            let raw = body_of(&meta.name).ok_or_else(|| invalid("body file not found".into()))?;
            let body = normalize(&raw);
            let required: BTreeSet<String> = meta.placeholders.iter().cloned().collect();
            let found = scan_slots(&body);
            if found != required {
                return Err(invalid(format!(
                    "body slots {found:?} differ from declared placeholders {required:?}"
                )));
            }
            if meta.anchor.is_empty() || !body.contains(&meta.anchor) {
                return Err(invalid(format!("anchor {:?} not found in body", meta.anchor)));
            }
            let template = PromptTemplate {
                name: meta.name.clone(),
                body,
                required,
                origin: meta.origin,
                anchor: meta.anchor.clone(),
            };
            if templates.insert(meta.name.clone(), template).is_some() {
                return Err(invalid("declared twice".into()));
            }
        }
        for (name, t) in &templates {
            if let Some(other) = templates.iter().find(|(n, o)| *n != name && o.body.contains(&t.anchor)) {
                return Err(PromptError::InvalidTemplate {
                    name: name.clone(),
                    message: format!("anchor {:?} also occurs in `{}`", t.anchor, other.0),
                });
            }
        }
        Ok(Registry { templates })
    }

    pub fn get(&self, name: &str) -> Result<&PromptTemplate, PromptError> {
        self.templates
            .get(name)
            .ok_or_else(|| PromptError::UnknownTemplate(name.to_string()))
    }

    pub fn template(&self, id: TemplateId) -> &PromptTemplate {
        self.get(id.as_str())
            .unwrap_or_else(|_| panic!("registry lacks built-in template `{id}`"))
    }

    pub fn iter(&self) -> impl Iterator<Item = &PromptTemplate> {
        self.templates.values()
    }

    pub fn by_origin(&self, origin: Origin) -> impl Iterator<Item = &PromptTemplate> {
        self.iter().filter(move |t| t.origin == origin)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Template name to body checksum, for run manifests.
    pub fn checksums(&self) -> BTreeMap<String, String> {
        self.iter().map(|t| (t.name.clone(), t.checksum())).collect()
    }
}
