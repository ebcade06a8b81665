use std::collections::{BTreeMap, BTreeSet};

use crate::retrieval::ScoredPassage;

use super::{PromptError, PromptTemplate};

/// Rendering of an empty passage list.
pub const NO_PASSAGES: &str = "(no passages retrieved)";

/// Placeholder values keyed by placeholder name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<String, String>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.0.insert(name.into(), value.into());
        self
    }

    pub fn set(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.0.insert(name.into(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Bindings {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        Bindings(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

fn is_slot_start(c: char) -> bool {
    c.is_ascii_lowercase() || c == '_'
}

fn is_slot_char(c: char) -> bool {
    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'
}

/// Splits `body` into literal text and `{name}` slots. A slot name is
/// `[a-z_][a-z0-9_]*`; any other brace is literal.
fn segments(body: &str) -> Vec<Segment<'_>> {
    let mut out = Vec::new();
    let mut literal_start = 0;
    let mut i = 0;
    let bytes = body.as_bytes();
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let rest = &body[i + 1..];
            let name_len = rest
                .char_indices()
                .take_while(|&(j, c)| if j == 0 { is_slot_start(c) } else { is_slot_char(c) })
                .count();
            if name_len > 0 && rest[name_len..].starts_with('}') {
                if literal_start < i {
                    out.push(Segment::Literal(&body[literal_start..i]));
                }
                out.push(Segment::Slot(&rest[..name_len]));
                i += name_len + 2;
                literal_start = i;
                continue;
            }
        }
        i += 1;
    }
    if literal_start < body.len() {
        out.push(Segment::Literal(&body[literal_start..]));
    }
    out
}

enum Segment<'a> {
    Literal(&'a str),
    Slot(&'a str),
}

/// Names of all `{slot}`s occurring in `body`.
pub fn scan_slots(body: &str) -> BTreeSet<String> {
    segments(body)
        .into_iter()
        .filter_map(|s| match s {
            Segment::Slot(name) => Some(name.to_string()),
            Segment::Literal(_) => None,
        })
        .collect()
}

/// Substitutes every slot of `template`. Values are inserted verbatim and are
/// not rescanned, so braces inside values survive untouched.
pub fn render(template: &PromptTemplate, bindings: &Bindings) -> Result<String, PromptError> {
    if let Some(missing) = template.required.iter().find(|n| bindings.get(n).is_none()) {
        return Err(PromptError::MissingPlaceholder(missing.clone()));
    }
    if let Some(extra) = bindings.names().find(|n| !template.required.contains(*n)) {
        return Err(PromptError::UnknownPlaceholder(extra.to_string()));
    }
    let mut out = String::with_capacity(template.body.len() + 256);
    for seg in segments(&template.body) {
        match seg {
            Segment::Literal(text) => out.push_str(text),
            Segment::Slot(name) => out.push_str(bindings.get(name).expect("checked above")),
        }
    }
    Ok(out)
}

/// Numbered passage list, one `N. title: text` line per passage in list
/// order. Passages with an empty title omit the `title: ` prefix.
pub fn format_passages<F>(passages: &[ScoredPassage<F>]) -> String {
    if passages.is_empty() {
        return NO_PASSAGES.to_string();
    }
    passages
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.title.is_empty() {
                format!("{}. {}", i + 1, p.text)
            } else {
                format!("{}. {}: {}", i + 1, p.title, p.text)
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompts::{Registry, TemplateId};

    fn passage(rank: usize, title: &str, text: &str) -> ScoredPassage<f64> {
        ScoredPassage {
            doc_id: format!("d{rank}"),
            rank,
            score: 1.0,
            title: title.into(),
            text: text.into(),
        }
    }

    #[test]
    fn slot_scanning() {
        let s = scan_slots("a {x} {y_1} {Bad} { z} {} {_u}{x}");
        assert_eq!(s, ["x", "y_1", "_u"].into_iter().map(String::from).collect());
    }

    #[test]
    fn user_profile_substitution() {
        let t = Registry::builtin().template(TemplateId::UserProfile);
        let b = Bindings::new()
            .with("question", "Q")
            .with("passages", "P")
            .with("global_memory", "");
        let out = render(t, &b).unwrap();
        assert!(out.contains("Question: Q"));
        assert!(out.contains("Global Memory: \n"));
        assert!(scan_slots(&out).is_empty());
    }

    #[test]
    fn missing_and_unknown() {
        let t = Registry::builtin().template(TemplateId::CognitiveAgent);
        let mut b = Bindings::new();
        for n in ["question", "cot_answer", "user_profile_answer", "contextual_answer", "live_session_answer", "document_ranking_answer"] {
            b.set(n, "x");
        }
        assert_eq!(
            render(t, &b).unwrap_err(),
            PromptError::MissingPlaceholder("feedback_answer".into())
        );
        b.set("feedback_answer", "x");
        b.set("extra", "x");
        assert_eq!(render(t, &b).unwrap_err(), PromptError::UnknownPlaceholder("extra".into()));
    }

    #[test]
    fn values_with_braces_are_not_rescanned() {
        let t = Registry::builtin().template(TemplateId::VanillaQa);
        let out = render(t, &Bindings::new().with("question", "what is {passages}?")).unwrap();
        assert!(out.contains("what is {passages}?"));
    }

    #[test]
    fn passage_formatting() {
        assert_eq!(format_passages::<f64>(&[]), NO_PASSAGES);
        let text = format_passages(&[passage(1, "Mona Lisa", "stolen"), passage(2, "", "recovered")]);
        assert_eq!(text, "1. Mona Lisa: stolen\n2. recovered");
    }
}
