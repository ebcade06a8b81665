use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{avg_sentence_length, avg_syllables_per_word, bleu2, string_em, EvalError, QAExample};

/// Labels attached to an accuracy report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub method: String,
    pub dataset: String,
    pub top_k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionResult {
    pub id: String,
    pub prediction: String,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub dataset: String,
    pub top_k: usize,
    pub n: usize,
    pub matched: usize,
    pub accuracy: f64,
    pub per_question: Vec<QuestionResult>,
}

/// StringEM accuracy of `predictions[i]` against `examples[i]`. Per-question
/// results are sorted by id.
pub fn accuracy<S: AsRef<str>>(meta: ReportMeta, examples: &[QAExample], predictions: &[S]) -> Result<EvalReport, EvalError> {
    if examples.len() != predictions.len() {
        return Err(EvalError::LengthMismatch {
            what: "predictions",
            expected: examples.len(),
            got: predictions.len(),
        });
    }
    if examples.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut per_question: Vec<QuestionResult> = examples
        .iter()
        .zip(predictions)
        .map(|(ex, pred)| QuestionResult {
            id: ex.id.clone(),
            prediction: pred.as_ref().to_string(),
            matched: string_em(pred.as_ref(), &ex.gold_answers),
        })
        .collect();
    per_question.sort_by(|a, b| a.id.cmp(&b.id));
    let matched = per_question.iter().filter(|q| q.matched).count();
    let n = per_question.len();
    Ok(EvalReport {
        method: meta.method,
        dataset: meta.dataset,
        top_k: meta.top_k,
        n,
        matched,
        accuracy: matched as f64 / n as f64,
        per_question,
    })
}

/// Like [`accuracy`], pairing predictions to examples by id. Every example
/// needs exactly one prediction and vice versa; otherwise both lists of
/// offending ids are returned.
pub fn accuracy_by_id(
    meta: ReportMeta,
    examples: &[QAExample],
    predictions: &BTreeMap<String, String>,
) -> Result<EvalReport, EvalError> {
    let known: BTreeSet<&str> = examples.iter().map(|e| e.id.as_str()).collect();
    let missing: Vec<String> = examples
        .iter()
        .filter(|e| !predictions.contains_key(&e.id))
        .map(|e| e.id.clone())
        .collect();
    let unknown: Vec<String> = predictions.keys().filter(|id| !known.contains(id.as_str())).cloned().collect();
    if !missing.is_empty() || !unknown.is_empty() {
        return Err(EvalError::IdMismatch { missing, unknown });
    }
    let preds: Vec<&str> = examples.iter().map(|e| predictions[&e.id].as_str()).collect();
    accuracy(meta, examples, &preds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub reference_method: String,
    pub candidate_method: String,
    pub bleu2: f64,
    pub avg_sentence_len_ref: f64,
    pub avg_sentence_len_cand: f64,
    pub avg_syllables_ref: f64,
    pub avg_syllables_cand: f64,
}

/// BLEU-2 of the candidate outputs against the reference outputs, plus the
/// readability statistics of both sides.
pub fn similarity<S: AsRef<str>, T: AsRef<str>>(
    reference_method: &str,
    references: &[S],
    candidate_method: &str,
    candidates: &[T],
) -> Result<SimilarityReport, EvalError> {
    Ok(SimilarityReport {
        reference_method: reference_method.to_string(),
        candidate_method: candidate_method.to_string(),
        bleu2: bleu2(candidates, references)?,
        avg_sentence_len_ref: avg_sentence_length(references),
        avg_sentence_len_cand: avg_sentence_length(candidates),
        avg_syllables_ref: avg_syllables_per_word(references),
        avg_syllables_cand: avg_syllables_per_word(candidates),
    })
}

/// Markdown table with one row per method and one column per
/// (dataset, top-k) pair, cells in percent. Rows keep first-seen order.
pub fn render_accuracy_table(reports: &[EvalReport]) -> String {
    let mut methods: Vec<&str> = Vec::new();
    for r in reports {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let columns: BTreeSet<(&str, usize)> = reports.iter().map(|r| (r.dataset.as_str(), r.top_k)).collect();
    let cell: BTreeMap<(&str, &str, usize), f64> = reports
        .iter()
        .map(|r| ((r.method.as_str(), r.dataset.as_str(), r.top_k), r.accuracy))
        .collect();

    let mut out = String::from("| Method |");
    for (dataset, k) in &columns {
        let _ = write!(out, " {dataset} top-{k} |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(columns.len()));
    out.push('\n');
    for m in methods {
        let _ = write!(out, "| {m} |");
        for (dataset, k) in &columns {
            match cell.get(&(m, *dataset, *k)) {
                Some(acc) => {
                    let _ = write!(out, " {:.2} |", acc * 100.0);
                }
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(id: &str, gold: &str) -> QAExample {
        QAExample { id: id.into(), question: format!("q {id}"), gold_answers: vec![gold.into()] }
    }

    fn meta() -> ReportMeta {
        ReportMeta { method: "no_rag".into(), dataset: "nq".into(), top_k: 3 }
    }

    #[test]
    fn accuracy_counts() {
        let data = [ex("b", "x"), ex("a", "y"), ex("c", "z"), ex("d", "w")];
        let r = accuracy(meta(), &data, &["x", "no", "Z!", "nope"]).unwrap();
        assert_eq!(r.accuracy, 0.5);
        assert_eq!(r.per_question[0].id, "a");
        let r = accuracy(meta(), &data, &["", "", "", ""]).unwrap();
        assert_eq!(r.accuracy, 0.0);
        assert!(accuracy(meta(), &data, &["x"]).is_err());
        assert!(matches!(accuracy::<&str>(meta(), &[], &[]), Err(EvalError::Empty)));
    }

    #[test]
    fn id_mismatch_lists_ids() {
        let data = [ex("a", "x"), ex("b", "y")];
        let preds = BTreeMap::from([("a".to_string(), "x".to_string()), ("z".to_string(), "y".to_string())]);
        match accuracy_by_id(meta(), &data, &preds) {
            Err(EvalError::IdMismatch { missing, unknown }) => {
                assert_eq!(missing, vec!["b"]);
                assert_eq!(unknown, vec!["z"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn table_layout() {
        let mk = |method: &str, dataset: &str, top_k, accuracy| EvalReport {
            method: method.into(),
            dataset: dataset.into(),
            top_k,
            n: 1,
            matched: 0,
            accuracy,
            per_question: vec![],
        };
        let t = render_accuracy_table(&[mk("vanilla_rag", "webq", 3, 0.5), mk("persona_rag", "webq", 3, 0.634), mk("persona_rag", "nq", 5, 1.0)]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "| Method | nq top-5 | webq top-3 |");
        assert_eq!(lines[2], "| vanilla_rag | - | 50.00 |");
        assert_eq!(lines[3], "| persona_rag | 100.00 | 63.40 |");
    }
}
