//! QA datasets: JSONL records `{"id", "question", "answers": [...]}`.

use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAExample {
    pub id: String,
    pub question: String,
    #[serde(rename = "answers")]
    pub gold_answers: Vec<String>,
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<QAExample>, EvalError> {
    let file = std::fs::File::open(path)?;
    read_dataset(std::io::BufReader::new(file))
}

/// Parses JSONL, skipping blank lines. Errors carry the 1-based line number.
pub fn read_dataset(reader: impl BufRead) -> Result<Vec<QAExample>, EvalError> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| EvalError::MalformedRecord { line: line_no, message };
        let ex: QAExample = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        if ex.id.is_empty() {
            return Err(bad("empty id".into()));
        }
        if ex.question.trim().is_empty() {
            return Err(bad("empty question".into()));
        }
        if ex.gold_answers.is_empty() {
            return Err(bad("no gold answers".into()));
        }
        if !seen.insert(ex.id.clone()) {
            return Err(bad(format!("duplicate id {:?}", ex.id)));
        }
        out.push(ex);
    }
    Ok(out)
}

/// Draws `n` distinct questions without replacement. The draw depends only on
/// `seed` and the dataset order; the result keeps draw order.
pub fn sample(dataset: &[QAExample], n: usize, seed: u64) -> Result<Vec<QAExample>, EvalError> {
    if n > dataset.len() {
        return Err(EvalError::SampleTooLarge { requested: n, available: dataset.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    for i in 0..n {
        let j = rng.random_range(i..order.len());
        order.swap(i, j);
    }
    Ok(order[..n].iter().map(|&i| dataset[i].clone()).collect())
}

/// Sample size as a percentage of the dataset, rounded to one decimal.
pub fn sampling_rate(n: usize, total: usize) -> String {
    if total == 0 {
        return "0.0%".into();
    }
    format!("{:.1}%", n as f64 * 100.0 / total as f64)
}

/// Converts a tab-separated `question<TAB>answers` file, where answers is a
/// JSON or Python-style list of strings, into dataset records with ids
/// `{prefix}-{n}` (n counts from 0 over non-blank lines).
pub fn convert_qa_tsv(reader: impl BufRead, prefix: &str) -> Result<Vec<QAExample>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: &str| EvalError::MalformedRecord { line: i + 1, message: message.into() };
        let (question, answers) = line.rsplit_once('\t').ok_or_else(|| bad("expected question<TAB>answers"))?;
        let answers = parse_string_list(answers.trim()).ok_or_else(|| bad("answers are not a list of strings"))?;
        if question.trim().is_empty() || answers.is_empty() {
            return Err(bad("empty question or answer list"));
        }
        out.push(QAExample {
            id: format!("{prefix}-{}", out.len()),
            question: question.trim().to_string(),
            gold_answers: answers,
        });
    }
    Ok(out)
}

fn parse_string_list(s: &str) -> Option<Vec<String>> {
    if let Ok(list) = serde_json::from_str::<Vec<String>>(s) {
        return Some(list);
    }
    let mut chars = s.strip_prefix('[')?.strip_suffix(']')?.chars().peekable();
    let mut out = Vec::new();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let Some(quote) = chars.next() else { break };
        if quote != '\'' && quote != '"' {
            return None;
        }
        let mut item = String::new();
        loop {
            match chars.next()? {
                '\\' => item.push(chars.next()?),
                c if c == quote => break,
                c => item.push(c),
            }
        }
        out.push(item);
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        match chars.next() {
            Some(',') => continue,
            None => break,
            Some(_) => return None,
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(n: usize) -> Vec<QAExample> {
        (0..n)
            .map(|i| QAExample { id: format!("q{i}"), question: format!("question {i}"), gold_answers: vec![format!("a{i}")] })
            .collect()
    }

    #[test]
    fn parse_records_and_errors() {
        let ok = "{\"id\":\"a\",\"question\":\"Who?\",\"answers\":[\"x\"]}\n\n";
        assert_eq!(read_dataset(ok.as_bytes()).unwrap().len(), 1);
        let bad = "{\"id\":\"a\",\"question\":\"Who?\",\"answers\":[\"x\"]}\n{\"id\":\"b\"}\n";
        assert!(matches!(read_dataset(bad.as_bytes()), Err(EvalError::MalformedRecord { line: 2, .. })));
        let dup = "{\"id\":\"a\",\"question\":\"q\",\"answers\":[\"x\"]}\n{\"id\":\"a\",\"question\":\"q\",\"answers\":[\"x\"]}\n";
        assert!(matches!(read_dataset(dup.as_bytes()), Err(EvalError::MalformedRecord { line: 2, .. })));
    }

    #[test]
    fn sample_is_reproducible_and_distinct() {
        let data = synthetic(100);
        let a = sample(&data, 10, 3).unwrap();
        assert_eq!(a, sample(&data, 10, 3).unwrap());
        assert_ne!(a, sample(&data, 10, 4).unwrap());
        let ids: HashSet<_> = a.iter().map(|e| &e.id).collect();
        assert_eq!(ids.len(), 10);
        assert_eq!(sample(&data, 100, 1).unwrap().len(), 100);
        assert!(sample(&data, 101, 1).is_err());
    }

    #[test]
    fn rate() {
        assert_eq!(sampling_rate(500, 8757), "5.7%");
        assert_eq!(sampling_rate(500, 3610), "13.9%");
    }

    #[test]
    fn tsv_conversion() {
        let input = "who stole it?\t['Vincenzo Peruggia', \"Peruggia\"]\nwhat year\t[\"1911\"]\n";
        let out = convert_qa_tsv(input.as_bytes(), "nq").unwrap();
        assert_eq!(out[0].id, "nq-0");
        assert_eq!(out[0].gold_answers, vec!["Vincenzo Peruggia", "Peruggia"]);
        assert_eq!(out[1].gold_answers, vec!["1911"]);
        assert!(convert_qa_tsv("no tab here".as_bytes(), "x").is_err());
        assert_eq!(parse_string_list("['it\\'s']").unwrap(), vec!["it's"]);
    }
}
