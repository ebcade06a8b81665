use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{Document, RetrievalError};

/// Reads a newline-delimited JSON corpus (`{"id", "title", "text"}` per line).
/// Blank lines are skipped.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Document>, RetrievalError> {
    read_corpus(BufReader::new(File::open(path)?))
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<Document>, RetrievalError> {
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| RetrievalError::MalformedCorpus {
            line: i + 1,
            message: e.to_string(),
        })?;
        if doc.text.trim().is_empty() {
            return Err(RetrievalError::MalformedCorpus {
                line: i + 1,
                message: format!("document `{}` has empty text", doc.id),
            });
        }
        docs.push(doc);
    }
    Ok(docs)
}
