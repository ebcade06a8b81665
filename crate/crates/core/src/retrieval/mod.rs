//! Sparse retrieval: corpus ingestion, an in-memory inverted index with BM25
//! scoring, top-k search and a versioned on-disk index format.

mod bm25;
mod corpus;
mod index;
mod persist;
mod tokenize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bm25::{idf, tf_weight, Bm25Params};
pub use corpus::{load_corpus, read_corpus};
pub use index::{build_index, InvertedIndex, Posting};
pub use persist::{load_index, read_index, save_index, write_index, INDEX_FORMAT_VERSION, INDEX_MAGIC};
pub use tokenize::tokenize;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("document `{0}` has empty text")]
    EmptyText(String),
    #[error("invalid BM25 parameters: {0}")]
    InvalidParams(String),
    #[error("index contains no documents")]
    EmptyIndex,
    #[error("query contains no searchable terms")]
    EmptyQuery,
    #[error("k must be at least 1")]
    InvalidTopK,
    #[error("unknown document id `{0}`")]
    UnknownDocument(String),
    #[error("corpus line {line}: {message}")]
    MalformedCorpus { line: usize, message: String },
    #[error("unsupported index format: {0}")]
    IndexVersion(String),
    #[error("corrupt index file: {0}")]
    IndexCorrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One corpus unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, title: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            text: text.into(),
        }
    }
}

/// A retrieval hit. Ranks start at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPassage<F = f64> {
    pub doc_id: String,
    pub rank: usize,
    pub score: F,
    pub title: String,
    pub text: String,
}
