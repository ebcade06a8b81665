//! Evaluation: QA datasets and sampling, StringEM accuracy, corpus BLEU-2
//! and readability statistics, plus report assembly.

mod bleu;
mod dataset;
mod em;
mod readability;
mod report;

use thiserror::Error;

pub use bleu::bleu2;
pub use dataset::{convert_qa_tsv, load_dataset, read_dataset, sample, sampling_rate, QAExample};
pub use em::string_em;
pub use readability::{avg_sentence_length, avg_syllables_per_word, count_syllables, min_max_normalize, sentences};
pub use report::{
    accuracy, accuracy_by_id, render_accuracy_table, similarity, EvalReport, QuestionResult, ReportMeta,
    SimilarityReport,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{what}: expected {expected} items, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("ids do not line up; missing predictions: {missing:?}; unknown ids: {unknown:?}")]
    IdMismatch { missing: Vec<String>, unknown: Vec<String> },
    #[error("dataset line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("cannot sample {requested} questions from a dataset of {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
