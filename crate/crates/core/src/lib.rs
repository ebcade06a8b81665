//! User-centric multi-agent retrieval-augmented generation.
//!
//! The crate is organised around five pieces: [`retrieval`] (BM25 over an
//! inverted index), [`llm`] (chat-completion clients, real and scripted),
//! [`prompts`] (template registry and rendering), [`pipeline`] (the agent
//! workflow and the baseline methods) and [`eval`] (datasets and metrics).
//!
//! Scoring and metric code is generic over [`Scalar`]; the aliases below fix
//! the scalar for everyday use.

pub mod eval;
pub mod llm;
pub mod num;
pub mod pipeline;
pub mod prompts;
pub mod retrieval;

pub use num::Scalar;

/// Default scalar for scores and metrics.
pub type Score = f64;

pub type Bm25Params = retrieval::Bm25Params<Score>;
pub type ScoredPassage = retrieval::ScoredPassage<Score>;

pub type Bm25Params32 = retrieval::Bm25Params<f32>;
pub type ScoredPassage32 = retrieval::ScoredPassage<f32>;
