use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::num::Scalar;

use super::bm25::{idf, tf_weight, Bm25Params};
use super::{tokenize, Document, RetrievalError, ScoredPassage};

/// One (document, term frequency) entry of a posting list. `doc` is the
/// document's position in the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

/// Immutable inverted index over a document collection.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    pub(super) params: Bm25Params<f64>,
    pub(super) docs: Vec<Document>,
    pub(super) doc_lengths: Vec<u32>,
    pub(super) postings: BTreeMap<String, Vec<Posting>>,
    pub(super) positions: HashMap<String, u32>,
    pub(super) total_len: u64,
}

pub fn build_index<I>(documents: I, params: Bm25Params<f64>) -> Result<InvertedIndex, RetrievalError>
where
    I: IntoIterator<Item = Document>,
{
    params.validate()?;
    let mut index = InvertedIndex {
        params,
        docs: Vec::new(),
        doc_lengths: Vec::new(),
        postings: BTreeMap::new(),
        positions: HashMap::new(),
        total_len: 0,
    };
    for doc in documents {
        if doc.text.trim().is_empty() {
            return Err(RetrievalError::EmptyText(doc.id));
        }
        if index.positions.contains_key(&doc.id) {
            return Err(RetrievalError::DuplicateId(doc.id));
        }
        let position = u32::try_from(index.docs.len()).expect("corpus exceeds u32::MAX documents");
        let terms = tokenize(&doc.text);
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for term in &terms {
            *counts.entry(term.clone()).or_default() += 1;
        }
        for (term, tf) in counts {
            index.postings.entry(term).or_default().push(Posting { doc: position, tf });
        }
        index.doc_lengths.push(terms.len() as u32);
        index.total_len += terms.len() as u64;
        index.positions.insert(doc.id.clone(), position);
        index.docs.push(doc);
    }
    Ok(index)
}

impl InvertedIndex {
    pub fn params(&self) -> Bm25Params<f64> {
        self.params
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Mean document length in tokens; 0 for an empty index.
    pub fn avg_doc_len(&self) -> f64 {
        if self.docs.is_empty() {
            0.0
        } else {
            self.total_len as f64 / self.docs.len() as f64
        }
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn document(&self, id: &str) -> Option<&Document> {
        self.positions.get(id).map(|&p| &self.docs[p as usize])
    }

    pub fn doc_len(&self, id: &str) -> Option<usize> {
        self.positions.get(id).map(|&p| self.doc_lengths[p as usize] as usize)
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn term_freq(&self, term: &str, id: &str) -> usize {
        let Some(&pos) = self.positions.get(id) else {
            return 0;
        };
        self.postings
            .get(term)
            .and_then(|list| list.binary_search_by_key(&pos, |p| p.doc).ok().map(|i| list[i].tf as usize))
            .unwrap_or(0)
    }

    /// Posting lists keyed by term, with document ids resolved.
    pub fn postings(&self) -> impl Iterator<Item = (&str, impl Iterator<Item = (&str, u32)> + '_)> + '_ {
        self.postings.iter().map(move |(term, list)| {
            (
                term.as_str(),
                list.iter().map(move |p| (self.docs[p.doc as usize].id.as_str(), p.tf)),
            )
        })
    }

    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    /// BM25 score of one document for already-tokenized query terms.
    pub fn bm25_score<F: Scalar>(&self, query_terms: &[String], doc_id: &str) -> Result<F, RetrievalError> {
        let pos = *self
            .positions
            .get(doc_id)
            .ok_or_else(|| RetrievalError::UnknownDocument(doc_id.to_string()))?;
        let params: Bm25Params<F> = self.params.cast();
        let avgdl = F::of_f64(self.avg_doc_len());
        let dl = self.doc_lengths[pos as usize] as usize;
        let mut score = F::zero();
        for term in unique_terms(query_terms) {
            let Some(list) = self.postings.get(term) else {
                continue;
            };
            if let Ok(i) = list.binary_search_by_key(&pos, |p| p.doc) {
                let w = idf::<F>(list.len(), self.docs.len());
                score = score + w * tf_weight(list[i].tf as usize, dl, avgdl, &params);
            }
        }
        Ok(score)
    }

    /// Top-`k` documents for `query`, best first. Equal scores are ordered by
    /// ascending document id. Documents matching no query term are still
    /// ranked (with score 0) so `k >= doc_count` returns the whole corpus.
    pub fn search<F: Scalar>(&self, query: &str, k: usize) -> Result<Vec<ScoredPassage<F>>, RetrievalError> {
        if self.docs.is_empty() {
            return Err(RetrievalError::EmptyIndex);
        }
        if k == 0 {
            return Err(RetrievalError::InvalidTopK);
        }
        let terms = tokenize(query);
        if terms.is_empty() {
            return Err(RetrievalError::EmptyQuery);
        }
        let params: Bm25Params<F> = self.params.cast();
        let avgdl = F::of_f64(self.avg_doc_len());
        let mut scores = vec![F::zero(); self.docs.len()];
        for term in unique_terms(&terms) {
            let Some(list) = self.postings.get(term) else {
                continue;
            };
            let w = idf::<F>(list.len(), self.docs.len());
            for p in list {
                let dl = self.doc_lengths[p.doc as usize] as usize;
                let s = &mut scores[p.doc as usize];
                *s = *s + w * tf_weight(p.tf as usize, dl, avgdl, &params);
            }
        }

        let mut order: Vec<u32> = (0..self.docs.len() as u32).collect();
        let cmp = |a: &u32, b: &u32| -> Ordering {
            let (sa, sb) = (scores[*a as usize], scores[*b as usize]);
            sb.partial_cmp(&sa)
                .unwrap_or(Ordering::Equal)
                .then_with(|| self.docs[*a as usize].id.cmp(&self.docs[*b as usize].id))
        };
        let k = k.min(order.len());
        if k < order.len() {
            order.select_nth_unstable_by(k - 1, cmp);
            order.truncate(k);
        }
        order.sort_unstable_by(cmp);

        Ok(order
            .into_iter()
            .enumerate()
            .map(|(i, pos)| {
                let doc = &self.docs[pos as usize];
                ScoredPassage {
                    doc_id: doc.id.clone(),
                    rank: i + 1,
                    score: scores[pos as usize],
                    title: doc.title.clone(),
                    text: doc.text.clone(),
                }
            })
            .collect())
    }
}

fn unique_terms(terms: &[String]) -> impl Iterator<Item = &str> {
    let mut seen = std::collections::HashSet::new();
    terms.iter().map(String::as_str).filter(move |t| seen.insert(*t))
}
