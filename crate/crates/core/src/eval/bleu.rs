//! Corpus-level BLEU-2.
//!
//! Uniform weights over modified 1- and 2-gram precision, brevity penalty
//! `min(1, exp(1 - r/c))`. An order with no matched n-gram uses add-one
//! smoothing, `1 / (count + 1)`, in place of its zero precision.

use std::collections::HashMap;

use crate::num::Scalar;
use crate::retrieval::tokenize;

use super::EvalError;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// BLEU-2 of `candidates` against position-aligned `references`, using the
/// retrieval tokenizer. Always within `[0, 1]`.
pub fn bleu2<F: Scalar, S: AsRef<str>, T: AsRef<str>>(candidates: &[S], references: &[T]) -> Result<F, EvalError> {
    if candidates.len() != references.len() {
        return Err(EvalError::LengthMismatch {
            what: "references",
            expected: candidates.len(),
            got: references.len(),
        });
    }
    if candidates.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut matched = [0usize; 2];
    let mut total = [0usize; 2];
    let (mut cand_len, mut ref_len) = (0usize, 0usize);
    for (cand, reference) in candidates.iter().zip(references) {
        let c = tokenize(cand.as_ref());
        let r = tokenize(reference.as_ref());
        cand_len += c.len();
        ref_len += r.len();
        for n in 1..=2 {
            let cc = ngram_counts(&c, n);
            let rc = ngram_counts(&r, n);
            matched[n - 1] += cc.iter().map(|(g, k)| (*k).min(*rc.get(g).unwrap_or(&0))).sum::<usize>();
            total[n - 1] += cc.values().sum::<usize>();
        }
    }
    if cand_len == 0 {
        return Ok(if ref_len == 0 { F::one() } else { F::zero() });
    }
    let precision = |n: usize| -> F {
        if matched[n] > 0 {
            F::of_count(matched[n]) / F::of_count(total[n])
        } else {
            F::one() / F::of_count(total[n] + 1)
        }
    };
    let log_mean = (precision(0).ln() + precision(1).ln()) * F::half();
    let brevity = if cand_len > ref_len {
        F::one()
    } else {
        (F::one() - F::of_count(ref_len) / F::of_count(cand_len)).exp()
    };
    Ok((brevity * log_mean.exp()).min(F::one()))
}
