//! Okapi BM25 term weighting.
//!
//! `score(q, d) = Σ_t idf(t) · tf·(k1 + 1) / (tf + k1·(1 − b + b·|d|/avgdl))`
//! with the non-negative `idf(t) = ln(1 + (N − df + 0.5) / (df + 0.5))`.

use serde::{Deserialize, Serialize};

use crate::num::Scalar;

use super::RetrievalError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params<F = f64> {
    pub k1: F,
    pub b: F,
}

impl<F: Scalar> Bm25Params<F> {
    pub fn new(k1: F, b: F) -> Result<Self, RetrievalError> {
        let params = Self { k1, b };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), RetrievalError> {
        let ok_k1 = self.k1.is_finite() && self.k1 >= F::zero();
        let ok_b = self.b >= F::zero() && self.b <= F::one();
        if ok_k1 && ok_b {
            Ok(())
        } else {
            Err(RetrievalError::InvalidParams(format!(
                "k1 must be finite and >= 0, b must lie in [0, 1] (got k1={}, b={})",
                self.k1, self.b
            )))
        }
    }

    /// Re-expresses the parameters in another scalar type.
    pub fn cast<G: Scalar>(&self) -> Bm25Params<G> {
        Bm25Params {
            k1: G::from(self.k1).expect("finite parameter"),
            b: G::from(self.b).expect("finite parameter"),
        }
    }
}

impl<F: Scalar> Default for Bm25Params<F> {
    fn default() -> Self {
        Self {
            k1: F::of_f64(1.2),
            b: F::of_f64(0.75),
        }
    }
}

/// Inverse document frequency; never negative for `df <= doc_count`.
pub fn idf<F: Scalar>(doc_freq: usize, doc_count: usize) -> F {
    debug_assert!(doc_freq <= doc_count);
    let x = (F::of_count(doc_count - doc_freq) + F::half()) / (F::of_count(doc_freq) + F::half());
    x.ln_1p()
}

/// Saturated term-frequency component for one (term, document) pair.
pub fn tf_weight<F: Scalar>(
    term_freq: usize,
    doc_len: usize,
    avg_doc_len: F,
    params: &Bm25Params<F>,
) -> F {
    if term_freq == 0 {
        return F::zero();
    }
    let tf = F::of_count(term_freq);
    let norm = F::one() - params.b + params.b * F::of_count(doc_len) / avg_doc_len;
    tf * (params.k1 + F::one()) / (tf + params.k1 * norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = Bm25Params::<f64>::default();
        assert_eq!((p.k1, p.b), (1.2, 0.75));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(Bm25Params::new(-0.1, 0.5).is_err());
        assert!(Bm25Params::new(1.2, 1.5).is_err());
        assert!(Bm25Params::new(f64::NAN, 0.5).is_err());
        assert!(Bm25Params::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn single_document_hand_value() {
        // N = 1, df = 1, tf = 1, |d| = avgdl.
        let p = Bm25Params::<f64>::default();
        let s = idf::<f64>(1, 1) * tf_weight(1, 4, 4.0, &p);
        assert!((idf::<f64>(1, 1) - (4.0f64 / 3.0).ln()).abs() < 1e-15);
        // tf·(k1+1)/(tf+k1) = 2.2/2.2, so the score collapses to ln(4/3).
        assert!((s - 0.287_682_072_451_780_85).abs() < 1e-12, "{s}");
    }

    #[test]
    fn idf_non_negative_everywhere() {
        for n in 0..60 {
            for df in 0..=n {
                assert!(idf::<f64>(df, n) >= 0.0);
                assert!(idf::<f32>(df, n) >= 0.0);
            }
        }
    }

    #[test]
    fn f32_agrees_with_f64() {
        let p64 = Bm25Params::<f64>::default();
        let p32: Bm25Params<f32> = p64.cast();
        let a = idf::<f64>(3, 40) * tf_weight(2, 9, 7.5, &p64);
        let b = idf::<f32>(3, 40) * tf_weight(2, 9, 7.5f32, &p32);
        assert!((a - b as f64).abs() < 1e-5);
    }
}
