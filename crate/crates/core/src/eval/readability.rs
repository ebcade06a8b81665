//! Sentence-length and syllable statistics.

use crate::num::Scalar;
use crate::retrieval::tokenize;

/// Splits on `.`, `!` or `?` followed by whitespace or end of text. Pieces
/// without any word are dropped.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let boundary = chars.peek().is_none_or(|&(_, next)| next.is_whitespace());
            if boundary {
                out.push(&text[start..i]);
                start = i + c.len_utf8();
            }
        }
    }
    out.push(&text[start..]);
    out.into_iter().filter(|s| !tokenize(s).is_empty()).collect()
}

/// Words per sentence over the whole corpus; 0 when there are no sentences.
pub fn avg_sentence_length<F: Scalar, S: AsRef<str>>(texts: &[S]) -> F {
    let (mut words, mut count) = (0usize, 0usize);
    for text in texts {
        for s in sentences(text.as_ref()) {
            words += tokenize(s).len();
            count += 1;
        }
    }
    ratio(words, count)
}

/// Syllables per word over the whole corpus; 0 when there are no words.
pub fn avg_syllables_per_word<F: Scalar, S: AsRef<str>>(texts: &[S]) -> F {
    let (mut syllables, mut words) = (0usize, 0usize);
    for text in texts {
        for w in tokenize(text.as_ref()) {
            syllables += count_syllables(&w);
            words += 1;
        }
    }
    ratio(syllables, words)
}

fn ratio<F: Scalar>(num: usize, den: usize) -> F {
    if den == 0 {
        F::zero()
    } else {
        F::of_count(num) / F::of_count(den)
    }
}

fn is_consonant(c: char) -> bool {
    c.is_ascii_alphabetic() && !matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Heuristic syllable count of one word.
///
/// Counts vowel groups (`aeiou`, plus `y` except word-initially). `u` after
/// `q` is not a vowel, a `y` closes its group, and `u` followed by `a` starts
/// a new one. When more than one group is found, one silent ending is
/// removed: a final `e` (kept for consonant + `le` and for `ee`), `-ed` not
/// after `t`/`d`, or `-es` after a consonant other than `s x z ch sh g c`.
/// The result is at least 1.
pub fn count_syllables(word: &str) -> usize {
    let w: Vec<char> = word.to_lowercase().chars().collect();
    if !w.iter().any(|c| c.is_alphabetic()) {
        return 1;
    }
    let is_vowel = |i: usize| match w[i] {
        'y' => i > 0,
        'u' => i == 0 || w[i - 1] != 'q',
        c => matches!(c, 'a' | 'e' | 'i' | 'o'),
    };
    let mut groups = 0;
    let mut prev = false;
    for i in 0..w.len() {
        let v = is_vowel(i);
        if v {
            let split = prev && (w[i - 1] == 'y' || (w[i - 1] == 'u' && w[i] == 'a'));
            if !prev || split {
                groups += 1;
            }
        }
        prev = v;
    }
    if groups > 1 {
        let n = w.len();
        let ends = |suffix: &str| word.to_lowercase().ends_with(suffix);
        let before = |k: usize| if n > k { Some(w[n - 1 - k]) } else { None };
        let silent = if ends("e") {
            let le_kept = ends("le") && before(2).is_some_and(is_consonant);
            !le_kept && !ends("ee")
        } else if ends("ed") {
            before(2).is_some_and(|c| is_consonant(c) && c != 't' && c != 'd')
        } else if ends("es") {
            before(2).is_some_and(|c| is_consonant(c) && !matches!(c, 's' | 'x' | 'z' | 'g' | 'c'))
                && !ends("ches")
                && !ends("shes")
        } else {
            false
        };
        if silent {
            groups -= 1;
        }
    }
    groups.max(1)
}

/// Rescales values to `[0, 1]`; all-equal input maps to zeros.
pub fn min_max_normalize<F: Scalar>(values: &[F]) -> Vec<F> {
    let Some(min) = values.iter().copied().reduce(F::min) else {
        return Vec::new();
    };
    let max = values.iter().copied().fold(min, F::max);
    let span = max - min;
    values
        .iter()
        .map(|&v| if span > F::zero() { (v - min) / span } else { F::zero() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentence_splitting() {
        assert_eq!(sentences("Hello world. Bye."), vec!["Hello world", " Bye"]);
        assert_eq!(sentences("Version 3.5 is out!Really? Yes"), vec!["Version 3.5 is out!Really", " Yes"]);
        assert!(sentences("").is_empty());
        assert!(sentences("...").is_empty());
    }

    #[test]
    fn average_sentence_length() {
        assert_eq!(avg_sentence_length::<f64, _>(&["Hello world. Bye."]), 1.5);
        assert_eq!(avg_sentence_length::<f64, _>(&[""]), 0.0);
        assert_eq!(avg_sentence_length::<f64, &str>(&[]), 0.0);
        assert_eq!(avg_syllables_per_word::<f64, _>(&[""]), 0.0);
    }

    #[test]
    fn syllable_examples() {
        assert_eq!(count_syllables("cat"), 1);
        assert_eq!(count_syllables("table"), 2);
        assert_eq!(count_syllables("the"), 1);
        assert_eq!(count_syllables("make"), 1);
        assert_eq!(count_syllables("1911"), 1);
        assert_eq!(count_syllables("Closed"), 1);
        assert_eq!(count_syllables("arrested"), 3);
        assert_eq!(count_syllables("quality"), 3);
    }

    #[test]
    fn normalization() {
        assert_eq!(min_max_normalize(&[2.0, 4.0, 3.0]), vec![0.0, 1.0, 0.5]);
        assert_eq!(min_max_normalize(&[5.0f64, 5.0]), vec![0.0, 0.0]);
        assert!(min_max_normalize::<f64>(&[]).is_empty());
    }
}
