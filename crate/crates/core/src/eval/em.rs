/// True iff some gold answer, lowercased, occurs in the lowercased prediction.
/// No other normalisation is applied.
pub fn string_em<S: AsRef<str>>(prediction: &str, gold_answers: &[S]) -> bool {
    let prediction = prediction.to_lowercase();
    gold_answers
        .iter()
        .any(|gold| prediction.contains(&gold.as_ref().to_lowercase()))
}

#[cfg(test)]
mod tests {
    use super::string_em;

    #[test]
    fn containment_and_case() {
        assert!(string_em(
            "Vincenzo Peruggia, a Louvre employee, stole the Mona Lisa from the Louvre Museum on August 21, 1911.",
            &["Vincenzo Peruggia"]
        ));
        assert!(!string_em("unknown", &["Paris"]));
        assert!(string_em("PARIS, France", &["paris"]));
        assert!(!string_em("anything", &[] as &[&str]));
    }
}
