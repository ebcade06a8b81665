use std::collections::BTreeMap;
use std::path::Path;

use persona_rag::prompts::{render, scan_slots, Bindings, Origin, PromptError, Registry, TemplateId};
use proptest::prelude::*;

fn golden_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden"))
}

fn canonical_bindings() -> Bindings {
    let text = std::fs::read_to_string(golden_dir().join("bindings.json")).unwrap();
    let map: BTreeMap<String, String> = serde_json::from_str(&text).unwrap();
    map.into_iter().collect()
}

fn read_golden(name: &str) -> String {
    std::fs::read_to_string(golden_dir().join(format!("{name}.txt")))
        .unwrap()
        .replace("\r\n", "\n")
}

#[test]
fn published_templates_match_goldens() {
    let registry = Registry::builtin();
    let all = canonical_bindings();
    let mut checked = 0;
    for t in registry.by_origin(Origin::Paper) {
        let bindings: Bindings = t
            .required
            .iter()
            .map(|slot| (slot.clone(), all.get(slot).unwrap().to_string()))
            .collect();
        let rendered = render(t, &bindings).unwrap();
        assert_eq!(format!("{rendered}\n"), read_golden(&t.name), "template {}", t.name);
        checked += 1;
    }
    assert_eq!(checked, 8);
}

#[test]
fn spot_check_anchors() {
    let r = Registry::builtin();
    assert!(r.template(TemplateId::UserProfile).body.contains("help the User Profile Agent"));
    assert!(r
        .template(TemplateId::GlobalMessagePool)
        .body
        .contains("maintaining and enriching the Global Message Pool"));
    assert!(r
        .template(TemplateId::CognitiveAgent)
        .body
        .contains("Verify the reasoning process in the initial response"));
    for t in r.iter() {
        let holders: Vec<&str> = r.iter().filter(|o| o.body.contains(&t.anchor)).map(|o| o.name.as_str()).collect();
        assert_eq!(holders, vec![t.name.as_str()], "anchor of {} must be unique", t.name);
    }
}

#[test]
fn template_files_have_unix_endings_and_one_trailing_newline() {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/templates"));
    for id in TemplateId::ALL {
        let raw = std::fs::read(dir.join(format!("{}.txt", id.as_str()))).unwrap();
        assert!(!raw.contains(&b'\r'), "{}", id.as_str());
        assert!(raw.ends_with(b"\n") && !raw.ends_with(b"\n\n"), "{}", id.as_str());
    }
}

#[test]
fn from_dir_matches_builtin() {
    let loaded = Registry::from_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/templates")).unwrap();
    assert_eq!(loaded.checksums(), Registry::builtin().checksums());
}

#[test]
fn missing_and_unknown_placeholders() {
    let t = Registry::builtin().template(TemplateId::ChainOfThought);
    let err = render(t, &Bindings::new().with("question", "q")).unwrap_err();
    assert!(matches!(err, PromptError::MissingPlaceholder(_)), "{err:?}");
    let err = render(
        t,
        &Bindings::new().with("question", "q").with("passages", "p").with("extra", "x"),
    )
    .unwrap_err();
    assert!(matches!(err, PromptError::UnknownPlaceholder(_)), "{err:?}");
}

fn text() -> impl Strategy<Value = String> {
    "[A-Za-z0-9 ,.?{}_\n]{0,40}"
}

proptest! {
    #[test]
    fn every_bound_value_appears_verbatim(q in text(), p in text()) {
        let t = Registry::builtin().template(TemplateId::VanillaRag);
        let out = render(t, &Bindings::new().with("question", q.as_str()).with("passages", p.as_str())).unwrap();
        prop_assert!(out.contains(&q));
        prop_assert!(out.contains(&p));
    }

    #[test]
    fn rendering_is_injective_in_the_question(a in text(), b in text()) {
        prop_assume!(a != b);
        let t = Registry::builtin().template(TemplateId::VanillaQa);
        let ra = render(t, &Bindings::new().with("question", a.as_str())).unwrap();
        let rb = render(t, &Bindings::new().with("question", b.as_str())).unwrap();
        prop_assert_ne!(ra, rb);
    }

    #[test]
    fn slots_round_trip(names in proptest::collection::btree_set("[a-z][a-z0-9_]{0,8}", 1..5)) {
        let body: String = names.iter().map(|n| format!("<{{{n}}}>")).collect();
        let found = scan_slots(&body);
        prop_assert_eq!(found, names.iter().cloned().collect::<std::collections::BTreeSet<_>>());
    }
}
