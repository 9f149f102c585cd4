//! Checks the bundled datasets against expectations written by
//! `scripts/gen_fixtures.py`, which computes them without this crate.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use textsparql_core::evaluator::evaluate_checkpoint;
use textsparql_core::{
    Backend, Dataset, EvalContext, EvalOptions, OutcomeKind, QueryMode, Split, TranslatorHandle,
};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

fn load(name: &str) -> (Arc<Dataset>, Backend) {
    let ds = Dataset::load(&fixture(&format!("{name}/manifest.json"))).unwrap();
    let graph = ds
        .load_graph()
        .unwrap()
        .expect("fixture datasets are local");
    (Arc::new(ds), Backend::Local(Arc::new(graph)))
}

fn all_gold_nonempty(name: &str) {
    let (ds, backend) = load(name);
    let ctx = EvalContext::for_all_records(ds.clone(), backend, EvalOptions::default()).unwrap();
    for r in ds.records.iter().filter(|r| !r.unsupported) {
        let table = match ctx.gold(&r.id) {
            Some(Ok(t)) => t,
            other => panic!("{}: gold failed: {other:?}", r.id),
        };
        assert!(!table.is_empty_bindings(), "{}: gold result is empty", r.id);
        let values = table.value_strings();
        assert_ne!(values, ["false"], "{}: gold answer is false", r.id);
        if ds.parse_gold(r).unwrap().projects_only_count() {
            assert_ne!(values, ["0"], "{}: gold count is zero", r.id);
        }
    }
}

#[test]
fn organizational_shape() {
    let (ds, _) = load("organizational");
    assert_eq!(ds.records.len(), 69);
    assert_eq!(ds.count(Split::Train), 53);
    assert_eq!(ds.count(Split::Test), 16);
    assert_eq!(ds.query_mode, QueryMode::AmbientPrefixes);
    let bob = ds
        .records
        .iter()
        .find(|r| r.question == "What is the surname of Bob Tanner?")
        .unwrap();
    assert_eq!(bob.split, Split::Test);
    assert_eq!(
        bob.gold_query,
        "SELECT ?surname WHERE { :bob foaf:surname ?surname . }"
    );
    all_gold_nonempty("organizational");
}

#[test]
fn coypu_shape() {
    let (ds, _) = load("coypu");
    assert_eq!(ds.records.len(), 131);
    assert_eq!(ds.count(Split::Train), 105);
    assert_eq!(ds.count(Split::Test), 26);
    let port = ds
        .records
        .iter()
        .find(|r| r.question == "What is the latitude of the port with the ID 'AUDKB'?")
        .unwrap();
    assert_eq!(port.split, Split::Test);
    all_gold_nonempty("coypu");
}

#[test]
fn qald_shape() {
    let (ds, _) = load("qald10");
    assert_eq!(ds.records.len(), 394);
    assert_eq!(ds.count(Split::Test), 394);
    assert_eq!(ds.query_mode, QueryMode::SelfContained);
    assert!(ds.unsupported_count() > 0);
    for r in &ds.records {
        assert_eq!(ds.parse_gold(r).is_err(), r.unsupported, "{}", r.id);
    }
    all_gold_nonempty("qald10");
}

#[test]
fn qald_transcript_reproduces_outcome_breakdown() {
    let (ds, backend) = load("qald10");
    let ctx = EvalContext::new(
        ds.clone(),
        backend,
        EvalOptions {
            jobs: 4,
            ..EvalOptions::default()
        },
    )
    .unwrap();
    let spec = format!(
        "m2m100=transcript:{}",
        fixture("qald10/transcripts/m2m100.ndjson").display()
    );
    let handle = TranslatorHandle::parse_spec(&spec).unwrap();
    let mut tr = handle.start(&ds).unwrap();
    let eval = evaluate_checkpoint(
        &ctx,
        tr.as_mut(),
        &handle.name,
        "R01",
        1,
        &mut std::io::sink(),
    )
    .unwrap();

    let expected: BTreeMap<String, String> = serde_json::from_str(
        &std::fs::read_to_string(fixture("qald10/expected_outcomes.json")).unwrap(),
    )
    .unwrap();
    for (id, outcome) in &eval.outcomes {
        assert_eq!(
            outcome.kind.as_str(),
            expected[id],
            "{id}: {}",
            outcome.detail
        );
    }
    let tally = eval.tally();
    let n = |k| tally.get(&k).copied().unwrap_or(0);
    assert_eq!(
        n(OutcomeKind::ParseError) + n(OutcomeKind::UnsupportedFeature),
        290
    );
    assert_eq!(n(OutcomeKind::EmptyMismatch), 51);
    assert_eq!(n(OutcomeKind::CountZeroOnEmpty), 50);
    assert_eq!(n(OutcomeKind::WrongBindings), 3);
    assert_eq!(n(OutcomeKind::Correct), 0);
}

#[test]
fn recorded_session_matches_expected_curves() {
    let (ds, backend) = load("organizational");
    let ctx = EvalContext::new(ds.clone(), backend, EvalOptions::default()).unwrap();
    let mut got = String::from("model,run,epoch,correct_count\n");
    for run in ["R01", "R02"] {
        let path = fixture(&format!("organizational/transcripts/session-{run}.ndjson"));
        let handle =
            TranslatorHandle::parse_spec(&format!("session=transcript:{}", path.display()))
                .unwrap();
        let mut tr = handle.start(&ds).unwrap();
        for epoch in [5, 10, 15] {
            let eval = evaluate_checkpoint(
                &ctx,
                tr.as_mut(),
                "session",
                run,
                epoch,
                &mut std::io::sink(),
            )
            .unwrap();
            got.push_str(&format!("session,{run},{epoch},{}\n", eval.correct_count));
        }
    }
    let want =
        std::fs::read_to_string(fixture("organizational/expected/session-curves.csv")).unwrap();
    assert_eq!(got, want);
}
