use super::*;
use crate::rdf::parse_turtle;

const GRAPH: &str = r#"@prefix : <http://example.org/> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .
:bob foaf:firstName "Bob" ; foaf:surname "Tanner" ; :age 41 .
"#;

fn graph() -> Graph {
    parse_turtle(GRAPH, None).unwrap()
}

fn candidate(query: &str, expected: Value) -> GenerationCandidate {
    GenerationCandidate {
        question: "What is the surname of Bob Tanner?".into(),
        query: query.into(),
        expected,
        verified: false,
        rejection_reason: None,
    }
}

const THREE: &str = r#"[{"question":"What is the surname of Bob Tanner?","query":"SELECT ?s WHERE { :bob foaf:surname ?s }","expected":"Tanner"},
 {"question":"How old is Bob?","query":"SELECT ?a WHERE { :bob :age ?a }","expected":41},
 {"question":"Is Bob called Bob?","query":"ASK { :bob foaf:firstName \"Bob\" }","expected":"true"}]"#;

#[test]
fn replay_with_three_tuples() {
    let mut chat = ReplayChat::from_responses([THREE]);
    let got = generate_candidates(
        &graph(),
        3,
        &mut chat,
        &ChatClientConfig::default(),
        GENERATE_TEMPLATE,
    )
    .unwrap();
    assert_eq!(got.len(), 3);
    assert_eq!(got[1].expected, serde_json::json!(41));
    assert!(got
        .into_iter()
        .map(|c| verify_candidate(c, &graph()))
        .all(|c| c.verified));
}

#[test]
fn malformed_reply_is_retried() {
    let fenced = format!("```json\n{THREE}\n```");
    let mut chat = ReplayChat::from_responses(["Sure! Here are some questions:", fenced.as_str()]);
    let got = generate_candidates(
        &graph(),
        3,
        &mut chat,
        &ChatClientConfig::default(),
        GENERATE_TEMPLATE,
    )
    .unwrap();
    assert_eq!(got.len(), 3);
    assert_eq!(chat.remaining(), 0);

    let mut chat = ReplayChat::from_responses(["no", "still no", "nope"]);
    let got = generate_candidates(
        &graph(),
        3,
        &mut chat,
        &ChatClientConfig::default(),
        GENERATE_TEMPLATE,
    )
    .unwrap();
    assert!(got.is_empty());
}

#[test]
fn prompt_budget() {
    let config = ChatClientConfig {
        triple_cap: 2,
        ..Default::default()
    };
    let mut chat = ReplayChat::from_responses(Vec::<String>::new());
    assert_eq!(
        generate_candidates(&graph(), 1, &mut chat, &config, GENERATE_TEMPLATE),
        Err(DatagenError::PromptBudgetExceeded { triples: 3, cap: 2 })
    );
    let empty = Graph::default();
    let mut chat = ReplayChat::from_responses([
        r#"[{"question":"Who is Carl?","query":"SELECT ?x WHERE { <http://example.org/carl> ?p ?x }","expected":"Carl"}]"#,
    ]);
    let got = generate_candidates(
        &empty,
        1,
        &mut chat,
        &ChatClientConfig::default(),
        GENERATE_TEMPLATE,
    )
    .unwrap();
    let checked = verify_candidate(got[0].clone(), &empty);
    assert_eq!(
        checked.rejection_reason.unwrap().kind,
        RejectionKind::EmptinessMismatch
    );
}

#[test]
fn verification_outcomes() {
    let g = graph();
    let bad = verify_candidate(
        candidate("What is the surname of Bob Tanner?", "Tanner".into()),
        &g,
    );
    assert_eq!(
        bad.rejection_reason.unwrap().kind,
        RejectionKind::ParseError
    );
    let ok = verify_candidate(
        candidate(
            "SELECT ?s WHERE { :bob foaf:surname ?s }",
            " Tanner ".into(),
        ),
        &g,
    );
    assert!(ok.verified && ok.rejection_reason.is_none());
    let wrong = verify_candidate(
        candidate("SELECT ?a WHERE { :bob :age ?a }", "42".into()),
        &g,
    );
    assert!(!wrong.verified);
    assert_eq!(
        wrong.rejection_reason.unwrap().kind,
        RejectionKind::ValueMismatch
    );
    let right = verify_candidate(
        candidate(
            "SELECT ?a WHERE { :bob :age ?a }",
            serde_json::json!(["41"]),
        ),
        &g,
    );
    assert!(right.verified);
}

fn record(question: &str) -> DatasetRecord {
    DatasetRecord {
        id: "org-001".into(),
        question: question.into(),
        paraphrase: None,
        gold_query: "ASK {}".into(),
        split: Split::Train,
        unsupported: false,
    }
}

#[test]
fn paraphrasing() {
    let q = "What is the surname of Bob Tanner?";
    let mut chat = ReplayChat::from_responses(["\"Which surname does Bob Tanner have?\""]);
    let out = paraphrase_all(vec![record(q)], &mut chat, PARAPHRASE_TEMPLATE);
    assert_eq!(out.records[0].question, q);
    assert_eq!(
        out.records[0].paraphrase.as_deref(),
        Some("Which surname does Bob Tanner have?")
    );

    let mut chat = ReplayChat::from_responses([
        "what is the surname of bob tanner?",
        "Bob Tanner's surname is what?",
    ]);
    let out = paraphrase_all(vec![record(q)], &mut chat, PARAPHRASE_TEMPLATE);
    assert_eq!(
        out.records[0].paraphrase.as_deref(),
        Some("Bob Tanner's surname is what?")
    );
    assert!(out.identical.is_empty());

    let mut chat = ReplayChat::from_responses([q, q]);
    let out = paraphrase_all(vec![record(q)], &mut chat, PARAPHRASE_TEMPLATE);
    assert_eq!(out.identical, ["org-001"]);

    let mut chat = ReplayChat::from_responses(["One.", "Two."]);
    let out = paraphrase_all(
        vec![record("A?"), record("B?"), record("C?")],
        &mut chat,
        PARAPHRASE_TEMPLATE,
    );
    assert!(matches!(out.aborted, Some(DatagenError::Replay(_))));
    assert_eq!(out.records[1].paraphrase.as_deref(), Some("Two."));
    assert_eq!(out.records[2].paraphrase, None);

    let mut chat = ReplayChat::from_responses(Vec::<String>::new());
    assert!(paraphrase_all(vec![], &mut chat, PARAPHRASE_TEMPLATE)
        .records
        .is_empty());
}

#[test]
fn templates_render_without_comments() {
    let p = render_template(PARAPHRASE_TEMPLATE, &[("question", "Who?")]);
    assert!(!p.contains('#'));
    assert!(p.ends_with("Who?"));
    let g = render_template(GENERATE_TEMPLATE, &[("n", "5"), ("turtle", ":a :b :c .")]);
    assert!(g.contains("Write 5 different questions"));
    assert!(g.contains(":a :b :c ."));
}

#[test]
fn manifest_from_candidates() {
    let g = graph();
    let mut chat = ReplayChat::from_responses([THREE]);
    let cands: Vec<_> = generate_candidates(
        &g,
        3,
        &mut chat,
        &ChatClientConfig::default(),
        GENERATE_TEMPLATE,
    )
    .unwrap()
    .into_iter()
    .map(|c| verify_candidate(c, &g))
    .collect();
    let m = build_manifest("org", &cands, &g, vec!["org.ttl".into()], 1);
    assert_eq!(m.counts, SplitCounts { train: 2, test: 1 });
    assert_eq!(m.records[2].id, "org-003");
    assert_eq!(m.records[2].split, Split::Test);
    crate::dataset::Dataset::from_manifest(m, b"").unwrap();
}
