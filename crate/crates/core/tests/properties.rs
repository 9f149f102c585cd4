use std::path::PathBuf;

use proptest::prelude::*;
use textsparql_core::rdf::GraphBuilder;
use textsparql_core::{parse_query, serialize_query, Dataset, Term, Triple};

const EX: &str = "http://example.org/";

fn term_text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-d]".prop_map(|l| format!("<{EX}{l}>")),
        "[a-d]".prop_map(|l| format!("ex:{l}")),
        "[a-z ]{0,6}".prop_map(|s| format!("\"{s}\"")),
        "[a-z]{1,4}".prop_map(|s| format!("\"{s}\"@en")),
        (-50i64..50).prop_map(|n| n.to_string()),
        (0u32..100, 1u32..10).prop_map(|(a, b)| format!("{a}.{b}")),
        Just("true".to_string()),
    ]
}

fn var() -> impl Strategy<Value = String> {
    "[xyz]".prop_map(|v| format!("?{v}"))
}

fn node() -> impl Strategy<Value = String> {
    prop_oneof![3 => var(), 2 => term_text()]
}

fn pattern() -> impl Strategy<Value = String> {
    (
        prop_oneof![var(), "[a-d]".prop_map(|l| format!("ex:{l}"))],
        prop_oneof![
            var(),
            "[pq]".prop_map(|l| format!("ex:{l}")),
            Just("a".to_string())
        ],
        node(),
    )
        .prop_map(|(s, p, o)| format!("{s} {p} {o} ."))
}

fn filter() -> impl Strategy<Value = String> {
    let op = prop_oneof![Just("="), Just("!="), Just("<"), Just(">="),];
    prop_oneof![
        (var(), op, node()).prop_map(|(v, op, n)| format!("FILTER({v} {op} {n})")),
        var().prop_map(|v| format!("FILTER(BOUND({v}) && !CONTAINS(LANG({v}), \"en\"))")),
        (var(), "[a-z]{1,3}").prop_map(|(v, s)| format!("FILTER(REGEX(STR({v}), \"{s}\", \"i\"))")),
    ]
}

fn query_text() -> impl Strategy<Value = String> {
    (
        prop::collection::vec(pattern(), 1..4),
        prop::option::of(filter()),
        prop::option::of(pattern()),
        0usize..4,
        any::<bool>(),
        prop::option::of(0u32..20),
        prop::option::of(var()),
    )
        .prop_map(
            |(patterns, filter, optional, form, distinct, limit, order)| {
                let mut body = patterns.join(" ");
                if let Some(o) = optional {
                    body.push_str(&format!(" OPTIONAL {{ {o} }}"));
                }
                if let Some(f) = filter {
                    body.push(' ');
                    body.push_str(&f);
                }
                let prologue = format!("PREFIX ex: <{EX}> ");
                let d = if distinct { "DISTINCT " } else { "" };
                let mut text = match form {
                    0 => format!("{prologue}SELECT {d}* WHERE {{ {body} }}"),
                    1 => format!("{prologue}ASK {{ {body} }}"),
                    2 => format!("{prologue}SELECT (COUNT({d}*) AS ?n) WHERE {{ {body} }}"),
                    _ => format!("{prologue}SELECT {d}?x ?y WHERE {{ ?x ex:p ?y . {body} }}"),
                };
                if form != 1 && form != 2 {
                    if let Some(v) = order {
                        text.push_str(&format!(" ORDER BY DESC({v})"));
                    }
                    if let Some(n) = limit {
                        text.push_str(&format!(" LIMIT {n}"));
                    }
                }
                text
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn serialized_queries_parse_back_to_the_same_ast(text in query_text()) {
        let parsed = parse_query(&text, None).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        let printed = serialize_query(&parsed);
        let reparsed = parse_query(&printed, None).map_err(|e| TestCaseError::fail(format!("{printed}: {e}")))?;
        prop_assert_eq!(&reparsed, &parsed);
        prop_assert_eq!(serialize_query(&reparsed), printed);
    }

    #[test]
    fn match_pattern_agrees_with_a_linear_scan(
        triples in prop::collection::vec((0u8..4, 0u8..3, 0u8..6), 0..40),
        s in prop::option::of(0u8..5),
        p in prop::option::of(0u8..4),
        o in prop::option::of(0u8..7),
    ) {
        let subject = |i: u8| Term::iri(format!("{EX}s{i}"));
        let predicate = |i: u8| Term::iri(format!("{EX}p{i}"));
        let object = |i: u8| if i < 3 { subject(i) } else { Term::integer(i64::from(i)) };
        let mut b = GraphBuilder::new();
        for &(ts, tp, to) in &triples {
            b.insert(Triple::new(subject(ts), predicate(tp), object(to)).unwrap());
        }
        let graph = b.build();
        let (s, p, o) = (s.map(subject), p.map(predicate), o.map(object));
        let got: Vec<&Triple> = graph.match_pattern(s.as_ref(), p.as_ref(), o.as_ref()).collect();
        let want: Vec<&Triple> = graph
            .triples()
            .iter()
            .filter(|t| {
                s.as_ref().is_none_or(|x| &t.subject == x)
                    && p.as_ref().is_none_or(|x| &t.predicate == x)
                    && o.as_ref().is_none_or(|x| &t.object == x)
            })
            .collect();
        prop_assert_eq!(got, want);
        prop_assert!(graph.estimate(s.as_ref(), p.as_ref(), o.as_ref()) >= graph.match_pattern(s.as_ref(), p.as_ref(), o.as_ref()).count());
    }
}

#[test]
fn fixture_gold_queries_round_trip() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut checked = 0;
    for name in ["organizational", "coypu", "qald10"] {
        let ds = Dataset::load(&root.join(name).join("manifest.json")).unwrap();
        for r in ds.records.iter().filter(|r| !r.unsupported) {
            let ambient = Some(&ds.prefix_preamble);
            let q = ds.parse_gold(r).unwrap();
            let printed = serialize_query(&q);
            let again = parse_query(&printed, ambient)
                .unwrap_or_else(|e| panic!("{}: {printed}: {e}", r.id));
            assert_eq!(again, q, "{}", r.id);
            checked += 1;
        }
    }
    assert!(checked > 500);
}
