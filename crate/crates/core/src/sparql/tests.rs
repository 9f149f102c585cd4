use super::*;
use crate::rdf::{PrefixMap, Term};

const EX: &str = "http://example.org/";
const FOAF: &str = "http://xmlns.com/foaf/0.1/";

fn org_prefixes() -> PrefixMap {
    let mut p = PrefixMap::new();
    p.insert(String::new(), EX.to_string());
    p.insert("foaf".into(), FOAF.to_string());
    p
}

fn unsupported(text: &str) -> String {
    match parse_query(text, Some(&org_prefixes())) {
        Err(QueryError::UnsupportedFeature(f)) => f,
        other => panic!("expected UnsupportedFeature for {text:?}, got {other:?}"),
    }
}

fn syntax(text: &str) -> ParseError {
    match parse_query(text, Some(&org_prefixes())) {
        Err(QueryError::Parse(e)) => e,
        other => panic!("expected ParseError for {text:?}, got {other:?}"),
    }
}

#[test]
fn gold_surname_query() {
    let q = parse_query(
        "SELECT ?surname WHERE { :bob foaf:surname ?surname . }",
        Some(&org_prefixes()),
    )
    .unwrap();
    assert_eq!(q.form, QueryForm::Select);
    assert_eq!(q.header(), vec!["surname".to_string()]);
    assert_eq!(q.pattern.elements.len(), 1);
    let PatternElement::Triple(tp) = &q.pattern.elements[0] else {
        panic!()
    };
    assert_eq!(tp.subject, PatternTerm::Term(Term::iri(format!("{EX}bob"))));
    assert_eq!(
        tp.predicate,
        PatternTerm::Term(Term::iri(format!("{FOAF}surname")))
    );
    assert!(q.prefixes.is_empty());
}

#[test]
fn projection_unbound() {
    let mut ambient = PrefixMap::new();
    ambient.insert("ns2".into(), "https://schema.coypu.org/global#".into());
    let text = "SELECT ?latitude WHERE { <https://data.coypu.org/infrastructure/port/AUDKB> ns2:hasLatitude ?longitude }";
    match parse_query(text, Some(&ambient)) {
        Err(QueryError::Parse(e)) => assert_eq!(e.kind, ParseErrorKind::ProjectionUnbound),
        other => panic!("{other:?}"),
    }
    let lenient = parse_query_with(
        text,
        Some(&ambient),
        ParseOptions {
            strict_projection: false,
        },
    );
    assert!(lenient.is_ok());
}

#[test]
fn natural_language_is_parse_error() {
    let e = syntax("What is the surname of Bob Tanner?");
    assert_eq!(e.kind, ParseErrorKind::Syntax);
    assert_eq!(e.position, 0);
}

#[test]
fn table2_generated_query_parses() {
    // single-quoted literal and missing final dot
    let q = parse_query(
        "SELECT ?surname WHERE { :charles foaf:firstName 'BobTanner' }",
        Some(&org_prefixes()),
    );
    match q {
        Err(QueryError::Parse(e)) => assert_eq!(e.kind, ParseErrorKind::ProjectionUnbound),
        other => panic!("{other:?}"),
    }
}

#[test]
fn prologue_shadows_ambient() {
    let q = parse_query(
        "PREFIX foaf: <http://other.org/> SELECT ?s WHERE { ?s foaf:x ?o }",
        Some(&org_prefixes()),
    )
    .unwrap();
    let PatternElement::Triple(tp) = &q.pattern.elements[0] else {
        panic!()
    };
    assert_eq!(
        tp.predicate,
        PatternTerm::Term(Term::iri("http://other.org/x"))
    );
    assert_eq!(q.prefixes.get("foaf").unwrap(), "http://other.org/");
}

#[test]
fn unknown_prefix() {
    assert_eq!(
        parse_query("SELECT ?s WHERE { ?s wdt:P31 ?o }", None),
        Err(QueryError::UnknownPrefix("wdt".into()))
    );
}

#[test]
fn unsupported_features() {
    assert_eq!(
        unsupported("CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }"),
        "CONSTRUCT query form"
    );
    assert_eq!(
        unsupported("DESCRIBE ?s WHERE { ?s ?p ?o }"),
        "DESCRIBE query form"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { { ?s ?p ?o } UNION { ?o ?p ?s } }"),
        "UNION"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s :p/:q ?o }"),
        "property path"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s :p* ?o }"),
        "property path"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s ^:p ?o }"),
        "property path"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s ?p ?o MINUS { ?s :q ?o } }"),
        "MINUS"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { { SELECT ?s WHERE { ?s ?p ?o } } }"),
        "subquery"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { VALUES ?s { :a } ?s ?p ?o }"),
        "VALUES"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s ?p ?o BIND(1 AS ?x) }"),
        "BIND"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { SERVICE <http://x/> { ?s ?p ?o } }"),
        "federated query (SERVICE)"
    );
    assert_eq!(
        unsupported("SELECT (SUM(?o) AS ?t) WHERE { ?s ?p ?o }"),
        "SUM aggregate"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s ?p ?o FILTER(LCASE(?o) = \"a\") }"),
        "function LCASE"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s ?p ?o FILTER(?o + 1 > 2) }"),
        "arithmetic expression"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s ?p ?o FILTER NOT EXISTS { ?s :q ?o } }"),
        "EXISTS"
    );
    assert_eq!(
        unsupported("SELECT ?s FROM <http://g/> WHERE { ?s ?p ?o }"),
        "FROM dataset clause"
    );
    assert_eq!(
        unsupported("SELECT ?s WHERE { ?s ?p ?o } GROUP BY ?s HAVING (?s)"),
        "HAVING"
    );
}

#[test]
fn syntax_errors() {
    syntax("SELECT WHERE { ?s ?p ?o }");
    syntax("SELECT ?s WHERE { ?s ?p }");
    syntax("SELECT ?s WHERE { ?s ?p ?o ?s ?p ?o }");
    syntax("SELECT ?s WHERE { ?s ?p ?o ");
    syntax("SELECT ?s WHERE { ?s ?p ?o } garbage");
    syntax("SELECT ?s WHERE { ?s ?p ?o FILTER(REGEX(?o)) }");
    syntax("SELECT ?s WHERE { ?s ?p ?o } LIMIT -1");
    syntax("SELECT ?s (COUNT(?o) AS ?c) WHERE { ?s ?p ?o }");
    syntax("SELECT (COUNT(?o) AS ?o) WHERE { ?s ?p ?o }");
    syntax("SELECT ?s WHERE { <relative> ?p ?o }");
    let e = syntax("SELECT ?s\nWHERE { ?s ?p ?o ?x }");
    assert_eq!(e.line, 2);
}

#[test]
fn keywords_case_insensitive_and_dollar_vars() {
    let q = parse_query(
        "select distinct $s where { $s a :C } order by desc(?s) limit 3 offset 1",
        Some(&org_prefixes()),
    )
    .unwrap();
    assert!(q.distinct);
    assert_eq!(q.limit, Some(3));
    assert_eq!(q.offset, Some(1));
    assert!(!q.order_by.as_ref().unwrap()[0].ascending);
    assert_eq!(q.header(), vec!["s".to_string()]);
}

#[test]
fn count_and_group_by() {
    let q = parse_query(
        "SELECT ?d (COUNT(DISTINCT ?p) AS ?n) WHERE { ?p :memberOf ?d } GROUP BY ?d ORDER BY DESC(?n)",
        Some(&org_prefixes()),
    )
    .unwrap();
    assert_eq!(q.header(), vec!["d".to_string(), "n".to_string()]);
    assert!(q.has_aggregate());
    assert!(!q.projects_only_count());
    let q = parse_query("SELECT (COUNT(*) AS ?c) WHERE { ?s ?p ?o }", None).unwrap();
    assert!(q.projects_only_count());
}

#[test]
fn filters_and_optional() {
    let q = parse_query(
        r#"SELECT ?s ?n WHERE { ?s foaf:name ?n OPTIONAL { ?s foaf:mbox ?m } FILTER(!BOUND(?m) && (CONTAINS(STR(?n), "a") || REGEX(?n, "^B", "i")) && ?n != "x"@en && LANG(?n) = "" ) }"#,
        Some(&org_prefixes()),
    )
    .unwrap();
    assert_eq!(q.pattern.elements.len(), 3);
    assert!(matches!(q.pattern.elements[1], PatternElement::Optional(_)));
}

#[test]
fn blank_nodes_and_numbers() {
    let q = parse_query(
        "SELECT ?x WHERE { _:b :p ?x . [ :q 5 ] :r -3.5 ; :s [] }",
        Some(&org_prefixes()),
    )
    .unwrap();
    assert_eq!(q.pattern.elements.len(), 4);
    let PatternElement::Triple(tp) = &q.pattern.elements[2] else {
        panic!()
    };
    assert_eq!(
        tp.object,
        PatternTerm::Term(Term::typed("-3.5", crate::rdf::vocab::XSD_DECIMAL))
    );
}

fn round_trip(text: &str) {
    let q = parse_query(text, Some(&org_prefixes())).unwrap();
    let s = serialize_query(&q);
    let again = parse_query(&s, None).unwrap_or_else(|e| panic!("{s}: {e}"));
    assert_eq!(q, again, "{s}");
}

#[test]
fn serialize_round_trips() {
    round_trip("SELECT ?surname WHERE { :bob foaf:surname ?surname . }");
    round_trip("ASK WHERE { }");
    round_trip("PREFIX x: <http://x.org/> SELECT (COUNT(*) AS ?c) WHERE { ?s x:p ?o }");
    round_trip(
        r#"SELECT DISTINCT ?s WHERE { ?s :p "a\"b\n"@en , 3, 4.5, 1e2, true . OPTIONAL { ?s :q ?o FILTER(?o > 2) } FILTER(!(?s = :x) || REGEX(STR(?s), "x", "i")) } ORDER BY DESC(?s) ASC(STR(?s)) LIMIT 10 OFFSET 2"#,
    );
    round_trip(
        "SELECT ?d (COUNT(DISTINCT ?p) AS ?n) WHERE { ?p :memberOf ?d . _:b :x ?p } GROUP BY ?d",
    );
    round_trip("SELECT * WHERE { ?s ?p ?o }");
}

#[test]
fn ask_serializes_canonically() {
    let q = parse_query("ASK WHERE { }", None).unwrap();
    assert_eq!(serialize_query(&q), "ASK WHERE { }");
}

#[test]
fn count_star_built_by_hand_round_trips() {
    let q = Query {
        prefixes: PrefixMap::new(),
        form: QueryForm::Select,
        distinct: false,
        projection: Projection::Items(vec![ProjectionItem::Count {
            argument: CountArgument::Star,
            distinct: false,
            alias: "c".into(),
        }]),
        pattern: GroupPattern {
            elements: vec![PatternElement::Triple(TriplePattern {
                subject: PatternTerm::Variable("s".into()),
                predicate: PatternTerm::Term(Term::iri(format!("{FOAF}name"))),
                object: PatternTerm::Variable("o".into()),
            })],
        },
        group_by: None,
        order_by: None,
        limit: None,
        offset: None,
    };
    assert_eq!(parse_query(&serialize_query(&q), None).unwrap(), q);
}

#[test]
fn rename_variables() {
    let mut q = parse_query(
        "SELECT ?s (COUNT(?o) AS ?c) WHERE { ?s :p ?o FILTER(BOUND(?o)) } GROUP BY ?s ORDER BY ?c",
        Some(&org_prefixes()),
    )
    .unwrap();
    q.rename_variables(|v| format!("{v}_r"));
    assert_eq!(q.header(), vec!["s_r".to_string(), "c_r".to_string()]);
    let text = serialize_query(&q);
    assert!(!text.contains("?s ") && text.contains("?s_r"));
}

#[test]
fn truncated_aggregate_is_a_syntax_error() {
    syntax("SELECT (COUNT(?book");
    syntax("SELECT (COUNT(");
    syntax("SELECT ?o WHERE { :bob foaf:knows ?");
    syntax("SELECT (COUNT(? AS ?n) WHERE { ?s ?p ?o }");
    assert_eq!(
        unsupported("SELECT (COUNT(?a + ?b) AS ?n) WHERE { ?a ?p ?b }"),
        "COUNT over an expression"
    );
}
