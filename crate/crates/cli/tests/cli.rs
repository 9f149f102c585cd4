use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(rel)
}

fn textsparql(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_textsparql"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn copy_fixture(name: &str, into: &Path) -> PathBuf {
    for f in ["manifest.json", "graph.ttl"] {
        fs::copy(fixture(&format!("{name}/{f}")), into.join(f)).unwrap();
    }
    into.join("manifest.json")
}

#[test]
fn seed_prints_label_and_value() {
    let o = textsparql(&["seed", "R01", "R02", "R10"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "R01 99975818\nR02 56899599\nR10 82566615\n");
}

#[test]
fn validate_accepts_bundled_fixtures() {
    let o = textsparql(&[
        "validate",
        fixture("organizational/manifest.json").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("69 records, 16 test, 53 train"));
    assert!(stdout(&o).contains("gold self-test: 69 correct, 0 failed"));
}

#[test]
fn validate_reports_unsupported_gold_count() {
    let o = textsparql(&[
        "validate",
        fixture("qald10/manifest.json").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("43 records annotated unsupported"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn corrupt_gold_query_is_a_data_error_naming_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = copy_fixture("organizational", dir.path());
    let text = fs::read_to_string(&manifest).unwrap();
    let broken = text.replacen(
        "{ :bob foaf:surname ?surname . }",
        "{ :bob foaf:surname ?surname . ",
        1,
    );
    assert_ne!(text, broken);
    fs::write(&manifest, broken).unwrap();
    let o = textsparql(&["validate", manifest.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(format!("{}{}", stdout(&o), stderr(&o)).contains("org-001"));
}

#[test]
fn missing_manifest_is_a_data_error() {
    let o = textsparql(&["validate", "/nonexistent/manifest.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"dataset": "x.json", "translators": ["null"], "epochz": [5]}"#,
    )
    .unwrap();
    let o = textsparql(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let manifest = fixture("organizational/manifest.json");
    let out = dir.path().join("out");
    let o = textsparql(&[
        "run",
        "--dataset",
        manifest.to_str().unwrap(),
        "--translator",
        "bogus-spec",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = textsparql(&[
        "run",
        "--dataset",
        manifest.to_str().unwrap(),
        "--translator",
        "null",
        "--epochs",
        "5..x",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn unreachable_endpoint_is_a_backend_error() {
    let o = textsparql(&[
        "validate",
        fixture("organizational/manifest.json").to_str().unwrap(),
        "--backend",
        "http://127.0.0.1:9/sparql",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn report_on_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = textsparql(&["report", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn null_translator_over_ten_runs_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = textsparql(&[
        "run",
        "--dataset",
        fixture("organizational/manifest.json").to_str().unwrap(),
        "--translator",
        "null",
        "--runs",
        "10",
        "--epochs",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("| **null** | **0.00** | **0.00** | **n/a** |"),
        "{}",
        stdout(&o)
    );
    let bestof = fs::read_to_string(out.join("reports/bestof.csv")).unwrap();
    assert_eq!(bestof.lines().count(), 11);
    assert!(bestof.lines().skip(1).all(|l| l.ends_with(",0")));

    let again = textsparql(&[
        "run",
        "--dataset",
        fixture("organizational/manifest.json").to_str().unwrap(),
        "--translator",
        "null",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        !again.status.success(),
        "a run must not overwrite existing logs"
    );

    let rebuilt = dir.path().join("rebuilt");
    let o = textsparql(&[
        "report",
        out.join("logs").to_str().unwrap(),
        "--out",
        rebuilt.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(rebuilt.join("bestof.csv")).unwrap(),
        bestof
    );
}

const QALD: &str = r#"{"questions": [
  {"id": 1, "question": [{"language": "de", "string": "Wer?"}, {"language": "en", "string": "Who wrote Q1?"}],
   "query": {"sparql": "SELECT ?a WHERE { <http://www.wikidata.org/entity/Q1> <http://www.wikidata.org/prop/direct/P50> ?a }"}},
  {"id": "2", "question": [{"language": "en", "string": "Who is the mother of the father of Q2?"}],
   "query": {"sparql": "SELECT ?m WHERE { <http://www.wikidata.org/entity/Q2> <http://www.wikidata.org/prop/direct/P22>/<http://www.wikidata.org/prop/direct/P25> ?m }"}}
]}"#;

#[test]
fn import_qald_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("qald.json");
    fs::write(&input, QALD).unwrap();
    let out = dir.path().join("manifest.json");
    let o = textsparql(&[
        "import-qald",
        input.to_str().unwrap(),
        "--name",
        "qald-mini",
        "--endpoint",
        "https://query.wikidata.org/sparql",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("2 records, 1 unsupported"),
        "{}",
        stdout(&o)
    );
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m["records"][0]["id"], "1");
    assert_eq!(m["records"][0]["question"], "Who wrote Q1?");

    fs::write(&input, "{not json").unwrap();
    let o = textsparql(&[
        "import-qald",
        input.to_str().unwrap(),
        "--name",
        "x",
        "--endpoint",
        "http://e",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

const CHAT_REPLY: &str = r#"[{"question":"What is the surname of Bob Tanner?","query":"SELECT ?s WHERE { :bob foaf:surname ?s }","expected":"Tanner"},
{"question":"How old is Bob Tanner?","query":"SELECT ?a WHERE { :bob :age ?a }","expected":41},
{"question":"Who is older than 100?","query":"SELECT ?p WHERE { ?p :age 120 }","expected":"Nobody"},
{"question":"Is Bob called Bob?","query":"ASK { :bob foaf:firstName \"Bob\" }","expected":"true"}]"#;

#[test]
fn datagen_replay_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("graph.ttl");
    fs::write(
        &graph,
        "@prefix : <http://example.org/> .\n@prefix foaf: <http://xmlns.com/foaf/0.1/> .\n\
         :bob foaf:firstName \"Bob\" ; foaf:surname \"Tanner\" ; :age 41 .\n",
    )
    .unwrap();
    let transcript = dir.path().join("chat.ndjson");
    let line = serde_json::json!({ "response": CHAT_REPLY }).to_string();
    fs::write(&transcript, format!("{line}\n")).unwrap();
    let generate = |out: &str| {
        let out = dir.path().join(out);
        let o = textsparql(&[
            "datagen",
            "--name",
            "tiny",
            "--graph",
            graph.to_str().unwrap(),
            "--count",
            "4",
            "--test-count",
            "1",
            "--replay",
            transcript.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o), "4 candidates, 3 verified, 1 test\n");
        fs::read_to_string(out).unwrap()
    };
    let first = generate("a.json");
    assert_eq!(first, generate("b.json"));
    let m: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(m["backend"]["turtle"][0], "graph.ttl");

    let o = textsparql(&["validate", dir.path().join("a.json").to_str().unwrap()]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
}
