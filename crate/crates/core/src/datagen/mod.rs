//! Dataset generation: ask a chat model for (question, query, expected
//! result) tuples about a graph, keep those whose query really returns the
//! expected result, and add one paraphrase per question.

mod chat;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::dataset::{BackendSpec, DatasetRecord, Manifest, QueryMode, Split, SplitCounts};
use crate::exec::evaluate_local;
use crate::rdf::{to_turtle, Graph};
use crate::sparql::parse_query;

pub use chat::{
    network_requests, open_chat, ChatClientConfig, ChatTransport, HttpChat, RecordingChat,
    ReplayChat,
};

pub const GENERATE_TEMPLATE: &str = include_str!("../../prompts/generate.txt");
pub const PARAPHRASE_TEMPLATE: &str = include_str!("../../prompts/paraphrase.txt");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatagenError {
    #[error("chat transport failed: {0}")]
    Transport(String),
    #[error("replay: {0}")]
    Replay(String),
    #[error("graph has {triples} triples, more than the prompt budget of {cap}")]
    PromptBudgetExceeded { triples: usize, cap: usize },
}

/// Drops `#` comment lines and fills `{name}` placeholders.
pub fn render_template(template: &str, values: &[(&str, &str)]) -> String {
    let mut text: String = template
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    for (name, value) in values {
        text = text.replace(&format!("{{{name}}}"), value);
    }
    text.trim().to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectionKind {
    ParseError,
    ExecError,
    EmptinessMismatch,
    ValueMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub kind: RejectionKind,
    pub detail: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationCandidate {
    pub question: String,
    pub query: String,
    /// The model's sketch of the result: a string, number, boolean or array.
    pub expected: Value,
    #[serde(default)]
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejection_reason: Option<Rejection>,
}

#[derive(Deserialize)]
struct RawCandidate {
    question: String,
    query: String,
    expected: Value,
}

/// Extracts a JSON array of candidates from a reply, tolerating a
/// surrounding Markdown code fence.
fn parse_reply(reply: &str) -> Option<Vec<GenerationCandidate>> {
    let mut text = reply.trim();
    if let Some(rest) = text.strip_prefix("```") {
        let rest = rest.trim_start_matches(|c: char| c.is_ascii_alphabetic());
        text = rest.trim().strip_suffix("```")?.trim();
    }
    let raw: Vec<RawCandidate> = serde_json::from_str(text).ok()?;
    Some(
        raw.into_iter()
            .map(|r| GenerationCandidate {
                question: r.question.trim().to_string(),
                query: r.query.trim().to_string(),
                expected: r.expected,
                verified: false,
                rejection_reason: None,
            })
            .collect(),
    )
}

/// Requests up to `n` candidates about `graph`. A reply that is not a JSON
/// array of tuples is retried `max_retries` times; when it stays unusable,
/// generation stops with what has been collected.
pub fn generate_candidates(
    graph: &Graph,
    n: usize,
    chat: &mut dyn ChatTransport,
    config: &ChatClientConfig,
    template: &str,
) -> Result<Vec<GenerationCandidate>, DatagenError> {
    if graph.len() > config.triple_cap {
        return Err(DatagenError::PromptBudgetExceeded {
            triples: graph.len(),
            cap: config.triple_cap,
        });
    }
    let turtle = to_turtle(graph, graph.prefixes());
    let mut out = Vec::new();
    'rounds: while out.len() < n {
        let want = (n - out.len()).to_string();
        let prompt = render_template(template, &[("n", &want), ("turtle", &turtle)]);
        for attempt in 0..=config.max_retries {
            let reply = chat.complete(&prompt)?;
            match parse_reply(&reply) {
                Some(batch) if batch.is_empty() => break 'rounds,
                Some(batch) => {
                    out.extend(batch);
                    continue 'rounds;
                }
                None => log::warn!("malformed generation reply (attempt {})", attempt + 1),
            }
        }
        break;
    }
    out.truncate(n);
    Ok(out)
}

fn expected_values(v: &Value) -> Vec<String> {
    match v {
        Value::Null => Vec::new(),
        Value::String(s) => vec![s.trim().to_string()],
        Value::Array(items) => items.iter().flat_map(expected_values).collect(),
        Value::Object(map) => map.values().flat_map(expected_values).collect(),
        other => vec![other.to_string()],
    }
}

/// Parses and runs the candidate's query with the graph's prefixes in
/// scope, then compares the values it returns with the expected sketch as
/// trimmed strings, ignoring order.
pub fn verify_candidate(mut candidate: GenerationCandidate, graph: &Graph) -> GenerationCandidate {
    let reject = |kind, detail: String| Some(Rejection { kind, detail });
    candidate.rejection_reason = match parse_query(&candidate.query, Some(graph.prefixes())) {
        Err(e) => reject(RejectionKind::ParseError, e.to_string()),
        Ok(query) => match evaluate_local(&query, graph) {
            Err(e) => reject(RejectionKind::ExecError, e.to_string()),
            Ok(table) => {
                let mut got: Vec<String> = table
                    .value_strings()
                    .iter()
                    .map(|s| s.trim().to_string())
                    .collect();
                let mut want = expected_values(&candidate.expected);
                got.sort();
                want.sort();
                if got.is_empty() != want.is_empty() {
                    reject(
                        RejectionKind::EmptinessMismatch,
                        format!(
                            "query returned {} values, expected {}",
                            got.len(),
                            want.len()
                        ),
                    )
                } else if got != want {
                    reject(
                        RejectionKind::ValueMismatch,
                        format!("got {got:?}, expected {want:?}"),
                    )
                } else {
                    None
                }
            }
        },
    };
    candidate.verified = candidate.rejection_reason.is_none();
    candidate
}

#[derive(Debug, Clone, PartialEq)]
pub struct Paraphrased {
    /// Every input record; those reached carry a paraphrase.
    pub records: Vec<DatasetRecord>,
    /// Ids whose paraphrase still matched the question after one retry.
    pub identical: Vec<String>,
    /// Set when a transport error stopped the pass early.
    pub aborted: Option<DatagenError>,
}

fn clean_paraphrase(reply: &str) -> String {
    let t = reply.trim();
    let t = t
        .strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(t);
    t.trim().to_string()
}

/// Adds one paraphrase to each record. A paraphrase equal to the question
/// (ignoring case) is requested once more and then accepted with a warning.
pub fn paraphrase_all(
    records: Vec<DatasetRecord>,
    chat: &mut dyn ChatTransport,
    template: &str,
) -> Paraphrased {
    let mut out = Paraphrased {
        records,
        identical: Vec::new(),
        aborted: None,
    };
    for i in 0..out.records.len() {
        let question = out.records[i].question.clone();
        let prompt = render_template(template, &[("question", &question)]);
        let same = |p: &str| p.to_lowercase() == question.to_lowercase();
        let mut result = chat.complete(&prompt).map(|r| clean_paraphrase(&r));
        if matches!(&result, Ok(p) if same(p)) {
            result = chat.complete(&prompt).map(|r| clean_paraphrase(&r));
        }
        match result {
            Ok(p) => {
                if same(&p) {
                    log::warn!(
                        "paraphrase of {} is identical to the question",
                        out.records[i].id
                    );
                    out.identical.push(out.records[i].id.clone());
                }
                out.records[i].paraphrase = Some(p);
            }
            Err(e) => {
                out.aborted = Some(e);
                break;
            }
        }
    }
    out
}

/// Builds an ambient-prefix manifest from verified candidates. Records are
/// numbered in order; the last `test_count` become the test split.
pub fn build_manifest(
    name: &str,
    candidates: &[GenerationCandidate],
    graph: &Graph,
    turtle_paths: Vec<std::path::PathBuf>,
    test_count: usize,
) -> Manifest {
    let verified: Vec<&GenerationCandidate> = candidates.iter().filter(|c| c.verified).collect();
    let test_count = test_count.min(verified.len());
    let first_test = verified.len() - test_count;
    let width = verified.len().to_string().len().max(3);
    let records: Vec<DatasetRecord> = verified
        .iter()
        .enumerate()
        .map(|(i, c)| DatasetRecord {
            id: format!("{name}-{:0width$}", i + 1),
            question: c.question.clone(),
            paraphrase: None,
            gold_query: c.query.clone(),
            split: if i >= first_test {
                Split::Test
            } else {
                Split::Train
            },
            unsupported: false,
        })
        .collect();
    let prefixes = graph.prefixes().clone();
    let query_mode = if prefixes.is_empty() {
        QueryMode::SelfContained
    } else {
        QueryMode::AmbientPrefixes
    };
    Manifest {
        name: name.to_string(),
        query_mode,
        prefix_preamble: prefixes,
        backend: BackendSpec::Turtle(turtle_paths),
        counts: SplitCounts {
            train: first_test,
            test: test_count,
        },
        expand_paraphrases: false,
        records,
    }
}

#[cfg(test)]
mod tests;
