use serde::Deserialize;
use thiserror::Error;

use crate::sparql::parse_query;

use super::{BackendSpec, DatasetRecord, Manifest, QueryMode, Split, SplitCounts};

#[derive(Debug, Error)]
pub enum QaldImportError {
    #[error("invalid QALD document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("question {0:?} has no English string")]
    NoEnglish(String),
}

#[derive(Deserialize)]
struct QaldDocument {
    questions: Vec<QaldQuestion>,
}

#[derive(Deserialize)]
struct QaldQuestion {
    id: serde_json::Value,
    question: Vec<QaldString>,
    query: QaldQuery,
}

#[derive(Deserialize)]
struct QaldString {
    language: String,
    string: String,
}

#[derive(Deserialize)]
struct QaldQuery {
    sparql: String,
}

/// Converts a QALD JSON document into a self-contained test-split manifest.
///
/// Only English question strings are kept. Gold queries the local parser
/// cannot handle are annotated `unsupported`.
pub fn import_qald(json: &[u8], name: &str, endpoint: &str) -> Result<Manifest, QaldImportError> {
    let doc: QaldDocument = serde_json::from_slice(json)?;
    let mut records = Vec::with_capacity(doc.questions.len());
    for q in doc.questions {
        let id = match q.id {
            serde_json::Value::String(s) => s,
            other => other.to_string(),
        };
        let question = q
            .question
            .into_iter()
            .find(|s| s.language == "en")
            .map(|s| s.string)
            .ok_or_else(|| QaldImportError::NoEnglish(id.clone()))?;
        let unsupported = parse_query(&q.query.sparql, None).is_err();
        records.push(DatasetRecord {
            id,
            question,
            paraphrase: None,
            gold_query: q.query.sparql,
            split: Split::Test,
            unsupported,
        });
    }
    Ok(Manifest {
        name: name.to_string(),
        query_mode: QueryMode::SelfContained,
        prefix_preamble: Default::default(),
        backend: BackendSpec::Endpoint(endpoint.to_string()),
        counts: SplitCounts {
            train: 0,
            test: records.len(),
        },
        expand_paraphrases: false,
        records,
    })
}
