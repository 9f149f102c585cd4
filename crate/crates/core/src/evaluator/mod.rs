//! Judging generated queries: assemble, parse, execute, compare, classify.

mod compare;
mod run;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, DatasetRecord, QueryMode};
use crate::exec::{evaluate_local, Backend, ExecError, SolutionTable};
use crate::rdf::Term;
use crate::sparql::{parse_query_with, ParseOptions, Query, QueryError};
use crate::translator::TranslatorError;

pub use compare::{compare_solutions, Mismatch};
pub use run::{
    evaluate_checkpoint, read_logs, run_plan, shuffle_listing, LogEntry, RunArtifacts, RunPlan,
    TranslatorRuns,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutcomeKind {
    Correct,
    ParseError,
    UnsupportedFeature,
    TranslatorError,
    ExecError,
    EmptyMismatch,
    CountZeroOnEmpty,
    WrongBindings,
}

impl OutcomeKind {
    pub const ALL: [OutcomeKind; 8] = [
        OutcomeKind::Correct,
        OutcomeKind::ParseError,
        OutcomeKind::UnsupportedFeature,
        OutcomeKind::TranslatorError,
        OutcomeKind::ExecError,
        OutcomeKind::EmptyMismatch,
        OutcomeKind::CountZeroOnEmpty,
        OutcomeKind::WrongBindings,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeKind::Correct => "Correct",
            OutcomeKind::ParseError => "ParseError",
            OutcomeKind::UnsupportedFeature => "UnsupportedFeature",
            OutcomeKind::TranslatorError => "TranslatorError",
            OutcomeKind::ExecError => "ExecError",
            OutcomeKind::EmptyMismatch => "EmptyMismatch",
            OutcomeKind::CountZeroOnEmpty => "CountZeroOnEmpty",
            OutcomeKind::WrongBindings => "WrongBindings",
        }
    }

    /// The generated query parsed and ran, whatever its answer.
    pub fn executed(self) -> bool {
        matches!(
            self,
            OutcomeKind::Correct
                | OutcomeKind::EmptyMismatch
                | OutcomeKind::CountZeroOnEmpty
                | OutcomeKind::WrongBindings
        )
    }
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub kind: OutcomeKind,
    pub detail: String,
}

impl EvalOutcome {
    fn new(kind: OutcomeKind, detail: impl Into<String>) -> Self {
        EvalOutcome {
            kind,
            detail: detail.into(),
        }
    }

    pub fn is_correct(&self) -> bool {
        self.kind == OutcomeKind::Correct
    }
}

/// Outcomes of one translator at one epoch of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointEval {
    pub run_id: String,
    pub translator: String,
    pub dataset: String,
    pub epoch: u32,
    /// Keyed by question (item) id.
    pub outcomes: BTreeMap<String, EvalOutcome>,
    pub correct_count: usize,
}

impl CheckpointEval {
    pub fn tally(&self) -> BTreeMap<OutcomeKind, usize> {
        let mut t = BTreeMap::new();
        for o in self.outcomes.values() {
            *t.entry(o.kind).or_insert(0) += 1;
        }
        t
    }
}

/// All checkpoints of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: String,
    pub seed: u64,
    /// In schedule order.
    pub checkpoints: Vec<CheckpointEval>,
    pub best: usize,
}

impl RunRecord {
    pub fn new(run_id: String, seed: u64, checkpoints: Vec<CheckpointEval>) -> Self {
        let best = checkpoints
            .iter()
            .map(|c| c.correct_count)
            .max()
            .unwrap_or(0);
        RunRecord {
            run_id,
            seed,
            checkpoints,
            best,
        }
    }
}

type GoldEntry = (String, Result<SolutionTable, ExecError>);

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold query of {id:?} could not be executed: {error}")]
    GoldUnavailable { id: String, error: ExecError },
    #[error("dataset has an empty test split")]
    EmptyTestSplit,
    #[error("translator {name}: {source}")]
    Translator {
        name: String,
        source: TranslatorError,
    },
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("run log {path}: {message}")]
    Log { path: String, message: String },
}

fn declares_prefix(text: &str, prefix: &str) -> bool {
    let pattern = format!(r"(?i)\bPREFIX\s+{}:", regex::escape(prefix));
    Regex::new(&pattern).expect("valid pattern").is_match(text)
}

/// Prepares generated text for execution. In ambient-prefixes mode the
/// dataset's preamble is prepended as PREFIX lines, skipping prefixes the
/// text already declares; self-contained text is returned unchanged.
pub fn assemble_query(generated: &str, dataset: &Dataset) -> String {
    if dataset.query_mode == QueryMode::SelfContained {
        return generated.to_string();
    }
    let mut out = String::new();
    for (prefix, iri) in &dataset.prefix_preamble {
        if !declares_prefix(generated, prefix) {
            out.push_str(&format!("PREFIX {prefix}: <{iri}>\n"));
        }
    }
    out.push_str(generated);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Projecting a variable the pattern never binds is a parse error.
    pub strict_projection: bool,
    /// Worker threads for classification.
    pub jobs: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            strict_projection: true,
            jobs: 1,
        }
    }
}

/// A dataset bound to a backend, with gold results cached.
pub struct EvalContext {
    pub dataset: Arc<Dataset>,
    pub backend: Backend,
    pub options: EvalOptions,
    gold: HashMap<String, Result<SolutionTable, ExecError>>,
}

impl EvalContext {
    /// Executes the gold queries of the test split once. Fails only when
    /// a remote backend cannot be reached.
    pub fn new(
        dataset: Arc<Dataset>,
        backend: Backend,
        options: EvalOptions,
    ) -> Result<Self, EvalError> {
        let ids: Vec<String> = dataset
            .test_items()
            .iter()
            .map(|i| i.record.id.clone())
            .collect();
        EvalContext::with_gold_for(dataset, backend, options, ids)
    }

    /// Like [`EvalContext::new`] but executes every record's gold query.
    pub fn for_all_records(
        dataset: Arc<Dataset>,
        backend: Backend,
        options: EvalOptions,
    ) -> Result<Self, EvalError> {
        let ids = dataset.records.iter().map(|r| r.id.clone()).collect();
        EvalContext::with_gold_for(dataset, backend, options, ids)
    }

    fn with_gold_for(
        dataset: Arc<Dataset>,
        backend: Backend,
        options: EvalOptions,
        mut ids: Vec<String>,
    ) -> Result<Self, EvalError> {
        ids.sort();
        ids.dedup();
        let threads = backend.max_parallel(options.jobs);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        let results: Result<Vec<GoldEntry>, EvalError> = pool.install(|| {
            ids.par_iter()
                .map(|id| {
                    let record = dataset.record(id).expect("id from dataset");
                    match execute_gold(&dataset, &backend, record) {
                        Err(
                            e @ (ExecError::Transport(_)
                            | ExecError::Timeout
                            | ExecError::HttpStatus(_)),
                        ) => Err(EvalError::GoldUnavailable {
                            id: id.clone(),
                            error: e,
                        }),
                        result => Ok((id.clone(), result)),
                    }
                })
                .collect()
        });
        let gold: HashMap<_, _> = results?.into_iter().collect();
        Ok(EvalContext {
            dataset,
            backend,
            options,
            gold,
        })
    }

    pub fn gold(&self, record_id: &str) -> Option<&Result<SolutionTable, ExecError>> {
        self.gold.get(record_id)
    }

    fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            strict_projection: self.options.strict_projection,
        }
    }

    /// Classifies one translator answer for `record`.
    pub fn classify(
        &self,
        record: &DatasetRecord,
        generated: &Result<String, TranslatorError>,
    ) -> EvalOutcome {
        let text = match generated {
            Ok(t) => t,
            Err(e) => return EvalOutcome::new(OutcomeKind::TranslatorError, e.to_string()),
        };
        let assembled = assemble_query(text, &self.dataset);
        let parsed = parse_query_with(&assembled, None, self.parse_options());
        let query = match (&parsed, &self.backend) {
            (Ok(q), _) => Some(q),
            (Err(QueryError::UnsupportedFeature(f)), Backend::Remote(_)) => {
                log::debug!("{}: executing remotely despite unsupported {f}", record.id);
                None
            }
            (Err(e @ QueryError::UnsupportedFeature(_)), Backend::Local(_)) => {
                return EvalOutcome::new(OutcomeKind::UnsupportedFeature, e.to_string())
            }
            (Err(e), _) => return EvalOutcome::new(OutcomeKind::ParseError, e.to_string()),
        };
        let gold = match self.gold.get(&record.id) {
            Some(Ok(g)) => g,
            Some(Err(e)) => {
                return EvalOutcome::new(OutcomeKind::ExecError, format!("gold query: {e}"))
            }
            None => {
                return EvalOutcome::new(
                    OutcomeKind::ExecError,
                    "gold results not cached for this record",
                )
            }
        };
        let result = match (&self.backend, query) {
            (Backend::Local(graph), Some(q)) => evaluate_local(q, graph),
            (Backend::Remote(endpoint), _) => endpoint.execute(&assembled).map(|mut t| {
                if let Some(q) = query {
                    t.set_flags(q.order_by.is_some(), q.distinct);
                }
                t
            }),
            (Backend::Local(_), None) => unreachable!("local backend requires a parsed query"),
        };
        let table = match result {
            Ok(t) => t,
            Err(e) => return EvalOutcome::new(OutcomeKind::ExecError, e.to_string()),
        };
        judge(gold, &table, query, &assembled)
    }

    /// Classifies many answers, in parallel up to the job limit. Results
    /// come back in input order.
    pub fn classify_all(
        &self,
        items: &[(&DatasetRecord, Result<String, TranslatorError>)],
    ) -> Vec<EvalOutcome> {
        let threads = self.backend.max_parallel(self.options.jobs);
        if threads <= 1 {
            return items.iter().map(|(r, g)| self.classify(r, g)).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| items.par_iter().map(|(r, g)| self.classify(r, g)).collect())
    }
}

fn execute_gold(
    dataset: &Dataset,
    backend: &Backend,
    record: &DatasetRecord,
) -> Result<SolutionTable, ExecError> {
    let text = assemble_query(&record.gold_query, dataset);
    match backend {
        Backend::Local(graph) => {
            if record.unsupported {
                return Err(ExecError::Unsupported(
                    "gold query is outside the locally supported subset".into(),
                ));
            }
            let query = parse_query_with(&text, None, ParseOptions::default())
                .map_err(|e| ExecError::Evaluation(format!("gold query does not parse: {e}")))?;
            evaluate_local(&query, graph)
        }
        Backend::Remote(endpoint) => {
            let mut table = endpoint.execute(&text)?;
            if let Ok(q) = parse_query_with(
                &text,
                None,
                ParseOptions {
                    strict_projection: false,
                },
            ) {
                table.set_flags(q.order_by.is_some(), q.distinct);
            }
            Ok(table)
        }
    }
}

fn is_zero(term: &Term) -> bool {
    term.as_literal()
        .and_then(|l| l.numeric())
        .is_some_and(|n| n.as_f64() == 0.0)
}

fn only_count(query: Option<&Query>, text: &str) -> bool {
    match query {
        Some(q) => q.projects_only_count(),
        None => text.to_ascii_uppercase().contains("COUNT"),
    }
}

fn judge(
    gold: &SolutionTable,
    generated: &SolutionTable,
    query: Option<&Query>,
    text: &str,
) -> EvalOutcome {
    let mismatch = match compare_solutions(gold, generated) {
        Ok(()) => return EvalOutcome::new(OutcomeKind::Correct, ""),
        Err(m) => m,
    };
    let gold_nonempty = match gold {
        SolutionTable::Boolean(_) => true,
        SolutionTable::Bindings(b) => !b.rows.is_empty(),
    };
    if let SolutionTable::Bindings(b) = generated {
        let zero_count = b.header.len() == 1
            && b.rows.len() == 1
            && b.rows[0][0].as_ref().is_some_and(is_zero)
            && only_count(query, text);
        if zero_count && gold_nonempty {
            return EvalOutcome::new(
                OutcomeKind::CountZeroOnEmpty,
                format!("COUNT returned 0; {mismatch}"),
            );
        }
        if b.rows.is_empty() && gold_nonempty {
            return EvalOutcome::new(OutcomeKind::EmptyMismatch, mismatch.to_string());
        }
    }
    EvalOutcome::new(OutcomeKind::WrongBindings, mismatch.to_string())
}
