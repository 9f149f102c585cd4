//! Query execution against a local graph or a remote endpoint.

mod expr;
mod local;
mod remote;
mod results_json;
mod table;

use std::sync::Arc;

use thiserror::Error;

use crate::rdf::Graph;
use crate::sparql::{parse_query, QueryError};

pub use local::evaluate_local;
pub use remote::RemoteEndpoint;
pub use results_json::parse_results_json;
pub use table::{row_order, term_order, Bindings, Row, SolutionTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExecError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {0}")]
    HttpStatus(u16),
    #[error("malformed results at {path}: {message}")]
    MalformedResults { path: String, message: String },
    #[error("request timed out")]
    Timeout,
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("query not executable by this backend: {0}")]
    Unsupported(String),
}

/// Where queries run.
#[derive(Debug, Clone)]
pub enum Backend {
    Local(Arc<Graph>),
    Remote(RemoteEndpoint),
}

impl Backend {
    /// Executes query text. A local backend parses it first (with the graph's
    /// prefixes as ambient declarations); a remote one forwards it verbatim.
    pub fn execute(&self, text: &str) -> Result<SolutionTable, ExecError> {
        match self {
            Backend::Local(graph) => {
                let query = parse_query(text, None).map_err(|e| match e {
                    QueryError::UnsupportedFeature(f) => ExecError::Unsupported(f),
                    other => ExecError::Evaluation(other.to_string()),
                })?;
                evaluate_local(&query, graph)
            }
            Backend::Remote(endpoint) => endpoint.execute(text),
        }
    }

    /// Concurrency cap for parallel execution.
    pub fn max_parallel(&self, jobs: usize) -> usize {
        match self {
            Backend::Local(_) => jobs.max(1),
            Backend::Remote(e) => jobs.clamp(1, e.max_connections.max(1)),
        }
    }

    pub fn is_local(&self) -> bool {
        matches!(self, Backend::Local(_))
    }
}

/// Runs query text against a remote endpoint.
pub fn execute_remote(query: &str, endpoint: &RemoteEndpoint) -> Result<SolutionTable, ExecError> {
    endpoint.execute(query)
}
