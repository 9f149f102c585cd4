//! Core of the `textsparql` benchmark harness.
//!
//! The crate measures how well a translator turns natural-language
//! questions into SPARQL: generated queries are executed against a target
//! knowledge graph (an in-memory store or a remote endpoint) and their
//! result sets are compared with the results of gold queries.
//!
//! Modules, bottom up:
//!
//! - [`rdf`]: terms, triples, the indexed in-memory [`Graph`](rdf::Graph) and Turtle I/O.
//! - [`sparql`]: the supported SPARQL subset, parsed into a [`Query`](sparql::Query).
//! - [`exec`]: local evaluation, the SPARQL protocol client and result tables.
//! - [`dataset`]: benchmark manifests, run seeds and seeded shuffles.
//! - [`translator`]: built-in, subprocess and HTTP translators.
//! - [`evaluator`]: outcome classification and checkpoint evaluation.
//! - [`stats`]: best-of-run statistics and report files.
//! - [`datagen`]: candidate generation, verification and paraphrasing.

pub mod datagen;
pub mod dataset;
pub mod evaluator;
pub mod exec;
pub mod rdf;
pub mod sparql;
pub mod stats;
pub mod translator;

pub use dataset::{
    derive_seed, load_dataset, shuffle_train, Dataset, DatasetRecord, QueryMode, RunId, Split,
};
pub use evaluator::{
    CheckpointEval, EvalContext, EvalOptions, EvalOutcome, OutcomeKind, RunRecord,
};
pub use exec::{Backend, RemoteEndpoint, SolutionTable};
pub use rdf::{Graph, PrefixMap, Term, Triple};
pub use sparql::{parse_query, serialize_query, Query, QueryError};
pub use translator::{TranslatorHandle, Transport};
