//! The supported SPARQL subset: SELECT and ASK over basic graph patterns
//! with FILTER, OPTIONAL, DISTINCT, GROUP BY with COUNT, ORDER BY, LIMIT and
//! OFFSET.
//!
//! Parsing distinguishes text that is not valid SPARQL
//! ([`QueryError::Parse`]) from valid SPARQL outside the subset
//! ([`QueryError::UnsupportedFeature`]); the evaluator reports the two
//! differently.

mod ast;
mod error;
mod lexer;
mod parser;
mod serialize;

pub use ast::*;
pub use error::{ParseError, ParseErrorKind, QueryError};
pub use parser::{parse_query, parse_query_with, ParseOptions};
pub use serialize::serialize_query;

#[cfg(test)]
mod tests;
