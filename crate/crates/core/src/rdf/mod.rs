//! RDF data model, Turtle ingestion and the in-memory triple store used as
//! the local execution backend.

mod graph;
pub mod iri;
mod term;
mod turtle;
mod write;

use std::collections::BTreeMap;

pub use graph::{load_graph, Graph, GraphBuilder, GraphLoadError};
pub use term::{Literal, Term, Triple};
pub use turtle::{parse_turtle, TurtleError, TurtleParser};
pub use write::to_turtle;

/// Prefix label (without the trailing colon) to namespace IRI.
pub type PrefixMap = BTreeMap<String, String>;

pub mod vocab {
    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
    pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

    /// Integer-derived XSD types compared by value alongside the four
    /// primitive numeric types.
    pub const XSD_INTEGER_DERIVED: &[&str] = &[
        "int",
        "long",
        "short",
        "byte",
        "nonNegativeInteger",
        "positiveInteger",
        "nonPositiveInteger",
        "negativeInteger",
        "unsignedInt",
        "unsignedLong",
        "unsignedShort",
        "unsignedByte",
    ];
}
