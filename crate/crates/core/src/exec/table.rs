use std::cmp::Ordering;

use crate::rdf::{Literal, Term};

/// One result row, aligned with the table header. `None` is an unbound cell.
pub type Row = Vec<Option<Term>>;

/// Result of executing a query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionTable {
    Boolean(bool),
    Bindings(Bindings),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bindings {
    pub header: Vec<String>,
    pub rows: Vec<Row>,
    /// Row order is meaningful (the query had ORDER BY).
    pub ordered: bool,
    /// The producing query had DISTINCT.
    pub distinct: bool,
}

impl SolutionTable {
    pub fn bindings(header: Vec<String>, rows: Vec<Row>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == header.len()));
        SolutionTable::Bindings(Bindings {
            header,
            rows,
            ordered: false,
            distinct: false,
        })
    }

    pub fn as_bindings(&self) -> Option<&Bindings> {
        match self {
            SolutionTable::Bindings(b) => Some(b),
            SolutionTable::Boolean(_) => None,
        }
    }

    /// Number of rows; a boolean table has none.
    pub fn row_count(&self) -> usize {
        self.as_bindings().map_or(0, |b| b.rows.len())
    }

    pub fn is_empty_bindings(&self) -> bool {
        matches!(self, SolutionTable::Bindings(b) if b.rows.is_empty())
    }

    pub fn set_flags(&mut self, ordered: bool, distinct: bool) {
        if let SolutionTable::Bindings(b) = self {
            b.ordered = ordered;
            b.distinct = distinct;
        }
    }

    /// Flattened cell values as strings: lexical forms for literals, the IRI
    /// for IRIs, labels for blank nodes, `true`/`false` for boolean tables.
    /// Unbound cells are skipped.
    pub fn value_strings(&self) -> Vec<String> {
        match self {
            SolutionTable::Boolean(b) => vec![b.to_string()],
            SolutionTable::Bindings(b) => b
                .rows
                .iter()
                .flat_map(|r| r.iter().flatten().map(|t| t.value_str().to_string()))
                .collect(),
        }
    }
}

fn literal_class(lit: &Literal) -> u8 {
    if lit.numeric().is_some() {
        0
    } else {
        1
    }
}

fn cmp_literal(a: &Literal, b: &Literal) -> Ordering {
    match (a.numeric(), b.numeric()) {
        (Some(x), Some(y)) => x
            .total_cmp(y)
            .then_with(|| a.datatype().cmp(b.datatype()))
            .then_with(|| a.lexical().cmp(b.lexical())),
        _ => literal_class(a)
            .cmp(&literal_class(b))
            .then_with(|| a.datatype().cmp(b.datatype()))
            .then_with(|| a.language().cmp(&b.language()))
            .then_with(|| a.lexical().cmp(b.lexical())),
    }
}

/// Total order over optional terms: absent < blank < IRI < literal.
/// Well-formed numeric literals sort first among literals, by value; other
/// literals by datatype IRI, language tag, then lexical form.
pub fn term_order(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    fn rank(t: Option<&Term>) -> u8 {
        match t {
            None => 0,
            Some(Term::Blank(_)) => 1,
            Some(Term::Iri(_)) => 2,
            Some(Term::Literal(_)) => 3,
        }
    }
    match (a, b) {
        (Some(Term::Blank(x)), Some(Term::Blank(y))) => x.cmp(y),
        (Some(Term::Iri(x)), Some(Term::Iri(y))) => x.cmp(y),
        (Some(Term::Literal(x)), Some(Term::Literal(y))) => cmp_literal(x, y),
        _ => rank(a).cmp(&rank(b)),
    }
}

pub fn row_order(a: &[Option<Term>], b: &[Option<Term>]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| term_order(x.as_ref(), y.as_ref()))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::vocab;

    #[test]
    fn order_classes() {
        let blank = Term::blank("b");
        let iri = Term::iri("http://a");
        let lit = Term::literal("a");
        assert_eq!(term_order(None, Some(&blank)), Ordering::Less);
        assert_eq!(term_order(Some(&blank), Some(&iri)), Ordering::Less);
        assert_eq!(term_order(Some(&iri), Some(&lit)), Ordering::Less);
    }

    #[test]
    fn numeric_by_value() {
        let two = Term::typed("2", vocab::XSD_INTEGER);
        let ten = Term::typed("10", vocab::XSD_INTEGER);
        let ten_dec = Term::typed("9.5", vocab::XSD_DECIMAL);
        assert_eq!(term_order(Some(&two), Some(&ten)), Ordering::Less);
        assert_eq!(term_order(Some(&ten_dec), Some(&ten)), Ordering::Less);
        assert_eq!(
            term_order(Some(&ten), Some(&Term::literal("1"))),
            Ordering::Less
        );
    }

    #[test]
    fn order_is_total_and_antisymmetric() {
        let terms = vec![
            None,
            Some(Term::blank("x")),
            Some(Term::iri("http://b")),
            Some(Term::iri("http://a")),
            Some(Term::literal("b")),
            Some(Term::lang("b", "en")),
            Some(Term::typed("1.0", vocab::XSD_DECIMAL)),
            Some(Term::typed("1", vocab::XSD_INTEGER)),
            Some(Term::typed("x", vocab::XSD_INTEGER)),
        ];
        for a in &terms {
            for b in &terms {
                let ab = term_order(a.as_ref(), b.as_ref());
                let ba = term_order(b.as_ref(), a.as_ref());
                assert_eq!(ab, ba.reverse());
                if ab.is_eq() {
                    assert_eq!(a, b);
                }
            }
        }
    }
}
