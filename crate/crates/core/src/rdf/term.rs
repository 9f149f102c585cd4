use std::cmp::Ordering;
use std::fmt;

use super::vocab;

/// An RDF term. IRIs are always absolute once constructed by a parser.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal(Literal),
}

/// A literal. At most one of `datatype` and `language` is set; `xsd:string`
/// is normalized to a plain literal so that `"a"` and `"a"^^xsd:string`
/// compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Option<String>,
    language: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        let datatype = datatype.into();
        if datatype == vocab::XSD_STRING {
            return Literal::simple(lexical);
        }
        Literal {
            lexical: lexical.into(),
            datatype: Some(datatype),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language.into().to_ascii_lowercase()),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Explicit datatype, if any. Plain literals return `None`.
    pub fn explicit_datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }

    /// The effective datatype IRI (`xsd:string` or `rdf:langString` for
    /// untyped literals).
    pub fn datatype(&self) -> &str {
        match (&self.datatype, &self.language) {
            (Some(dt), _) => dt,
            (None, Some(_)) => vocab::RDF_LANG_STRING,
            (None, None) => vocab::XSD_STRING,
        }
    }

    pub fn is_numeric_type(&self) -> bool {
        self.datatype.as_deref().is_some_and(is_numeric_datatype)
    }

    /// The numeric value of a well-formed numeric literal.
    pub fn numeric(&self) -> Option<Numeric> {
        let dt = self.datatype.as_deref()?;
        if !is_numeric_datatype(dt) {
            return None;
        }
        let lex = self.lexical.trim();
        if is_integer_datatype(dt) {
            let digits = lex.strip_prefix('+').unwrap_or(lex);
            return digits.parse::<i128>().ok().map(Numeric::Integer);
        }
        let parsed = match lex {
            "INF" | "+INF" => Some(f64::INFINITY),
            "-INF" => Some(f64::NEG_INFINITY),
            "NaN" => Some(f64::NAN),
            _ if lex
                .chars()
                .all(|c| c.is_ascii_digit() || "+-.eE".contains(c)) =>
            {
                lex.parse().ok()
            }
            _ => None,
        };
        parsed.map(Numeric::Real)
    }

    pub fn boolean(&self) -> Option<bool> {
        if self.datatype.as_deref() != Some(vocab::XSD_BOOLEAN) {
            return None;
        }
        match self.lexical.as_str() {
            "true" | "1" => Some(true),
            "false" | "0" => Some(false),
            _ => None,
        }
    }
}

fn is_integer_datatype(dt: &str) -> bool {
    dt == vocab::XSD_INTEGER
        || dt
            .strip_prefix(vocab::XSD)
            .is_some_and(|local| vocab::XSD_INTEGER_DERIVED.contains(&local))
}

pub(crate) fn is_numeric_datatype(dt: &str) -> bool {
    is_integer_datatype(dt)
        || dt == vocab::XSD_DECIMAL
        || dt == vocab::XSD_DOUBLE
        || dt == vocab::XSD_FLOAT
}

/// Numeric value of a literal. Integers keep exact precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Numeric {
    Integer(i128),
    Real(f64),
}

impl Numeric {
    pub fn as_f64(self) -> f64 {
        match self {
            Numeric::Integer(i) => i as f64,
            Numeric::Real(r) => r,
        }
    }

    /// Total comparison: exact for integer pairs, `f64::total_cmp` otherwise.
    pub fn total_cmp(self, other: Numeric) -> Ordering {
        match (self, other) {
            (Numeric::Integer(a), Numeric::Integer(b)) => a.cmp(&b),
            (a, b) => {
                let (a, b) = (a.as_f64(), b.as_f64());
                // 0.0 and -0.0 are the same value
                if a == b {
                    Ordering::Equal
                } else {
                    a.total_cmp(&b)
                }
            }
        }
    }
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::Blank(label.into())
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::simple(lexical))
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal(Literal::typed(lexical, datatype))
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Term::Literal(Literal::lang(lexical, language))
    }

    pub fn integer(value: i64) -> Self {
        Term::typed(value.to_string(), vocab::XSD_INTEGER)
    }

    pub fn boolean(value: bool) -> Self {
        Term::typed(if value { "true" } else { "false" }, vocab::XSD_BOOLEAN)
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    /// IRI string, blank label or literal lexical form.
    pub fn value_str(&self) -> &str {
        match self {
            Term::Iri(iri) => iri,
            Term::Blank(label) => label,
            Term::Literal(lit) => &lit.lexical,
        }
    }
}

pub(crate) fn escape_string(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.lexical.len() + 2);
        s.push('"');
        escape_string(&self.lexical, &mut s);
        s.push('"');
        if let Some(lang) = &self.language {
            s.push('@');
            s.push_str(lang);
        } else if let Some(dt) = &self.datatype {
            s.push_str("^^<");
            s.push_str(dt);
            s.push('>');
        }
        f.write_str(&s)
    }
}

/// N-Triples form, used as the canonical serialization.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Blank(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

/// A triple whose subject is an IRI or blank node and whose predicate is an IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    /// Returns `None` if the subject is a literal or the predicate is not an IRI.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Option<Self> {
        if subject.is_literal() || !matches!(predicate, Term::Iri(_)) {
            return None;
        }
        Some(Triple {
            subject,
            predicate,
            object,
        })
    }

    pub(crate) fn canonical_key(&self) -> (String, String, String) {
        (
            self.subject.to_string(),
            self.predicate.to_string(),
            self.object.to_string(),
        )
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xsd_string_is_plain() {
        assert_eq!(Literal::typed("a", vocab::XSD_STRING), Literal::simple("a"));
        assert_eq!(Literal::simple("a").datatype(), vocab::XSD_STRING);
    }

    #[test]
    fn lang_literal_has_lang_string_type() {
        let lit = Literal::lang("chat", "FR");
        assert_eq!(lit.language(), Some("fr"));
        assert_eq!(lit.datatype(), vocab::RDF_LANG_STRING);
        assert_eq!(lit.explicit_datatype(), None);
    }

    #[test]
    fn literal_subject_rejected() {
        assert!(Triple::new(
            Term::literal("x"),
            Term::iri("http://p"),
            Term::literal("y")
        )
        .is_none());
        assert!(Triple::new(Term::iri("http://s"), Term::blank("b"), Term::literal("y")).is_none());
    }

    #[test]
    fn numeric_values() {
        let ten = Literal::typed("10", vocab::XSD_INTEGER);
        let ten_dec = Literal::typed("10.0", vocab::XSD_DECIMAL);
        assert_eq!(
            ten.numeric().unwrap().total_cmp(ten_dec.numeric().unwrap()),
            Ordering::Equal
        );
        assert!(Literal::typed("abc", vocab::XSD_INTEGER)
            .numeric()
            .is_none());
        assert!(Literal::simple("10").numeric().is_none());
    }

    #[test]
    fn display_escapes() {
        let t = Term::literal("say \"hi\"\n");
        assert_eq!(t.to_string(), r#""say \"hi\"\n""#);
        assert_eq!(Term::lang("x", "en").to_string(), "\"x\"@en");
    }
}
