//! Turtle reader covering prefixes, base, IRIs, prefixed names, blank nodes
//! (labels and `[...]`), string/numeric/boolean literals, language tags,
//! datatypes, predicate and object lists and the `a` keyword. Collections
//! are rejected.

use super::graph::{Graph, GraphBuilder};
use super::iri;
use super::vocab;
use super::{PrefixMap, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TurtleError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undefined prefix '{prefix}:'")]
    UndefinedPrefix {
        line: usize,
        column: usize,
        prefix: String,
    },
    #[error("{line}:{column}: invalid IRI <{iri}>: {reason}")]
    InvalidIri {
        line: usize,
        column: usize,
        iri: String,
        reason: String,
    },
}

impl TurtleError {
    pub fn line(&self) -> usize {
        match self {
            TurtleError::Syntax { line, .. }
            | TurtleError::UndefinedPrefix { line, .. }
            | TurtleError::InvalidIri { line, .. } => *line,
        }
    }
}

/// Parses a Turtle document. The returned graph carries every `@prefix`
/// declaration in [`Graph::prefixes`].
pub fn parse_turtle(text: &str, base: Option<&str>) -> Result<Graph, TurtleError> {
    let mut parser = TurtleParser::new();
    if let Some(base) = base {
        parser = parser.base(base);
    }
    parser.parse(text)
}

#[derive(Debug, Clone, Default)]
pub struct TurtleParser {
    base: Option<String>,
    blank_prefix: String,
}

impl TurtleParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn base(mut self, base: impl Into<String>) -> Self {
        self.base = Some(base.into());
        self
    }

    /// Prefix prepended to every blank node label of the document.
    pub fn blank_prefix(mut self, prefix: impl Into<String>) -> Self {
        self.blank_prefix = prefix.into();
        self
    }

    pub fn parse(&self, text: &str) -> Result<Graph, TurtleError> {
        let mut state = State {
            chars: text.chars().collect(),
            pos: 0,
            base: self.base.clone(),
            prefixes: PrefixMap::new(),
            builder: GraphBuilder::new(),
            blank_prefix: &self.blank_prefix,
            anon: 0,
        };
        state.document()?;
        let State {
            prefixes,
            mut builder,
            ..
        } = state;
        for (k, v) in prefixes {
            builder.add_prefix(k, v);
        }
        Ok(builder.build())
    }
}

struct State<'a> {
    chars: Vec<char>,
    pos: usize,
    base: Option<String>,
    prefixes: PrefixMap,
    builder: GraphBuilder,
    blank_prefix: &'a str,
    anon: usize,
}

fn is_pn_chars_base(c: char) -> bool {
    c.is_alphabetic()
}

fn is_pn_chars_u(c: char) -> bool {
    is_pn_chars_base(c) || c == '_'
}

fn is_pn_chars(c: char) -> bool {
    is_pn_chars_u(c) || c == '-' || c.is_numeric() || c == '\u{00B7}'
}

impl State<'_> {
    fn position(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut column = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        (line, column)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, TurtleError> {
        let (line, column) = self.position(self.pos);
        Err(TurtleError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, expected: char) -> Result<(), TurtleError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.error(format!("expected '{expected}', found '{c}'")),
            None => self.error(format!("expected '{expected}', found end of input")),
        }
    }

    fn keyword_ahead(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        let matches = kw
            .chars()
            .enumerate()
            .all(|(i, k)| self.peek_at(i).is_some_and(|c| c.eq_ignore_ascii_case(&k)));
        matches
            && self
                .peek_at(n)
                .is_none_or(|c| c.is_whitespace() || c == '<' || c == '#')
    }

    fn document(&mut self) -> Result<(), TurtleError> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> Result<(), TurtleError> {
        if self.peek() == Some('@') {
            self.pos += 1;
            if self.keyword_ahead("prefix") {
                self.pos += 6;
                self.prefix_body()?;
            } else if self.keyword_ahead("base") {
                self.pos += 4;
                self.base_body()?;
            } else {
                return self.error("unknown directive");
            }
            return self.expect('.');
        }
        if self.keyword_ahead("PREFIX") {
            self.pos += 6;
            return self.prefix_body();
        }
        if self.keyword_ahead("BASE") {
            self.pos += 4;
            return self.base_body();
        }
        self.triples()?;
        self.expect('.')
    }

    fn prefix_body(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        let start = self.pos;
        let prefix = self.pn_prefix();
        if self.peek() != Some(':') {
            self.pos = start;
            return self.error("expected prefix name ending in ':'");
        }
        self.pos += 1;
        self.skip_ws();
        if self.peek() != Some('<') {
            return self.error("expected IRI after prefix name");
        }
        let iri = self.iriref()?;
        self.prefixes.insert(prefix, iri);
        Ok(())
    }

    fn base_body(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        if self.peek() != Some('<') {
            return self.error("expected IRI after base");
        }
        let iri = self.iriref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), TurtleError> {
        self.skip_ws();
        if self.peek() == Some('[') {
            let (subject, had_props) = self.blank_node_property_list()?;
            self.skip_ws();
            if had_props && matches!(self.peek(), Some('.')) {
                return Ok(());
            }
            return self.predicate_object_list(&subject);
        }
        let subject = self.subject()?;
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> Result<Term, TurtleError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iriref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('(') => self.error("collections are not supported"),
            Some('"') | Some('\'') => self.error("a literal cannot be a subject"),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                self.error("a literal cannot be a subject")
            }
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => self.error("unexpected end of input"),
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), TurtleError> {
        let predicate = self.verb()?;
        self.object_list(subject, &predicate)?;
        loop {
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.pos += 1;
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Term) -> Result<(), TurtleError> {
        loop {
            let object = self.object()?;
            let triple = Triple::new(subject.clone(), predicate.clone(), object)
                .expect("subject and predicate kinds are enforced by the grammar");
            self.builder.insert(triple);
            self.skip_ws();
            if self.peek() == Some(',') {
                self.pos += 1;
            } else {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Term, TurtleError> {
        self.skip_ws();
        if self.peek() == Some('a')
            && self
                .peek_at(1)
                .is_none_or(|c| c.is_whitespace() || c == '<' || c == '[' || c == '"')
        {
            self.pos += 1;
            return Ok(Term::iri(vocab::RDF_TYPE));
        }
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iriref()?)),
            Some('_') if self.peek_at(1) == Some(':') => {
                self.error("a blank node cannot be a predicate")
            }
            Some(c) if c == ':' || is_pn_chars_base(c) => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => self.error(format!("expected predicate, found '{c}'")),
            None => self.error("expected predicate, found end of input"),
        }
    }

    fn object(&mut self) -> Result<Term, TurtleError> {
        self.skip_ws();
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iriref()?)),
            Some('_') if self.peek_at(1) == Some(':') => self.blank_label(),
            Some('[') => Ok(self.blank_node_property_list()?.0),
            Some('(') => self.error("collections are not supported"),
            Some('"') | Some('\'') => self.rdf_literal(),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => self.numeric(),
            Some(_) if self.word_ahead("true") => {
                self.pos += 4;
                Ok(Term::boolean(true))
            }
            Some(_) if self.word_ahead("false") => {
                self.pos += 5;
                Ok(Term::boolean(false))
            }
            Some(_) => Ok(Term::Iri(self.prefixed_name()?)),
            None => self.error("expected object, found end of input"),
        }
    }

    fn word_ahead(&self, word: &str) -> bool {
        let n = word.chars().count();
        word.chars()
            .enumerate()
            .all(|(i, w)| self.peek_at(i) == Some(w))
            && self
                .peek_at(n)
                .is_none_or(|c| !(is_pn_chars(c) || c == ':'))
    }

    /// Parses `[ ... ]`, returning the node and whether it had properties.
    fn blank_node_property_list(&mut self) -> Result<(Term, bool), TurtleError> {
        self.expect('[')?;
        let node = self.fresh_blank();
        self.skip_ws();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok((node, false));
        }
        self.predicate_object_list(&node)?;
        self.expect(']')?;
        Ok((node, true))
    }

    fn fresh_blank(&mut self) -> Term {
        let label = format!("{}genid{}", self.blank_prefix, self.anon);
        self.anon += 1;
        Term::Blank(label)
    }

    fn blank_label(&mut self) -> Result<Term, TurtleError> {
        self.pos += 2;
        let start = self.pos;
        match self.peek() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => self.pos += 1,
            _ => return self.error("invalid blank node label"),
        }
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || c == '.' {
                self.pos += 1;
            } else {
                break;
            }
        }
        while self.pos > start + 1 && self.chars[self.pos - 1] == '.' {
            self.pos -= 1;
        }
        let label: String = self.chars[start..self.pos].iter().collect();
        Ok(Term::Blank(format!("{}{}", self.blank_prefix, label)))
    }

    fn iriref(&mut self) -> Result<String, TurtleError> {
        let start = self.pos;
        self.pos += 1;
        let mut raw = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some('\\') => {
                    let c = self.unicode_escape()?;
                    raw.push(c);
                }
                Some(c) => raw.push(c),
                None => {
                    self.pos = start;
                    return self.error("unterminated IRI");
                }
            }
        }
        let (line, column) = self.position(start);
        if let Some(c) = iri::invalid_char(&raw) {
            return Err(TurtleError::InvalidIri {
                line,
                column,
                iri: raw,
                reason: format!("character {c:?} not allowed"),
            });
        }
        if iri::is_absolute(&raw) {
            return Ok(raw);
        }
        match &self.base {
            Some(base) => iri::resolve(base, &raw).map_err(|reason| TurtleError::InvalidIri {
                line,
                column,
                iri: raw,
                reason,
            }),
            None => Err(TurtleError::InvalidIri {
                line,
                column,
                iri: raw,
                reason: "relative IRI without a base".into(),
            }),
        }
    }

    fn unicode_escape(&mut self) -> Result<char, TurtleError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return self.error("invalid escape in IRI"),
        };
        self.hex_char(len)
    }

    fn hex_char(&mut self, len: usize) -> Result<char, TurtleError> {
        let mut value = 0u32;
        for _ in 0..len {
            match self.bump().and_then(|c| c.to_digit(16)) {
                Some(d) => value = value * 16 + d,
                None => return self.error("invalid hex escape"),
            }
        }
        match char::from_u32(value) {
            Some(c) => Ok(c),
            None => self.error("escape is not a valid code point"),
        }
    }

    fn pn_prefix(&mut self) -> String {
        let start = self.pos;
        if self.peek().is_some_and(is_pn_chars_base) {
            self.pos += 1;
            while let Some(c) = self.peek() {
                if is_pn_chars(c) || c == '.' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            while self.chars[self.pos - 1] == '.' {
                self.pos -= 1;
            }
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn prefixed_name(&mut self) -> Result<String, TurtleError> {
        let start = self.pos;
        let prefix = self.pn_prefix();
        if self.peek() != Some(':') {
            self.pos = start;
            return match self.peek() {
                Some(c) => self.error(format!("unexpected character '{c}'")),
                None => self.error("unexpected end of input"),
            };
        }
        self.pos += 1;
        let local = self.pn_local()?;
        match self.prefixes.get(&prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => {
                let (line, column) = self.position(start);
                Err(TurtleError::UndefinedPrefix {
                    line,
                    column,
                    prefix,
                })
            }
        }
    }

    fn pn_local(&mut self) -> Result<String, TurtleError> {
        let mut local = String::new();
        let mut first = true;
        while let Some(c) = self.peek() {
            let ok = if first {
                is_pn_chars_u(c) || c == ':' || c.is_ascii_digit()
            } else {
                is_pn_chars(c) || c == '.' || c == ':'
            };
            if c == '%' {
                let h1 = self.peek_at(1).filter(char::is_ascii_hexdigit);
                let h2 = self.peek_at(2).filter(char::is_ascii_hexdigit);
                match (h1, h2) {
                    (Some(a), Some(b)) => {
                        local.push('%');
                        local.push(a);
                        local.push(b);
                        self.pos += 3;
                    }
                    _ => return self.error("invalid percent escape in local name"),
                }
            } else if c == '\\' {
                match self.peek_at(1) {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                        local.push(e);
                        self.pos += 2;
                    }
                    _ => return self.error("invalid escape in local name"),
                }
            } else if ok {
                local.push(c);
                self.pos += 1;
            } else {
                break;
            }
            first = false;
        }
        while local.ends_with('.') && self.chars[self.pos - 1] == '.' {
            local.pop();
            self.pos -= 1;
        }
        Ok(local)
    }

    fn rdf_literal(&mut self) -> Result<Term, TurtleError> {
        let lexical = self.string()?;
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                let start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '-')
                {
                    self.pos += 1;
                }
                let tag: String = self.chars[start..self.pos].iter().collect();
                if tag.is_empty() || !tag.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    return self.error("invalid language tag");
                }
                Ok(Term::lang(lexical, tag))
            }
            Some('^') if self.peek_at(1) == Some('^') => {
                self.pos += 2;
                let datatype = match self.peek() {
                    Some('<') => self.iriref()?,
                    _ => self.prefixed_name()?,
                };
                Ok(Term::typed(lexical, datatype))
            }
            _ => Ok(Term::literal(lexical)),
        }
    }

    fn string(&mut self) -> Result<String, TurtleError> {
        let start = self.pos;
        let quote = self.bump().expect("caller checked quote");
        let long = self.peek() == Some(quote) && self.peek_at(1) == Some(quote);
        if long {
            self.pos += 2;
        }
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                self.pos = start;
                return self.error("unterminated string");
            };
            match c {
                c if c == quote && !long => return Ok(out),
                c if c == quote && self.peek() == Some(quote) && self.peek_at(1) == Some(quote) => {
                    // a long string may end with up to two extra quote characters
                    while self.peek_at(2) == Some(quote) && self.peek_at(3) == Some(quote) {
                        out.push(quote);
                        self.pos += 1;
                    }
                    self.pos += 2;
                    return Ok(out);
                }
                '\n' | '\r' if !long => return self.error("newline in short string"),
                '\\' => {
                    let e = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return self.error("invalid string escape"),
                    };
                    out.push(e);
                }
                c => out.push(c),
            }
        }
    }

    fn numeric(&mut self) -> Result<Term, TurtleError> {
        let start = self.pos;
        if matches!(self.peek(), Some('+') | Some('-')) {
            self.pos += 1;
        }
        let int_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let int_digits = self.pos - int_start;
        let mut frac_digits = 0;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
                frac_digits += 1;
            }
        }
        let mut exponent = false;
        if matches!(self.peek(), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                exponent = true;
            } else {
                self.pos = save;
            }
        }
        if int_digits + frac_digits == 0 {
            self.pos = start;
            return self.error("invalid numeric literal");
        }
        let lexical: String = self.chars[start..self.pos].iter().collect();
        let datatype = if exponent {
            vocab::XSD_DOUBLE
        } else if frac_digits > 0 {
            vocab::XSD_DECIMAL
        } else {
            vocab::XSD_INTEGER
        };
        Ok(Term::typed(lexical, datatype))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOAF: &str = "http://xmlns.com/foaf/0.1/";

    #[test]
    fn empty_document() {
        let g = parse_turtle("", None).unwrap();
        assert!(g.is_empty());
        assert!(g.prefixes().is_empty());
    }

    #[test]
    fn single_statement() {
        let g = parse_turtle(
            "@prefix foaf: <http://xmlns.com/foaf/0.1/> . @prefix : <http://ex.org/> . :bob foaf:surname \"Tanner\" .",
            None,
        )
        .unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.prefixes().len(), 2);
        let t = &g.triples()[0];
        assert_eq!(t.subject, Term::iri("http://ex.org/bob"));
        assert_eq!(t.predicate, Term::iri(format!("{FOAF}surname")));
        assert_eq!(t.object, Term::literal("Tanner"));
    }

    #[test]
    fn lists_keywords_and_literals() {
        let doc = r#"
            PREFIX ex: <http://ex.org/>
            ex:a a ex:C ;
                ex:n 42, 3.5, 1e3, -7 ;
                ex:b true ;
                ex:l "chat"@fr, 'x'^^ex:T, """multi
line""" ;
                ex:r [ ex:q "inner" ] .
            [] ex:p ex:o .
            [ ex:p2 ex:o2 ] .
        "#;
        let g = parse_turtle(doc, None).unwrap();
        assert_eq!(g.len(), 13);
        let xsd = vocab::XSD;
        let has = |o: Term| g.match_pattern(None, None, Some(&o)).next().is_some();
        assert!(has(Term::typed("42", format!("{xsd}integer"))));
        assert!(has(Term::typed("3.5", format!("{xsd}decimal"))));
        assert!(has(Term::typed("1e3", format!("{xsd}double"))));
        assert!(has(Term::typed("-7", format!("{xsd}integer"))));
        assert!(has(Term::boolean(true)));
        assert!(has(Term::lang("chat", "fr")));
        assert!(has(Term::typed("x", "http://ex.org/T")));
        assert!(has(Term::literal("multi\nline")));
        assert!(has(Term::iri("http://ex.org/C")));
    }

    #[test]
    fn integer_before_final_dot() {
        let g = parse_turtle("<http://e/s> <http://e/p> 3.", None).unwrap();
        assert_eq!(g.triples()[0].object, Term::integer(3));
    }

    #[test]
    fn base_resolution() {
        let g = parse_turtle("@base <http://ex.org/dir/> . <a> <#p> <../b> .", None).unwrap();
        let t = &g.triples()[0];
        assert_eq!(t.subject, Term::iri("http://ex.org/dir/a"));
        assert_eq!(t.predicate, Term::iri("http://ex.org/dir/#p"));
        assert_eq!(t.object, Term::iri("http://ex.org/b"));
    }

    #[test]
    fn errors() {
        let err = parse_turtle("ex:a ex:b ex:c .", None).unwrap_err();
        assert!(matches!(err, TurtleError::UndefinedPrefix { ref prefix, .. } if prefix == "ex"));

        let err = parse_turtle("<a> <http://p> <http://o> .", None).unwrap_err();
        assert!(matches!(err, TurtleError::InvalidIri { .. }));

        let err = parse_turtle("<http://s> <http://p> (1 2) .", None).unwrap_err();
        assert!(err.to_string().contains("collections"));

        let err = parse_turtle("<http://s> <http://p> <http://o>\n<http://s2>", None).unwrap_err();
        assert_eq!(err.line(), 2);

        assert!(parse_turtle("\"lit\" <http://p> <http://o> .", None).is_err());
        assert!(parse_turtle("<http://s> <http://p> \"open .", None).is_err());
    }

    #[test]
    fn blank_prefixing() {
        let g = TurtleParser::new()
            .blank_prefix("d1_")
            .parse("_:x <http://p> [] .")
            .unwrap();
        let t = &g.triples()[0];
        assert_eq!(t.subject, Term::blank("d1_x"));
        assert_eq!(t.object, Term::blank("d1_genid0"));
    }
}
