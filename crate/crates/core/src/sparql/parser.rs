use std::collections::HashSet;

use super::ast::*;
use super::error::{ParseErrorKind, QueryError};
use super::lexer::{tokenize, Tok, Token};
use crate::rdf::{iri, vocab, PrefixMap, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject projected variables that the WHERE clause never binds.
    pub strict_projection: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            strict_projection: true,
        }
    }
}

/// Parses a query of the supported subset. Prefixed names resolve against
/// the query prologue first, then `ambient_prefixes`.
pub fn parse_query(text: &str, ambient_prefixes: Option<&PrefixMap>) -> Result<Query, QueryError> {
    parse_query_with(text, ambient_prefixes, ParseOptions::default())
}

pub fn parse_query_with(
    text: &str,
    ambient_prefixes: Option<&PrefixMap>,
    options: ParseOptions,
) -> Result<Query, QueryError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        text,
        toks,
        i: 0,
        prefixes: PrefixMap::new(),
        base: None,
        ambient: ambient_prefixes,
        anon: 0,
    };
    let (query, select_pos) = p.query()?;
    validate(&query, text, select_pos, options)?;
    Ok(query)
}

const UNSUPPORTED_KEYWORDS: &[(&str, &str)] = &[
    ("UNION", "UNION"),
    ("MINUS", "MINUS"),
    ("VALUES", "VALUES"),
    ("BIND", "BIND"),
    ("SERVICE", "federated query (SERVICE)"),
    ("GRAPH", "named graphs (GRAPH)"),
];

const UNSUPPORTED_FUNCTIONS: &[&str] = &[
    "LANGMATCHES",
    "ISIRI",
    "ISURI",
    "ISBLANK",
    "ISLITERAL",
    "ISNUMERIC",
    "SAMETERM",
    "IRI",
    "URI",
    "BNODE",
    "RAND",
    "ABS",
    "CEIL",
    "FLOOR",
    "ROUND",
    "CONCAT",
    "STRLEN",
    "UCASE",
    "LCASE",
    "ENCODE_FOR_URI",
    "STRENDS",
    "STRBEFORE",
    "STRAFTER",
    "YEAR",
    "MONTH",
    "DAY",
    "HOURS",
    "MINUTES",
    "SECONDS",
    "TIMEZONE",
    "TZ",
    "NOW",
    "UUID",
    "STRUUID",
    "MD5",
    "SHA1",
    "SHA256",
    "SHA384",
    "SHA512",
    "COALESCE",
    "IF",
    "STRLANG",
    "STRDT",
    "SUBSTR",
    "REPLACE",
];

const AGGREGATES: &[&str] = &["SUM", "AVG", "MIN", "MAX", "SAMPLE", "GROUP_CONCAT"];

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    i: usize,
    prefixes: PrefixMap,
    base: Option<String>,
    ambient: Option<&'a PrefixMap>,
    anon: usize,
}

type PResult<T> = Result<T, QueryError>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.i + n).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.text.len(), |t| t.start)
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(QueryError::syntax(self.text, self.pos(), msg))
    }

    fn unsupported<T>(&self, what: &str) -> PResult<T> {
        if self.peek_at(1).is_none() {
            return self.err("unexpected end of query");
        }
        Err(QueryError::UnsupportedFeature(what.to_string()))
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of query".into(),
            Some(Tok::Punct(p)) => format!("'{p}'"),
            Some(Tok::Ident(w)) => format!("'{w}'"),
            Some(Tok::Var(v)) => format!("?{v}"),
            Some(Tok::IriRef(i)) => format!("<{i}>"),
            Some(Tok::PName { prefix, local }) => format!("{prefix}:{local}"),
            Some(Tok::Str(_)) => "string literal".into(),
            Some(_) => "literal".into(),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn kw_at(&self, n: usize, kw: &str) -> bool {
        matches!(self.peek_at(n), Some(Tok::Ident(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(format!("expected {kw}, found {}", self.describe()))
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.err(format!("expected '{p}', found {}", self.describe()))
        }
    }

    fn query(&mut self) -> PResult<(Query, usize)> {
        self.prologue()?;
        let form_pos = self.pos();
        let mut query = if self.eat_kw("SELECT") {
            self.select()?
        } else if self.eat_kw("ASK") {
            Query {
                prefixes: PrefixMap::new(),
                form: QueryForm::Ask,
                distinct: false,
                projection: Projection::Items(Vec::new()),
                pattern: GroupPattern::default(),
                group_by: None,
                order_by: None,
                limit: None,
                offset: None,
            }
        } else if self.is_kw("CONSTRUCT") || self.is_kw("DESCRIBE") {
            let Some(Tok::Ident(w)) = self.peek() else {
                unreachable!()
            };
            return self.unsupported(&format!("{} query form", w.to_ascii_uppercase()));
        } else if [
            "INSERT", "DELETE", "LOAD", "CLEAR", "CREATE", "DROP", "WITH",
        ]
        .iter()
        .any(|k| self.is_kw(k))
        {
            return self.unsupported("SPARQL Update");
        } else {
            return self.err(format!("expected SELECT or ASK, found {}", self.describe()));
        };
        if self.is_kw("FROM") {
            return self.unsupported("FROM dataset clause");
        }
        self.eat_kw("WHERE");
        if !self.is_punct("{") {
            return self.err(format!("expected '{{', found {}", self.describe()));
        }
        query.pattern = self.group()?;
        self.modifiers(&mut query)?;
        if self.is_kw("VALUES") {
            return self.unsupported("VALUES");
        }
        if self.peek().is_some() {
            return self.err(format!("unexpected {} after query", self.describe()));
        }
        query.prefixes = std::mem::take(&mut self.prefixes);
        Ok((query, form_pos))
    }

    fn prologue(&mut self) -> PResult<()> {
        loop {
            if self.eat_kw("PREFIX") {
                let Some(Tok::PName { prefix, local }) = self.peek().cloned() else {
                    return self.err(format!("expected prefix name, found {}", self.describe()));
                };
                if !local.is_empty() {
                    return self.err("prefix name must end with ':'");
                }
                self.i += 1;
                let Some(Tok::IriRef(raw)) = self.peek().cloned() else {
                    return self.err(format!("expected IRI, found {}", self.describe()));
                };
                let iri = self.absolute(raw)?;
                self.i += 1;
                self.prefixes.insert(prefix, iri);
            } else if self.eat_kw("BASE") {
                let Some(Tok::IriRef(raw)) = self.peek().cloned() else {
                    return self.err(format!("expected IRI, found {}", self.describe()));
                };
                let iri = self.absolute(raw)?;
                self.i += 1;
                self.base = Some(iri);
            } else {
                return Ok(());
            }
        }
    }

    fn absolute(&self, raw: String) -> PResult<String> {
        if let Some(c) = iri::invalid_char(&raw) {
            return self.err(format!("invalid character {c:?} in IRI"));
        }
        if iri::is_absolute(&raw) {
            return Ok(raw);
        }
        match &self.base {
            Some(base) => iri::resolve(base, &raw).or_else(|m| self.err(m)),
            None => self.err(format!("relative IRI <{raw}> without BASE")),
        }
    }

    fn resolve_pname(&self, prefix: &str, local: &str) -> PResult<String> {
        match self
            .prefixes
            .get(prefix)
            .or_else(|| self.ambient.and_then(|a| a.get(prefix)))
        {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(QueryError::UnknownPrefix(prefix.to_string())),
        }
    }

    fn select(&mut self) -> PResult<Query> {
        let distinct = self.eat_kw("DISTINCT");
        if self.is_kw("REDUCED") {
            return self.unsupported("REDUCED");
        }
        let projection = if self.eat_punct("*") {
            Projection::All
        } else {
            let mut items = Vec::new();
            loop {
                match self.peek() {
                    Some(Tok::Var(v)) => {
                        items.push(ProjectionItem::Variable(v.clone()));
                        self.i += 1;
                    }
                    Some(Tok::Punct("(")) => {
                        self.i += 1;
                        items.push(self.aggregate()?);
                    }
                    _ => break,
                }
            }
            if items.is_empty() {
                return self.err(format!("expected projection, found {}", self.describe()));
            }
            Projection::Items(items)
        };
        Ok(Query {
            prefixes: PrefixMap::new(),
            form: QueryForm::Select,
            distinct,
            projection,
            pattern: GroupPattern::default(),
            group_by: None,
            order_by: None,
            limit: None,
            offset: None,
        })
    }

    fn aggregate(&mut self) -> PResult<ProjectionItem> {
        let name = match self.peek() {
            Some(Tok::Ident(w)) => w.to_ascii_uppercase(),
            _ => return self.unsupported("projection expression"),
        };
        if AGGREGATES.contains(&name.as_str()) {
            return self.unsupported(&format!("{name} aggregate"));
        }
        if name != "COUNT" || !matches!(self.peek_at(1), Some(Tok::Punct("("))) {
            return self.unsupported("projection expression");
        }
        self.i += 2;
        let distinct = self.eat_kw("DISTINCT");
        let argument = match self.peek() {
            Some(Tok::Punct("*")) => CountArgument::Star,
            Some(Tok::Var(v)) => CountArgument::Variable(v.clone()),
            Some(Tok::Punct(p)) if !matches!(*p, "(" | "!" | "-" | "+") => {
                return self.err(format!(
                    "expected COUNT argument, found {}",
                    self.describe()
                ))
            }
            _ => return self.unsupported("COUNT over an expression"),
        };
        self.i += 1;
        if !self.is_punct(")") {
            if matches!(argument, CountArgument::Variable(_)) && !self.is_kw("AS") {
                return self.unsupported("COUNT over an expression");
            }
            return self.err(format!("expected ')', found {}", self.describe()));
        }
        self.i += 1;
        self.expect_kw("AS")?;
        let Some(Tok::Var(alias)) = self.peek().cloned() else {
            return self.err(format!(
                "expected variable after AS, found {}",
                self.describe()
            ));
        };
        self.i += 1;
        self.expect_punct(")")?;
        Ok(ProjectionItem::Count {
            argument,
            distinct,
            alias,
        })
    }

    fn group(&mut self) -> PResult<GroupPattern> {
        self.expect_punct("{")?;
        let mut elements = Vec::new();
        let mut need_separator = false;
        loop {
            match self.peek() {
                None => return self.err("unterminated group, expected '}'"),
                Some(Tok::Punct("}")) => {
                    self.i += 1;
                    return Ok(GroupPattern { elements });
                }
                Some(Tok::Punct(".")) => {
                    self.i += 1;
                    need_separator = false;
                }
                Some(Tok::Punct("{")) => {
                    if self.kw_at(1, "SELECT") {
                        return self.unsupported("subquery");
                    }
                    self.group()?;
                    if self.is_kw("UNION") {
                        return self.unsupported("UNION");
                    }
                    return self.unsupported("nested group pattern");
                }
                Some(Tok::Ident(w)) if w.eq_ignore_ascii_case("FILTER") => {
                    self.i += 1;
                    elements.push(PatternElement::Filter(self.constraint()?));
                    need_separator = false;
                }
                Some(Tok::Ident(w)) if w.eq_ignore_ascii_case("OPTIONAL") => {
                    self.i += 1;
                    elements.push(PatternElement::Optional(self.group()?));
                    need_separator = false;
                }
                Some(Tok::Ident(w))
                    if UNSUPPORTED_KEYWORDS
                        .iter()
                        .any(|(k, _)| w.eq_ignore_ascii_case(k)) =>
                {
                    let (_, what) = UNSUPPORTED_KEYWORDS
                        .iter()
                        .find(|(k, _)| w.eq_ignore_ascii_case(k))
                        .unwrap();
                    return self.unsupported(what);
                }
                Some(_) => {
                    if need_separator {
                        return self
                            .err(format!("expected '.' or '}}', found {}", self.describe()));
                    }
                    self.triples_same_subject(&mut elements)?;
                    need_separator = true;
                }
            }
        }
    }

    fn fresh_blank(&mut self) -> PatternTerm {
        let label = format!("anon{}", self.anon);
        self.anon += 1;
        PatternTerm::Blank(label)
    }

    fn triples_same_subject(&mut self, out: &mut Vec<PatternElement>) -> PResult<()> {
        let subject = match self.peek() {
            Some(Tok::Punct("[")) => {
                self.i += 1;
                let node = self.fresh_blank();
                if self.eat_punct("]") {
                    node
                } else {
                    self.property_list(&node, out)?;
                    self.expect_punct("]")?;
                    if self.is_punct(".") || self.is_punct("}") {
                        return Ok(());
                    }
                    node
                }
            }
            _ => self.pattern_term(false)?,
        };
        self.property_list(&subject, out)
    }

    fn property_list(
        &mut self,
        subject: &PatternTerm,
        out: &mut Vec<PatternElement>,
    ) -> PResult<()> {
        loop {
            let predicate = self.verb()?;
            loop {
                let object = match self.peek() {
                    Some(Tok::Punct("[")) => {
                        self.i += 1;
                        let node = self.fresh_blank();
                        if !self.eat_punct("]") {
                            let mut inner = Vec::new();
                            self.property_list(&node, &mut inner)?;
                            self.expect_punct("]")?;
                            out.push(PatternElement::Triple(TriplePattern {
                                subject: subject.clone(),
                                predicate: predicate.clone(),
                                object: node.clone(),
                            }));
                            out.extend(inner);
                            if self.eat_punct(",") {
                                continue;
                            }
                            break;
                        }
                        node
                    }
                    _ => self.pattern_term(false)?,
                };
                out.push(PatternElement::Triple(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                }));
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.is_punct(";") {
                return Ok(());
            }
            while self.eat_punct(";") {}
            if matches!(
                self.peek(),
                Some(Tok::Punct(".")) | Some(Tok::Punct("}")) | Some(Tok::Punct("]"))
            ) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<PatternTerm> {
        let term = match self.peek() {
            Some(Tok::Ident(w)) if w == "a" => {
                self.i += 1;
                PatternTerm::Term(Term::iri(vocab::RDF_TYPE))
            }
            Some(Tok::Punct("^")) | Some(Tok::Punct("!")) | Some(Tok::Punct("(")) => {
                return self.unsupported("property path")
            }
            Some(Tok::Var(_)) | Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => {
                self.pattern_term(true)?
            }
            _ => return self.err(format!("expected predicate, found {}", self.describe())),
        };
        if matches!(
            self.peek(),
            Some(Tok::Punct("/" | "|" | "*" | "+" | "?" | "^"))
        ) {
            return self.unsupported("property path");
        }
        Ok(term)
    }

    fn pattern_term(&mut self, predicate: bool) -> PResult<PatternTerm> {
        match self.peek().cloned() {
            Some(Tok::Var(v)) => {
                self.i += 1;
                Ok(PatternTerm::Variable(v))
            }
            Some(Tok::Blank(label)) if !predicate => {
                self.i += 1;
                Ok(PatternTerm::Blank(label))
            }
            Some(Tok::Punct("(")) => self.unsupported("collection"),
            _ => Ok(PatternTerm::Term(self.graph_term()?)),
        }
    }

    fn iri_token(&mut self) -> PResult<Option<String>> {
        match self.peek().cloned() {
            Some(Tok::IriRef(raw)) => {
                let iri = self.absolute(raw)?;
                self.i += 1;
                Ok(Some(iri))
            }
            Some(Tok::PName { prefix, local }) => {
                let iri = self.resolve_pname(&prefix, &local)?;
                self.i += 1;
                Ok(Some(iri))
            }
            _ => Ok(None),
        }
    }

    fn graph_term(&mut self) -> PResult<Term> {
        if let Some(iri) = self.iri_token()? {
            return Ok(Term::Iri(iri));
        }
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Str(s)) => {
                self.i += 1;
                match self.peek().cloned() {
                    Some(Tok::LangTag(tag)) => {
                        self.i += 1;
                        Ok(Term::lang(s, tag))
                    }
                    Some(Tok::Punct("^^")) => {
                        self.i += 1;
                        match self.iri_token()? {
                            Some(dt) => Ok(Term::typed(s, dt)),
                            None => self
                                .err(format!("expected datatype IRI, found {}", self.describe())),
                        }
                    }
                    _ => Ok(Term::literal(s)),
                }
            }
            Some(Tok::Integer(l)) => {
                self.i += 1;
                Ok(Term::typed(l, vocab::XSD_INTEGER))
            }
            Some(Tok::Decimal(l)) => {
                self.i += 1;
                Ok(Term::typed(l, vocab::XSD_DECIMAL))
            }
            Some(Tok::Double(l)) => {
                self.i += 1;
                Ok(Term::typed(l, vocab::XSD_DOUBLE))
            }
            Some(Tok::Punct(sign @ ("-" | "+"))) => {
                let lit = match self.peek_at(1) {
                    Some(Tok::Integer(l)) => (l.clone(), vocab::XSD_INTEGER),
                    Some(Tok::Decimal(l)) => (l.clone(), vocab::XSD_DECIMAL),
                    Some(Tok::Double(l)) => (l.clone(), vocab::XSD_DOUBLE),
                    _ => return self.err(format!("unexpected '{sign}'")),
                };
                self.i += 2;
                Ok(Term::typed(format!("{sign}{}", lit.0), lit.1))
            }
            Some(Tok::Ident(w))
                if w.eq_ignore_ascii_case("true") || w.eq_ignore_ascii_case("false") =>
            {
                self.i += 1;
                Ok(Term::boolean(w.eq_ignore_ascii_case("true")))
            }
            _ => self.err(format!("expected RDF term, found {}", self.describe())),
        }
    }

    fn constraint(&mut self) -> PResult<Expression> {
        match self.peek() {
            Some(Tok::Punct("(")) => {
                self.i += 1;
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Some(Tok::Ident(_)) | Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => {
                let e = self.primary()?;
                if matches!(e, Expression::Call(..)) {
                    Ok(e)
                } else {
                    self.err("FILTER requires a parenthesized expression or function call")
                }
            }
            _ => self.err(format!(
                "expected '(' after FILTER, found {}",
                self.describe()
            )),
        }
    }

    fn expression(&mut self) -> PResult<Expression> {
        let mut left = self.and_expression()?;
        while self.eat_punct("||") {
            let right = self.and_expression()?;
            left = Expression::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_expression(&mut self) -> PResult<Expression> {
        let mut left = self.relational()?;
        while self.eat_punct("&&") {
            let right = self.relational()?;
            left = Expression::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn check_no_arithmetic(&self) -> PResult<()> {
        if matches!(self.peek(), Some(Tok::Punct("+" | "-" | "*" | "/")))
            || matches!(self.peek(), Some(Tok::Integer(l) | Tok::Decimal(l) | Tok::Double(l)) if l.starts_with(['+', '-']))
        {
            return self.unsupported("arithmetic expression");
        }
        if self.is_kw("IN") || (self.is_kw("NOT") && self.kw_at(1, "IN")) {
            return self.unsupported("IN operator");
        }
        Ok(())
    }

    fn relational(&mut self) -> PResult<Expression> {
        let left = self.unary()?;
        self.check_no_arithmetic()?;
        let op = match self.peek() {
            Some(Tok::Punct("=")) => CompareOp::Eq,
            Some(Tok::Punct("!=")) => CompareOp::Ne,
            Some(Tok::Punct("<")) => CompareOp::Lt,
            Some(Tok::Punct("<=")) => CompareOp::Le,
            Some(Tok::Punct(">")) => CompareOp::Gt,
            Some(Tok::Punct(">=")) => CompareOp::Ge,
            _ => return Ok(left),
        };
        self.i += 1;
        let right = self.unary()?;
        self.check_no_arithmetic()?;
        Ok(Expression::Compare(op, Box::new(left), Box::new(right)))
    }

    fn unary(&mut self) -> PResult<Expression> {
        if self.eat_punct("!") {
            return Ok(Expression::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expression> {
        match self.peek().cloned() {
            Some(Tok::Punct("(")) => {
                self.i += 1;
                let e = self.expression()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Some(Tok::Var(v)) => {
                self.i += 1;
                Ok(Expression::Variable(v))
            }
            Some(Tok::Ident(w)) => {
                let upper = w.to_ascii_uppercase();
                if upper == "TRUE" || upper == "FALSE" {
                    self.i += 1;
                    return Ok(Expression::Constant(Term::boolean(upper == "TRUE")));
                }
                if upper == "EXISTS" || (upper == "NOT" && self.kw_at(1, "EXISTS")) {
                    return self.unsupported("EXISTS");
                }
                if upper == "COUNT" || AGGREGATES.contains(&upper.as_str()) {
                    return self.unsupported("aggregate in expression");
                }
                if UNSUPPORTED_FUNCTIONS.contains(&upper.as_str()) {
                    return self.unsupported(&format!("function {upper}"));
                }
                let Some(function) = Function::from_name(&upper) else {
                    return self.err(format!("unknown function or keyword '{w}'"));
                };
                self.i += 1;
                self.call(function)
            }
            Some(Tok::IriRef(_)) | Some(Tok::PName { .. }) => {
                if matches!(self.peek_at(1), Some(Tok::Punct("("))) {
                    return self.unsupported("extension function call");
                }
                Ok(Expression::Constant(self.graph_term()?))
            }
            Some(Tok::Punct("-" | "+")) => {
                if matches!(
                    self.peek_at(1),
                    Some(Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_))
                ) {
                    Ok(Expression::Constant(self.graph_term()?))
                } else {
                    self.unsupported("arithmetic expression")
                }
            }
            Some(Tok::Punct("*" | "/")) => self.unsupported("arithmetic expression"),
            Some(Tok::Str(_))
            | Some(Tok::Integer(_))
            | Some(Tok::Decimal(_))
            | Some(Tok::Double(_)) => Ok(Expression::Constant(self.graph_term()?)),
            _ => self.err(format!("expected expression, found {}", self.describe())),
        }
    }

    fn call(&mut self, function: Function) -> PResult<Expression> {
        let call_pos = self.pos();
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.eat_punct(")") {
            loop {
                args.push(self.expression()?);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        let (min, max) = function.arity();
        if args.len() < min || args.len() > max {
            let expected = if min == max {
                min.to_string()
            } else {
                format!("{min} or {max}")
            };
            return Err(QueryError::syntax(
                self.text,
                call_pos,
                format!(
                    "{} expects {expected} argument(s), got {}",
                    function.name(),
                    args.len()
                ),
            ));
        }
        if function == Function::Bound && !matches!(args[0], Expression::Variable(_)) {
            return Err(QueryError::syntax(
                self.text,
                call_pos,
                "BOUND expects a variable",
            ));
        }
        Ok(Expression::Call(function, args))
    }

    fn modifiers(&mut self, query: &mut Query) -> PResult<()> {
        if self.is_kw("GROUP") {
            self.i += 1;
            self.expect_kw("BY")?;
            let mut vars = Vec::new();
            loop {
                match self.peek() {
                    Some(Tok::Var(v)) => {
                        vars.push(v.clone());
                        self.i += 1;
                    }
                    Some(Tok::Punct("(")) => return self.unsupported("GROUP BY expression"),
                    Some(Tok::Ident(w))
                        if !["ORDER", "LIMIT", "OFFSET", "HAVING", "VALUES"]
                            .iter()
                            .any(|k| w.eq_ignore_ascii_case(k)) =>
                    {
                        return self.unsupported("GROUP BY expression")
                    }
                    _ => break,
                }
            }
            if vars.is_empty() {
                return self.err(format!(
                    "expected variable after GROUP BY, found {}",
                    self.describe()
                ));
            }
            query.group_by = Some(vars);
        }
        if self.is_kw("HAVING") {
            return self.unsupported("HAVING");
        }
        if self.is_kw("ORDER") {
            self.i += 1;
            self.expect_kw("BY")?;
            let mut conds = Vec::new();
            loop {
                let ascending = if self.eat_kw("ASC") {
                    Some(true)
                } else if self.eat_kw("DESC") {
                    Some(false)
                } else {
                    None
                };
                let expression = match (ascending, self.peek()) {
                    (Some(_), _) => {
                        self.expect_punct("(")?;
                        let e = self.expression()?;
                        self.expect_punct(")")?;
                        e
                    }
                    (None, Some(Tok::Var(v))) => {
                        let e = Expression::Variable(v.clone());
                        self.i += 1;
                        e
                    }
                    (None, Some(Tok::Punct("("))) => {
                        self.i += 1;
                        let e = self.expression()?;
                        self.expect_punct(")")?;
                        e
                    }
                    (None, Some(Tok::Ident(w)))
                        if !["LIMIT", "OFFSET", "VALUES"]
                            .iter()
                            .any(|k| w.eq_ignore_ascii_case(k)) =>
                    {
                        self.primary()?
                    }
                    _ => break,
                };
                conds.push(OrderCondition {
                    expression,
                    ascending: ascending.unwrap_or(true),
                });
            }
            if conds.is_empty() {
                return self.err(format!(
                    "expected order condition, found {}",
                    self.describe()
                ));
            }
            query.order_by = Some(conds);
        }
        for _ in 0..2 {
            if self.eat_kw("LIMIT") {
                if query.limit.is_some() {
                    return self.err("duplicate LIMIT");
                }
                query.limit = Some(self.non_negative()?);
            } else if self.eat_kw("OFFSET") {
                if query.offset.is_some() {
                    return self.err("duplicate OFFSET");
                }
                query.offset = Some(self.non_negative()?);
            }
        }
        Ok(())
    }

    fn non_negative(&mut self) -> PResult<u64> {
        match self.peek() {
            Some(Tok::Integer(l)) if !l.starts_with(['+', '-']) => match l.parse() {
                Ok(n) => {
                    self.i += 1;
                    Ok(n)
                }
                Err(_) => self.err("integer out of range"),
            },
            _ => self.err(format!(
                "expected non-negative integer, found {}",
                self.describe()
            )),
        }
    }
}

fn validate(query: &Query, text: &str, at: usize, options: ParseOptions) -> PResult<()> {
    let Projection::Items(items) = &query.projection else {
        if query.group_by.is_some() {
            return Err(QueryError::syntax(
                text,
                at,
                "SELECT * is not allowed with GROUP BY",
            ));
        }
        return Ok(());
    };
    let bound: HashSet<Variable> = query.pattern.bound_variables().into_iter().collect();
    let unbound = |v: &str| {
        QueryError::at(
            text,
            at,
            ParseErrorKind::ProjectionUnbound,
            format!("projected variable ?{v} is not bound in the WHERE clause"),
        )
    };
    let has_aggregate = query.has_aggregate();
    let mut aliases = HashSet::new();
    for item in items {
        match item {
            ProjectionItem::Variable(v) => {
                if options.strict_projection && !bound.contains(v) {
                    return Err(unbound(v));
                }
                if has_aggregate || query.group_by.is_some() {
                    let grouped = query.group_by.as_ref().is_some_and(|g| g.contains(v));
                    if !grouped {
                        return Err(QueryError::syntax(
                            text,
                            at,
                            format!("?{v} is projected alongside an aggregate but is not grouped"),
                        ));
                    }
                }
            }
            ProjectionItem::Count {
                argument, alias, ..
            } => {
                if let CountArgument::Variable(v) = argument {
                    if options.strict_projection && !bound.contains(v) {
                        return Err(unbound(v));
                    }
                }
                if bound.contains(alias) || !aliases.insert(alias.clone()) {
                    return Err(QueryError::syntax(
                        text,
                        at,
                        format!("alias ?{alias} is already in scope"),
                    ));
                }
            }
        }
    }
    Ok(())
}
