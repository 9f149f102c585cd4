use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    /// A projected variable is not bound anywhere in the WHERE clause.
    ProjectionUnbound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the query text.
    pub position: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Every query string parses to exactly one of an AST or one of these.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("unsupported feature: {0}")]
    UnsupportedFeature(String),
    #[error("unknown prefix '{0}:'")]
    UnknownPrefix(String),
}

impl QueryError {
    pub(crate) fn syntax(text: &str, position: usize, message: impl Into<String>) -> Self {
        Self::at(text, position, ParseErrorKind::Syntax, message)
    }

    pub(crate) fn at(
        text: &str,
        position: usize,
        kind: ParseErrorKind,
        message: impl Into<String>,
    ) -> Self {
        let position = position.min(text.len());
        let before = &text[..position];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        QueryError::Parse(ParseError {
            kind,
            position,
            line,
            column,
            message: message.into(),
        })
    }

    pub fn is_parse_error(&self) -> bool {
        matches!(self, QueryError::Parse(_))
    }

    pub fn parse_error_kind(&self) -> Option<ParseErrorKind> {
        match self {
            QueryError::Parse(e) => Some(e.kind),
            _ => None,
        }
    }
}
