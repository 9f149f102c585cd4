use super::error::QueryError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    IriRef(String),
    PName { prefix: String, local: String },
    Var(String),
    Blank(String),
    Str(String),
    LangTag(String),
    Integer(String),
    Decimal(String),
    Double(String),
    Ident(String),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
}

const PUNCT: &[&str] = &[
    "^^", "&&", "||", "!=", "<=", ">=", "{", "}", "(", ")", "[", "]", ".", ";", ",", "*", "=", "<",
    ">", "!", "+", "-", "/", "|", "^", "?",
];

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{00B7}'
}

fn is_var_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\u{00B7}'
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, QueryError> {
    let mut lx = Lexer {
        text,
        pos: 0,
        out: Vec::new(),
    };
    lx.run()?;
    Ok(lx.out)
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    out: Vec<Token>,
}

impl Lexer<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn push(&mut self, tok: Tok, start: usize) {
        self.out.push(Token { tok, start });
    }

    fn err<T>(&self, at: usize, msg: impl Into<String>) -> Result<T, QueryError> {
        Err(QueryError::syntax(self.text, at, msg))
    }

    fn prev_is_operand(&self) -> bool {
        matches!(
            self.out.last().map(|t| &t.tok),
            Some(
                Tok::IriRef(_)
                    | Tok::PName { .. }
                    | Tok::Var(_)
                    | Tok::Blank(_)
                    | Tok::Str(_)
                    | Tok::LangTag(_)
                    | Tok::Integer(_)
                    | Tok::Decimal(_)
                    | Tok::Double(_)
                    | Tok::Punct(")")
                    | Tok::Punct("]")
            )
        ) || matches!(self.out.last().map(|t| &t.tok), Some(Tok::Ident(w)) if w.eq_ignore_ascii_case("true") || w.eq_ignore_ascii_case("false"))
    }

    fn run(&mut self) -> Result<(), QueryError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else if c == '#' {
                match self.rest().find('\n') {
                    Some(i) => self.pos += i + 1,
                    None => self.pos = self.text.len(),
                }
            } else if c == '<' && self.try_iri()? {
            } else if (c == '?' || c == '$') && self.peek_nth(1).is_some_and(is_var_char) {
                self.pos += 1;
                let name = self.take_while(is_var_char);
                self.push(Tok::Var(name), start);
            } else if c == '_' && self.peek_nth(1) == Some(':') {
                self.pos += 2;
                let label = self.take_name_with_dots();
                if label.is_empty() {
                    return self.err(start, "empty blank node label");
                }
                self.push(Tok::Blank(label), start);
            } else if c == '"' || c == '\'' {
                let s = self.string()?;
                self.push(Tok::Str(s), start);
            } else if c == '@' {
                self.pos += 1;
                let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if tag.is_empty() {
                    return self.err(start, "expected language tag after '@'");
                }
                self.push(Tok::LangTag(tag), start);
            } else if c.is_ascii_digit()
                || (c == '.'
                    && self.peek_nth(1).is_some_and(|n| n.is_ascii_digit())
                    && !self.prev_is_operand())
                || ((c == '+' || c == '-')
                    && self
                        .peek_nth(1)
                        .is_some_and(|n| n.is_ascii_digit() || n == '.')
                    && !self.prev_is_operand())
            {
                self.number();
            } else if is_name_start(c) || c == ':' {
                self.name_or_pname()?;
            } else if let Some(p) = PUNCT.iter().find(|p| self.rest().starts_with(**p)) {
                self.pos += p.len();
                self.push(Tok::Punct(p), start);
            } else {
                return self.err(start, format!("unexpected character {c:?}"));
            }
        }
        Ok(())
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        self.text[start..self.pos].to_string()
    }

    /// Name characters with interior dots; a trailing dot is left unconsumed.
    fn take_name_with_dots(&mut self) -> String {
        let start = self.pos;
        let mut end = self.pos;
        while let Some(c) = self.peek() {
            if is_name_char(c) || c == '.' {
                self.pos += c.len_utf8();
                if c != '.' {
                    end = self.pos;
                }
            } else {
                break;
            }
        }
        self.pos = end;
        self.text[start..end].to_string()
    }

    fn try_iri(&mut self) -> Result<bool, QueryError> {
        let start = self.pos;
        let body = &self.rest()[1..];
        let mut end = None;
        for (i, c) in body.char_indices() {
            if c == '>' {
                end = Some(i);
                break;
            }
            if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') {
                break;
            }
        }
        let Some(end) = end else { return Ok(false) };
        let raw = &body[..end];
        let iri = if raw.contains('\\') {
            unescape_iri(raw)
                .ok_or_else(|| QueryError::syntax(self.text, start, "invalid escape in IRI"))?
        } else {
            raw.to_string()
        };
        self.pos += end + 2;
        self.push(Tok::IriRef(iri), start);
        Ok(true)
    }

    fn string(&mut self) -> Result<String, QueryError> {
        let start = self.pos;
        let quote = self.peek().unwrap();
        let triple: String = std::iter::repeat_n(quote, 3).collect();
        let long = self.rest().starts_with(&triple);
        self.pos += if long { 3 } else { 1 };
        let mut out = String::new();
        loop {
            let Some(c) = self.peek() else {
                return self.err(start, "unterminated string");
            };
            if long && self.rest().starts_with(&triple) {
                let mut extra = 0;
                while self.peek_nth(3 + extra) == Some(quote) && extra < 2 {
                    extra += 1;
                }
                for _ in 0..extra {
                    out.push(quote);
                }
                self.pos += 3 + extra;
                return Ok(out);
            }
            if !long && c == quote {
                self.pos += 1;
                return Ok(out);
            }
            if !long && (c == '\n' || c == '\r') {
                return self.err(self.pos, "newline in string");
            }
            self.pos += c.len_utf8();
            if c == '\\' {
                let esc_at = self.pos - 1;
                let Some(e) = self.peek() else {
                    return self.err(esc_at, "unterminated escape");
                };
                self.pos += e.len_utf8();
                let ch = match e {
                    't' => '\t',
                    'n' => '\n',
                    'r' => '\r',
                    'b' => '\u{8}',
                    'f' => '\u{c}',
                    '"' => '"',
                    '\'' => '\'',
                    '\\' => '\\',
                    'u' | 'U' => {
                        let len = if e == 'u' { 4 } else { 8 };
                        let hex = self.rest().get(..len).unwrap_or("");
                        let v = (hex.len() == len && hex.chars().all(|c| c.is_ascii_hexdigit()))
                            .then(|| u32::from_str_radix(hex, 16).ok())
                            .flatten()
                            .and_then(char::from_u32);
                        match v {
                            Some(ch) => {
                                self.pos += len;
                                ch
                            }
                            None => return self.err(esc_at, "invalid unicode escape"),
                        }
                    }
                    _ => return self.err(esc_at, "invalid string escape"),
                };
                out.push(ch);
            } else {
                out.push(c);
            }
        }
    }

    fn number(&mut self) {
        let start = self.pos;
        if matches!(self.peek(), Some('+') | Some('-')) {
            self.pos += 1;
        }
        self.take_while(|c| c.is_ascii_digit());
        let mut frac = false;
        if self.peek() == Some('.') && self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            self.take_while(|c| c.is_ascii_digit());
            frac = true;
        }
        let mut exp = false;
        if matches!(self.peek(), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+') | Some('-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.take_while(|c| c.is_ascii_digit());
                exp = true;
            } else {
                self.pos = save;
            }
        }
        let lex = self.text[start..self.pos].to_string();
        let tok = if exp {
            Tok::Double(lex)
        } else if frac {
            Tok::Decimal(lex)
        } else {
            Tok::Integer(lex)
        };
        self.push(tok, start);
    }

    fn name_or_pname(&mut self) -> Result<(), QueryError> {
        let start = self.pos;
        let prefix = if self.peek() == Some(':') {
            String::new()
        } else {
            self.take_name_with_dots()
        };
        if self.peek() != Some(':') {
            self.push(Tok::Ident(prefix), start);
            return Ok(());
        }
        self.pos += 1;
        let mut local = String::new();
        let mut end = self.pos;
        let mut first = true;
        while let Some(c) = self.peek() {
            let ok = if first {
                is_name_char(c) || c == ':' || c.is_ascii_digit()
            } else {
                is_name_char(c) || c == ':' || c == '.'
            };
            if c == '%' {
                let hex = self.rest().get(1..3).unwrap_or("");
                if hex.len() == 2 && hex.chars().all(|c| c.is_ascii_hexdigit()) {
                    local.push('%');
                    local.push_str(hex);
                    self.pos += 3;
                    end = self.pos;
                } else {
                    return self.err(self.pos, "invalid percent escape in local name");
                }
            } else if c == '\\' {
                match self.peek_nth(1) {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                        local.push(e);
                        self.pos += 1 + e.len_utf8();
                        end = self.pos;
                    }
                    _ => return self.err(self.pos, "invalid escape in local name"),
                }
            } else if ok {
                local.push(c);
                self.pos += c.len_utf8();
                if c != '.' {
                    end = self.pos;
                }
            } else {
                break;
            }
            first = false;
        }
        while local.ends_with('.') && self.pos > end {
            local.pop();
            self.pos -= 1;
        }
        self.push(Tok::PName { prefix, local }, start);
        Ok(())
    }
}

fn unescape_iri(raw: &str) -> Option<String> {
    let mut out = String::new();
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let len = match chars.next()? {
            'u' => 4,
            'U' => 8,
            _ => return None,
        };
        let hex: String = chars.by_ref().take(len).collect();
        if hex.len() != len {
            return None;
        }
        out.push(char::from_u32(u32::from_str_radix(&hex, 16).ok()?)?);
    }
    Some(out)
}
