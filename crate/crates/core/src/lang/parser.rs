//! Line-oriented parser for ODSL source.
//!
//! One statement per line, keyword-only arguments, `#` comments outside string
//! literals. Names are not resolved here; see [`crate::analysis`].

use std::collections::HashSet;

use thiserror::Error;

use super::ast::{Argument, Literal, Placeholder, Program, Span, SpecialScope, Statement, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub fn parse(source: &str) -> Result<Program, ParseError> {
    let mut statements = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let mut cursor = Cursor::new(line, idx + 1);
        cursor.skip_ws();
        if cursor.at_end_or_comment() {
            continue;
        }
        statements.push(cursor.statement()?);
    }
    Ok(Program::new(statements))
}

/// Parses a source expected to hold exactly one statement.
pub fn parse_statement(source: &str) -> Result<Statement, ParseError> {
    let program = parse(source)?;
    let mut it = program.statements.into_iter();
    match (it.next(), it.next()) {
        (Some(stmt), None) => Ok(stmt),
        (None, _) => Err(ParseError { line: 1, col: 1, message: "expected a statement".into() }),
        (Some(_), Some(extra)) => Err(ParseError {
            line: extra.span.line,
            col: extra.span.col,
            message: "expected a single statement".into(),
        }),
    }
}

#[derive(Debug)]
enum Token {
    Ident(String),
    Str(String),
    Number(f64),
    Placeholder(Placeholder),
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(line: &str, line_no: usize) -> Self {
        Cursor { chars: line.chars().collect(), pos: 0, line: line_no }
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.pos + 1)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: self.line, col: self.pos + 1, message: message.into() })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end_or_comment(&self) -> bool {
        matches!(self.peek(), None | Some('#'))
    }

    fn eat(&mut self, expected: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(expected) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn describe_next(&self) -> String {
        match self.peek() {
            None | Some('#') => "end of line".to_owned(),
            Some(c) => format!("`{c}`"),
        }
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.pos += 1,
            _ => return None,
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        self.skip_ws();
        match self.ident() {
            Some(name) => Ok(name),
            None => self.error(format!("expected {what}, found {}", self.describe_next())),
        }
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let span = self.span();
        let first = self.expect_ident("statement name")?;
        let (binding, name) =
            if self.eat('=') { (Some(first), self.expect_ident("statement name after `=`")?) } else { (None, first) };
        if !self.eat('(') {
            return self.error(format!("expected `(` after `{name}`, found {}", self.describe_next()));
        }
        let args = self.arguments()?;
        self.skip_ws();
        if !self.at_end_or_comment() {
            return self.error(format!("unexpected {} after statement; one statement per line", self.describe_next()));
        }
        Ok(Statement { binding, name, args, span })
    }

    fn arguments(&mut self) -> Result<Vec<Argument>, ParseError> {
        let mut args = Vec::new();
        let mut seen = HashSet::new();
        if self.eat(')') {
            return Ok(args);
        }
        loop {
            self.skip_ws();
            let span = self.span();
            let token = match self.token()? {
                Some(token) => token,
                None if self.at_end_or_comment() => return self.error("unbalanced parentheses: missing `)`"),
                None => return self.error(format!("expected argument, found {}", self.describe_next())),
            };
            let name = match token {
                Token::Ident(name) => name,
                _ => return self.positional(span),
            };
            if !self.eat('=') {
                self.skip_ws();
                return match self.peek() {
                    Some(',') | Some(')') => self.positional(span),
                    _ => self.error(format!(
                        "expected `=` between parameter `{name}` and its value, found {}",
                        self.describe_next()
                    )),
                };
            }
            self.skip_ws();
            let value = match self.token()? {
                Some(token) => to_value(&name, token),
                None => return self.error(format!("expected value for `{name}`, found {}", self.describe_next())),
            };
            if !seen.insert(name.clone()) {
                return Err(ParseError {
                    line: span.line,
                    col: span.col,
                    message: format!("duplicate argument `{name}`"),
                });
            }
            args.push(Argument { name, value, span });
            if self.eat(',') {
                // trailing comma allowed
                if self.eat(')') {
                    return Ok(args);
                }
                continue;
            }
            if self.eat(')') {
                return Ok(args);
            }
            self.skip_ws();
            return if self.at_end_or_comment() {
                self.error("unbalanced parentheses: missing `)`")
            } else {
                self.error(format!("expected `,` or `)`, found {}", self.describe_next()))
            };
        }
    }

    fn positional<T>(&self, span: Span) -> Result<T, ParseError> {
        Err(ParseError {
            line: span.line,
            col: span.col,
            message: "positional arguments are not supported; use `name=value`".into(),
        })
    }

    fn token(&mut self) -> Result<Option<Token>, ParseError> {
        match self.peek() {
            Some('"') | Some('\'') => self.string().map(|s| Some(Token::Str(s))),
            Some('<') => self.placeholder().map(|p| Some(Token::Placeholder(p))),
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                self.number().map(|n| Some(Token::Number(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => Ok(self.ident().map(Token::Ident)),
            _ => Ok(None),
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let quote = self.chars[self.pos];
        let start = self.span();
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => {
                    return Err(ParseError {
                        line: start.line,
                        col: start.col,
                        message: "unterminated string literal".into(),
                    })
                }
                Some(c) if c == quote => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    let escaped = match self.peek() {
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some(c @ ('\\' | '"' | '\'')) => c,
                        Some(_) => {
                            out.push('\\');
                            continue;
                        }
                        None => return self.error("unterminated string literal"),
                    };
                    out.push(escaped);
                    self.pos += 1;
                }
                Some(c) => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            self.pos += 1;
            if matches!(self.peek(), Some('-') | Some('+')) {
                self.pos += 1;
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(n) if n.is_finite() => Ok(n),
            _ => {
                self.pos = start;
                self.error(format!("malformed number `{text}`"))
            }
        }
    }

    fn placeholder(&mut self) -> Result<Placeholder, ParseError> {
        let rest: String = self.chars[self.pos..].iter().collect();
        for p in [Placeholder::Str, Placeholder::Num] {
            if rest.starts_with(p.token()) {
                self.pos += p.token().chars().count();
                return Ok(p);
            }
        }
        self.error("unknown placeholder; expected `<STR>` or `<NUM>`")
    }
}

fn to_value(param: &str, token: Token) -> Value {
    match token {
        Token::Ident(id) if id == "true" => Value::Literal(Literal::Boolean(true)),
        Token::Ident(id) if id == "false" => Value::Literal(Literal::Boolean(false)),
        Token::Ident(id) | Token::Str(id) if param == "scope" && SpecialScope::parse(&id).is_some() => {
            Value::Special(SpecialScope::parse(&id).unwrap())
        }
        Token::Ident(id) => Value::Var(id),
        Token::Str(s) => Value::Literal(Literal::String(s)),
        Token::Number(n) => Value::Literal(Literal::Number(n)),
        Token::Placeholder(p) => Value::Literal(Literal::Placeholder(p)),
    }
}
