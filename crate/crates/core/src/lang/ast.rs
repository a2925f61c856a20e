use std::fmt;

use serde::{Deserialize, Serialize};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Placeholders written by desensitizing normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Placeholder {
    Str,
    Num,
}

impl Placeholder {
    pub fn token(self) -> &'static str {
        match self {
            Placeholder::Str => "<STR>",
            Placeholder::Num => "<NUM>",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "camelCase")]
pub enum Literal {
    Number(f64),
    String(String),
    Boolean(bool),
    Placeholder(Placeholder),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecialScope {
    Presentation,
    Selection,
}

impl SpecialScope {
    pub fn as_str(self) -> &'static str {
        match self {
            SpecialScope::Presentation => "Presentation",
            SpecialScope::Selection => "Selection",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Presentation" => Some(SpecialScope::Presentation),
            "Selection" => Some(SpecialScope::Selection),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "camelCase")]
pub enum Value {
    Literal(Literal),
    Var(String),
    Special(SpecialScope),
}

impl Value {
    pub fn string(s: impl Into<String>) -> Self {
        Value::Literal(Literal::String(s.into()))
    }

    pub fn number(n: f64) -> Self {
        Value::Literal(Literal::Number(n))
    }

    pub fn boolean(b: bool) -> Self {
        Value::Literal(Literal::Boolean(b))
    }

    pub fn var(name: impl Into<String>) -> Self {
        Value::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Value::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Literal(Literal::String(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Literal(Literal::Number(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Literal(Literal::Boolean(b)) => Some(*b),
            _ => None,
        }
    }
}

/// One keyword argument. Equality ignores the span.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Argument {
    pub name: String,
    pub value: Value,
    pub span: Span,
}

impl Argument {
    pub fn new(name: impl Into<String>, value: Value) -> Self {
        Argument { name: name.into(), value, span: Span::default() }
    }
}

impl PartialEq for Argument {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.value == other.value
    }
}

/// A single ODSL statement: `[binding =] name(param=value, ...)`.
///
/// Equality is structural and ignores source spans.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Statement {
    pub binding: Option<String>,
    pub name: String,
    pub args: Vec<Argument>,
    pub span: Span,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.binding == other.binding && self.name == other.name && self.args == other.args
    }
}

impl Statement {
    pub fn new(binding: Option<&str>, name: impl Into<String>, args: Vec<Argument>) -> Self {
        Statement { binding: binding.map(str::to_owned), name: name.into(), args, span: Span::default() }
    }

    pub fn arg(&self, name: &str) -> Option<&Value> {
        self.args.iter().find(|a| a.name == name).map(|a| &a.value)
    }

    pub fn arg_mut(&mut self, name: &str) -> Option<&mut Argument> {
        self.args.iter_mut().find(|a| a.name == name)
    }

    /// Variables this statement reads, in argument order.
    pub fn uses(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| a.value.as_var())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Program {
    pub statements: Vec<Statement>,
}

impl Program {
    pub fn new(statements: Vec<Statement>) -> Self {
        Program { statements }
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }
}
