//! Static validation of ODSL programs.
//!
//! [`check`] resolves statements against the schema registry, type-checks
//! literal arguments, enforces the scope hierarchy and def-before-use, and
//! collects every diagnostic it can find instead of stopping at the first.

use std::collections::BTreeMap;
use std::fmt;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::lang::schema::literal_matches_placeholder;
use crate::lang::{EntityType, Literal, Program, Registry, Span, SpecialScope, StatementSchema, Value, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagCode {
    UnknownStatement,
    UnknownParameter,
    TypeMismatch,
    EnumValueInvalid,
    RangeViolation,
    ScopeHierarchyViolation,
    UseBeforeDef,
    RebindConflict,
    MissingRequiredParam,
    IllegalBinding,
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Machine-readable details attached to a diagnostic.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Payload {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub candidates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub span: Span,
    /// Index of the offending statement in the program.
    pub statement: usize,
    pub message: String,
    pub payload: Payload,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.code, self.message)
    }
}

/// A statement with its schema resolved and defaults made explicit.
#[derive(Debug, Clone)]
pub struct TypedStatement<'r> {
    pub schema: &'r StatementSchema,
    pub binding: Option<String>,
    /// Arguments in schema order, including injected defaults.
    pub args: Vec<(String, Value)>,
}

impl TypedStatement<'_> {
    pub fn arg(&self, name: &str) -> Option<&Value> {
        self.args.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone)]
pub struct TypedProgram<'r> {
    pub program: Program,
    pub statements: Vec<TypedStatement<'r>>,
    /// Free variables named after an entity type, read from the selection.
    pub implicit_inputs: BTreeMap<String, EntityType>,
    env: BTreeMap<String, EntityType>,
}

impl<'r> TypedProgram<'r> {
    pub fn env(&self) -> &BTreeMap<String, EntityType> {
        &self.env
    }
}

/// Final binding environment of a checked program.
pub fn entity_env(tp: &TypedProgram<'_>) -> BTreeMap<String, EntityType> {
    tp.env.clone()
}

/// Entity type of a free variable treated as an implicit input.
pub fn implicit_input_type(name: &str) -> Option<EntityType> {
    match name {
        "slides" => Some(EntityType::Slides),
        "shapes" => Some(EntityType::Shapes),
        "textRanges" => Some(EntityType::TextRanges),
        _ => None,
    }
}

pub fn check(program: &Program) -> Result<TypedProgram<'static>, Vec<Diagnostic>> {
    check_with(program, Registry::builtin())
}

/// Like [`check`] but returns diagnostics even for programs that pass (empty).
pub fn diagnostics(program: &Program) -> Vec<Diagnostic> {
    match check(program) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    }
}

pub fn check_with<'r>(program: &Program, registry: &'r Registry) -> Result<TypedProgram<'r>, Vec<Diagnostic>> {
    let mut checker = Checker { registry, diags: Vec::new(), env: BTreeMap::new(), implicit: BTreeMap::new() };
    let mut typed = Vec::with_capacity(program.len());
    for (idx, stmt) in program.statements.iter().enumerate() {
        if let Some(ts) = checker.statement(idx, stmt) {
            typed.push(ts);
        }
    }
    let Checker { mut diags, env, implicit, .. } = checker;
    if diags.is_empty() {
        let env = env.into_iter().filter_map(|(k, v)| v.map(|t| (k, t))).collect();
        Ok(TypedProgram { program: program.clone(), statements: typed, implicit_inputs: implicit, env })
    } else {
        diags.sort_by_key(|d| (d.span, d.statement));
        Err(diags)
    }
}

struct Checker<'r> {
    registry: &'r Registry,
    diags: Vec<Diagnostic>,
    /// `None` marks a name bound by an unresolvable statement.
    env: BTreeMap<String, Option<EntityType>>,
    implicit: BTreeMap<String, EntityType>,
}

enum VarType {
    Known(EntityType),
    Poisoned,
    Unbound,
}

impl<'r> Checker<'r> {
    fn push(&mut self, code: DiagCode, span: Span, statement: usize, message: String, payload: Payload) {
        self.diags.push(Diagnostic { code, span, statement, message, payload });
    }

    fn resolve_var(&mut self, name: &str) -> VarType {
        match self.env.get(name) {
            Some(Some(t)) => VarType::Known(*t),
            Some(None) => VarType::Poisoned,
            None => match implicit_input_type(name) {
                Some(t) => {
                    self.implicit.insert(name.to_owned(), t);
                    VarType::Known(t)
                }
                None => VarType::Unbound,
            },
        }
    }

    fn bind(&mut self, idx: usize, span: Span, name: &str, ty: Option<EntityType>) {
        if self.env.contains_key(name) {
            self.push(
                DiagCode::RebindConflict,
                span,
                idx,
                format!("variable `{name}` is already bound"),
                Payload { variable: Some(name.to_owned()), ..Payload::default() },
            );
        }
        self.env.insert(name.to_owned(), ty);
    }

    fn statement(&mut self, idx: usize, stmt: &crate::lang::Statement) -> Option<TypedStatement<'r>> {
        let Some(schema) = self.registry.lookup(&stmt.name) else {
            let mut known: Vec<String> = self.registry.aliases.keys().cloned().collect();
            known.extend(self.registry.statements().iter().map(|s| s.name.clone()));
            self.push(
                DiagCode::UnknownStatement,
                stmt.span,
                idx,
                format!("unknown statement `{}`", stmt.name),
                Payload { value: Some(stmt.name.clone()), candidates: known, ..Payload::default() },
            );
            // Still resolve variable uses so def-before-use errors surface.
            for arg in &stmt.args {
                if let Value::Var(v) = &arg.value {
                    if let VarType::Unbound = self.resolve_var(v) {
                        self.unbound(idx, arg.span, v);
                    }
                }
            }
            if let Some(b) = &stmt.binding {
                self.bind(idx, stmt.span, b, None);
            }
            return None;
        };

        for arg in &stmt.args {
            match schema.param(&arg.name) {
                None => self.push(
                    DiagCode::UnknownParameter,
                    arg.span,
                    idx,
                    format!("`{}` has no parameter `{}`", schema.name, arg.name),
                    Payload {
                        param: Some(arg.name.clone()),
                        candidates: schema.params.iter().map(|p| p.name.clone()).collect(),
                        ..Payload::default()
                    },
                ),
                Some(param) => self.argument(idx, schema, &param.name, &param.ty, &arg.value, arg.span),
            }
        }

        for param in schema.params.iter().filter(|p| p.required) {
            if stmt.arg(&param.name).is_none() {
                self.push(
                    DiagCode::MissingRequiredParam,
                    stmt.span,
                    idx,
                    format!("`{}` requires parameter `{}`", schema.name, param.name),
                    Payload { param: Some(param.name.clone()), ..Payload::default() },
                );
            }
        }

        if let Some(b) = &stmt.binding {
            match schema.returns {
                Some(t) => self.bind(idx, stmt.span, b, Some(t)),
                None => self.push(
                    DiagCode::IllegalBinding,
                    stmt.span,
                    idx,
                    format!("`{}` returns nothing and cannot be bound to `{b}`", schema.name),
                    Payload { variable: Some(b.clone()), ..Payload::default() },
                ),
            }
        }

        let args = schema
            .params
            .iter()
            .filter_map(|p| stmt.arg(&p.name).or(p.default.as_ref()).map(|v| (p.name.clone(), v.clone())))
            .collect();
        Some(TypedStatement { schema, binding: stmt.binding.clone(), args })
    }

    fn unbound(&mut self, idx: usize, span: Span, name: &str) {
        self.push(
            DiagCode::UseBeforeDef,
            span,
            idx,
            format!("variable `{name}` is used before it is defined"),
            Payload { variable: Some(name.to_owned()), ..Payload::default() },
        );
    }

    fn mismatch(&mut self, idx: usize, span: Span, param: &str, expected: String, found: &Value) {
        let found_desc = describe_value(found);
        self.push(
            DiagCode::TypeMismatch,
            span,
            idx,
            format!("`{param}` expects {expected}, found {found_desc}"),
            Payload {
                param: Some(param.to_owned()),
                expected: Some(expected),
                found: Some(found_desc),
                ..Payload::default()
            },
        );
    }

    fn argument(
        &mut self,
        idx: usize,
        schema: &StatementSchema,
        param: &str,
        ty: &ValueType,
        value: &Value,
        span: Span,
    ) {
        match (ty, value) {
            (ValueType::ScopeRef, Value::Special(_)) => {}
            (ValueType::ScopeRef, Value::Var(v)) => match self.resolve_var(v) {
                VarType::Unbound => self.unbound(idx, span, v),
                VarType::Poisoned => {}
                VarType::Known(t) if !t.contains(schema.target) => self.push(
                    DiagCode::ScopeHierarchyViolation,
                    span,
                    idx,
                    format!(
                        "cannot select {} from `{v}` of type {t}; scope must be above {} in the hierarchy",
                        schema.target, schema.target
                    ),
                    Payload {
                        param: Some(param.to_owned()),
                        variable: Some(v.clone()),
                        expected: Some(format!("scope above {}", schema.target)),
                        found: Some(t.to_string()),
                        ..Payload::default()
                    },
                ),
                VarType::Known(_) => {}
            },
            (ValueType::ScopeRef, other) => {
                self.mismatch(idx, span, param, "Presentation, Selection or an entity variable".into(), other)
            }
            (ValueType::EntityRef(expected), Value::Var(v)) => match self.resolve_var(v) {
                VarType::Unbound => self.unbound(idx, span, v),
                VarType::Poisoned => {}
                VarType::Known(t) if t != *expected => {
                    self.mismatch(idx, span, param, format!("a {expected} variable"), &Value::Var(format!("{v}: {t}")))
                }
                VarType::Known(_) => {}
            },
            (ValueType::EntityRef(expected), other) => {
                self.mismatch(idx, span, param, format!("a {expected} variable"), other)
            }
            (_, Value::Literal(lit @ Literal::Placeholder(_))) if literal_matches_placeholder(ty, lit) => {}
            (ValueType::Number, Value::Literal(Literal::Number(_))) => {}
            (ValueType::RangedNumber { lo, hi }, Value::Literal(Literal::Number(n))) => {
                if n < lo || n > hi {
                    self.push(
                        DiagCode::RangeViolation,
                        span,
                        idx,
                        format!("`{param}`={} is outside [{lo}, {hi}]", crate::lang::printer::format_number(*n)),
                        Payload {
                            param: Some(param.to_owned()),
                            value: Some(crate::lang::printer::format_number(*n)),
                            range: Some((*lo, *hi)),
                            ..Payload::default()
                        },
                    );
                }
            }
            (ValueType::Boolean, Value::Literal(Literal::Boolean(_))) => {}
            (ValueType::String, Value::Literal(Literal::String(_))) => {}
            (ValueType::StringOrRegex, Value::Literal(Literal::String(s))) => {
                if let Some(pattern) = regex_body(s) {
                    if let Err(e) = Regex::new(pattern) {
                        self.push(
                            DiagCode::TypeMismatch,
                            span,
                            idx,
                            format!("`{param}` holds an invalid regex: {e}"),
                            Payload {
                                param: Some(param.to_owned()),
                                value: Some(s.clone()),
                                expected: Some("StringOrRegex".into()),
                                ..Payload::default()
                            },
                        );
                    }
                }
            }
            (ValueType::Color, Value::Literal(Literal::String(s))) => {
                if !self.registry.is_color(s) {
                    self.mismatch(idx, span, param, "a color name or #RRGGBB".into(), value);
                }
            }
            (ValueType::Enum { name, values }, Value::Literal(Literal::String(s))) => {
                if !values.contains(s) {
                    self.push(
                        DiagCode::EnumValueInvalid,
                        span,
                        idx,
                        format!("\"{s}\" is not a valid {name}; expected one of {}", values.join(", ")),
                        Payload {
                            param: Some(param.to_owned()),
                            value: Some(s.clone()),
                            candidates: values.clone(),
                            ..Payload::default()
                        },
                    );
                }
            }
            (ty, other) => self.mismatch(idx, span, param, ty.describe(), other),
        }
    }
}

/// Pattern inside a `/.../`-delimited string, if it is one.
pub fn regex_body(s: &str) -> Option<&str> {
    if s.len() >= 2 && s.starts_with('/') && s.ends_with('/') {
        Some(&s[1..s.len() - 1])
    } else {
        None
    }
}

fn describe_value(v: &Value) -> String {
    match v {
        Value::Var(name) => format!("variable `{name}`"),
        Value::Special(sp) => format!("scope \"{}\"", sp.as_str()),
        Value::Literal(Literal::Number(n)) => format!("Number {}", crate::lang::printer::format_number(*n)),
        Value::Literal(Literal::String(s)) => format!("String \"{s}\""),
        Value::Literal(Literal::Boolean(b)) => format!("Boolean {b}"),
        Value::Literal(Literal::Placeholder(p)) => p.token().to_owned(),
    }
}

/// True if `value` is the special Selection scope.
pub fn is_selection(value: &Value) -> bool {
    matches!(value, Value::Special(SpecialScope::Selection))
}
