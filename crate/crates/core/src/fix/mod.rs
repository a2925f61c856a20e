//! Rule-based auto-correction of checker diagnostics.
//!
//! Four rule kinds run per statement, in this order: statement aliasing,
//! fuzzy enum matching, statement injection and argument clamping. After each
//! pass the program is re-checked; passes stop at a fixed point, when a pass
//! fails to reduce the diagnostic count, or after [`MAX_PASSES`].

mod fuzzy;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

pub use fuzzy::{fold, fuzzy_match, fuzzy_match_with, levenshtein, FuzzyConfig};

use crate::analysis::{check_with, DiagCode, Diagnostic};
use crate::lang::printer::{format_number, print_statement, print_value};
use crate::lang::schema::{json_to_value, InjectionTemplate};
use crate::lang::{Argument, Program, Registry, Span, Statement, Value, ValueType};

pub const MAX_PASSES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    StatementAlias,
    FuzzyEnum,
    StatementInjection,
    ArgumentClamp,
}

impl RuleKind {
    pub fn trigger(self) -> DiagCode {
        match self {
            RuleKind::StatementAlias => DiagCode::UnknownStatement,
            RuleKind::FuzzyEnum | RuleKind::StatementInjection => DiagCode::EnumValueInvalid,
            RuleKind::ArgumentClamp => DiagCode::RangeViolation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedRepair {
    pub rule: RuleKind,
    pub span: Span,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixReport {
    pub program: Program,
    pub applied: Vec<AppliedRepair>,
    pub residual: Vec<Diagnostic>,
}

impl FixReport {
    pub fn is_clean(&self) -> bool {
        self.residual.is_empty()
    }
}

/// Clamps `value` into `[lo, hi]`.
pub fn clamp(value: f64, lo: f64, hi: f64) -> f64 {
    value.max(lo).min(hi)
}

#[derive(Debug, Clone)]
pub struct Fixer<'r> {
    pub registry: &'r Registry,
    pub fuzzy: FuzzyConfig,
    pub max_passes: usize,
}

impl Default for Fixer<'static> {
    fn default() -> Self {
        Fixer::new(Registry::builtin())
    }
}

/// Applies the default rule set to `program` given its diagnostics.
pub fn fix(program: &Program, diags: &[Diagnostic]) -> FixReport {
    Fixer::default().fix(program, diags)
}

/// Checks `program` and fixes whatever the checker reports.
pub fn check_and_fix(program: &Program) -> FixReport {
    let diags = crate::analysis::diagnostics(program);
    fix(program, &diags)
}

impl<'r> Fixer<'r> {
    pub fn new(registry: &'r Registry) -> Self {
        Fixer { registry, fuzzy: FuzzyConfig::default(), max_passes: MAX_PASSES }
    }

    fn diagnostics(&self, program: &Program) -> Vec<Diagnostic> {
        check_with(program, self.registry).err().unwrap_or_default()
    }

    pub fn fix(&self, program: &Program, diags: &[Diagnostic]) -> FixReport {
        let mut current = program.clone();
        let mut diags = diags.to_vec();
        let mut applied = Vec::new();
        for _ in 0..self.max_passes {
            if diags.is_empty() {
                break;
            }
            let (next, repairs) = self.pass(&current, &diags);
            if repairs.is_empty() {
                break;
            }
            let next_diags = self.diagnostics(&next);
            if next_diags.len() >= diags.len() {
                break;
            }
            current = next;
            diags = next_diags;
            applied.extend(repairs);
        }
        FixReport { program: current, applied, residual: diags }
    }

    fn pass(&self, program: &Program, diags: &[Diagnostic]) -> (Program, Vec<AppliedRepair>) {
        let mut repairs = Vec::new();

        // Renaming a statement exposes its parameter diagnostics, so aliasing
        // runs first and the value rules see a fresh check.
        let mut current = program.clone();
        let mut fresh = None;
        for d in diags.iter().filter(|d| d.code == DiagCode::UnknownStatement) {
            if let Some(stmt) = current.statements.get_mut(d.statement) {
                self.alias(stmt, &mut repairs);
            }
        }
        if !repairs.is_empty() {
            fresh = Some(self.diagnostics(&current));
        }
        let diags = fresh.as_deref().unwrap_or(diags);

        let mut by_stmt: BTreeMap<usize, Vec<&Diagnostic>> = BTreeMap::new();
        for d in diags {
            by_stmt.entry(d.statement).or_default().push(d);
        }
        let mut taken: HashSet<String> = current
            .statements
            .iter()
            .flat_map(|s| s.binding.iter().map(String::as_str).chain(s.uses()))
            .map(str::to_owned)
            .collect();

        let mut out = Vec::with_capacity(current.len());
        for (idx, stmt) in current.statements.iter().enumerate() {
            let mut stmt = stmt.clone();
            let mut appended = Vec::new();
            if let Some(ds) = by_stmt.get(&idx) {
                let unresolved = self.fuzzy_enum(&mut stmt, ds, &mut repairs);
                self.inject(&mut stmt, &unresolved, &mut taken, &mut appended, &mut repairs);
                self.clamp_args(&mut stmt, ds, &mut repairs);
            }
            out.push(stmt);
            out.extend(appended);
        }
        (Program::new(out), repairs)
    }

    fn alias(&self, stmt: &mut Statement, repairs: &mut Vec<AppliedRepair>) {
        let target = match self.registry.aliases.get(&stmt.name) {
            Some(t) => Some(t.clone()),
            None => {
                let mut names: Vec<&str> = self.registry.aliases.keys().map(String::as_str).collect();
                names.extend(self.registry.statements().iter().map(|s| s.name.as_str()));
                fuzzy_match_with(&stmt.name, &names, self.fuzzy)
                    .map(|hit| self.registry.aliases.get(hit).cloned().unwrap_or_else(|| hit.to_owned()))
            }
        };
        if let Some(target) = target.filter(|t| *t != stmt.name) {
            repairs.push(AppliedRepair {
                rule: RuleKind::StatementAlias,
                span: stmt.span,
                before: stmt.name.clone(),
                after: target.clone(),
            });
            stmt.name = target;
        }
    }

    /// Returns the enum diagnostics fuzzy matching could not resolve.
    fn fuzzy_enum<'d>(
        &self,
        stmt: &mut Statement,
        ds: &[&'d Diagnostic],
        repairs: &mut Vec<AppliedRepair>,
    ) -> Vec<&'d Diagnostic> {
        let mut unresolved = Vec::new();
        for d in ds.iter().filter(|d| d.code == DiagCode::EnumValueInvalid) {
            let (Some(param), Some(bad)) = (&d.payload.param, &d.payload.value) else { continue };
            let Some(arg) = stmt.arg_mut(param) else { continue };
            match fuzzy_match_with(bad, &d.payload.candidates, self.fuzzy) {
                Some(good) if good != bad => {
                    let before = format!("{}={}", arg.name, print_value(&arg.value));
                    arg.value = Value::string(good);
                    repairs.push(AppliedRepair {
                        rule: RuleKind::FuzzyEnum,
                        span: arg.span,
                        before,
                        after: format!("{}={}", arg.name, print_value(&arg.value)),
                    });
                }
                _ => unresolved.push(*d),
            }
        }
        unresolved
    }

    fn inject(
        &self,
        stmt: &mut Statement,
        unresolved: &[&Diagnostic],
        taken: &mut HashSet<String>,
        appended: &mut Vec<Statement>,
        repairs: &mut Vec<AppliedRepair>,
    ) {
        for d in unresolved {
            let (Some(param), Some(bad)) = (&d.payload.param, &d.payload.value) else { continue };
            let Some(template) = self.registry.injection_for(&stmt.name, param, bad) else { continue };
            let before = print_statement(stmt, self.registry);
            if let Some(arg) = stmt.arg_mut(param) {
                arg.value = Value::string(template.replacement.clone());
            }
            let binding = match &stmt.binding {
                Some(b) => b.clone(),
                None => {
                    let b = fresh_name(&template.binding_hint, taken);
                    stmt.binding = Some(b.clone());
                    b
                }
            };
            let extra = self.injected_statement(template, &binding, stmt.span);
            let mut after = print_statement(stmt, self.registry);
            after.push('\n');
            after.push_str(&print_statement(&extra, self.registry));
            appended.push(extra);
            repairs.push(AppliedRepair { rule: RuleKind::StatementInjection, span: stmt.span, before, after });
        }
    }

    fn injected_statement(&self, template: &InjectionTemplate, binding: &str, span: Span) -> Statement {
        let mut args = vec![Argument { name: template.append.entity_param.clone(), value: Value::var(binding), span }];
        for (name, json) in &template.append.args {
            if let Some(value) = json_to_value(json, name == "scope") {
                args.push(Argument { name: name.clone(), value, span });
            }
        }
        if let Some(schema) = self.registry.lookup(&template.append.name) {
            args.sort_by_key(|a| schema.param_index(&a.name).unwrap_or(usize::MAX));
        }
        Statement { binding: None, name: template.append.name.clone(), args, span }
    }

    fn clamp_args(&self, stmt: &mut Statement, ds: &[&Diagnostic], repairs: &mut Vec<AppliedRepair>) {
        let schema = self.registry.lookup(&stmt.name);
        for d in ds.iter().filter(|d| d.code == DiagCode::RangeViolation) {
            let Some(param) = &d.payload.param else { continue };
            let range = d.payload.range.or_else(|| match schema.and_then(|s| s.param(param)).map(|p| &p.ty) {
                Some(ValueType::RangedNumber { lo, hi }) => Some((*lo, *hi)),
                _ => None,
            });
            let Some((lo, hi)) = range else { continue };
            let Some(arg) = stmt.arg_mut(param) else { continue };
            let Some(n) = arg.value.as_number() else { continue };
            let clamped = clamp(n, lo, hi);
            if clamped != n {
                arg.value = Value::number(clamped);
                repairs.push(AppliedRepair {
                    rule: RuleKind::ArgumentClamp,
                    span: arg.span,
                    before: format!("{param}={}", format_number(n)),
                    after: format!("{param}={}", format_number(clamped)),
                });
            }
        }
    }
}

fn fresh_name(hint: &str, taken: &mut HashSet<String>) -> String {
    let mut name = hint.to_owned();
    let mut n = 2;
    while taken.contains(&name) {
        name = format!("{hint}{n}");
        n += 1;
    }
    taken.insert(name.clone());
    name
}
