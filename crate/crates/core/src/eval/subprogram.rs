use std::collections::HashMap;

use crate::lang::{Program, Statement, Value};

/// Whether `accepted` is embedded in `generated`: an order-preserving
/// injection of statements under a consistent, injective renaming of bound
/// variables. A matched statement may carry extra arguments, and
/// `generated` may carry extra statements.
pub fn is_subprogram(accepted: &Program, generated: &Program) -> bool {
    embeds(accepted, generated, true)
}

/// Containment without renaming: every bound variable keeps its name.
pub fn is_strict_subprogram(accepted: &Program, generated: &Program) -> bool {
    embeds(accepted, generated, false)
}

fn embeds(accepted: &Program, generated: &Program, rename: bool) -> bool {
    let acc = &accepted.statements;
    let gen = &generated.statements;
    if acc.len() > gen.len() {
        return false;
    }
    let needed = bindings_used_later(acc);
    let gen_bound = bound_before(gen);
    let mut m = Mapping { rename, ..Mapping::default() };
    search(acc, gen, &needed, &gen_bound, 0, 0, &mut m)
}

#[derive(Default, Clone)]
struct Mapping {
    rename: bool,
    fwd: HashMap<String, String>,
    rev: HashMap<String, String>,
}

impl Mapping {
    fn bind(&mut self, a: &str, b: &str) -> bool {
        if !self.rename && a != b {
            return false;
        }
        if let Some(prev) = self.rev.get(b) {
            if prev != a {
                return false;
            }
        }
        if let Some(old) = self.fwd.insert(a.to_owned(), b.to_owned()) {
            self.rev.remove(&old);
        }
        self.rev.insert(b.to_owned(), a.to_owned());
        true
    }
}

fn search(
    acc: &[Statement],
    gen: &[Statement],
    needed: &[bool],
    gen_bound: &[Vec<String>],
    i: usize,
    j: usize,
    m: &mut Mapping,
) -> bool {
    if i == acc.len() {
        return true;
    }
    let remaining = acc.len() - i;
    for t in j..=gen.len() - remaining {
        let mut trial = m.clone();
        if matches(&acc[i], &gen[t], needed[i], &gen_bound[t], &mut trial)
            && search(acc, gen, needed, gen_bound, i + 1, t + 1, &mut trial)
        {
            *m = trial;
            return true;
        }
    }
    false
}

fn matches(s: &Statement, t: &Statement, binding_needed: bool, t_bound: &[String], m: &mut Mapping) -> bool {
    if s.name != t.name {
        return false;
    }
    for a in &s.args {
        let Some(v) = t.arg(&a.name) else { return false };
        let ok = match (&a.value, v) {
            (Value::Var(x), Value::Var(y)) => match m.fwd.get(x) {
                Some(mapped) => mapped == y,
                // Free in the accepted program: must be the same implicit input.
                None => x == y && !t_bound.iter().any(|b| b == y),
            },
            (x, y) => x == y,
        };
        if !ok {
            return false;
        }
    }
    match (&s.binding, &t.binding) {
        (Some(a), Some(b)) => m.bind(a, b),
        (Some(_), None) => !binding_needed,
        (None, _) => true,
    }
}

/// Per statement, whether its binding is read before being rebound.
fn bindings_used_later(stmts: &[Statement]) -> Vec<bool> {
    stmts
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let Some(b) = &s.binding else { return false };
            for later in &stmts[i + 1..] {
                if later.uses().any(|u| u == b) {
                    return true;
                }
                if later.binding.as_ref() == Some(b) {
                    return false;
                }
            }
            false
        })
        .collect()
}

/// Names bound strictly before each statement.
fn bound_before(stmts: &[Statement]) -> Vec<Vec<String>> {
    let mut seen: Vec<String> = Vec::new();
    let mut out = Vec::with_capacity(stmts.len());
    for s in stmts {
        out.push(seen.clone());
        if let Some(b) = &s.binding {
            if !seen.contains(b) {
                seen.push(b.clone());
            }
        }
    }
    out
}
