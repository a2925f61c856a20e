use std::collections::HashMap;

use crate::lang::printer::print_value;
use crate::lang::{Family, Literal, Placeholder, Program, Registry, Statement, Value};

/// Numeric parameters whose values are masked when desensitizing.
pub const DESENSITIZED_NUMBERS: [&str; 5] = ["top", "left", "height", "width", "size"];

pub fn normalize_program(p: &Program, desensitize: bool) -> Program {
    normalize_with(p, desensitize, Registry::builtin())
}

/// Canonical form used for grading.
///
/// Defaults are made explicit, arguments follow schema order, adjacent
/// selects are sorted by a structural key, and bound variables are renamed
/// `v1, v2, ...` in definition order. Implicit inputs keep their names.
pub fn normalize_with(p: &Program, desensitize: bool, registry: &Registry) -> Program {
    let stmts: Vec<Statement> = p.statements.iter().map(|s| canonical_args(s, desensitize, registry)).collect();
    let defs = reaching_defs(&stmts);
    let order = canonical_order(&stmts, &defs, registry);

    let mut names: HashMap<usize, String> = HashMap::new();
    let mut out = Vec::with_capacity(stmts.len());
    for &i in &order {
        let mut s = stmts[i].clone();
        for (arg, def) in s.args.iter_mut().zip(&defs[i]) {
            if let (Value::Var(_), Some(d)) = (&arg.value, def) {
                arg.value = Value::Var(names[d].clone());
            }
        }
        if s.binding.is_some() {
            let fresh = format!("v{}", names.len() + 1);
            names.insert(i, fresh.clone());
            s.binding = Some(fresh);
        }
        out.push(s);
    }
    Program::new(out)
}

fn canonical_args(stmt: &Statement, desensitize: bool, registry: &Registry) -> Statement {
    let mut s = stmt.clone();
    s.span = Default::default();
    for a in &mut s.args {
        a.span = Default::default();
    }
    let Some(schema) = registry.lookup(&s.name) else { return s };
    for param in &schema.params {
        if let Some(default) = &param.default {
            if s.arg(&param.name).is_none() {
                s.args.push(crate::lang::Argument::new(param.name.clone(), default.clone()));
            }
        }
    }
    if desensitize {
        for a in &mut s.args {
            let Some(param) = schema.param(&a.name) else { continue };
            match &a.value {
                Value::Literal(Literal::String(_)) if param.free_form => {
                    a.value = Value::Literal(Literal::Placeholder(Placeholder::Str));
                }
                Value::Literal(Literal::Number(_)) if DESENSITIZED_NUMBERS.contains(&a.name.as_str()) => {
                    a.value = Value::Literal(Literal::Placeholder(Placeholder::Num));
                }
                _ => {}
            }
        }
    }
    s.args.sort_by_key(|a| schema.param_index(&a.name).unwrap_or(usize::MAX));
    s
}

/// For every argument of every statement, the index of the statement whose
/// binding it reads, or `None` for an implicit input or a literal.
fn reaching_defs(stmts: &[Statement]) -> Vec<Vec<Option<usize>>> {
    let mut live: HashMap<&str, usize> = HashMap::new();
    let mut out = Vec::with_capacity(stmts.len());
    for (i, s) in stmts.iter().enumerate() {
        out.push(s.args.iter().map(|a| a.value.as_var().and_then(|v| live.get(v).copied())).collect());
        if let Some(b) = &s.binding {
            live.insert(b, i);
        }
    }
    out
}

fn is_select(s: &Statement, registry: &Registry) -> bool {
    registry.lookup(&s.name).is_some_and(|sc| sc.family == Family::Select)
}

/// Kahn's algorithm picking the smallest structural key among ready
/// statements. Only selects commute with each other; everything else keeps
/// its position relative to all other statements.
fn canonical_order(stmts: &[Statement], defs: &[Vec<Option<usize>>], registry: &Registry) -> Vec<usize> {
    let n = stmts.len();
    let select: Vec<bool> = stmts.iter().map(|s| is_select(s, registry)).collect();
    let mut preds = vec![0usize; n];
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        for i in 0..j {
            if defs[j].contains(&Some(i)) || !(select[i] && select[j]) {
                preds[j] += 1;
                succs[i].push(j);
            }
        }
    }
    let mut memo: Vec<Option<String>> = vec![None; n];
    let keys: Vec<String> = (0..n).map(|i| key(i, stmts, defs, &mut memo)).collect();
    // Identical selects are told apart by where their results are used.
    let first_use: Vec<String> = (0..n)
        .map(|i| {
            (i + 1..n)
                .filter(|&u| defs[u].contains(&Some(i)))
                .map(|u| if select[u] { format!("1{}", keys[u]) } else { format!("0{u:08}") })
                .min()
                .unwrap_or_else(|| "2".to_owned())
        })
        .collect();

    let mut ready: Vec<usize> = (0..n).filter(|&i| preds[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        let pos = (0..ready.len())
            .min_by(|&a, &b| {
                let (a, b) = (ready[a], ready[b]);
                keys[a].cmp(&keys[b]).then_with(|| first_use[a].cmp(&first_use[b])).then(a.cmp(&b))
            })
            .unwrap();
        let i = ready.swap_remove(pos);
        order.push(i);
        for &j in &succs[i] {
            preds[j] -= 1;
            if preds[j] == 0 {
                ready.push(j);
            }
        }
    }
    order
}

/// `name(param=value,...)` with variable references replaced by the key of
/// the statement that defines them, so the key does not depend on positions
/// or variable names.
fn key(i: usize, stmts: &[Statement], defs: &[Vec<Option<usize>>], memo: &mut Vec<Option<String>>) -> String {
    if let Some(k) = &memo[i] {
        return k.clone();
    }
    let s = &stmts[i];
    let mut out = format!("{}(", s.name);
    for (n, (a, def)) in s.args.iter().zip(&defs[i]).enumerate() {
        if n > 0 {
            out.push(',');
        }
        out.push_str(&a.name);
        out.push('=');
        match (&a.value, def) {
            (Value::Var(_), Some(d)) => {
                let inner = key(*d, stmts, defs, memo);
                out.push('[');
                out.push_str(&inner);
                out.push(']');
            }
            (Value::Var(v), None) => {
                out.push('$');
                out.push_str(v);
            }
            (v, _) => out.push_str(&print_value(v)),
        }
    }
    out.push(')');
    memo[i] = Some(out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check, entity_env};
    use crate::lang::{parse, pretty_print};

    fn norm(src: &str, d: bool) -> String {
        pretty_print(&normalize_program(&parse(src).unwrap(), d))
    }

    #[test]
    fn renames_in_definition_order() {
        let out = norm("title = select_text(name=\"Title\")\nformat_text(textRanges=title, bold=true)", false);
        assert_eq!(
            out,
            "v1 = select_text(scope=\"Selection\", name=\"Title\")\nformat_text(textRanges=v1, bold=true)\n"
        );
    }

    #[test]
    fn implicit_inputs_keep_their_names() {
        let out = norm("format_shapes(shapes=shapes, fillColor=\"red\")", false);
        assert_eq!(out, "format_shapes(shapes=shapes, fillColor=\"red\")\n");
    }

    #[test]
    fn independent_selects_are_sorted() {
        let a = norm(
            "t = select_text()\ns = select_shapes(shapeType=\"Triangle\")\nformat_shapes(shapes=s, fillColor=\"red\")\nformat_text(textRanges=t, bold=true)",
            false,
        );
        let b = norm(
            "s = select_shapes(shapeType=\"Triangle\")\nt = select_text()\nformat_shapes(shapes=s, fillColor=\"red\")\nformat_text(textRanges=t, bold=true)",
            false,
        );
        assert_eq!(a, b);
    }

    #[test]
    fn mutations_keep_their_order() {
        let a = norm("t = select_text()\nformat_text(textRanges=t, bold=true)\ndelete_text(textRanges=t)", false);
        let b = norm("t = select_text()\ndelete_text(textRanges=t)\nformat_text(textRanges=t, bold=true)", false);
        assert_ne!(a, b);
    }

    #[test]
    fn selects_do_not_cross_inserts() {
        let a = norm("s = select_shapes()\nslides = insert_slides(layout=\"Blank\")\nt = select_text()", false);
        let b = norm("slides = insert_slides(layout=\"Blank\")\ns = select_shapes()\nt = select_text()", false);
        assert_ne!(a, b);
    }

    #[test]
    fn explicit_default_scope_equals_omitted() {
        assert_eq!(norm("t = select_text()", false), norm("t = select_text(scope=\"Selection\")", false));
    }

    #[test]
    fn desensitizing_masks_descriptions() {
        let a = "insert_images(slides=slides, description=\"a red fox\")";
        let b = "insert_images(slides=slides, description=\"a sleeping cat\")";
        assert_eq!(norm(a, true), norm(b, true));
        assert_ne!(norm(a, false), norm(b, false));
    }

    #[test]
    fn desensitizing_masks_geometry_but_not_colors() {
        let a = "format_shapes(shapes=shapes, top=10, fillColor=\"red\")";
        let b = "format_shapes(shapes=shapes, top=99, fillColor=\"red\")";
        let c = "format_shapes(shapes=shapes, top=99, fillColor=\"blue\")";
        assert_eq!(norm(a, true), norm(b, true));
        assert_ne!(norm(a, true), norm(c, true));
    }

    #[test]
    fn rebinding_an_implicit_input() {
        let src = "slides = insert_slides(precededBy=slides, layout=\"Title Only\")\ntextbox = insert_shapes(slides=slides, shapeType=\"Textbox\")";
        let out = norm(src, false);
        assert_eq!(
            out,
            "v1 = insert_slides(precededBy=slides, layout=\"Title Only\")\nv2 = insert_shapes(slides=v1, shapeType=\"Textbox\")\n"
        );
    }

    #[test]
    fn normalized_program_still_checks() {
        let src = "t = select_text(text=\"Hello\")\nformat_text(textRanges=t, size=30, fontName=\"Arial\")";
        let p = parse(src).unwrap();
        let n = normalize_program(&p, true);
        let before = entity_env(&check(&p).unwrap());
        let after = entity_env(&check(&n).unwrap());
        assert_eq!(before.values().collect::<Vec<_>>(), after.values().collect::<Vec<_>>());
    }

    #[test]
    fn empty_program() {
        assert!(normalize_program(&Program::default(), true).is_empty());
    }
}
