mod common;

use std::collections::HashMap;

use odsl::analysis::{check, entity_env};
use odsl::eval::{grade, is_strict_subprogram, is_subprogram, normalize_program, EvalCase, GradeOptions, MatchLevel};
use odsl::lang::{parse, Family, Program, Registry, Value};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{random_program, rng};

fn program(seed: u64, len: usize) -> Program {
    let src = random_program(&mut rng(seed), len);
    parse(&src).unwrap()
}

fn rename_all(p: &Program, seed: u64) -> Program {
    let mut r = rng(seed);
    let mut fresh: Vec<String> = (0..p.len()).map(|i| format!("w{i}")).collect();
    fresh.shuffle(&mut r);
    let map: HashMap<String, String> = p.statements.iter().filter_map(|s| s.binding.clone()).zip(fresh).collect();
    let mut out = p.clone();
    for s in &mut out.statements {
        for a in &mut s.args {
            if let Value::Var(v) = &a.value {
                if let Some(n) = map.get(v) {
                    a.value = Value::Var(n.clone());
                }
            }
        }
        if let Some(b) = &s.binding {
            s.binding = Some(map[b].clone());
        }
    }
    out
}

/// Swaps one adjacent pair of independent selects, if any.
fn swap_independent_selects(p: &Program) -> Option<Program> {
    let reg = Registry::builtin();
    let is_select = |i: usize| reg.lookup(&p.statements[i].name).is_some_and(|s| s.family == Family::Select);
    (1..p.len())
        .find(|&i| {
            let prev = &p.statements[i - 1];
            is_select(i - 1) && is_select(i) && !p.statements[i].uses().any(|u| Some(u) == prev.binding.as_deref())
        })
        .map(|i| {
            let mut q = p.clone();
            q.statements.swap(i - 1, i);
            q
        })
}

/// Drops statements whose bindings are unused, and some literal arguments.
fn shrink(p: &Program, r: &mut impl Rng) -> Program {
    let mut out = Vec::new();
    for (i, s) in p.statements.iter().enumerate() {
        let used = s.binding.as_deref().is_some_and(|b| p.statements[i + 1..].iter().any(|t| t.uses().any(|u| u == b)));
        if !used && r.gen_bool(0.4) {
            continue;
        }
        let mut s = s.clone();
        s.args.retain(|a| a.value.as_var().is_some() || r.gen_bool(0.7));
        out.push(s);
    }
    Program::new(out)
}

fn case_of(p: &Program) -> EvalCase {
    EvalCase {
        id: "p".into(),
        utterance: "u".into(),
        context: None,
        acceptable: vec![p.clone()],
        generated: None,
        manual_verdicts: Vec::new(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>(), d in any::<bool>()) {
        let p = program(seed, 10);
        let once = normalize_program(&p, d);
        prop_assert_eq!(normalize_program(&once, d), once);
    }

    #[test]
    fn normalization_preserves_validity_and_env(seed in any::<u64>(), d in any::<bool>()) {
        let p = program(seed, 10);
        let n = normalize_program(&p, d);
        let before = entity_env(&check(&p).unwrap());
        let after = entity_env(&check(&n).unwrap());
        let mut a: Vec<_> = before.values().collect();
        let mut b: Vec<_> = after.values().collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn normalization_ignores_variable_names(seed in any::<u64>()) {
        let p = program(seed, 10);
        prop_assert_eq!(normalize_program(&rename_all(&p, seed ^ 7), false), normalize_program(&p, false));
    }

    #[test]
    fn normalization_ignores_independent_select_order(seed in any::<u64>()) {
        let p = program(seed, 10);
        if let Some(q) = swap_independent_selects(&p) {
            prop_assert_eq!(normalize_program(&q, false), normalize_program(&p, false));
        }
    }

    #[test]
    fn grading_ladder_is_consistent(seed in any::<u64>()) {
        let p = program(seed, 10);
        let level = grade(&case_of(&p), Ok(&p), GradeOptions::default());
        prop_assert_eq!(level, MatchLevel::Exact);
        prop_assert_eq!(normalize_program(&p, true), normalize_program(&p, true));
        prop_assert!(is_strict_subprogram(&p, &p));
        let n = normalize_program(&p, true);
        prop_assert!(is_subprogram(&n, &n));

        let renamed = rename_all(&p, seed);
        let level = grade(&case_of(&p), Ok(&renamed), GradeOptions::default());
        prop_assert!(level == MatchLevel::Normalized || level == MatchLevel::Exact);
    }

    #[test]
    fn shrunk_programs_are_contained(seed in any::<u64>()) {
        let c = program(seed, 10);
        let mut r = rng(seed.wrapping_add(1));
        let b = shrink(&c, &mut r);
        prop_assert!(is_subprogram(&b, &c), "{:?}\n{:?}", b, c);
    }
}

#[test]
fn subprogram_is_transitive_on_normalized_triples() {
    let mut premises = 0;
    for seed in 0..400u64 {
        let mut r = rng(seed);
        let c0 = program(seed, 10);
        let b0 = shrink(&c0, &mut r);
        let a0 = shrink(&b0, &mut r);
        let other = program(seed + 10_000, 6);
        let a0 = if seed % 5 == 0 { other } else { a0 };
        let [a, b, c] = [&a0, &b0, &c0].map(|p| normalize_program(p, true));
        if is_subprogram(&a, &b) && is_subprogram(&b, &c) {
            premises += 1;
            assert!(is_subprogram(&a, &c), "seed {seed}");
        }
    }
    assert!(premises > 200, "only {premises} triples satisfied the premise");
}
