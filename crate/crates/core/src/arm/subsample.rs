//! Context-aware choice among a sample's alternative implementations.

use std::collections::BTreeSet;

use super::bank::SampleRecord;
use crate::doc::ContextTree;
use crate::lang::Program;

/// Jaccard similarity of the `(path, identifier key)` sets of two trees.
pub fn context_similarity(a: &ContextTree, b: &ContextTree) -> f64 {
    jaccard(&a.identifier_pairs(), &b.identifier_pairs())
}

fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// The sub-sample whose context best matches `current` (first wins ties),
/// or the record's own program when it has none.
pub fn pick_subsample<'r>(record: &'r SampleRecord, current: &ContextTree) -> (Option<&'r ContextTree>, &'r Program) {
    let current = current.identifier_pairs();
    let mut best: Option<(f64, usize)> = None;
    for (i, s) in record.sub_samples.iter().enumerate() {
        let score = jaccard(&current, &s.context.identifier_pairs());
        if best.is_none_or(|(b, _)| score > b) {
            best = Some((score, i));
        }
    }
    match best {
        Some((_, i)) => (Some(&record.sub_samples[i].context), &record.sub_samples[i].program),
        None => (None, &record.program),
    }
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;
    use crate::arm::bank::{SampleBank, SubSample};
    use crate::doc::{extract_context, ContextScope, EntityPath, PresentationDoc, Shape, ShapeKind, Slide};
    use crate::lang::{parse, pretty_print, TagSet};

    fn add_text() -> SampleRecord {
        SampleBank::builtin().records.into_iter().find(|r| r.utterance == "Add text to slide").unwrap()
    }

    #[test]
    fn empty_textbox_picks_direct_insert() {
        let doc = PresentationDoc::new(vec![
            Slide::new(Some("Title Only")).with_shape(Shape::new("TextBox 1", ShapeKind::Textbox))
        ])
        .with_selection(vec![EntityPath::Slide(0)]);
        let r = add_text();
        let (ctx, program) = pick_subsample(&r, &extract_context(&doc, ContextScope::Selection));
        assert_eq!(ctx, Some(&r.sub_samples[0].context));
        assert_eq!(pretty_print(program).lines().count(), 2);
        assert!(!pretty_print(program).contains("\\n"));
    }

    #[test]
    fn existing_text_and_missing_textbox_pick_their_variants() {
        let r = add_text();
        let with_text =
            PresentationDoc::new(vec![Slide::new(Some("Title Only"))
                .with_shape(Shape::new("TextBox 1", ShapeKind::Textbox).with_text("notes"))])
            .with_selection(vec![EntityPath::Slide(0)]);
        let (ctx, _) = pick_subsample(&r, &extract_context(&with_text, ContextScope::Selection));
        assert_eq!(ctx, Some(&r.sub_samples[1].context));

        let bare = PresentationDoc::new(vec![Slide::new(Some("Blank"))]).with_selection(vec![EntityPath::Slide(0)]);
        let (ctx, _) = pick_subsample(&r, &extract_context(&bare, ContextScope::Selection));
        assert_eq!(ctx, Some(&r.sub_samples[2].context));
    }

    #[test]
    fn identical_context_scores_one() {
        let r = add_text();
        for s in &r.sub_samples {
            assert_eq!(context_similarity(&s.context, &s.context), 1.0);
            assert_eq!(pick_subsample(&r, &s.context).0, Some(&s.context));
        }
    }

    #[test]
    fn records_without_subsamples_return_their_program() {
        let r = SampleRecord::new("x", "Delete this slide", TagSet::empty(), parse("s = select_slides()").unwrap());
        let (ctx, p) = pick_subsample(&r, &ContextTree(json!({"slides": []})));
        assert!(ctx.is_none());
        assert_eq!(p, &r.program);
    }

    #[test]
    fn argmax_matches_exhaustive_scoring() {
        let shape = |n: usize| json!({"index": n, "name": format!("S{n}"), "shapeType": "Rectangle"});
        let tree =
            |n: usize| ContextTree(json!({"slides": [{"index": 0, "shapes": (0..n).map(shape).collect::<Vec<_>>()}]}));
        let program = parse("s = select_slides()").unwrap();
        let mut r = SampleRecord::new("x", "u", TagSet::empty(), program.clone());
        r.sub_samples =
            [0, 2, 5, 9].iter().map(|&n| SubSample { context: tree(n), program: program.clone() }).collect();
        for current in 0..12 {
            let c = tree(current);
            let scores: Vec<f64> = r.sub_samples.iter().map(|s| context_similarity(&c, &s.context)).collect();
            let best = scores.iter().cloned().fold(f64::MIN, f64::max);
            let expect = scores.iter().position(|&s| s == best).unwrap();
            assert_eq!(pick_subsample(&r, &c).0, Some(&r.sub_samples[expect].context), "current={current}");
        }
    }
}
