use serde_json::json;

use super::*;
use crate::analysis::check;
use crate::lang::{parse, registry_lookup};

fn run(src: &str, doc: &PresentationDoc) -> (PresentationDoc, ActionLog) {
    let tp = check(&parse(src).unwrap()).unwrap();
    execute(&tp, doc).unwrap()
}

fn titled_deck() -> PresentationDoc {
    PresentationDoc::new(vec![
        Slide::new(Some("Title Slide"))
            .with_shape(Shape::new("Title", ShapeKind::Textbox).with_text("Hello world"))
            .with_shape(Shape::new("Subtitle", ShapeKind::Textbox).with_text("Q3 results")),
        Slide::new(Some("Title and Content"))
            .with_shape(Shape::new("Title", ShapeKind::Textbox).with_text("Agenda"))
            .with_shape(Shape::new("Triangle 1", ShapeKind::Triangle))
            .with_shape(Shape::new("Triangle 2", ShapeKind::Triangle))
            .with_shape(Shape::new("Triangle 3", ShapeKind::Triangle)),
    ])
}

#[test]
fn context_golden_single_title() {
    let doc = PresentationDoc::new(vec![
        Slide::new(Some("Title Only")).with_shape(Shape::new("Title", ShapeKind::Textbox).with_text("Hello"))
    ])
    .with_selection(vec![EntityPath::Slide(0)]);
    let expected = json!({"slides": [{"index": 0, "layout": "Title Only", "shapes": [
        {"index": 0, "name": "Title", "shapeType": "Textbox", "textRange": {"text": "Hello"}}
    ]}]});
    assert_eq!(extract_context(&doc, ContextScope::Selection).0, expected);
}

#[test]
fn context_of_empty_presentation() {
    let tree = extract_context(&PresentationDoc::default(), ContextScope::Presentation);
    assert_eq!(tree.to_json_string(), r#"{"slides":[]}"#);
}

#[test]
fn context_shapes_carry_identifier_keys() {
    let tree = extract_context(&titled_deck(), ContextScope::Presentation);
    for slide in tree.0["slides"].as_array().unwrap() {
        for shape in slide["shapes"].as_array().unwrap() {
            for key in ["name", "shapeType", "index"] {
                assert!(shape.get(key).is_some(), "missing {key} in {shape}");
            }
        }
    }
}

#[test]
fn context_keys_are_select_parameters() {
    let tree = extract_context(&titled_deck(), ContextScope::Presentation);
    let schema_for = |level: &str| match level {
        "slides" => "select_slides",
        "shapes" => "select_shapes",
        _ => "select_text",
    };
    let keys = tree.identifier_keys();
    assert!(keys.contains(&("textRange".into(), "text".into())));
    for (level, key) in keys {
        let schema = registry_lookup(schema_for(&level)).unwrap();
        assert!(schema.param(&key).is_some(), "{level}.{key} is not a select parameter");
    }
}

#[test]
fn context_respects_scope_and_budget() {
    let doc = titled_deck().with_selection(vec![EntityPath::Shape(1, "Title".into())]);
    let tree = extract_context_with(&doc, ContextScope::Selection, ContextOptions { text_budget: 3 });
    assert_eq!(
        tree.0,
        json!({"slides": [{"index": 1, "layout": "Title and Content", "shapes": [
            {"index": 0, "name": "Title", "shapeType": "Textbox", "textRange": {"text": "Age"}}
        ]}]})
    );
}

#[test]
fn second_triangle_in_selection() {
    let doc = titled_deck().with_selection(vec![EntityPath::Slide(1)]);
    let src = "shape = select_shapes(shapeType=\"Triangle\", index=1)\nformat_shapes(shapes=shape, fillColor=\"red\")";
    let (after, log) = run(src, &doc);
    assert_eq!(log.len(), 1);
    assert_eq!(log.records[0].path, EntityPath::Shape(1, "Triangle 2".into()));
    assert_eq!(after.slides[1].shape("Triangle 2").unwrap().fill.color.as_deref(), Some("red"));
}

#[test]
fn delete_over_empty_selection_is_noop() {
    let doc = titled_deck();
    let (after, log) = run("shapes = select_shapes(name=\"Nope\")\ndelete_shapes(shapes=shapes)", &doc);
    assert_eq!(after, doc);
    assert!(log.is_empty());
}

#[test]
fn insert_slide_into_empty_doc() {
    let (after, log) = run("slides = insert_slides(layout=\"Title and Content\")", &PresentationDoc::default());
    assert_eq!(after.slides.len(), 1);
    assert_eq!(after.slides[0].index, 0);
    assert_eq!(after.slides[0].layout.as_deref(), Some("Title and Content"));
    assert_eq!(
        log.records,
        vec![ActionRecord::new("insert_slides", EntityPath::Slide(0)).arg("layout", "Title and Content")]
    );
}

#[test]
fn transpile_golden_bold_title() {
    let doc = titled_deck().with_selection(vec![EntityPath::Shape(0, "Title".into())]);
    let tp = check(&parse("text = select_text()\nformat_text(textRanges=text, bold=true)").unwrap()).unwrap();
    let log = transpile(&tp, &doc).unwrap();
    let golden =
        json!({"formatVersion": 1, "records": [{"op": "format_text", "path": [0, "Title"], "args": {"bold": true}}]});
    assert_eq!(serde_json::to_value(&log).unwrap(), golden);
    assert_eq!(doc, titled_deck().with_selection(vec![EntityPath::Shape(0, "Title".into())]));
}

#[test]
fn empty_program_empty_log() {
    let tp = check(&parse("").unwrap()).unwrap();
    assert!(transpile(&tp, &titled_deck()).unwrap().is_empty());
}

#[test]
fn inserted_slide_and_textbox_are_consistent() {
    let doc = titled_deck().with_selection(vec![EntityPath::Slide(0)]);
    let src = "slides = insert_slides(precededBy=slides, layout=\"Title and Content\")\n\
               textbox = insert_shapes(shapeType=\"Textbox\", slides=slides)";
    let (after, log) = run(src, &doc);
    assert_eq!(log.len(), 2);
    assert_eq!(log.records[0].op, "insert_slides");
    assert_eq!(log.records[0].path, EntityPath::Slide(1));
    assert_eq!(log.records[1].op, "insert_shapes");
    assert_eq!(log.records[1].path.slide(), 1);
    assert_eq!(after.slides.len(), 3);
    assert_eq!(after.slides[2].shapes.len(), 4, "old slide 1 shifted to 2");
    assert_eq!(replay(&doc, &log).unwrap(), after);
    after.validate().unwrap();
}

#[test]
fn inserting_after_several_slides() {
    let doc = titled_deck();
    let src = "all = select_slides(scope=\"Presentation\")\nnew = insert_slides(precededBy=all, layout=\"Blank\")\nformat_slides(slides=new, layout=\"Title Only\")";
    let (after, log) = run(src, &doc);
    let layouts: Vec<_> = after.slides.iter().map(|s| s.layout.as_deref().unwrap()).collect();
    assert_eq!(layouts, ["Title Slide", "Title Only", "Title and Content", "Title Only"]);
    assert_eq!(replay(&doc, &log).unwrap(), after);
}

#[test]
fn select_text_literal_and_regex() {
    let doc = titled_deck();
    let count = |src: &str| run(&format!("{src}\ndelete_text(textRanges=t)"), &doc).1.len();
    assert_eq!(count("t = select_text(scope=\"Presentation\", text=\"Hello\")"), 1);
    assert_eq!(count("t = select_text(scope=\"Presentation\", text=\"hello\")"), 0);
    assert_eq!(count("t = select_text(scope=\"Presentation\", text=\"/^[AQ]/\")"), 2);
    assert_eq!(count("t = select_text(scope=\"Presentation\", name=\"Title\")"), 2);
    assert_eq!(count("t = select_text(scope=\"Presentation\", name=\"Title\", index=1)"), 1);
}

#[test]
fn insert_text_fills_selected_empty_textbox() {
    let doc = PresentationDoc::new(vec![Slide::new(None)
        .with_shape(Shape::new("Rectangle 1", ShapeKind::Rectangle))
        .with_shape(Shape::new("TextBox 1", ShapeKind::Textbox))])
    .with_selection(vec![EntityPath::Slide(0)]);
    let (after, log) = run("insert_text(text=\"Hi\")", &doc);
    assert_eq!(log.len(), 1);
    assert_eq!(after.slides[0].shape("TextBox 1").unwrap().text(), Some("Hi"));
}

#[test]
fn insert_text_creates_textbox_when_none_empty() {
    let doc = titled_deck().with_selection(vec![EntityPath::Slide(0)]);
    let (after, log) = run("insert_text(text=\"Hi\")", &doc);
    let ops: Vec<_> = log.records.iter().map(|r| r.op.as_str()).collect();
    assert_eq!(ops, ["insert_shapes", "insert_text"]);
    assert_eq!(after.slides[0].shape("TextBox 1").unwrap().text(), Some("Hi"));
    assert_eq!(replay(&doc, &log).unwrap(), after);
}

#[test]
fn insert_text_without_selection_is_noop() {
    let doc = titled_deck();
    let (after, log) = run("insert_text(text=\"Hi\")", &doc);
    assert_eq!(after, doc);
    assert!(log.is_empty());
}

#[test]
fn insert_text_appends_to_existing_text() {
    let doc = titled_deck().with_selection(vec![EntityPath::Shape(0, "Title".into())]);
    let (after, _) = run("shapes = select_shapes()\ninsert_text(shapes=shapes, text=\"!\")", &doc);
    assert_eq!(after.slides[0].shape("Title").unwrap().text(), Some("Hello world!"));
}

#[test]
fn insert_images_uses_provider() {
    struct Fixed;
    impl ImageProvider for Fixed {
        fn generate(&self, description: &str) -> ImageData {
            ImageData { description: description.into(), source: "mem://1".into() }
        }
    }
    let doc = titled_deck().with_selection(vec![EntityPath::Slide(1)]);
    let tp =
        check(&parse("s = select_slides()\nimages = insert_images(slides=s, description=\"A cat\")").unwrap()).unwrap();
    let (after, log) = execute_with(&tp, &doc, &Fixed).unwrap();
    let pic = after.slides[1].shape("Picture 1").unwrap();
    assert_eq!(pic.shape_type, ShapeKind::Picture);
    assert_eq!(pic.image.as_ref().unwrap().source, "mem://1");
    assert_eq!(replay(&doc, &log).unwrap(), after);

    let (stub, _) = run("s = select_slides()\nimages = insert_images(slides=s, description=\"A cat\")", &doc);
    assert_eq!(stub.slides[1].shape("Picture 1").unwrap().image.as_ref().unwrap().description, "A cat");
}

#[test]
fn deleting_slides_rebases_later_references() {
    let doc = titled_deck();
    let src = "first = select_slides(scope=\"Presentation\", index=0)\n\
               t = select_text(scope=\"Presentation\", text=\"Agenda\")\n\
               delete_slides(slides=first)\n\
               format_text(textRanges=t, italic=true)";
    let (after, log) = run(src, &doc);
    assert_eq!(after.slides.len(), 1);
    assert!(after.slides[0].shape("Title").unwrap().text_range.as_ref().unwrap().italic);
    assert_eq!(log.records[1].path, EntityPath::Shape(0, "Title".into()));
}

#[test]
fn stale_references_are_skipped() {
    let doc = titled_deck().with_selection(vec![EntityPath::Slide(1)]);
    let src = "s = select_shapes(shapeType=\"Triangle\")\ndelete_shapes(shapes=s)\nformat_shapes(shapes=s, fillColor=\"red\")";
    let (after, log) = run(src, &doc);
    assert_eq!(log.len(), 3);
    assert_eq!(after.slides[1].shapes.len(), 1);
}

#[test]
fn format_clamps_into_document_invariants() {
    let doc = titled_deck().with_selection(vec![EntityPath::Slide(1)]);
    let (after, log) = run("s = select_shapes()\nformat_shapes(shapes=s, width=-5, height=20)", &doc);
    after.validate().unwrap();
    assert_eq!(replay(&doc, &log).unwrap(), after);
}

#[test]
fn corpus_logs_pass_audit() {
    let doc = titled_deck().with_selection(vec![EntityPath::Slide(0)]);
    let src = "slides = insert_slides(precededBy=slides, layout=\"Title and Content\")\n\
               t = select_shapes(scope=slides, name=\"Title\")\n\
               insert_text(shapes=t, text=\"x\")\n\
               delete_slides(slides=slides)";
    let (_, log) = run(src, &doc);
    assert!(!log.is_empty());
    assert!(undoability_audit(&log).is_ok());
}

#[test]
fn identifier_pairs_carry_paths() {
    let tree = ContextTree(
        json!({"slides": [{"index": 0, "shapes": [{"index": 0, "name": "A", "textRange": {"text": "x"}}]}]}),
    );
    let pairs: Vec<(String, String)> = tree.identifier_pairs().into_iter().collect();
    let expect = [
        ("slides[0]", "index"),
        ("slides[0].shapes[0]", "index"),
        ("slides[0].shapes[0]", "name"),
        ("slides[0].shapes[0].textRange", "text"),
    ];
    assert_eq!(pairs, expect.map(|(a, b)| (a.to_owned(), b.to_owned())));
}
