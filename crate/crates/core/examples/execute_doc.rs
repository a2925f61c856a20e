//! Run a program against an in-memory presentation, print the action log,
//! and confirm that replaying the log reproduces the result.
//!
//! cargo run --example execute_doc [-- out.json]

use odsl::analysis::check;
use odsl::doc::{execute, replay, undoability_audit, EntityPath, PresentationDoc, Shape, ShapeKind, Slide};
use odsl::lang::parse;

fn sample_doc() -> PresentationDoc {
    let first = Slide::new(Some("Title and Content"))
        .with_shape(Shape::new("Title", ShapeKind::Textbox).with_text("Quarterly Review"))
        .with_shape(Shape::new("Content", ShapeKind::Textbox).with_text("Hello team"))
        .with_shape(Shape::new("Triangle 1", ShapeKind::Triangle))
        .with_shape(Shape::new("Triangle 2", ShapeKind::Triangle));
    let second = Slide::new(Some("Blank")).with_shape(Shape::new("Rectangle 1", ShapeKind::Rectangle));
    PresentationDoc::new(vec![first, second]).with_selection(vec![EntityPath::Slide(0)])
}

fn main() {
    let doc = sample_doc();
    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, doc.to_json()).expect("write document");
        println!("wrote {path}");
    }

    let src = "tri = select_shapes(shapeType=\"Triangle\", index=1)\nformat_shapes(shapes=tri, fillColor=\"teal\")\n\
               ghost = select_shapes(name=\"Nowhere\")\ndelete_shapes(shapes=ghost)";
    let typed = check(&parse(src).unwrap()).unwrap();
    let (after, log) = execute(&typed, &doc).unwrap();
    for record in &log.records {
        println!("{} {:?} {}", record.op, record.path, serde_json::to_string(&record.args).unwrap());
    }
    assert_eq!(replay(&doc, &log).unwrap(), after);
    assert!(undoability_audit(&log).is_ok());
    println!("replay matches, {} action(s), the missing shape was a no-op", log.len());
}
