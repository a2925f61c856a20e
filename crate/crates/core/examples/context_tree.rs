//! Extract the JSON context tree for the current selection and for the
//! whole presentation.
//!
//! cargo run --example context_tree

use odsl::doc::{
    extract_context, extract_context_with, ContextOptions, ContextScope, EntityPath, PresentationDoc, Shape, ShapeKind,
    Slide,
};

fn main() {
    let slide = Slide::new(Some("Title Only"))
        .with_shape(Shape::new("Title", ShapeKind::Textbox).with_text("Roadmap 2025"))
        .with_shape(Shape::new("Ellipse 1", ShapeKind::Ellipse));
    let other =
        Slide::new(Some("Blank")).with_shape(Shape::new("Textbox 1", ShapeKind::Textbox).with_text("x".repeat(500)));
    let doc = PresentationDoc::new(vec![slide, other]).with_selection(vec![EntityPath::Shape(0, "Title".into())]);

    println!("selection:\n{}", extract_context(&doc, ContextScope::Selection).to_pretty_string());
    let short = extract_context_with(&doc, ContextScope::Presentation, ContextOptions { text_budget: 20 });
    println!("presentation (20 char text budget):\n{}", short.to_pretty_string());
}
