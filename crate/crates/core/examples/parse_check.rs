//! Parse a program, print its canonical form and the inferred entity types,
//! then show the diagnostics for a broken variant.
//!
//! cargo run --example parse_check

use odsl::analysis::{check, entity_env};
use odsl::lang::{parse, pretty_print};

const PROGRAM: &str = r#"# Insert a titled slide after the current one
slides = insert_slides(precededBy=slides, layout="Title and Content")
textbox = insert_shapes(shapeType="Textbox", slides=slides)
"#;

fn main() {
    let program = parse(PROGRAM).expect("program parses");
    print!("{}", pretty_print(&program));

    let typed = check(&program).expect("program checks");
    for (var, ty) in entity_env(&typed) {
        println!("  {var}: {ty}");
    }

    let broken =
        parse("text = select_text()\nslide = select_slides(scope=text)\nformat_text(textRanges=txt, size=400)")
            .unwrap();
    println!();
    for d in check(&broken).unwrap_err() {
        println!("{d}");
    }
}
