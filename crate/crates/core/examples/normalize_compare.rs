//! Compare two programs the way the grader does: canonical normalization and
//! subprogram containment.
//!
//! cargo run --example normalize_compare

use odsl::eval::{is_strict_subprogram, is_subprogram, normalize_program};
use odsl::lang::{parse, pretty_print};

fn main() {
    let a = parse("t = select_text(name=\"Title\")\nb = select_text(name=\"Content\")\nformat_text(textRanges=t, size=20, fontName=\"Courier New\")\nformat_text(textRanges=b, fontName=\"Courier New\")").unwrap();
    let b = parse("body = select_text(name=\"Content\")\ntitle = select_text(name=\"Title\")\nformat_text(fontName=\"Courier New\", textRanges=title, size=32)\nformat_text(textRanges=body, fontName=\"Courier New\")").unwrap();

    let (na, nb) = (normalize_program(&a, true), normalize_program(&b, true));
    println!("{}", pretty_print(&na));
    println!("normalized equal: {}", na == nb);

    let accepted = parse("text = select_text()\nformat_text(textRanges=text, fontName=\"Segoe Script\")").unwrap();
    let generated =
        parse("text = select_text()\nformat_text(textRanges=text, fontName=\"Segoe Script\", bold=true)").unwrap();
    println!("contained without renaming: {}", is_strict_subprogram(&accepted, &generated));
    println!(
        "contained after normalization: {}",
        is_subprogram(&normalize_program(&accepted, true), &normalize_program(&generated, true))
    );
}
