//! Rule-based repair of common model mistakes: near-miss enum values,
//! aliased statement names, out-of-domain enums and out-of-range numbers.
//!
//! cargo run --example auto_correct

use odsl::fix::check_and_fix;
use odsl::lang::{parse, pretty_print};

const BROKEN: [&str; 4] = [
    "text = select_text()\nformat_text(textRanges=text, fontName=\"Cmic Sans\")",
    "slide = select_slides()\ninsert_picture(slides=slide, description=\"A picture of a cat\")",
    "slide = select_slides()\ninsert_shapes(slides=slide, shapeType=\"Circle\")",
    "rects = select_shapes(shapeType=\"Rectangle\")\nformat_shapes(shapes=rects, fillTransparency=100)",
];

fn main() {
    for src in BROKEN {
        let report = check_and_fix(&parse(src).unwrap());
        println!("--- before\n{src}\n--- after");
        print!("{}", pretty_print(&report.program));
        for repair in &report.applied {
            println!("  applied {repair:?}");
        }
        println!();
    }
}
