//! Seeded generators for documents and programs shared by integration tests.
#![allow(dead_code)]

use odsl::doc::{EntityPath, PresentationDoc, Shape, ShapeKind, Slide};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const LAYOUTS: [&str; 4] = ["Title Slide", "Title and Content", "Title Only", "Blank"];
const WORDS: [&str; 8] = ["Hello", "Agenda", "Revenue", "Q3", "Team", "Roadmap", "hello", "Summary"];
const KINDS: [ShapeKind; 5] =
    [ShapeKind::Rectangle, ShapeKind::Ellipse, ShapeKind::Triangle, ShapeKind::Textbox, ShapeKind::Line];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_doc(rng: &mut impl Rng) -> PresentationDoc {
    let mut slides = Vec::new();
    for _ in 0..rng.gen_range(0..5) {
        let layout = if rng.gen_bool(0.8) { Some(*LAYOUTS.choose(rng).unwrap()) } else { None };
        let mut slide = Slide::new(layout);
        if rng.gen_bool(0.2) {
            slide.name = Some(format!("Slide {}", rng.gen_range(1..4)));
        }
        for _ in 0..rng.gen_range(0..5) {
            let kind = *KINDS.choose(rng).unwrap();
            let mut shape = Shape::new(slide.fresh_shape_name(kind), kind);
            if rng.gen_bool(0.25) {
                shape.name = "Title".into();
                if slide.shape("Title").is_some() {
                    shape.name = slide.fresh_shape_name(kind);
                }
            }
            if kind == ShapeKind::Textbox || rng.gen_bool(0.2) {
                let n = rng.gen_range(0..3);
                let text: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect();
                shape = shape.with_text(text.join(" "));
            }
            shape.fill.transparency = rng.gen_range(0.0..=1.0);
            slide.shapes.push(shape);
        }
        slides.push(slide);
    }
    let mut doc = PresentationDoc::new(slides);
    let mut selection = Vec::new();
    for (i, slide) in doc.slides.iter().enumerate() {
        if rng.gen_bool(0.3) {
            selection.push(EntityPath::Slide(i));
        }
        for shape in &slide.shapes {
            if rng.gen_bool(0.2) {
                selection.push(EntityPath::Shape(i, shape.name.clone()));
            }
        }
    }
    doc.selection = selection;
    doc
}

fn quoted(s: &str) -> String {
    format!("\"{s}\"")
}

/// A random well-typed program of up to `max_len` statements.
pub fn random_program(rng: &mut impl Rng, max_len: usize) -> String {
    let mut slides = vec!["slides".to_string()];
    let mut shapes = vec!["shapes".to_string()];
    let mut texts = vec!["textRanges".to_string()];
    let mut lines = Vec::new();
    for n in 0..rng.gen_range(1..=max_len) {
        let v = format!("v{n}");
        let pick = |rng: &mut dyn rand::RngCore, pool: &[String]| pool.choose(rng).unwrap().clone();
        let scope = |rng: &mut dyn rand::RngCore, extra: &[String]| -> Option<String> {
            match rng.gen_range(0..3) {
                0 => None,
                1 => Some(quoted("Presentation")),
                _ => extra.choose(rng).cloned(),
            }
        };
        let mut args = Vec::new();
        let line = match rng.gen_range(0..13) {
            0 => {
                if let Some(s) = scope(rng, &[]) {
                    args.push(format!("scope={s}"));
                }
                if rng.gen_bool(0.4) {
                    args.push(format!("layout={}", quoted(LAYOUTS.choose(rng).unwrap())));
                }
                if rng.gen_bool(0.3) {
                    args.push(format!("index={}", rng.gen_range(0..4)));
                }
                slides.push(v.clone());
                format!("{v} = select_slides({})", args.join(", "))
            }
            1 => {
                if let Some(s) = scope(rng, &slides) {
                    args.push(format!("scope={s}"));
                }
                if rng.gen_bool(0.4) {
                    args.push(format!("shapeType={}", quoted(KINDS.choose(rng).unwrap().as_str())));
                }
                if rng.gen_bool(0.3) {
                    args.push(format!("name={}", quoted(if rng.gen_bool(0.5) { "Title" } else { "Rectangle 1" })));
                }
                if rng.gen_bool(0.3) {
                    args.push(format!("index={}", rng.gen_range(0..4)));
                }
                shapes.push(v.clone());
                format!("{v} = select_shapes({})", args.join(", "))
            }
            2 => {
                let pool: Vec<String> = slides.iter().chain(&shapes).cloned().collect();
                if let Some(s) = scope(rng, &pool) {
                    args.push(format!("scope={s}"));
                }
                if rng.gen_bool(0.5) {
                    let w = WORDS.choose(rng).unwrap();
                    let pat = if rng.gen_bool(0.3) { format!("/^{w}/") } else { w.to_string() };
                    args.push(format!("text={}", quoted(&pat)));
                }
                if rng.gen_bool(0.3) {
                    args.push(format!("index={}", rng.gen_range(0..3)));
                }
                texts.push(v.clone());
                format!("{v} = select_text({})", args.join(", "))
            }
            3 => {
                if rng.gen_bool(0.6) {
                    args.push(format!("precededBy={}", pick(rng, &slides)));
                }
                args.push(format!("layout={}", quoted(LAYOUTS.choose(rng).unwrap())));
                slides.push(v.clone());
                format!("{v} = insert_slides({})", args.join(", "))
            }
            4 => {
                shapes.push(v.clone());
                format!(
                    "{v} = insert_shapes(slides={}, shapeType={})",
                    pick(rng, &slides),
                    quoted(KINDS.choose(rng).unwrap().as_str())
                )
            }
            5 => {
                shapes.push(v.clone());
                format!("{v} = insert_images(slides={}, description=\"a dog\")", pick(rng, &slides))
            }
            6 => {
                let target = if rng.gen_bool(0.7) { format!("shapes={}, ", pick(rng, &shapes)) } else { String::new() };
                texts.push(v.clone());
                format!("{v} = insert_text({target}text={})", quoted(WORDS.choose(rng).unwrap()))
            }
            7 => {
                format!("format_slides(slides={}, layout={})", pick(rng, &slides), quoted(LAYOUTS.choose(rng).unwrap()))
            }
            8 => format!(
                "format_shapes(shapes={}, fillColor=\"teal\", fillTransparency={}, top={}, width={})",
                pick(rng, &shapes),
                rng.gen_range(0..=10) as f64 / 10.0,
                rng.gen_range(0..500),
                rng.gen_range(0..300)
            ),
            9 => format!(
                "format_text(textRanges={}, bold={}, size={}, fontName=\"Courier New\")",
                pick(rng, &texts),
                rng.gen_bool(0.5),
                rng.gen_range(8..40)
            ),
            10 => format!("delete_slides(slides={})", pick(rng, &slides)),
            11 => format!("delete_shapes(shapes={})", pick(rng, &shapes)),
            _ => format!("delete_text(textRanges={})", pick(rng, &texts)),
        };
        lines.push(line);
    }
    lines.join("\n")
}

/// Programs whose selections match nothing in any generated document.
pub const MISSING_ENTITY_PROGRAMS: [&str; 10] = [
    "s = select_shapes(name=\"Nonexistent\")\ndelete_shapes(shapes=s)",
    "s = select_slides(scope=\"Presentation\", index=99)\ndelete_slides(slides=s)",
    "t = select_text(scope=\"Presentation\", text=\"zzz-not-there\")\nformat_text(textRanges=t, bold=true)",
    "s = select_slides(scope=\"Presentation\", layout=\"Comparison\")\nformat_slides(slides=s, layout=\"Blank\")",
    "s = select_shapes(scope=\"Presentation\", name=\"Picture 99\")\nformat_shapes(shapes=s, fillColor=\"red\")",
    "s = select_slides(scope=\"Presentation\", name=\"Appendix Z\")\nn = insert_slides(precededBy=s, layout=\"Blank\")",
    "s = select_slides(scope=\"Presentation\", index=42)\ni = insert_images(slides=s, description=\"a cat\")",
    "sh = select_shapes(scope=\"Presentation\", name=\"Ghost\")\nt = insert_text(shapes=sh, text=\"boo\")",
    "t = select_text(scope=\"Presentation\", text=\"/^\\d{9}$/\")\ndelete_text(textRanges=t)",
    "s = select_slides(scope=\"Presentation\", index=7)\nsh = select_shapes(scope=s)\nt = select_text(scope=sh)\ndelete_text(textRanges=t)\ndelete_shapes(shapes=sh)",
];
