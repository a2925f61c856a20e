//! In-memory presentation model and its JSON persistence format.

use std::collections::HashSet;
use std::fmt;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

/// Slide canvas in points, origin top-left.
pub const SLIDE_WIDTH: f64 = 960.0;
pub const SLIDE_HEIGHT: f64 = 540.0;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid document JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported formatVersion {0}")]
    Version(u32),
    #[error("invalid document: {0}")]
    Invalid(String),
}

/// Location of a slide, or of a shape (and its text frame) on a slide.
/// Serialized as `[slide]` or `[slide, "shape name"]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityPath {
    Slide(usize),
    Shape(usize, String),
}

impl EntityPath {
    pub fn slide(&self) -> usize {
        match self {
            EntityPath::Slide(s) | EntityPath::Shape(s, _) => *s,
        }
    }

    pub fn shape_name(&self) -> Option<&str> {
        match self {
            EntityPath::Slide(_) => None,
            EntityPath::Shape(_, name) => Some(name),
        }
    }

    pub(crate) fn with_slide(&self, slide: usize) -> EntityPath {
        match self {
            EntityPath::Slide(_) => EntityPath::Slide(slide),
            EntityPath::Shape(_, n) => EntityPath::Shape(slide, n.clone()),
        }
    }
}

impl fmt::Display for EntityPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityPath::Slide(s) => write!(f, "[{s}]"),
            EntityPath::Shape(s, n) => write!(f, "[{s}, {n:?}]"),
        }
    }
}

impl Serialize for EntityPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            EntityPath::Slide(s) => {
                let mut seq = serializer.serialize_seq(Some(1))?;
                seq.serialize_element(s)?;
                seq.end()
            }
            EntityPath::Shape(s, n) => {
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(s)?;
                seq.serialize_element(n)?;
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for EntityPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PathVisitor;

        impl<'de> Visitor<'de> for PathVisitor {
            type Value = EntityPath;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("[slideIndex] or [slideIndex, shapeName]")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<EntityPath, A::Error> {
                let slide: usize = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let shape: Option<String> = seq.next_element()?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(match shape {
                    None => EntityPath::Slide(slide),
                    Some(n) => EntityPath::Shape(slide, n),
                })
            }
        }

        deserializer.deserialize_seq(PathVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShapeKind {
    Rectangle,
    Ellipse,
    Triangle,
    Textbox,
    Line,
    Picture,
}

impl ShapeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::Rectangle => "Rectangle",
            ShapeKind::Ellipse => "Ellipse",
            ShapeKind::Triangle => "Triangle",
            ShapeKind::Textbox => "Textbox",
            ShapeKind::Line => "Line",
            ShapeKind::Picture => "Picture",
        }
    }

    pub fn parse(s: &str) -> Option<ShapeKind> {
        [
            ShapeKind::Rectangle,
            ShapeKind::Ellipse,
            ShapeKind::Triangle,
            ShapeKind::Textbox,
            ShapeKind::Line,
            ShapeKind::Picture,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }

    /// Prefix used when naming freshly inserted shapes.
    pub fn name_prefix(self) -> &'static str {
        match self {
            ShapeKind::Textbox => "TextBox",
            other => other.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct Paint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<String>,
    #[serde(default)]
    pub transparency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct TextRange {
    pub text: String,
    pub bold: bool,
    pub italic: bool,
    pub font_name: String,
    pub size: f64,
    pub color: String,
    pub underline: String,
    pub horizontal_alignment: String,
    pub bulleted: bool,
}

impl Default for TextRange {
    fn default() -> Self {
        TextRange {
            text: String::new(),
            bold: false,
            italic: false,
            font_name: "Calibri".into(),
            size: 18.0,
            color: "#000000".into(),
            underline: "None".into(),
            horizontal_alignment: "Left".into(),
            bulleted: false,
        }
    }
}

impl TextRange {
    pub fn with_text(text: impl Into<String>) -> Self {
        TextRange { text: text.into(), ..TextRange::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ImageData {
    pub description: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Shape {
    pub name: String,
    pub shape_type: ShapeKind,
    pub top: f64,
    pub left: f64,
    pub height: f64,
    pub width: f64,
    #[serde(default)]
    pub fill: Paint,
    #[serde(default)]
    pub line: Paint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_range: Option<TextRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<ImageData>,
}

impl Shape {
    /// A shape with default geometry and styling for its kind.
    pub fn new(name: impl Into<String>, kind: ShapeKind) -> Self {
        let (fill, line) = match kind {
            ShapeKind::Textbox | ShapeKind::Picture => (Paint::default(), Paint::default()),
            ShapeKind::Line => (Paint::default(), Paint { color: Some("#2F528F".into()), transparency: 0.0 }),
            _ => (
                Paint { color: Some("#4472C4".into()), transparency: 0.0 },
                Paint { color: Some("#2F528F".into()), transparency: 0.0 },
            ),
        };
        let (width, height) = match kind {
            ShapeKind::Textbox => (400.0, 50.0),
            ShapeKind::Picture => (320.0, 240.0),
            _ => (100.0, 100.0),
        };
        Shape {
            name: name.into(),
            shape_type: kind,
            top: (SLIDE_HEIGHT - height) / 2.0,
            left: (SLIDE_WIDTH - width) / 2.0,
            height,
            width,
            fill,
            line,
            text_range: (kind == ShapeKind::Textbox).then(TextRange::default),
            image: None,
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text_range = Some(TextRange::with_text(text));
        self
    }

    pub fn at(mut self, top: f64, left: f64, height: f64, width: f64) -> Self {
        self.top = top;
        self.left = left;
        self.height = height;
        self.width = width;
        self
    }

    pub fn text(&self) -> Option<&str> {
        self.text_range.as_ref().map(|t| t.text.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Slide {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub shapes: Vec<Shape>,
}

impl Slide {
    pub fn new(layout: Option<&str>) -> Self {
        Slide { index: 0, layout: layout.map(str::to_owned), name: None, shapes: Vec::new() }
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shapes.push(shape);
        self
    }

    pub fn shape(&self, name: &str) -> Option<&Shape> {
        self.shapes.iter().find(|s| s.name == name)
    }

    pub fn shape_mut(&mut self, name: &str) -> Option<&mut Shape> {
        self.shapes.iter_mut().find(|s| s.name == name)
    }

    /// `"{prefix} {n}"` with the smallest `n >= 1` not used on this slide.
    pub fn fresh_shape_name(&self, kind: ShapeKind) -> String {
        (1..)
            .map(|n| format!("{} {n}", kind.name_prefix()))
            .find(|candidate| self.shape(candidate).is_none())
            .expect("unbounded search")
    }
}

/// Placeholder shapes created with a new slide of the given layout.
pub fn layout_placeholders(layout: Option<&str>) -> Vec<Shape> {
    let title = || Shape::new("Title", ShapeKind::Textbox).at(30.0, 60.0, 80.0, 840.0);
    let body = |name: &str, left: f64, width: f64| Shape::new(name, ShapeKind::Textbox).at(130.0, left, 360.0, width);
    match layout {
        Some("Title Slide") => vec![
            Shape::new("Title", ShapeKind::Textbox).at(160.0, 60.0, 120.0, 840.0),
            Shape::new("Subtitle", ShapeKind::Textbox).at(300.0, 120.0, 80.0, 720.0),
        ],
        Some("Title and Content") => vec![title(), body("Content", 60.0, 840.0)],
        Some("Section Header") => vec![title(), body("Text", 60.0, 840.0)],
        Some("Two Content") | Some("Comparison") => {
            vec![title(), body("Content Left", 60.0, 410.0), body("Content Right", 490.0, 410.0)]
        }
        Some("Title Only") => vec![title()],
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PresentationDoc {
    pub format_version: u32,
    pub slides: Vec<Slide>,
    /// Current user selection: slides and/or shapes.
    #[serde(default)]
    pub selection: Vec<EntityPath>,
}

impl Default for PresentationDoc {
    fn default() -> Self {
        PresentationDoc { format_version: FORMAT_VERSION, slides: Vec::new(), selection: Vec::new() }
    }
}

impl PresentationDoc {
    pub fn new(slides: Vec<Slide>) -> Self {
        let mut doc = PresentationDoc { slides, ..PresentationDoc::default() };
        doc.renumber();
        doc
    }

    pub fn with_selection(mut self, selection: Vec<EntityPath>) -> Self {
        self.selection = selection;
        self
    }

    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let doc: PresentationDoc = serde_json::from_str(text)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(DocError::Version(doc.format_version));
        }
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub(crate) fn renumber(&mut self) {
        for (i, s) in self.slides.iter_mut().enumerate() {
            s.index = i;
        }
    }

    pub fn slide(&self, index: usize) -> Option<&Slide> {
        self.slides.get(index)
    }

    pub fn shape(&self, path: &EntityPath) -> Option<&Shape> {
        match path {
            EntityPath::Shape(s, n) => self.slides.get(*s)?.shape(n),
            EntityPath::Slide(_) => None,
        }
    }

    pub fn shape_mut(&mut self, path: &EntityPath) -> Option<&mut Shape> {
        match path {
            EntityPath::Shape(s, n) => self.slides.get_mut(*s)?.shape_mut(n),
            EntityPath::Slide(_) => None,
        }
    }

    pub fn exists(&self, path: &EntityPath) -> bool {
        match path {
            EntityPath::Slide(s) => *s < self.slides.len(),
            EntityPath::Shape(..) => self.shape(path).is_some(),
        }
    }

    pub fn validate(&self) -> Result<(), DocError> {
        let invalid = |m: String| Err(DocError::Invalid(m));
        for (i, slide) in self.slides.iter().enumerate() {
            if slide.index != i {
                return invalid(format!("slide indices must be contiguous from 0; found {} at {i}", slide.index));
            }
            let mut names = HashSet::new();
            for shape in &slide.shapes {
                if !names.insert(shape.name.as_str()) {
                    return invalid(format!("duplicate shape name {:?} on slide {i}", shape.name));
                }
                let geometry = [shape.top, shape.left, shape.height, shape.width];
                if geometry.iter().any(|g| !g.is_finite()) || shape.height < 0.0 || shape.width < 0.0 {
                    return invalid(format!("shape {:?} on slide {i} has invalid geometry", shape.name));
                }
                for t in [shape.fill.transparency, shape.line.transparency] {
                    if !(0.0..=1.0).contains(&t) {
                        return invalid(format!("shape {:?} on slide {i} has transparency {t}", shape.name));
                    }
                }
            }
        }
        if let Some(p) = self.selection.iter().find(|p| !self.exists(p)) {
            return invalid(format!("selection refers to missing entity {p}"));
        }
        Ok(())
    }
}
