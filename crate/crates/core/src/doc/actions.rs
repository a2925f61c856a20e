//! Action log: the serialized transpilation target, and its replay.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;
use thiserror::Error;

use super::model::{
    layout_placeholders, DocError, EntityPath, ImageData, PresentationDoc, Shape, ShapeKind, Slide, TextRange,
    FORMAT_VERSION,
};
use crate::lang::{Family, Registry};

/// One native-API call: an operation on a single entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub op: String,
    pub path: EntityPath,
    #[serde(default)]
    pub args: BTreeMap<String, Json>,
}

impl ActionRecord {
    pub fn new(op: impl Into<String>, path: EntityPath) -> Self {
        ActionRecord { op: op.into(), path, args: BTreeMap::new() }
    }

    pub fn arg(mut self, name: &str, value: impl Into<Json>) -> Self {
        self.args.insert(name.to_owned(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ActionLog {
    pub format_version: u32,
    pub records: Vec<ActionRecord>,
}

impl Default for ActionLog {
    fn default() -> Self {
        ActionLog { format_version: FORMAT_VERSION, records: Vec::new() }
    }
}

impl ActionLog {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let log: ActionLog = serde_json::from_str(text)?;
        if log.format_version != FORMAT_VERSION {
            return Err(DocError::Version(log.format_version));
        }
        Ok(log)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("log serializes")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ReplayError {
    #[error("record {index}: unknown op `{op}`")]
    UnknownOp { index: usize, op: String },
    #[error("record {index}: no entity at {path}")]
    MissingEntity { index: usize, path: String },
    #[error("record {index}: bad argument `{arg}`")]
    BadArgument { index: usize, arg: String },
}

/// Applies every record of `log` to a copy of `doc`.
pub fn replay(doc: &PresentationDoc, log: &ActionLog) -> Result<PresentationDoc, ReplayError> {
    let mut out = doc.clone();
    for (index, record) in log.records.iter().enumerate() {
        apply(&mut out, record).map_err(|e| e.at(index))?;
    }
    Ok(out)
}

#[derive(Debug)]
pub(crate) enum ApplyError {
    UnknownOp(String),
    Missing(EntityPath),
    BadArg(String),
}

impl ApplyError {
    fn at(self, index: usize) -> ReplayError {
        match self {
            ApplyError::UnknownOp(op) => ReplayError::UnknownOp { index, op },
            ApplyError::Missing(p) => ReplayError::MissingEntity { index, path: p.to_string() },
            ApplyError::BadArg(arg) => ReplayError::BadArgument { index, arg },
        }
    }
}

fn str_arg<'a>(r: &'a ActionRecord, name: &str) -> Result<Option<&'a str>, ApplyError> {
    match r.args.get(name) {
        None => Ok(None),
        Some(Json::String(s)) => Ok(Some(s)),
        Some(_) => Err(ApplyError::BadArg(name.to_owned())),
    }
}

fn num_arg(r: &ActionRecord, name: &str) -> Result<Option<f64>, ApplyError> {
    match r.args.get(name) {
        None => Ok(None),
        Some(v) => v.as_f64().map(Some).ok_or_else(|| ApplyError::BadArg(name.to_owned())),
    }
}

fn bool_arg(r: &ActionRecord, name: &str) -> Result<Option<bool>, ApplyError> {
    match r.args.get(name) {
        None => Ok(None),
        Some(v) => v.as_bool().map(Some).ok_or_else(|| ApplyError::BadArg(name.to_owned())),
    }
}

fn shape_slot<'d>(doc: &'d mut PresentationDoc, path: &EntityPath) -> Result<(&'d mut Slide, String), ApplyError> {
    match path {
        EntityPath::Shape(s, name) => match doc.slides.get_mut(*s) {
            Some(slide) => Ok((slide, name.clone())),
            None => Err(ApplyError::Missing(path.clone())),
        },
        EntityPath::Slide(_) => Err(ApplyError::Missing(path.clone())),
    }
}

fn shape_mut<'d>(doc: &'d mut PresentationDoc, path: &EntityPath) -> Result<&'d mut Shape, ApplyError> {
    doc.shape_mut(path).ok_or_else(|| ApplyError::Missing(path.clone()))
}

/// Applies one record. Selection paths are kept consistent with structural edits.
pub(crate) fn apply(doc: &mut PresentationDoc, r: &ActionRecord) -> Result<(), ApplyError> {
    match r.op.as_str() {
        "insert_slides" => {
            let EntityPath::Slide(at) = r.path else { return Err(ApplyError::Missing(r.path.clone())) };
            if at > doc.slides.len() {
                return Err(ApplyError::Missing(r.path.clone()));
            }
            let layout = str_arg(r, "layout")?;
            let mut slide = Slide::new(layout);
            slide.shapes = layout_placeholders(layout);
            doc.slides.insert(at, slide);
            doc.renumber();
            shift_after_insert(&mut doc.selection, at);
        }
        "insert_shapes" | "insert_images" => {
            let (slide, name) = shape_slot(doc, &r.path)?;
            if slide.shape(&name).is_some() {
                return Err(ApplyError::BadArg("path".into()));
            }
            let kind = if r.op == "insert_images" {
                ShapeKind::Picture
            } else {
                let k = str_arg(r, "shapeType")?.ok_or_else(|| ApplyError::BadArg("shapeType".into()))?;
                ShapeKind::parse(k).ok_or_else(|| ApplyError::BadArg("shapeType".into()))?
            };
            let mut shape = Shape::new(name, kind);
            for (key, slot) in [
                ("top", &mut shape.top),
                ("left", &mut shape.left),
                ("height", &mut shape.height),
                ("width", &mut shape.width),
            ] {
                if let Some(v) = num_arg(r, key)? {
                    *slot = v;
                }
            }
            if kind == ShapeKind::Picture {
                let description = str_arg(r, "description")?.unwrap_or_default().to_owned();
                let source = str_arg(r, "source")?.unwrap_or_default().to_owned();
                shape.image = Some(ImageData { description, source });
            }
            slide.shapes.push(shape);
        }
        "insert_text" => {
            let text = str_arg(r, "text")?.ok_or_else(|| ApplyError::BadArg("text".into()))?;
            let shape = shape_mut(doc, &r.path)?;
            match &mut shape.text_range {
                Some(t) => t.text.push_str(text),
                None => shape.text_range = Some(TextRange::with_text(text)),
            }
        }
        "format_slides" => {
            let EntityPath::Slide(s) = r.path else { return Err(ApplyError::Missing(r.path.clone())) };
            let layout = str_arg(r, "layout")?;
            let slide = doc.slides.get_mut(s).ok_or_else(|| ApplyError::Missing(r.path.clone()))?;
            if let Some(l) = layout {
                slide.layout = Some(l.to_owned());
            }
        }
        "format_shapes" => {
            let (fill_color, line_color) = (str_arg(r, "fillColor")?, str_arg(r, "lineColor")?);
            let (fill_t, line_t) = (num_arg(r, "fillTransparency")?, num_arg(r, "lineTransparency")?);
            let geometry = [num_arg(r, "top")?, num_arg(r, "left")?, num_arg(r, "height")?, num_arg(r, "width")?];
            let shape = shape_mut(doc, &r.path)?;
            if let Some(c) = fill_color {
                shape.fill.color = Some(c.to_owned());
            }
            if let Some(c) = line_color {
                shape.line.color = Some(c.to_owned());
            }
            if let Some(t) = fill_t {
                shape.fill.transparency = t.clamp(0.0, 1.0);
            }
            if let Some(t) = line_t {
                shape.line.transparency = t.clamp(0.0, 1.0);
            }
            let [top, left, height, width] = geometry;
            if let Some(v) = top {
                shape.top = v;
            }
            if let Some(v) = left {
                shape.left = v;
            }
            if let Some(v) = height {
                shape.height = v.max(0.0);
            }
            if let Some(v) = width {
                shape.width = v.max(0.0);
            }
        }
        "format_text" => {
            let bools = [bool_arg(r, "bold")?, bool_arg(r, "italic")?, bool_arg(r, "bulleted")?];
            let strs = [
                str_arg(r, "fontName")?,
                str_arg(r, "color")?,
                str_arg(r, "underline")?,
                str_arg(r, "horizontalAlignment")?,
            ];
            let size = num_arg(r, "size")?;
            let shape = shape_mut(doc, &r.path)?;
            let t = shape.text_range.as_mut().ok_or_else(|| ApplyError::Missing(r.path.clone()))?;
            let [bold, italic, bulleted] = bools;
            let [font, color, underline, align] = strs;
            bold.into_iter().for_each(|v| t.bold = v);
            italic.into_iter().for_each(|v| t.italic = v);
            bulleted.into_iter().for_each(|v| t.bulleted = v);
            font.into_iter().for_each(|v| t.font_name = v.to_owned());
            color.into_iter().for_each(|v| t.color = v.to_owned());
            underline.into_iter().for_each(|v| t.underline = v.to_owned());
            align.into_iter().for_each(|v| t.horizontal_alignment = v.to_owned());
            size.into_iter().for_each(|v| t.size = v.max(1.0));
        }
        "delete_slides" => {
            let EntityPath::Slide(s) = r.path else { return Err(ApplyError::Missing(r.path.clone())) };
            if s >= doc.slides.len() {
                return Err(ApplyError::Missing(r.path.clone()));
            }
            doc.slides.remove(s);
            doc.renumber();
            shift_after_delete(&mut doc.selection, s);
        }
        "delete_shapes" => {
            let (slide, name) = shape_slot(doc, &r.path)?;
            let pos =
                slide.shapes.iter().position(|s| s.name == name).ok_or_else(|| ApplyError::Missing(r.path.clone()))?;
            slide.shapes.remove(pos);
            doc.selection.retain(|p| p != &r.path);
        }
        "delete_text" => {
            let shape = shape_mut(doc, &r.path)?;
            let t = shape.text_range.as_mut().ok_or_else(|| ApplyError::Missing(r.path.clone()))?;
            t.text.clear();
        }
        other => return Err(ApplyError::UnknownOp(other.to_owned())),
    }
    Ok(())
}

/// Shifts slide indices at or after `at` up by one.
pub(crate) fn shift_after_insert(paths: &mut [EntityPath], at: usize) {
    for p in paths.iter_mut() {
        if p.slide() >= at {
            *p = p.with_slide(p.slide() + 1);
        }
    }
}

/// Drops paths on slide `at` and shifts later slides down by one.
pub(crate) fn shift_after_delete(paths: &mut Vec<EntityPath>, at: usize) {
    paths.retain(|p| p.slide() != at);
    for p in paths.iter_mut() {
        if p.slide() > at {
            *p = p.with_slide(p.slide() - 1);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditViolation {
    pub index: usize,
    pub op: String,
}

/// Checks that every op in `log` is an undoable document edit.
pub fn undoability_audit(log: &ActionLog) -> Result<(), Vec<AuditViolation>> {
    undoability_audit_with(log, Registry::builtin())
}

pub fn undoability_audit_with(log: &ActionLog, registry: &Registry) -> Result<(), Vec<AuditViolation>> {
    let violations: Vec<_> = log
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| !registry.lookup(&r.op).is_some_and(|s| s.family != Family::Select))
        .map(|(index, r)| AuditViolation { index, op: r.op.clone() })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}
