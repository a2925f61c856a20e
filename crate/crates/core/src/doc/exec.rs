//! Program execution over a [`PresentationDoc`] with no-op runtime semantics.

use std::collections::{BTreeMap, HashSet};

use regex::Regex;
use serde_json::Value as Json;
use thiserror::Error;

use super::actions::{apply, shift_after_delete, shift_after_insert, ActionLog, ActionRecord, ApplyError};
use super::model::{EntityPath, ImageData, PresentationDoc, ShapeKind};
use crate::analysis::{regex_body, TypedProgram, TypedStatement};
use crate::lang::{EntityType, Family, Literal, SpecialScope, Value};

/// Backend for delegation statements that create images.
pub trait ImageProvider: Send + Sync {
    fn generate(&self, description: &str) -> ImageData;
}

/// Stores the description as a placeholder image.
#[derive(Debug, Default, Clone, Copy)]
pub struct StubImageProvider;

impl ImageProvider for StubImageProvider {
    fn generate(&self, description: &str) -> ImageData {
        ImageData { description: description.to_owned(), source: format!("placeholder:{description}") }
    }
}

/// An action produced by the executor could not be applied. This is a bug.
#[derive(Debug, Error)]
#[error("internal execution fault at statement {statement}: {detail}")]
pub struct ExecError {
    pub statement: usize,
    pub detail: String,
}

pub fn execute(tp: &TypedProgram<'_>, doc: &PresentationDoc) -> Result<(PresentationDoc, ActionLog), ExecError> {
    execute_with(tp, doc, &StubImageProvider)
}

pub fn execute_with(
    tp: &TypedProgram<'_>,
    doc: &PresentationDoc,
    images: &dyn ImageProvider,
) -> Result<(PresentationDoc, ActionLog), ExecError> {
    let mut run = Run::new(doc.clone(), images);
    run.bind_inputs(tp);
    for (i, st) in tp.statements.iter().enumerate() {
        run.current = i;
        run.statement(st)?;
    }
    Ok((run.doc, run.log))
}

/// The log `execute` would produce; the caller's document is untouched.
pub fn transpile(tp: &TypedProgram<'_>, doc: &PresentationDoc) -> Result<ActionLog, ExecError> {
    execute(tp, doc).map(|(_, log)| log)
}

/// Entities of type `ty` within the current selection, in document order.
pub fn selection_entities(doc: &PresentationDoc, ty: EntityType) -> Vec<EntityPath> {
    let sel = &doc.selection;
    match ty {
        EntityType::Presentation => Vec::new(),
        EntityType::Slides => {
            let slides: HashSet<usize> = sel.iter().map(EntityPath::slide).collect();
            (0..doc.slides.len()).filter(|i| slides.contains(i)).map(EntityPath::Slide).collect()
        }
        EntityType::Shapes | EntityType::TextRanges => {
            let whole: HashSet<usize> =
                sel.iter().filter(|p| matches!(p, EntityPath::Slide(_))).map(EntityPath::slide).collect();
            let picked: HashSet<&EntityPath> = sel.iter().collect();
            let mut out = Vec::new();
            for (i, slide) in doc.slides.iter().enumerate() {
                for shape in &slide.shapes {
                    let path = EntityPath::Shape(i, shape.name.clone());
                    let wanted = whole.contains(&i) || picked.contains(&path);
                    if wanted && (ty == EntityType::Shapes || shape.text_range.is_some()) {
                        out.push(path);
                    }
                }
            }
            out
        }
    }
}

/// All entities of type `ty` contained in `scope` (entities of type `from`).
fn descend(doc: &PresentationDoc, from: EntityType, scope: &[EntityPath], ty: EntityType) -> Vec<EntityPath> {
    let live: Vec<&EntityPath> = scope.iter().filter(|p| doc.exists(p)).collect();
    match (from, ty) {
        (EntityType::Presentation, EntityType::Slides) => (0..doc.slides.len()).map(EntityPath::Slide).collect(),
        (EntityType::Presentation, _) => {
            let all: Vec<_> = (0..doc.slides.len()).map(EntityPath::Slide).collect();
            descend(doc, EntityType::Slides, &all, ty)
        }
        (EntityType::Slides, EntityType::Shapes | EntityType::TextRanges) => dedup(
            live.iter()
                .flat_map(|p| {
                    let s = p.slide();
                    doc.slides[s]
                        .shapes
                        .iter()
                        .filter(|sh| ty == EntityType::Shapes || sh.text_range.is_some())
                        .map(move |sh| EntityPath::Shape(s, sh.name.clone()))
                })
                .collect(),
        ),
        (EntityType::Shapes, EntityType::TextRanges) => {
            dedup(live.into_iter().filter(|p| doc.shape(p).is_some_and(|s| s.text_range.is_some())).cloned().collect())
        }
        _ => Vec::new(),
    }
}

fn dedup(paths: Vec<EntityPath>) -> Vec<EntityPath> {
    let mut seen = HashSet::new();
    paths.into_iter().filter(|p| seen.insert(p.clone())).collect()
}

fn to_json(v: &Value) -> Option<Json> {
    match v {
        Value::Literal(Literal::Number(n)) => {
            if n.fract() == 0.0 && n.abs() < 9.0e15 {
                Some(Json::from(*n as i64))
            } else {
                serde_json::Number::from_f64(*n).map(Json::Number)
            }
        }
        Value::Literal(Literal::String(s)) => Some(Json::String(s.clone())),
        Value::Literal(Literal::Boolean(b)) => Some(Json::Bool(*b)),
        Value::Literal(Literal::Placeholder(p)) => Some(Json::String(p.token().to_owned())),
        Value::Var(_) | Value::Special(_) => None,
    }
}

fn index_filter(v: Option<&Value>, items: Vec<EntityPath>) -> Vec<EntityPath> {
    match v.and_then(Value::as_number) {
        None => items,
        Some(n) if n >= 0.0 && n.fract() == 0.0 => items.into_iter().nth(n as usize).into_iter().collect(),
        Some(_) => Vec::new(),
    }
}

enum TextFilter {
    Literal(String),
    Pattern(Option<Regex>),
}

impl TextFilter {
    fn new(s: &str) -> Self {
        match regex_body(s) {
            Some(body) => TextFilter::Pattern(Regex::new(body).ok()),
            None => TextFilter::Literal(s.to_owned()),
        }
    }

    fn matches(&self, text: &str) -> bool {
        match self {
            TextFilter::Literal(s) => text.contains(s.as_str()),
            TextFilter::Pattern(Some(re)) => re.is_match(text),
            TextFilter::Pattern(None) => false,
        }
    }
}

struct Run<'i> {
    doc: PresentationDoc,
    log: ActionLog,
    env: BTreeMap<String, (EntityType, Vec<EntityPath>)>,
    images: &'i dyn ImageProvider,
    current: usize,
}

impl<'i> Run<'i> {
    fn new(doc: PresentationDoc, images: &'i dyn ImageProvider) -> Self {
        Run { doc, log: ActionLog::default(), env: BTreeMap::new(), images, current: 0 }
    }

    fn bind_inputs(&mut self, tp: &TypedProgram<'_>) {
        for (name, ty) in &tp.implicit_inputs {
            let entities = selection_entities(&self.doc, *ty);
            self.env.insert(name.clone(), (*ty, entities));
        }
    }

    fn lookup(&self, v: Option<&Value>) -> Option<(EntityType, Vec<EntityPath>)> {
        match v? {
            Value::Var(name) => self.env.get(name).cloned(),
            _ => None,
        }
    }

    /// Live entities bound to the entity parameter, deduplicated.
    fn targets(&self, st: &TypedStatement<'_>, param: &str) -> Option<Vec<EntityPath>> {
        let (ty, paths) = self.lookup(st.arg(param))?;
        Some(dedup(paths.into_iter().filter(|p| self.alive(ty, p)).collect()))
    }

    fn alive(&self, ty: EntityType, p: &EntityPath) -> bool {
        match ty {
            EntityType::TextRanges => self.doc.shape(p).is_some_and(|s| s.text_range.is_some()),
            _ => self.doc.exists(p),
        }
    }

    /// Applies `record`, logs it and rebases every path the program holds.
    fn emit(&mut self, record: ActionRecord, held: &mut [&mut Vec<EntityPath>]) -> Result<(), ExecError> {
        apply(&mut self.doc, &record).map_err(|e| ExecError {
            statement: self.current,
            detail: match e {
                ApplyError::UnknownOp(op) => format!("unknown op {op}"),
                ApplyError::Missing(p) => format!("missing entity {p}"),
                ApplyError::BadArg(a) => format!("bad argument {a}"),
            },
        })?;
        let rebase = |paths: &mut Vec<EntityPath>| match (record.op.as_str(), &record.path) {
            ("insert_slides", EntityPath::Slide(at)) => shift_after_insert(paths, *at),
            ("delete_slides", EntityPath::Slide(at)) => shift_after_delete(paths, *at),
            ("delete_shapes", path) => paths.retain(|p| p != path),
            _ => {}
        };
        for (_, paths) in self.env.values_mut() {
            rebase(paths);
        }
        for paths in held.iter_mut() {
            rebase(paths);
        }
        self.log.records.push(record);
        Ok(())
    }

    fn bind(&mut self, st: &TypedStatement<'_>, ty: EntityType, paths: Vec<EntityPath>) {
        if let Some(name) = &st.binding {
            self.env.insert(name.clone(), (ty, paths));
        }
    }

    fn statement(&mut self, st: &TypedStatement<'_>) -> Result<(), ExecError> {
        let schema = st.schema;
        match schema.family {
            Family::Select => {
                let found = self.select(st);
                self.bind(st, schema.target, found);
            }
            Family::Insert | Family::Delegation => {
                let (ty, created) = match schema.name.as_str() {
                    "insert_slides" => (EntityType::Slides, self.insert_slides(st)?),
                    "insert_shapes" | "insert_images" => (EntityType::Shapes, self.insert_shapes(st)?),
                    "insert_text" => (EntityType::TextRanges, self.insert_text(st)?),
                    other => {
                        return Err(ExecError { statement: self.current, detail: format!("no executor for {other}") })
                    }
                };
                self.bind(st, schema.returns.unwrap_or(ty), created);
            }
            Family::Format => {
                let Some(param) = schema.entity_param() else { return Ok(()) };
                let Some(mut pending) = self.targets(st, &param.name) else { return Ok(()) };
                let args: BTreeMap<String, Json> = st
                    .args
                    .iter()
                    .filter(|(n, _)| n != &param.name)
                    .filter_map(|(n, v)| to_json(v).map(|j| (n.clone(), j)))
                    .collect();
                if args.is_empty() {
                    return Ok(());
                }
                while !pending.is_empty() {
                    let path = pending.remove(0);
                    let record = ActionRecord { op: schema.name.clone(), path, args: args.clone() };
                    self.emit(record, &mut [&mut pending])?;
                }
            }
            Family::Delete => {
                let Some(param) = schema.entity_param() else { return Ok(()) };
                let Some(mut pending) = self.targets(st, &param.name) else { return Ok(()) };
                while !pending.is_empty() {
                    let path = pending.remove(0);
                    self.emit(ActionRecord::new(schema.name.clone(), path), &mut [&mut pending])?;
                }
            }
        }
        Ok(())
    }

    fn scope(&self, st: &TypedStatement<'_>, ty: EntityType) -> Vec<EntityPath> {
        match st.arg("scope") {
            None | Some(Value::Special(SpecialScope::Selection)) => selection_entities(&self.doc, ty),
            Some(Value::Special(SpecialScope::Presentation)) => descend(&self.doc, EntityType::Presentation, &[], ty),
            Some(Value::Var(name)) => match self.env.get(name) {
                Some((from, paths)) => descend(&self.doc, *from, paths, ty),
                None => Vec::new(),
            },
            Some(_) => Vec::new(),
        }
    }

    fn select(&self, st: &TypedStatement<'_>) -> Vec<EntityPath> {
        let ty = st.schema.target;
        let doc = &self.doc;
        let mut items = self.scope(st, ty);
        let name = st.arg("name").and_then(Value::as_str);
        match ty {
            EntityType::Slides => {
                let layout = st.arg("layout").and_then(Value::as_str);
                items.retain(|p| {
                    let slide = &doc.slides[p.slide()];
                    layout.is_none_or(|l| slide.layout.as_deref() == Some(l))
                        && name.is_none_or(|n| slide.name.as_deref() == Some(n))
                });
            }
            EntityType::Shapes => {
                let kind = st.arg("shapeType").and_then(Value::as_str);
                items.retain(|p| {
                    let shape = doc.shape(p).expect("scope yields live shapes");
                    kind.is_none_or(|k| shape.shape_type.as_str() == k) && name.is_none_or(|n| shape.name == n)
                });
            }
            EntityType::TextRanges => {
                let filter = st.arg("text").and_then(Value::as_str).map(TextFilter::new);
                items.retain(|p| {
                    let shape = doc.shape(p).expect("scope yields live shapes");
                    filter.as_ref().is_none_or(|f| f.matches(shape.text().unwrap_or_default()))
                        && name.is_none_or(|n| shape.name == n)
                });
            }
            EntityType::Presentation => return Vec::new(),
        }
        index_filter(st.arg("index"), items)
    }

    fn insert_slides(&mut self, st: &TypedStatement<'_>) -> Result<Vec<EntityPath>, ExecError> {
        let layout = st.arg("layout").and_then(to_json);
        let with_layout = |r: ActionRecord| match &layout {
            Some(l) => r.arg("layout", l.clone()),
            None => r,
        };
        let mut created = Vec::new();
        match self.targets(st, "precededBy") {
            None if st.arg("precededBy").is_some() => {}
            None => {
                let at = self.doc.slides.len();
                self.emit(with_layout(ActionRecord::new("insert_slides", EntityPath::Slide(at))), &mut [])?;
                created.push(EntityPath::Slide(at));
            }
            Some(mut pending) => {
                while !pending.is_empty() {
                    let at = pending.remove(0).slide() + 1;
                    self.emit(
                        with_layout(ActionRecord::new("insert_slides", EntityPath::Slide(at))),
                        &mut [&mut pending, &mut created],
                    )?;
                    created.push(EntityPath::Slide(at));
                }
            }
        }
        Ok(created)
    }

    fn new_shape_record(&self, op: &str, slide: usize, kind: ShapeKind) -> ActionRecord {
        let name = self.doc.slides[slide].fresh_shape_name(kind);
        let r = ActionRecord::new(op, EntityPath::Shape(slide, name));
        if kind == ShapeKind::Picture {
            r
        } else {
            r.arg("shapeType", kind.as_str())
        }
    }

    fn insert_shapes(&mut self, st: &TypedStatement<'_>) -> Result<Vec<EntityPath>, ExecError> {
        let delegation = st.schema.name == "insert_images";
        let kind = if delegation {
            ShapeKind::Picture
        } else {
            match st.arg("shapeType").and_then(Value::as_str).and_then(ShapeKind::parse) {
                Some(k) => k,
                None => return Ok(Vec::new()),
            }
        };
        let Some(mut pending) = self.targets(st, "slides") else { return Ok(Vec::new()) };
        let description = st.arg("description").and_then(Value::as_str).unwrap_or_default().to_owned();
        let mut created = Vec::new();
        while !pending.is_empty() {
            let slide = pending.remove(0).slide();
            let mut record = self.new_shape_record(&st.schema.name, slide, kind);
            if delegation {
                let image = self.images.generate(&description);
                record = record.arg("description", image.description).arg("source", image.source);
            }
            let path = record.path.clone();
            self.emit(record, &mut [&mut pending, &mut created])?;
            created.push(path);
        }
        Ok(created)
    }

    fn insert_text(&mut self, st: &TypedStatement<'_>) -> Result<Vec<EntityPath>, ExecError> {
        let Some(text) = st.arg("text").and_then(to_json) else { return Ok(Vec::new()) };
        let mut pending = match self.targets(st, "shapes") {
            Some(shapes) => shapes,
            None if st.arg("shapes").is_some() => return Ok(Vec::new()),
            None => {
                let empty_box = selection_entities(&self.doc, EntityType::Shapes).into_iter().find(|p| {
                    self.doc
                        .shape(p)
                        .is_some_and(|s| s.shape_type == ShapeKind::Textbox && s.text().unwrap_or_default().is_empty())
                });
                match empty_box {
                    Some(p) => vec![p],
                    None => {
                        let Some(slide) =
                            selection_entities(&self.doc, EntityType::Slides).first().map(EntityPath::slide)
                        else {
                            return Ok(Vec::new());
                        };
                        let record = self.new_shape_record("insert_shapes", slide, ShapeKind::Textbox);
                        let path = record.path.clone();
                        self.emit(record, &mut [])?;
                        vec![path]
                    }
                }
            }
        };
        let mut written = Vec::new();
        while !pending.is_empty() {
            let path = pending.remove(0);
            self.emit(
                ActionRecord::new("insert_text", path.clone()).arg("text", text.clone()),
                &mut [&mut pending, &mut written],
            )?;
            written.push(path);
        }
        Ok(written)
    }
}
