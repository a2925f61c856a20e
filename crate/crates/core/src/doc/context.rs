//! Lightweight JSON view of a document given to the model as context.
//!
//! Identifier keys on each node are spelled exactly like the parameters of the
//! matching select statement, so a model can copy them into a filter.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};

use super::model::{EntityPath, PresentationDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ContextScope {
    #[default]
    Selection,
    Presentation,
}

impl std::str::FromStr for ContextScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "selection" => Ok(ContextScope::Selection),
            "presentation" => Ok(ContextScope::Presentation),
            _ => Err(format!("unknown context scope `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ContextOptions {
    /// Maximum characters of text kept per text node.
    pub text_budget: usize,
}

impl Default for ContextOptions {
    fn default() -> Self {
        ContextOptions { text_budget: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContextTree(pub Json);

/// Child-container keys; everything else on a node is an identifier.
const CONTAINERS: [&str; 2] = ["shapes", "textRange"];

impl ContextTree {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.0).expect("context serializes")
    }

    pub fn to_pretty_string(&self) -> String {
        serde_json::to_string_pretty(&self.0).expect("context serializes")
    }

    /// `(entity level, identifier key)` pairs present anywhere in the tree.
    /// Levels are `slides`, `shapes` and `textRange`.
    pub fn identifier_keys(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        collect_keys(&self.0, None, &mut out);
        out
    }

    /// `(node path, identifier key)` pairs, e.g. `("slides[0].shapes[1]", "name")`.
    pub fn identifier_pairs(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        collect_paths(&self.0, "", &mut out);
        out
    }
}

fn collect_paths(node: &Json, path: &str, out: &mut BTreeSet<(String, String)>) {
    match node {
        Json::Object(map) => {
            for (k, v) in map {
                let child = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                if k == "slides" || CONTAINERS.contains(&k.as_str()) {
                    collect_paths(v, &child, out);
                } else if !path.is_empty() {
                    out.insert((path.to_owned(), k.clone()));
                }
            }
        }
        Json::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                collect_paths(item, &format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

fn collect_keys(node: &Json, level: Option<&str>, out: &mut BTreeSet<(String, String)>) {
    match node {
        Json::Object(map) => {
            for (k, v) in map {
                if k == "slides" || CONTAINERS.contains(&k.as_str()) {
                    collect_keys(v, Some(k), out);
                } else if let Some(level) = level {
                    out.insert((level.to_owned(), k.clone()));
                }
            }
        }
        Json::Array(items) => items.iter().for_each(|i| collect_keys(i, level, out)),
        _ => {}
    }
}

pub fn extract_context(doc: &PresentationDoc, scope: ContextScope) -> ContextTree {
    extract_context_with(doc, scope, ContextOptions::default())
}

pub fn extract_context_with(doc: &PresentationDoc, scope: ContextScope, opts: ContextOptions) -> ContextTree {
    let whole: HashSet<usize> =
        doc.selection.iter().filter(|p| matches!(p, EntityPath::Slide(_))).map(EntityPath::slide).collect();
    let picked: HashSet<&EntityPath> = doc.selection.iter().collect();
    let touched: HashSet<usize> = doc.selection.iter().map(EntityPath::slide).collect();

    let mut slides = Vec::new();
    for (i, slide) in doc.slides.iter().enumerate() {
        if scope == ContextScope::Selection && !touched.contains(&i) {
            continue;
        }
        let mut shapes = Vec::new();
        for (j, shape) in slide.shapes.iter().enumerate() {
            let keep = scope == ContextScope::Presentation
                || whole.contains(&i)
                || picked.contains(&EntityPath::Shape(i, shape.name.clone()));
            if !keep {
                continue;
            }
            let mut node = Map::new();
            node.insert("index".into(), json!(j));
            node.insert("name".into(), json!(shape.name));
            node.insert("shapeType".into(), json!(shape.shape_type.as_str()));
            if let Some(text) = shape.text().filter(|t| !t.is_empty()) {
                node.insert("textRange".into(), json!({ "text": truncate(text, opts.text_budget) }));
            }
            shapes.push(Json::Object(node));
        }
        let mut node = Map::new();
        node.insert("index".into(), json!(i));
        if let Some(layout) = &slide.layout {
            node.insert("layout".into(), json!(layout));
        }
        if let Some(name) = &slide.name {
            node.insert("name".into(), json!(name));
        }
        node.insert("shapes".into(), Json::Array(shapes));
        slides.push(Json::Object(node));
    }
    ContextTree(json!({ "slides": slides }))
}

fn truncate(text: &str, budget: usize) -> String {
    match text.char_indices().nth(budget) {
        Some((cut, _)) => text[..cut].to_owned(),
        None => text.to_owned(),
    }
}
