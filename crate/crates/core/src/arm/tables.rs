//! Word tables driving normalization and the rule-based classifier.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use serde::Deserialize;

use crate::lang::EntityTag;

static BUILTIN: &str = include_str!("../../data/arm_tables.json");

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalizationTables {
    pub verbs: BTreeMap<String, String>,
    pub color_words: HashSet<String>,
    pub style_nouns: HashSet<String>,
    pub style_descriptors: HashSet<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassifierTables {
    pub keywords: BTreeMap<EntityTag, Vec<String>>,
    pub locatives: HashSet<String>,
    pub determiners: HashSet<String>,
    pub locative_nouns: HashSet<String>,
    pub generative_verbs: HashSet<String>,
    pub rewrite_verbs: HashSet<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ArmTables {
    pub normalization: NormalizationTables,
    pub classifier: ClassifierTables,
}

impl ArmTables {
    pub fn builtin() -> &'static ArmTables {
        static TABLES: OnceLock<ArmTables> = OnceLock::new();
        TABLES.get_or_init(|| ArmTables::from_json(BUILTIN).expect("bundled ARM tables are valid"))
    }

    pub fn from_json(text: &str) -> Result<ArmTables, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Lowercased alphanumeric words of `text`.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(str::to_lowercase).collect()
}
