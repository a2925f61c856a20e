//! Sample bank: utterance/program pairs tagged with entities, optionally with
//! context-dependent sub-samples.

use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::normalize::normalize_utterance;
use super::provider::{EmbeddingProvider, ProviderError};
use crate::doc::ContextTree;
use crate::lang::{parse, print_source_order, Program, TagSet};

static BUILTIN: &str = include_str!("../../data/bank.json");

pub(crate) mod program_text {
    use super::*;

    pub fn serialize<S: Serializer>(p: &Program, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(print_source_order(p).trim_end())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Program, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubSample {
    pub context: ContextTree,
    #[serde(with = "program_text")]
    pub program: Program,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleRecord {
    pub id: String,
    pub utterance: String,
    /// Filled from `utterance` on load when absent.
    #[serde(default)]
    pub normalized: String,
    pub tags: TagSet,
    #[serde(with = "program_text")]
    pub program: Program,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sub_samples: Vec<SubSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<f64>>,
}

impl SampleRecord {
    pub fn new(id: &str, utterance: &str, tags: TagSet, program: Program) -> Self {
        SampleRecord {
            id: id.to_owned(),
            utterance: utterance.to_owned(),
            normalized: normalize_utterance(utterance),
            tags,
            program,
            sub_samples: Vec::new(),
            embedding: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum BankError {
    #[error("invalid sample bank: {0}")]
    Json(#[from] serde_json::Error),
    #[error("sample {id}: {message}")]
    Invalid { id: String, message: String },
    #[error("embedding failed: {0}")]
    Provider(#[from] ProviderError),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleBank {
    pub records: Vec<SampleRecord>,
}

impl SampleBank {
    pub fn builtin() -> SampleBank {
        SampleBank::from_json(BUILTIN).expect("bundled bank is valid")
    }

    pub fn new(records: Vec<SampleRecord>) -> Result<Self, BankError> {
        let mut bank = SampleBank { records };
        bank.prepare()?;
        Ok(bank)
    }

    /// Parses a JSON list of records.
    pub fn from_json(text: &str) -> Result<Self, BankError> {
        SampleBank::new(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("bank serializes")
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&SampleRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    fn prepare(&mut self) -> Result<(), BankError> {
        let mut ids = HashSet::new();
        for r in &mut self.records {
            let invalid = |message: &str| BankError::Invalid { id: r.id.clone(), message: message.to_owned() };
            if !ids.insert(r.id.clone()) {
                return Err(invalid("duplicate id"));
            }
            if r.normalized.is_empty() {
                r.normalized = normalize_utterance(&r.utterance);
            }
            for (i, a) in r.sub_samples.iter().enumerate() {
                if r.sub_samples[..i].iter().any(|b| b.context == a.context) {
                    return Err(invalid("sub-sample contexts must be pairwise distinct"));
                }
            }
            if let Some(e) = &r.embedding {
                let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-6 {
                    return Err(invalid("stored embedding is not unit length"));
                }
            }
        }
        Ok(())
    }

    /// Computes and stores the embedding of every normalized utterance.
    pub fn index(&mut self, embedder: &dyn EmbeddingProvider) -> Result<(), BankError> {
        for r in &mut self.records {
            r.embedding = Some(embedder.embed(&r.normalized)?);
        }
        Ok(())
    }
}
