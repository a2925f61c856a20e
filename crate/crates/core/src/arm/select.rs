//! Entity-aware dynamic selection of few-shot samples.

use thiserror::Error;

use super::bank::{SampleBank, SampleRecord};
use super::normalize::normalize_utterance;
use super::provider::{dot, EmbeddingProvider, ProviderError};
use crate::lang::TagSet;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSample<'b> {
    pub record: &'b SampleRecord,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectError {
    #[error("no sample is tagged only with entities from {{{0}}}")]
    EmptyBankAfterFilter(String),
    #[error("embedding failed: {0}")]
    Provider(#[from] ProviderError),
}

/// Picks `max(k, |E|)` samples so that every entity in `E` that some record
/// covers is represented, favouring semantic similarity to `utterance`.
///
/// An empty `entities` set stands for all tags. Records are filtered to those
/// whose tags are a subset of `E` and scored by the dot product of unit
/// embeddings. A single greedy pass over the ranking picks records that add an
/// uncovered entity; the remaining slots are filled by score. Output is sorted
/// by descending score, ties kept in bank order.
pub fn select_samples<'b>(
    utterance: &str,
    bank: &'b SampleBank,
    entities: TagSet,
    k: usize,
    embedder: &dyn EmbeddingProvider,
) -> Result<Vec<ScoredSample<'b>>, SelectError> {
    let e = if entities.is_empty() { TagSet::all() } else { entities };
    let filtered: Vec<&SampleRecord> = bank.records.iter().filter(|r| r.tags.is_subset(e)).collect();
    if filtered.is_empty() {
        let names: Vec<_> = e.iter().map(|t| t.as_str()).collect();
        return Err(SelectError::EmptyBankAfterFilter(names.join(", ")));
    }

    let query = embedder.embed(&normalize_utterance(utterance))?;
    let mut ranked = Vec::with_capacity(filtered.len());
    for record in filtered {
        let score = match &record.embedding {
            Some(q) if q.len() == query.len() => dot(&query, q),
            _ => dot(&query, &embedder.embed(&record.normalized)?),
        };
        ranked.push(ScoredSample { record, score });
    }
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));

    let coverable = ranked.iter().fold(TagSet::empty(), |acc, s| acc.union(s.record.tags));
    let mut covered = TagSet::empty();
    let mut picked: Vec<usize> = Vec::new();
    for (i, s) in ranked.iter().enumerate() {
        if covered == coverable {
            break;
        }
        if !s.record.tags.is_subset(covered) {
            covered = covered.union(s.record.tags);
            picked.push(i);
        }
    }

    let want = k.max(e.len()).min(ranked.len());
    for i in 0..ranked.len() {
        if picked.len() >= want {
            break;
        }
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    picked.truncate(want);
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| ranked[i].clone()).collect())
}
