//! Utterance normalization: strips specificity before semantic search.

use super::tables::{words, ArmTables, NormalizationTables};

pub const COLOR_TOKEN: &str = "color";
pub const STYLE_PHRASE: &str = "a given style";

pub fn normalize_utterance(utterance: &str) -> String {
    normalize_with(utterance, &ArmTables::builtin().normalization)
}

/// Lowercases, maps generative verbs to `add`, color words to `color`, and
/// `<descriptor> style|tone` to `a given style`.
pub fn normalize_with(utterance: &str, t: &NormalizationTables) -> String {
    let ws = words(utterance);
    let mut out: Vec<String> = Vec::with_capacity(ws.len());
    let mut i = 0;
    while i < ws.len() {
        let w = &ws[i];
        let next_is_style = ws.get(i + 1).is_some_and(|n| t.style_nouns.contains(n));
        if t.style_descriptors.contains(w) && next_is_style {
            out.push(STYLE_PHRASE.to_owned());
            i += 2;
            continue;
        }
        if let Some(v) = t.verbs.get(w) {
            out.push(v.clone());
        } else if t.color_words.contains(w) {
            out.push(COLOR_TOKEN.to_owned());
        } else {
            out.push(w.clone());
        }
        i += 1;
    }
    out.join(" ")
}
