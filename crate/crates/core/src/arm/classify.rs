//! Analysis step: which entities an utterance concerns and whether the
//! document context is needed to fulfil it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::provider::{ChatMessage, ChatRequest, LlmClient, ProviderError, Purpose};
use super::tables::{words, ArmTables, ClassifierTables};
use crate::lang::{EntityTag, TagSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisResult {
    pub entities: TagSet,
    pub requires_context: bool,
    pub transcript: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("utterance is empty")]
    EmptyUtterance,
    #[error("classifier transcript is missing a `{0}` line")]
    ClassifierParseError(&'static str),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

#[derive(Clone, Copy)]
pub enum Classifier<'a> {
    Rules,
    Llm(&'a dyn LlmClient),
}

pub fn classify(utterance: &str, classifier: Classifier<'_>) -> Result<AnalysisResult, ClassifyError> {
    if utterance.trim().is_empty() {
        return Err(ClassifyError::EmptyUtterance);
    }
    match classifier {
        Classifier::Rules => Ok(classify_rules(utterance, &ArmTables::builtin().classifier)),
        Classifier::Llm(client) => {
            let transcript = client.complete(&classifier_request(utterance))?;
            parse_transcript(&transcript)
        }
    }
}

const CLASSIFIER_INSTRUCTION: &str = "There are 5 categories of entities in a PowerPoint presentation: text, image, shape, slide, presentation. You need to perform the following tasks:\n\
1. Categorize a given sentence into entity categories. Each sentence can have more than one category.\n\
2. Classify whether a sentence requires context. Context is required when additional information about the content of a presentation is required to fulfill the task described in the sentence.\n\
- Adding an image about a given topic does not require context.\n\
- Adding new text needs context to decide where to place the text on the current slide.\n\
Answer with a `Categories:` line, a `Thoughts:` line and a `RequiresContext:` line.\n\
Let's think step by step.";

const CLASSIFIER_SHOTS: [(&str, &str); 3] = [
    (
        "Make the title text on this slide red",
        "Categories: text\nThoughts: We can select the title text and make it red without knowing the existing text properties. Therefore we do not need context.\nRequiresContext: false",
    ),
    (
        "Add text that's a poem about the life of a high school student with emojis.",
        "Categories: text\nThoughts: We need to know whether there is existing text on the slide to add the new poem. Therefore we need context.\nRequiresContext: true",
    ),
    (
        "Insert a picture of a cat on a new slide",
        "Categories: slide, image\nThoughts: A new slide and an image are created; nothing existing needs to be read. Therefore we do not need context.\nRequiresContext: false",
    ),
];

/// The few-shot chat request for the joint entity/context classifier.
pub fn classifier_request(utterance: &str) -> ChatRequest {
    let mut messages = vec![ChatMessage::system(CLASSIFIER_INSTRUCTION)];
    for (user, assistant) in CLASSIFIER_SHOTS {
        messages.push(ChatMessage::user(user));
        messages.push(ChatMessage::assistant(assistant));
    }
    messages.push(ChatMessage::user(utterance));
    ChatRequest {
        purpose: Purpose::Classify,
        utterance: utterance.to_owned(),
        messages,
        temperature: 0.0,
        top_p: 1.0,
        max_tokens: 128,
    }
}

/// Reads `Categories:` and `RequiresContext:` lines from a classifier reply.
pub fn parse_transcript(transcript: &str) -> Result<AnalysisResult, ClassifyError> {
    let field = |name: &str| {
        transcript.lines().find_map(|line| {
            let (key, value) = line.split_once(':')?;
            key.trim().eq_ignore_ascii_case(name).then(|| value.trim().to_owned())
        })
    };
    let categories = field("Categories").ok_or(ClassifyError::ClassifierParseError("Categories:"))?;
    let mut entities = TagSet::empty();
    for part in categories.split(',') {
        if let Ok(tag) = part.trim().trim_end_matches('.').parse::<EntityTag>() {
            entities.insert(tag);
        }
    }
    if entities.is_empty() {
        return Err(ClassifyError::ClassifierParseError("Categories:"));
    }
    let requires = field("RequiresContext").ok_or(ClassifyError::ClassifierParseError("RequiresContext:"))?;
    let requires_context = match requires.trim_end_matches('.').to_ascii_lowercase().as_str() {
        "true" | "yes" => true,
        "false" | "no" => false,
        _ => return Err(ClassifyError::ClassifierParseError("RequiresContext:")),
    };
    Ok(AnalysisResult { entities, requires_context, transcript: transcript.to_owned() })
}

/// Keyword classifier. Slide and presentation nouns used only as a location
/// ("on this slide") do not count. No match at all yields every tag.
pub fn classify_rules(utterance: &str, t: &ClassifierTables) -> AnalysisResult {
    let ws = words(utterance);
    let mut locative = vec![false; ws.len()];
    for i in 0..ws.len() {
        if !t.locatives.contains(&ws[i]) {
            continue;
        }
        let mut j = i + 1;
        while j < ws.len() && t.determiners.contains(&ws[j]) {
            j += 1;
        }
        if j < ws.len() && t.locative_nouns.contains(&ws[j]) {
            locative[j] = true;
        }
    }
    let mut entities = TagSet::empty();
    let mut hits = Vec::new();
    for (i, w) in ws.iter().enumerate() {
        for (tag, keywords) in &t.keywords {
            if keywords.contains(w) && !locative[i] {
                entities.insert(*tag);
                hits.push(format!("{w}->{tag}"));
            }
        }
    }
    if entities.is_empty() {
        entities = TagSet::all();
    }
    let generative = ws.iter().any(|w| t.generative_verbs.contains(w));
    let rewrite = ws.iter().any(|w| t.rewrite_verbs.contains(w));
    let requires_context = rewrite || (generative && entities.contains(EntityTag::Text));
    let categories: Vec<_> = entities.iter().map(EntityTag::as_str).collect();
    let transcript = format!(
        "Categories: {}\nThoughts: keyword matches [{}]\nRequiresContext: {requires_context}",
        categories.join(", "),
        hits.join(", ")
    );
    AnalysisResult { entities, requires_context, transcript }
}
