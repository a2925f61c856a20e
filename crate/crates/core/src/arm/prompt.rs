//! Prompt assembly under a token budget.

use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use super::classify::AnalysisResult;
use super::provider::{ChatMessage, ChatRequest, Purpose};
use crate::doc::ContextTree;
use crate::lang::{Registry, Snippet};

pub const SYSTEM_INSTRUCTION: &str = "ODSL is a DSL for performing actions in PowerPoint.";
pub const RULES_PREAMBLE: &str =
    "Generate an ODSL program to fulfill the given user utterance. Remember to follow the following rules when generating ODSL:";

pub trait TokenEstimator: Send + Sync {
    fn estimate(&self, text: &str) -> usize;
}

/// `ceil(chars / chars_per_token)`.
#[derive(Debug, Clone, Copy)]
pub struct CharTokenizer {
    pub chars_per_token: usize,
}

impl Default for CharTokenizer {
    fn default() -> Self {
        CharTokenizer { chars_per_token: 4 }
    }
}

impl TokenEstimator for CharTokenizer {
    fn estimate(&self, text: &str) -> usize {
        text.chars().count().div_ceil(self.chars_per_token.max(1))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PromptBudget {
    pub total: usize,
    /// Reserved for the completion.
    pub completion_reserve: usize,
}

impl Default for PromptBudget {
    fn default() -> Self {
        PromptBudget { total: 4097, completion_reserve: 512 }
    }
}

impl PromptBudget {
    pub fn available(&self) -> usize {
        self.total.saturating_sub(self.completion_reserve)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PromptSample {
    pub id: String,
    pub utterance: String,
    pub context: Option<ContextTree>,
    pub program: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PromptBundle {
    pub system: String,
    pub syntax: Vec<Snippet>,
    pub rules: Vec<String>,
    pub samples: Vec<PromptSample>,
    pub input: String,
    pub context: Option<ContextTree>,
    pub estimated_tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PromptError {
    #[error("prompt needs {needed} tokens without any samples but only {available} are available")]
    BudgetUnsatisfiable { needed: usize, available: usize },
}

fn render_context(c: &ContextTree) -> String {
    format!("Context: {}", c.to_json_string())
}

impl PromptBundle {
    fn system_block(&self) -> String {
        let mut s = format!("{}\nHere are examples of ODSL's syntax:\n", self.system);
        for snip in &self.syntax {
            let _ = write!(s, "\n# {}\n{}\n", snip.comment, snip.code);
        }
        let _ = write!(s, "\n{RULES_PREAMBLE}\n");
        for rule in &self.rules {
            let _ = writeln!(s, "- {rule}");
        }
        s
    }

    fn user_turn(utterance: &str, context: Option<&ContextTree>) -> String {
        match context {
            Some(c) => format!("{utterance}\n{}", render_context(c)),
            None => utterance.to_owned(),
        }
    }

    /// The exact text sent for estimation and shown by `--dump-prompt`.
    pub fn render(&self) -> String {
        let mut s = self.system_block();
        for sample in &self.samples {
            let _ = write!(
                s,
                "\nUser: {}\nAssistant:\n{}\n",
                PromptBundle::user_turn(&sample.utterance, sample.context.as_ref()),
                sample.program
            );
        }
        let _ = write!(s, "\nUser: {}\nAssistant:\n", PromptBundle::user_turn(&self.input, self.context.as_ref()));
        s
    }

    /// Chat-shaped rendering: a system turn, one user/assistant pair per
    /// sample, and the input as the final user turn.
    pub fn messages(&self) -> Vec<ChatMessage> {
        let mut out = vec![ChatMessage::system(self.system_block())];
        for sample in &self.samples {
            out.push(ChatMessage::user(PromptBundle::user_turn(&sample.utterance, sample.context.as_ref())));
            out.push(ChatMessage::assistant(sample.program.clone()));
        }
        out.push(ChatMessage::user(PromptBundle::user_turn(&self.input, self.context.as_ref())));
        out
    }

    pub fn request(&self, budget: PromptBudget) -> ChatRequest {
        ChatRequest {
            purpose: Purpose::Synthesize,
            utterance: self.input.clone(),
            messages: self.messages(),
            temperature: 0.0,
            top_p: 1.0,
            max_tokens: budget.completion_reserve,
        }
    }
}

/// Assembles the prompt. Syntax snippets and rules are limited to the
/// analysed entities; the document context is included only when required.
/// Samples are expected in descending score order and are dropped from the
/// end until the estimate fits the budget.
pub fn build_prompt(
    utterance: &str,
    context: Option<&ContextTree>,
    analysis: &AnalysisResult,
    samples: Vec<PromptSample>,
    registry: &Registry,
    budget: PromptBudget,
    tokenizer: &dyn TokenEstimator,
) -> Result<PromptBundle, PromptError> {
    let tags = analysis.entities;
    let syntax =
        registry.statements_for_tags(tags.iter()).into_iter().flat_map(|s| s.snippets.iter().cloned()).collect();
    let rules = registry
        .rules
        .iter()
        .filter(|r| r.tags.is_empty() || r.tags.iter().any(|t| tags.contains(*t)))
        .map(|r| r.text.clone())
        .collect();
    let with_context = analysis.requires_context;
    let mut bundle = PromptBundle {
        system: SYSTEM_INSTRUCTION.to_owned(),
        syntax,
        rules,
        samples: samples
            .into_iter()
            .map(|s| PromptSample { context: if with_context { s.context } else { None }, ..s })
            .collect(),
        input: utterance.to_owned(),
        context: if with_context { context.cloned() } else { None },
        estimated_tokens: 0,
    };
    let available = budget.available();
    loop {
        bundle.estimated_tokens = tokenizer.estimate(&bundle.render());
        if bundle.estimated_tokens <= available {
            return Ok(bundle);
        }
        if bundle.samples.pop().is_none() {
            return Err(PromptError::BudgetUnsatisfiable { needed: bundle.estimated_tokens, available });
        }
    }
}
