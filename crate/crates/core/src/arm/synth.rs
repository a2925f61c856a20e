//! End-to-end synthesis: analysis, retrieval, prompting, completion, repair.

use serde::Serialize;
use thiserror::Error;

use super::bank::SampleBank;
use super::classify::{classify, AnalysisResult, Classifier, ClassifyError};
use super::prompt::{build_prompt, CharTokenizer, PromptBudget, PromptBundle, PromptError, PromptSample};
use super::provider::{EmbeddingProvider, LlmClient, ProviderError};
use super::select::{select_samples, SelectError};
use super::subsample::pick_subsample;
use crate::analysis::diagnostics;
use crate::doc::ContextTree;
use crate::fix::{check_and_fix, FixReport};
use crate::lang::{parse, print_source_order, ParseError, Program, Registry, TagSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierMode {
    Rules,
    Llm,
}

/// Knobs for one synthesis run. The three switches mirror the ablation
/// variants: disabling the entity classifier retrieves over every tag,
/// disabling the context classifier always includes the context.
#[derive(Debug, Clone, Copy)]
pub struct RetrievalConfig {
    pub k: usize,
    pub budget: PromptBudget,
    pub temperature: f64,
    pub top_p: f64,
    pub classifier: ClassifierMode,
    pub entity_classifier: bool,
    pub context_classifier: bool,
    pub code_correction: bool,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            k: 5,
            budget: PromptBudget::default(),
            temperature: 0.0,
            top_p: 1.0,
            classifier: ClassifierMode::Rules,
            entity_classifier: true,
            context_classifier: true,
            code_correction: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Classify(ClassifyError),
    #[error(transparent)]
    Select(SelectError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("provider failure: {0}")]
    Provider(ProviderError),
    #[error("generated program does not parse: {error}")]
    Parse { error: ParseError, completion: String },
}

impl From<ClassifyError> for SynthesisError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Provider(p) => SynthesisError::Provider(p),
            other => SynthesisError::Classify(other),
        }
    }
}

impl From<SelectError> for SynthesisError {
    fn from(e: SelectError) -> Self {
        match e {
            SelectError::Provider(p) => SynthesisError::Provider(p),
            other => SynthesisError::Select(other),
        }
    }
}

impl SynthesisError {
    pub fn is_provider(&self) -> bool {
        matches!(self, SynthesisError::Provider(_))
    }
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub analysis: AnalysisResult,
    pub prompt: PromptBundle,
    pub completion: String,
    pub program: Program,
    pub report: FixReport,
}

impl Synthesis {
    pub fn is_clean(&self) -> bool {
        self.report.is_clean()
    }
}

/// The program text of a completion, without Markdown code fences.
pub fn strip_fences(completion: &str) -> String {
    let trimmed = completion.trim();
    if let Some(start) = trimmed.find("```") {
        let after = &trimmed[start + 3..];
        let body = after.split_once('\n').map_or("", |(_, rest)| rest);
        let body = body.split("```").next().unwrap_or(body);
        return body.trim().to_owned();
    }
    trimmed.to_owned()
}

pub struct Synthesizer<'a> {
    pub bank: &'a SampleBank,
    pub llm: &'a dyn LlmClient,
    pub embedder: &'a dyn EmbeddingProvider,
    pub config: RetrievalConfig,
}

impl Synthesizer<'_> {
    pub fn synthesize(&self, utterance: &str, context: &ContextTree) -> Result<Synthesis, SynthesisError> {
        let cfg = &self.config;
        let classifier = match cfg.classifier {
            ClassifierMode::Rules => Classifier::Rules,
            ClassifierMode::Llm => Classifier::Llm(self.llm),
        };
        let mut analysis = classify(utterance, classifier)?;
        if !cfg.entity_classifier {
            analysis.entities = TagSet::all();
        }
        if !cfg.context_classifier {
            analysis.requires_context = true;
        }

        let selected = if cfg.k == 0 {
            Vec::new()
        } else {
            select_samples(utterance, self.bank, analysis.entities, cfg.k, self.embedder)?
        };
        let samples = selected
            .iter()
            .map(|s| {
                let (ctx, program) = pick_subsample(s.record, context);
                PromptSample {
                    id: s.record.id.clone(),
                    utterance: s.record.utterance.clone(),
                    context: ctx.cloned(),
                    program: print_source_order(program).trim_end().to_owned(),
                    score: s.score,
                }
            })
            .collect();

        let prompt = build_prompt(
            utterance,
            Some(context),
            &analysis,
            samples,
            Registry::builtin(),
            cfg.budget,
            &CharTokenizer::default(),
        )?;
        let mut request = prompt.request(cfg.budget);
        request.temperature = cfg.temperature;
        request.top_p = cfg.top_p;
        let completion = self.llm.complete(&request).map_err(SynthesisError::Provider)?;

        let text = strip_fences(&completion);
        let parsed = parse(&text).map_err(|error| SynthesisError::Parse { error, completion: completion.clone() })?;
        let report = if cfg.code_correction {
            check_and_fix(&parsed)
        } else {
            FixReport { program: parsed.clone(), applied: Vec::new(), residual: diagnostics(&parsed) }
        };
        Ok(Synthesis { analysis, prompt, completion, program: report.program.clone(), report })
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicU32, Ordering};
    use std::time::Duration;

    use super::*;
    use crate::arm::provider::{ChatRequest, HashingEmbedder, MockLlm, Purpose, RetryPolicy, Retrying};
    use crate::doc::{extract_context, ContextScope, PresentationDoc};
    use crate::lang::pretty_print;

    fn run(llm: &dyn LlmClient, utterance: &str) -> Result<Synthesis, SynthesisError> {
        let bank = SampleBank::builtin();
        let embedder = HashingEmbedder::default();
        let synth = Synthesizer { bank: &bank, llm, embedder: &embedder, config: RetrievalConfig::default() };
        synth.synthesize(utterance, &extract_context(&PresentationDoc::default(), ContextScope::Selection))
    }

    #[test]
    fn invalid_completion_is_corrected() {
        let u = "Make the text Comic Sans";
        let mock = MockLlm::default().with(
            Purpose::Synthesize,
            u,
            "text = select_text()\nformat_text(textRanges=text, fontName=\"Cmic Sans\")",
        );
        let out = run(&mock, u).unwrap();
        assert_eq!(
            pretty_print(&out.program),
            "text = select_text()\nformat_text(textRanges=text, fontName=\"Comic Sans MS\")\n"
        );
        assert_eq!(out.report.applied.len(), 1);
        assert!(out.is_clean());
    }

    #[test]
    fn valid_completion_is_unchanged() {
        let u = "Change the text format to make it look like a typewriter";
        let program = "text = select_text()\nformat_text(textRanges=text, fontName=\"Courier New\", size=18, bold=false, italic=false, underline=\"None\", color=\"#000000\", bulleted=false, horizontalAlignment=\"Left\")";
        let mock = MockLlm::default().with(Purpose::Synthesize, u, &format!("```odsl\n{program}\n```"));
        let out = run(&mock, u).unwrap();
        assert!(out.report.applied.is_empty());
        assert_eq!(out.program, parse(program).unwrap());
        assert!(!out.prompt.render().contains("Context:"));
    }

    #[test]
    fn provider_timeouts_surface_after_retries() {
        struct Slow(AtomicU32);
        impl LlmClient for Slow {
            fn complete(&self, _: &ChatRequest) -> Result<String, ProviderError> {
                self.0.fetch_add(1, Ordering::SeqCst);
                Err(ProviderError::Timeout)
            }
        }
        let client = Retrying {
            inner: Slow(AtomicU32::new(0)),
            policy: RetryPolicy { attempts: 3, base_delay: Duration::from_millis(1) },
        };
        let err = run(&client, "Make the text bold").unwrap_err();
        assert!(matches!(err, SynthesisError::Provider(ProviderError::Timeout)));
        assert_eq!(client.inner.0.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn unparsable_completion_is_a_parse_error() {
        let u = "Make the text bold";
        let mock = MockLlm::default().with(Purpose::Synthesize, u, "I cannot do that.");
        assert!(matches!(run(&mock, u), Err(SynthesisError::Parse { .. })));
    }

    #[test]
    fn fences_are_stripped() {
        assert_eq!(strip_fences("```\na = select_text()\n```"), "a = select_text()");
        assert_eq!(strip_fences("Here:\n```odsl\na = select_text()\n```\nDone"), "a = select_text()");
        assert_eq!(strip_fences("  a = select_text()  "), "a = select_text()");
    }

    #[test]
    fn k_zero_prompt_has_no_samples() {
        let u = "Make the text bold";
        let mock =
            MockLlm::default().with(Purpose::Synthesize, u, "t = select_text()\nformat_text(textRanges=t, bold=true)");
        let bank = SampleBank::builtin();
        let embedder = HashingEmbedder::default();
        let config = RetrievalConfig { k: 0, ..RetrievalConfig::default() };
        let synth = Synthesizer { bank: &bank, llm: &mock, embedder: &embedder, config };
        let out = synth.synthesize(u, &extract_context(&PresentationDoc::default(), ContextScope::Selection)).unwrap();
        assert!(out.prompt.samples.is_empty());
        assert!(!out.prompt.syntax.is_empty());
    }
}
