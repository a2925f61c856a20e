//! Analysis-retrieval prompting: classify the utterance, retrieve entity-aware
//! few-shot samples, assemble a budgeted prompt and repair the completion.

pub mod bank;
pub mod classify;
pub mod normalize;
pub mod prompt;
pub mod provider;
pub mod select;
pub mod subsample;
pub mod synth;
pub mod tables;

pub use bank::{BankError, SampleBank, SampleRecord, SubSample};
pub use classify::{classify, AnalysisResult, Classifier, ClassifyError};
pub use normalize::normalize_utterance;
pub use prompt::{build_prompt, CharTokenizer, PromptBudget, PromptBundle, PromptError, PromptSample, TokenEstimator};
pub use provider::{
    Cached, ChatMessage, ChatRequest, EmbeddingProvider, HashingEmbedder, HttpConfig, HttpEmbedder, HttpLlm, LlmClient,
    MockLlm, ProviderError, Purpose, ResponseCache, RetryPolicy, Retrying, Secret,
};
pub use select::{select_samples, ScoredSample, SelectError};
pub use subsample::{context_similarity, pick_subsample};
pub use synth::{strip_fences, ClassifierMode, RetrievalConfig, Synthesis, SynthesisError, Synthesizer};

/// Embedding of `text` from the bundled offline provider.
pub fn embed(text: &str) -> Vec<f64> {
    HashingEmbedder::default().vector(text)
}
