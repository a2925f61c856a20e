//! LLM and embedding providers: offline mock and hashing backends, an HTTP
//! backend speaking the common chat/embeddings JSON shape, retries and an
//! on-disk response cache.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::tables::words;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProviderError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("request timed out")]
    Timeout,
    #[error("provider returned HTTP {0}")]
    Status(u16),
    #[error("malformed provider response: {0}")]
    BadResponse(String),
    #[error("no scripted {purpose} response for utterance {utterance:?}")]
    NoMockResponse { purpose: Purpose, utterance: String },
    #[error("provider not configured: {0}")]
    NotConfigured(String),
}

impl ProviderError {
    /// Whether a retry may succeed.
    pub fn is_transient(&self) -> bool {
        match self {
            ProviderError::Transport(_) | ProviderError::Timeout => true,
            ProviderError::Status(code) => *code == 429 || *code >= 500,
            _ => false,
        }
    }
}

/// API key that never appears in `Debug` output or logs.
#[derive(Clone, PartialEq, Eq)]
pub struct Secret(String);

impl Secret {
    pub fn new(value: impl Into<String>) -> Self {
        Secret(value.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Secret {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Secret(***)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purpose {
    Classify,
    Synthesize,
}

impl fmt::Display for Purpose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Purpose::Classify => "classify",
            Purpose::Synthesize => "synthesize",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: "system".into(), content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: "user".into(), content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: "assistant".into(), content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChatRequest {
    pub purpose: Purpose,
    /// The user utterance this request serves; keys scripted responses.
    pub utterance: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: usize,
}

pub trait LlmClient: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<String, ProviderError>;
}

pub trait EmbeddingProvider: Send + Sync {
    /// Stable identifier, recorded with persisted embeddings.
    fn id(&self) -> String;
    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError>;
}

impl<T: LlmClient + ?Sized> LlmClient for &T {
    fn complete(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        (**self).complete(request)
    }
}

impl<T: EmbeddingProvider + ?Sized> EmbeddingProvider for &T {
    fn id(&self) -> String {
        (**self).id()
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        (**self).embed(text)
    }
}

pub fn l2_normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hashed bag-of-words embedding (FNV-1a buckets), L2-normalized.
#[derive(Debug, Clone, Copy)]
pub struct HashingEmbedder {
    pub dim: usize,
}

impl Default for HashingEmbedder {
    fn default() -> Self {
        HashingEmbedder { dim: 256 }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(*b)).wrapping_mul(0x0100_0000_01b3))
}

impl HashingEmbedder {
    pub fn vector(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        let mut tokens = words(text);
        if tokens.is_empty() {
            tokens.push("<empty>".into());
        }
        for t in tokens {
            v[(fnv1a(t.as_bytes()) % self.dim as u64) as usize] += 1.0;
        }
        l2_normalize(v)
    }
}

impl EmbeddingProvider for HashingEmbedder {
    fn id(&self) -> String {
        format!("hashing-{}", self.dim)
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        Ok(self.vector(text))
    }
}

/// Scripted completions keyed by purpose and utterance.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MockLlm {
    #[serde(default)]
    pub classify: BTreeMap<String, String>,
    #[serde(default)]
    pub synthesize: BTreeMap<String, String>,
}

impl MockLlm {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn with(mut self, purpose: Purpose, utterance: &str, response: &str) -> Self {
        let table = match purpose {
            Purpose::Classify => &mut self.classify,
            Purpose::Synthesize => &mut self.synthesize,
        };
        table.insert(utterance.to_owned(), response.to_owned());
        self
    }
}

impl LlmClient for MockLlm {
    fn complete(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        let table = match request.purpose {
            Purpose::Classify => &self.classify,
            Purpose::Synthesize => &self.synthesize,
        };
        table.get(&request.utterance).cloned().ok_or_else(|| ProviderError::NoMockResponse {
            purpose: request.purpose,
            utterance: request.utterance.clone(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct HttpConfig {
    /// Base URL; `/chat/completions` or `/embeddings` is appended.
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<Secret>,
    pub timeout: Duration,
}

impl HttpConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        HttpConfig { endpoint: endpoint.into(), model: model.into(), api_key: None, timeout: Duration::from_secs(60) }
    }

    fn url(&self, path: &str) -> String {
        format!("{}/{path}", self.endpoint.trim_end_matches('/'))
    }

    fn post(&self, path: &str, body: &serde_json::Value) -> Result<serde_json::Value, ProviderError> {
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(self.timeout)).build().into();
        let mut req = agent.post(&self.url(path)).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {}", key.expose()));
        }
        let mut resp = req.send_json(body).map_err(map_ureq)?;
        resp.body_mut().read_json::<serde_json::Value>().map_err(|e| ProviderError::BadResponse(e.to_string()))
    }
}

fn map_ureq(e: ureq::Error) -> ProviderError {
    match e {
        ureq::Error::StatusCode(code) => ProviderError::Status(code),
        ureq::Error::Timeout(_) => ProviderError::Timeout,
        other => ProviderError::Transport(other.to_string()),
    }
}

/// Chat-completions client: `POST {endpoint}/chat/completions`.
#[derive(Debug, Clone)]
pub struct HttpLlm {
    pub config: HttpConfig,
}

impl LlmClient for HttpLlm {
    fn complete(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        let body = json!({
            "model": self.config.model,
            "messages": request.messages,
            "temperature": request.temperature,
            "top_p": request.top_p,
            "max_tokens": request.max_tokens,
        });
        let resp = self.config.post("chat/completions", &body)?;
        resp.pointer("/choices/0/message/content")
            .and_then(|c| c.as_str())
            .map(str::to_owned)
            .ok_or_else(|| ProviderError::BadResponse("missing choices[0].message.content".into()))
    }
}

/// Embeddings client: `POST {endpoint}/embeddings`.
#[derive(Debug, Clone)]
pub struct HttpEmbedder {
    pub config: HttpConfig,
}

impl EmbeddingProvider for HttpEmbedder {
    fn id(&self) -> String {
        format!("http:{}", self.config.model)
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        let resp = self.config.post("embeddings", &json!({ "model": self.config.model, "input": text }))?;
        let values = resp
            .pointer("/data/0/embedding")
            .and_then(|v| v.as_array())
            .ok_or_else(|| ProviderError::BadResponse("missing data[0].embedding".into()))?;
        let v: Option<Vec<f64>> = values.iter().map(serde_json::Value::as_f64).collect();
        let v = v.ok_or_else(|| ProviderError::BadResponse("non-numeric embedding".into()))?;
        if v.is_empty() {
            return Err(ProviderError::BadResponse("empty embedding".into()));
        }
        Ok(l2_normalize(v))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { attempts: 3, base_delay: Duration::from_millis(250) }
    }
}

impl RetryPolicy {
    /// Runs `op` until it succeeds, fails permanently or attempts run out,
    /// doubling the delay after each transient failure.
    pub fn run<T>(&self, mut op: impl FnMut() -> Result<T, ProviderError>) -> Result<T, ProviderError> {
        let mut delay = self.base_delay;
        let mut attempt = 1;
        loop {
            match op() {
                Err(e) if e.is_transient() && attempt < self.attempts.max(1) => {
                    thread::sleep(delay);
                    delay *= 2;
                    attempt += 1;
                }
                other => return other,
            }
        }
    }
}

pub struct Retrying<P> {
    pub inner: P,
    pub policy: RetryPolicy,
}

impl<P> Retrying<P> {
    pub fn new(inner: P) -> Self {
        Retrying { inner, policy: RetryPolicy::default() }
    }
}

impl<P: LlmClient> LlmClient for Retrying<P> {
    fn complete(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        self.policy.run(|| self.inner.complete(request))
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for Retrying<P> {
    fn id(&self) -> String {
        self.inner.id()
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        self.policy.run(|| self.inner.embed(text))
    }
}

/// Content-addressed response store. Entries are written to a temporary file
/// and renamed into place, so concurrent readers never see partial writes.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResponseCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(namespace: &str, request: &impl Serialize) -> String {
        let mut h = Sha256::new();
        h.update(namespace.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(request).expect("request serializes"));
        hex::encode(h.finalize())
    }

    pub fn get<T: for<'de> Deserialize<'de>>(&self, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.dir.join(format!("{key}.json"))).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(value).expect("value serializes").as_bytes())?;
        tmp.persist(self.dir.join(format!("{key}.json"))).map_err(|e| e.error)?;
        Ok(())
    }
}

pub struct Cached<P> {
    pub inner: P,
    pub cache: ResponseCache,
    /// Distinguishes backends sharing one cache directory.
    pub namespace: String,
}

impl<P: LlmClient> LlmClient for Cached<P> {
    fn complete(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        let key = ResponseCache::key(
            &self.namespace,
            &(&request.messages, request.temperature, request.top_p, request.max_tokens),
        );
        if let Some(hit) = self.cache.get::<String>(&key) {
            return Ok(hit);
        }
        let out = self.inner.complete(request)?;
        // A failed cache write only costs a future round trip.
        let _ = self.cache.put(&key, &out);
        Ok(out)
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for Cached<P> {
    fn id(&self) -> String {
        self.inner.id()
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        let key = ResponseCache::key(&format!("{}:{}", self.namespace, self.inner.id()), &text);
        if let Some(hit) = self.cache.get::<Vec<f64>>(&key) {
            return Ok(hit);
        }
        let out = self.inner.embed(text)?;
        let _ = self.cache.put(&key, &out);
        Ok(out)
    }
}
