use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::ValueEnum;

use crate::arm::{
    Cached, EmbeddingProvider, HashingEmbedder, HttpConfig, HttpEmbedder, HttpLlm, LlmClient, MockLlm, ResponseCache,
    Retrying, Secret,
};

use super::CliError;

pub const ENV_LLM_ENDPOINT: &str = "ODSL_LLM_ENDPOINT";
pub const ENV_LLM_MODEL: &str = "ODSL_LLM_MODEL";
pub const ENV_EMBED_ENDPOINT: &str = "ODSL_EMBED_ENDPOINT";
pub const ENV_EMBED_MODEL: &str = "ODSL_EMBED_MODEL";
pub const ENV_API_KEY: &str = "ODSL_API_KEY";
pub const ENV_CACHE_DIR: &str = "ODSL_CACHE_DIR";
pub const ENV_TIMEOUT_SECS: &str = "ODSL_TIMEOUT_SECS";

const BUNDLED_MOCK: &str = include_str!("../../data/mock_llm.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderChoice {
    /// Scripted completions and the offline hashing embedder
    Mock,
    /// OpenAI-compatible HTTP endpoints configured through the environment
    Http,
}

/// Provider settings read from the environment. `Debug` never shows the key.
#[derive(Debug, Clone, Default)]
pub struct ProviderEnv {
    pub llm_endpoint: Option<String>,
    pub llm_model: Option<String>,
    pub embed_endpoint: Option<String>,
    pub embed_model: Option<String>,
    pub api_key: Option<Secret>,
    pub cache_dir: Option<PathBuf>,
    pub timeout: Option<Duration>,
}

impl ProviderEnv {
    pub fn from_env() -> Self {
        let var = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
        ProviderEnv {
            llm_endpoint: var(ENV_LLM_ENDPOINT),
            llm_model: var(ENV_LLM_MODEL),
            embed_endpoint: var(ENV_EMBED_ENDPOINT),
            embed_model: var(ENV_EMBED_MODEL),
            api_key: var(ENV_API_KEY).map(Secret::new),
            cache_dir: var(ENV_CACHE_DIR).map(PathBuf::from),
            timeout: var(ENV_TIMEOUT_SECS).and_then(|s| s.parse().ok()).map(Duration::from_secs),
        }
    }

    fn http(
        &self,
        endpoint: &Option<String>,
        model: &Option<String>,
        var: &str,
        default_model: &str,
    ) -> Result<HttpConfig, CliError> {
        let endpoint = endpoint.clone().ok_or_else(|| CliError::Provider(format!("{var} is not set")))?;
        let mut config = HttpConfig::new(endpoint, model.clone().unwrap_or_else(|| default_model.to_owned()));
        config.api_key = self.api_key.clone();
        if let Some(t) = self.timeout {
            config.timeout = t;
        }
        Ok(config)
    }

    pub fn llm(&self, choice: ProviderChoice, mock_file: Option<&Path>) -> Result<Box<dyn LlmClient>, CliError> {
        match choice {
            ProviderChoice::Mock => {
                let text = match mock_file {
                    Some(p) => {
                        std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.to_owned(), source })?
                    }
                    None => BUNDLED_MOCK.to_owned(),
                };
                let mock = MockLlm::from_json(&text).map_err(|e| CliError::Failure(format!("mock responses: {e}")))?;
                Ok(Box::new(mock))
            }
            ProviderChoice::Http => {
                let config =
                    self.http(&self.llm_endpoint, &self.llm_model, ENV_LLM_ENDPOINT, "gpt-3.5-turbo-instruct")?;
                let client = Retrying::new(HttpLlm { config });
                Ok(match &self.cache_dir {
                    Some(dir) => {
                        Box::new(Cached { inner: client, cache: ResponseCache::new(dir), namespace: "llm".into() })
                    }
                    None => Box::new(client),
                })
            }
        }
    }

    pub fn embedder(&self, choice: ProviderChoice) -> Result<Box<dyn EmbeddingProvider>, CliError> {
        match choice {
            ProviderChoice::Mock => Ok(Box::new(HashingEmbedder::default())),
            ProviderChoice::Http => {
                let config =
                    self.http(&self.embed_endpoint, &self.embed_model, ENV_EMBED_ENDPOINT, "text-embedding-3-small")?;
                let client = Retrying::new(HttpEmbedder { config });
                Ok(match &self.cache_dir {
                    Some(dir) => {
                        Box::new(Cached { inner: client, cache: ResponseCache::new(dir), namespace: "embed".into() })
                    }
                    None => Box::new(client),
                })
            }
        }
    }
}
