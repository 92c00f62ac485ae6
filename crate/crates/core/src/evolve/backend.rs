//! LLM backends: a live OpenAI-compatible HTTP client, a replay backend
//! serving recorded responses, and the null backend (handled by the loop
//! itself, which echoes the parent code).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::prompt::{ChatRequest, MessagePart};
use super::EvolveError;

/// Which backend a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Live,
    Replay,
    Null,
}

/// Sequentially serves `0000.txt`, `0001.txt`, ... from a directory.
#[derive(Debug)]
pub struct ReplayBackend {
    dir: PathBuf,
    cursor: usize,
}

impl ReplayBackend {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir, cursor: 0 }
    }

    pub fn with_cursor(dir: PathBuf, cursor: usize) -> Self {
        Self { dir, cursor }
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn next_response(&mut self) -> Result<String, EvolveError> {
        let path = self.dir.join(format!("{:04}.txt", self.cursor));
        let text = std::fs::read_to_string(&path)
            .map_err(|_| EvolveError::ReplayExhausted(self.cursor))?;
        self.cursor += 1;
        Ok(text)
    }
}

/// OpenAI-compatible chat-completions client. The key is read from the
/// named environment variable at request time.
pub struct LiveBackend {
    pub endpoint: String,
    pub api_key_env: String,
    client: reqwest::blocking::Client,
}

impl LiveBackend {
    pub fn new(endpoint: String, api_key_env: String, timeout_secs: u64) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(timeout_secs))
            .build()
            .expect("http client");
        Self {
            endpoint,
            api_key_env,
            client,
        }
    }

    /// The OpenAI chat-completions JSON body for a request.
    pub fn wire_body(request: &ChatRequest) -> serde_json::Value {
        let messages: Vec<serde_json::Value> = request
            .messages
            .iter()
            .map(|m| {
                let content: Vec<serde_json::Value> = m
                    .parts
                    .iter()
                    .map(|p| match p {
                        MessagePart::Text { text } => {
                            serde_json::json!({"type": "text", "text": text})
                        }
                        MessagePart::Image { data_uri } => serde_json::json!({
                            "type": "image_url",
                            "image_url": {"url": data_uri},
                        }),
                    })
                    .collect();
                serde_json::json!({"role": m.role, "content": content})
            })
            .collect();
        serde_json::json!({
            "model": request.model,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        })
    }

    pub fn complete(&self, request: &ChatRequest) -> Result<String, EvolveError> {
        let key = std::env::var(&self.api_key_env).map_err(|_| {
            EvolveError::BackendUnreachable(format!(
                "API key environment variable `{}` is not set",
                self.api_key_env
            ))
        })?;
        let body = Self::wire_body(request);
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(key)
            .json(&body)
            .send()
            .map_err(|e| EvolveError::BackendUnreachable(e.to_string()))?;
        if !response.status().is_success() {
            return Err(EvolveError::BackendUnreachable(format!(
                "HTTP {}",
                response.status()
            )));
        }
        let value: serde_json::Value = response
            .json()
            .map_err(|e| EvolveError::BackendUnreachable(e.to_string()))?;
        extract_content(&value).ok_or_else(|| {
            EvolveError::BackendUnreachable("response carries no message content".into())
        })
    }
}

/// Pull the assistant text out of a chat-completions response. Content may
/// be a plain string or a list of typed parts.
fn extract_content(value: &serde_json::Value) -> Option<String> {
    let content = value.get("choices")?.get(0)?.get("message")?.get("content")?;
    if let Some(text) = content.as_str() {
        return Some(text.to_string());
    }
    let parts = content.as_array()?;
    let text: String = parts
        .iter()
        .filter_map(|p| p.get("text").and_then(|t| t.as_str()))
        .collect::<Vec<_>>()
        .join("");
    Some(text)
}
