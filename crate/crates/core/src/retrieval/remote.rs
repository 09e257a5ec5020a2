//! Chat-completions style HTTP backend.

use std::time::Duration;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::library::{KnowledgeLibrary, LibraryFormat};
use crate::response::{parse_response, SelectionSet};

use super::{BackendError, Conversation, FileSummary, RouterBackend, ScoredFile, Task};

pub const API_KEY_ENV: &str = "SDSR_API_KEY";

const ROUTE_PROMPT: &str = "You route questions to knowledge files. Each file is listed by its id followed by its summary. Reply with the ids of the one to three most relevant files, one id per line, most relevant first, and nothing else.";
const SELECT_PROMPT: &str = "You select skills from the uploaded skills library for each question. Only name categories and skills that actually exist in the library.";

fn default_api_key_env() -> String {
    API_KEY_ENV.to_string()
}
fn default_timeout() -> u64 {
    120
}
fn default_retries() -> u32 {
    2
}
fn default_backoff() -> u64 {
    500
}
fn default_model_field() -> String {
    "model".into()
}
fn default_messages_field() -> String {
    "messages".into()
}
fn default_content_path() -> String {
    "choices.0.message.content".into()
}
fn default_auth_header() -> String {
    "Authorization".into()
}
fn default_auth_prefix() -> String {
    "Bearer ".into()
}

/// Endpoint settings and the request/response field mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the API key. No auth header is sent when
    /// it is unset.
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
    #[serde(default = "default_model_field")]
    pub model_field: String,
    #[serde(default = "default_messages_field")]
    pub messages_field: String,
    /// Dotted path to the reply text; numeric segments index arrays.
    #[serde(default = "default_content_path")]
    pub content_path: String,
    #[serde(default = "default_auth_header")]
    pub auth_header: String,
    #[serde(default = "default_auth_prefix")]
    pub auth_prefix: String,
    /// Extra top-level request fields, e.g. `temperature`.
    #[serde(default)]
    pub extra: IndexMap<String, Value>,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key_env: default_api_key_env(),
            timeout_secs: default_timeout(),
            max_retries: default_retries(),
            backoff_ms: default_backoff(),
            model_field: default_model_field(),
            messages_field: default_messages_field(),
            content_path: default_content_path(),
            auth_header: default_auth_header(),
            auth_prefix: default_auth_prefix(),
            extra: IndexMap::new(),
        }
    }
}

/// Follows a dotted path such as `choices.0.message.content`.
pub fn extract_path<'a>(value: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').filter(|s| !s.is_empty()).try_fold(value, |v, seg| match v {
        Value::Array(items) => seg.parse::<usize>().ok().and_then(|i| items.get(i)),
        Value::Object(map) => map.get(seg),
        _ => None,
    })
}

/// Declares itself nondeterministic: sampling happens server-side.
#[derive(Debug)]
pub struct RemoteBackend {
    config: RemoteConfig,
    client: reqwest::blocking::Client,
    format: LibraryFormat,
}

impl RemoteBackend {
    pub fn new(config: RemoteConfig) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        Ok(Self { config, client, format: LibraryFormat::default() })
    }

    pub fn with_format(mut self, format: LibraryFormat) -> Self {
        self.format = format;
        self
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn body(&self, system: &str, user: &str) -> Value {
        let mut body = serde_json::Map::new();
        body.insert(self.config.model_field.clone(), Value::String(self.config.model.clone()));
        body.insert(
            self.config.messages_field.clone(),
            json!([
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ]),
        );
        for (k, v) in &self.config.extra {
            body.insert(k.clone(), v.clone());
        }
        Value::Object(body)
    }

    fn send_once(&self, body: &Value) -> Result<String, (BackendError, bool)> {
        let mut req = self.client.post(&self.config.endpoint).json(body);
        if let Ok(key) = std::env::var(&self.config.api_key_env) {
            req = req.header(self.config.auth_header.as_str(), format!("{}{}", self.config.auth_prefix, key));
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() {
                (BackendError::Timeout, true)
            } else {
                (BackendError::Transport(e.to_string()), true)
            }
        })?;
        let status = resp.status();
        let text = resp.text().map_err(|e| (BackendError::Transport(e.to_string()), true))?;
        if !status.is_success() {
            let retry = status.as_u16() == 429 || status.is_server_error();
            return Err((BackendError::Status { status: status.as_u16(), body: text }, retry));
        }
        let value: Value =
            serde_json::from_str(&text).map_err(|e| (BackendError::BadResponse(format!("not JSON: {e}")), false))?;
        match extract_path(&value, &self.config.content_path) {
            Some(Value::String(s)) => Ok(s.clone()),
            _ => Err((BackendError::BadResponse(format!("no string at `{}`", self.config.content_path)), false)),
        }
    }

    /// One system + user exchange, retrying on 429, 5xx and transport
    /// failures with doubling backoff.
    pub fn chat(&self, system: &str, user: &str) -> Result<String, BackendError> {
        let body = self.body(system, user);
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut attempt = 0;
        loop {
            match self.send_once(&body) {
                Ok(s) => return Ok(s),
                Err((e, retry)) if !retry || attempt >= self.config.max_retries => return Err(e),
                Err(_) => {
                    std::thread::sleep(delay);
                    delay *= 2;
                    attempt += 1;
                }
            }
        }
    }
}

/// Maps a ranked id listing to scores 1, 1/2, 1/3, ... Unknown ids and
/// repeats are ignored.
pub(crate) fn scores_from_listing(reply: &str, summaries: &[FileSummary]) -> Vec<ScoredFile> {
    let mut out: Vec<ScoredFile> = Vec::new();
    for line in reply.lines() {
        let id = line.trim().trim_start_matches(|c: char| c.is_ascii_digit() || "-*.) ".contains(c)).trim_matches('`').trim();
        if id.is_empty() || out.iter().any(|s| s.file_id == id) {
            continue;
        }
        if summaries.iter().any(|s| s.file_id == id) {
            let rank = out.len() + 1;
            out.push(ScoredFile { file_id: id.to_string(), score: 1.0 / rank as f64 });
        }
    }
    out
}

impl RouterBackend for RemoteBackend {
    fn name(&self) -> &str {
        "remote"
    }

    fn deterministic(&self) -> bool {
        false
    }

    fn route(&self, query: &str, summaries: &[FileSummary]) -> Result<Vec<ScoredFile>, BackendError> {
        let mut user = String::new();
        for s in summaries {
            user.push_str(&format!("{}: {}\n", s.file_id, s.summary.to_compact_json()));
        }
        user.push_str(&format!("\nQuestion: {query}\n"));
        let reply = self.chat(ROUTE_PROMPT, &user)?;
        Ok(scores_from_listing(&reply, summaries))
    }

    fn select(&self, tasks: &[Task], loaded: &[KnowledgeLibrary]) -> Result<SelectionSet, BackendError> {
        let artifact = loaded.iter().map(|l| self.format.to_string(l)).collect::<Vec<_>>().join("\n");
        let conv = Conversation { system_prompt: SELECT_PROMPT.into(), artifact, tasks: tasks.to_vec() };
        let reply = self.respond(&conv)?;
        let max_id = tasks.iter().map(|t| t.id as usize).max().unwrap_or(0);
        Ok(parse_response(&reply, max_id).selections)
    }

    fn respond(&self, conversation: &Conversation) -> Result<String, BackendError> {
        self.chat(&conversation.system_prompt, &conversation.user_message())
    }
}
