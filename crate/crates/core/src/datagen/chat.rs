use std::collections::VecDeque;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::DatagenError;

static NETWORK_REQUESTS: AtomicUsize = AtomicUsize::new(0);

/// Number of chat requests sent over the network by this process.
pub fn network_requests() -> usize {
    NETWORK_REQUESTS.load(Ordering::SeqCst)
}

/// Settings for the chat-completion service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChatClientConfig {
    /// Full URL of the chat-completions route.
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the API key.
    pub api_key_env: String,
    pub temperature: f64,
    /// Extra attempts when a reply cannot be used.
    pub max_retries: u32,
    /// Replay responses from this transcript instead of the network.
    pub replay: Option<PathBuf>,
    /// Append every exchange to this transcript.
    pub record: Option<PathBuf>,
    /// Largest graph, in triples, that may be embedded in a prompt.
    pub triple_cap: usize,
    pub timeout_secs: u64,
}

impl Default for ChatClientConfig {
    fn default() -> Self {
        ChatClientConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            temperature: 0.7,
            max_retries: 2,
            replay: None,
            record: None,
            triple_cap: 2000,
            timeout_secs: 300,
        }
    }
}

/// A single-turn chat completion service.
pub trait ChatTransport {
    fn complete(&mut self, prompt: &str) -> Result<String, DatagenError>;
}

/// Chat-completions over HTTP.
pub struct HttpChat {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    temperature: f64,
    api_key: Option<String>,
}

impl HttpChat {
    pub fn new(config: &ChatClientConfig) -> Self {
        HttpChat {
            agent: ureq::AgentBuilder::new()
                .timeout(Duration::from_secs(config.timeout_secs))
                .build(),
            endpoint: config.endpoint.clone(),
            model: config.model.clone(),
            temperature: config.temperature,
            api_key: std::env::var(&config.api_key_env).ok(),
        }
    }
}

impl ChatTransport for HttpChat {
    fn complete(&mut self, prompt: &str) -> Result<String, DatagenError> {
        NETWORK_REQUESTS.fetch_add(1, Ordering::SeqCst);
        let body = json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        });
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let sent = req
            .set("Content-Type", "application/json")
            .send_string(&body.to_string());
        let reply: serde_json::Value = match sent {
            Ok(r) => {
                let text = r
                    .into_string()
                    .map_err(|e| DatagenError::Transport(e.to_string()))?;
                serde_json::from_str(&text)
                    .map_err(|e| DatagenError::Transport(format!("reply is not JSON: {e}")))?
            }
            Err(ureq::Error::Status(code, _)) => {
                return Err(DatagenError::Transport(format!("HTTP {code}")))
            }
            Err(e) => return Err(DatagenError::Transport(e.to_string())),
        };
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| {
                DatagenError::Transport("reply has no choices[0].message.content".into())
            })
    }
}

#[derive(Serialize, Deserialize)]
struct TranscriptEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    request: Option<String>,
    response: String,
}

/// Serves recorded responses in order; never touches the network.
pub struct ReplayChat {
    responses: VecDeque<String>,
}

impl ReplayChat {
    pub fn load(path: &Path) -> Result<Self, DatagenError> {
        let text = fs::read_to_string(path)
            .map_err(|e| DatagenError::Replay(format!("reading {}: {e}", path.display())))?;
        ReplayChat::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, DatagenError> {
        let mut responses = VecDeque::new();
        for (n, line) in text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let e: TranscriptEntry = serde_json::from_str(line)
                .map_err(|e| DatagenError::Replay(format!("transcript line {}: {e}", n + 1)))?;
            responses.push_back(e.response);
        }
        Ok(ReplayChat { responses })
    }

    pub fn from_responses<I: IntoIterator<Item = S>, S: Into<String>>(responses: I) -> Self {
        ReplayChat {
            responses: responses.into_iter().map(Into::into).collect(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.responses.len()
    }
}

impl ChatTransport for ReplayChat {
    fn complete(&mut self, _prompt: &str) -> Result<String, DatagenError> {
        self.responses
            .pop_front()
            .ok_or_else(|| DatagenError::Replay("transcript exhausted".into()))
    }
}

/// Appends each exchange of the wrapped transport to a transcript file.
pub struct RecordingChat<T> {
    inner: T,
    file: File,
}

impl<T: ChatTransport> RecordingChat<T> {
    pub fn new(inner: T, path: &Path) -> Result<Self, DatagenError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| DatagenError::Replay(format!("opening {}: {e}", path.display())))?;
        Ok(RecordingChat { inner, file })
    }
}

impl<T: ChatTransport> ChatTransport for RecordingChat<T> {
    fn complete(&mut self, prompt: &str) -> Result<String, DatagenError> {
        let response = self.inner.complete(prompt)?;
        let entry = TranscriptEntry {
            request: Some(prompt.to_string()),
            response: response.clone(),
        };
        let line = serde_json::to_string(&entry).expect("entry serializes");
        writeln!(self.file, "{line}")
            .map_err(|e| DatagenError::Replay(format!("recording: {e}")))?;
        Ok(response)
    }
}

/// The transport selected by `config`: replay when a transcript is set.
pub fn open_chat(config: &ChatClientConfig) -> Result<Box<dyn ChatTransport>, DatagenError> {
    if let Some(path) = &config.replay {
        return Ok(Box::new(ReplayChat::load(path)?));
    }
    let http = HttpChat::new(config);
    Ok(match &config.record {
        Some(path) => Box::new(RecordingChat::new(http, path)?),
        None => Box::new(http),
    })
}
