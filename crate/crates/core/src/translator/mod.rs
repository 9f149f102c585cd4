//! Translators: anything that maps a question to SPARQL text.
//!
//! Besides the built-in baselines, translators run as subprocesses speaking
//! newline-delimited JSON, or as HTTP services. Requests and responses use
//! the same JSON objects on both transports:
//!
//! ```text
//! {"id":"q1","question":"What is the surname of Bob Tanner?","dataset":"organizational","epoch":5}
//! {"id":"q1","query":"SELECT ?surname WHERE { :bob foaf:surname ?surname . }"}
//! {"id":"q1","error":"no checkpoint for epoch 7"}
//! ```

mod builtin;
mod http;
mod protocol;
mod subprocess;

use std::fmt;
use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

use crate::dataset::Dataset;

pub use builtin::{tokens, Echo, GoldOracle, Retrieval, Transcript};
pub use http::HttpTranslator;
pub use protocol::{decode_response, TranslationRequest, TranslationResponse};
pub use subprocess::Subprocess;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranslatorError {
    #[error("translator did not answer within {0:?}")]
    Timeout(Duration),
    #[error("translator process exited: {0}")]
    ProcessExited(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("translator reported an error: {0}")]
    Reported(String),
    #[error("HTTP translator failed: {0}")]
    Http(String),
    #[error("could not start translator: {0}")]
    Start(String),
}

impl TranslatorError {
    /// Errors after which the exchange with a subprocess cannot continue.
    pub fn is_fatal(&self) -> bool {
        matches!(
            self,
            TranslatorError::Timeout(_)
                | TranslatorError::ProcessExited(_)
                | TranslatorError::ProtocolViolation(_)
        )
    }
}

/// A started translator. Requests are answered strictly one at a time.
pub trait Translate: Send {
    fn translate(&mut self, request: &TranslationRequest) -> Result<String, TranslatorError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinKind {
    GoldOracle,
    Null,
    Retrieval,
    Transcript(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transport {
    Builtin(BuiltinKind),
    Subprocess {
        command: String,
        args: Vec<String>,
        env: Vec<(String, String)>,
        timeout: Duration,
    },
    Http {
        url: String,
        timeout: Duration,
    },
}

/// A named translator and how to reach it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslatorHandle {
    pub name: String,
    pub transport: Transport,
}

impl TranslatorHandle {
    pub fn new(name: impl Into<String>, transport: Transport) -> Result<Self, TranslatorError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(TranslatorError::Start("translator name is empty".into()));
        }
        if let Transport::Subprocess { command, .. } = &transport {
            if command.trim().is_empty() {
                return Err(TranslatorError::Start("subprocess command is empty".into()));
            }
        }
        Ok(TranslatorHandle { name, transport })
    }

    /// Parses `[NAME=]SPEC` where SPEC is one of `gold-oracle`, `null`,
    /// `retrieval`, `transcript:PATH`, `cmd:PROGRAM [ARGS...]` or an
    /// `http(s)://` URL. Without a name the spec itself names the translator.
    pub fn parse_spec(spec: &str) -> Result<Self, TranslatorError> {
        let (name, body) = match spec.split_once('=') {
            Some((n, b)) if !n.contains(':') && !n.contains(' ') => (n.to_string(), b),
            _ => (String::new(), spec),
        };
        let transport = if body == "gold-oracle" {
            Transport::Builtin(BuiltinKind::GoldOracle)
        } else if body == "null" {
            Transport::Builtin(BuiltinKind::Null)
        } else if body == "retrieval" {
            Transport::Builtin(BuiltinKind::Retrieval)
        } else if let Some(path) = body.strip_prefix("transcript:") {
            Transport::Builtin(BuiltinKind::Transcript(PathBuf::from(path)))
        } else if let Some(cmd) = body.strip_prefix("cmd:") {
            let mut parts = cmd.split_whitespace().map(str::to_string);
            let command = parts.next().unwrap_or_default();
            Transport::Subprocess {
                command,
                args: parts.collect(),
                env: Vec::new(),
                timeout: DEFAULT_TIMEOUT,
            }
        } else if body.starts_with("http://") || body.starts_with("https://") {
            Transport::Http {
                url: body.to_string(),
                timeout: DEFAULT_TIMEOUT,
            }
        } else {
            return Err(TranslatorError::Start(format!(
                "unknown translator spec {spec:?}"
            )));
        };
        let name = if name.is_empty() {
            default_name(&transport)
        } else {
            name
        };
        TranslatorHandle::new(name, transport)
    }

    /// Starts the translator for `dataset`.
    pub fn start(&self, dataset: &Dataset) -> Result<Box<dyn Translate>, TranslatorError> {
        Ok(match &self.transport {
            Transport::Builtin(BuiltinKind::GoldOracle) => Box::new(GoldOracle::new(dataset)),
            Transport::Builtin(BuiltinKind::Null) => Box::new(Echo),
            Transport::Builtin(BuiltinKind::Retrieval) => Box::new(Retrieval::new(dataset)),
            Transport::Builtin(BuiltinKind::Transcript(path)) => Box::new(Transcript::load(path)?),
            Transport::Subprocess {
                command,
                args,
                env,
                timeout,
            } => Box::new(Subprocess::spawn(command, args, env, *timeout)?),
            Transport::Http { url, timeout } => Box::new(HttpTranslator::new(url, *timeout)),
        })
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self.transport, Transport::Builtin(_))
    }
}

fn default_name(transport: &Transport) -> String {
    match transport {
        Transport::Builtin(BuiltinKind::GoldOracle) => "gold-oracle".into(),
        Transport::Builtin(BuiltinKind::Null) => "null".into(),
        Transport::Builtin(BuiltinKind::Retrieval) => "retrieval".into(),
        Transport::Builtin(BuiltinKind::Transcript(p)) => p
            .file_stem()
            .map_or_else(|| "transcript".into(), |s| s.to_string_lossy().into_owned()),
        Transport::Subprocess { command, .. } => command.clone(),
        Transport::Http { url, .. } => url.clone(),
    }
}

impl fmt::Display for TranslatorHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
