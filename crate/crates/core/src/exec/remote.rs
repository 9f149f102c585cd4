use std::time::Duration;

use super::results_json::parse_results_json;
use super::table::SolutionTable;
use super::ExecError;

/// A SPARQL 1.1 protocol endpoint.
#[derive(Debug, Clone)]
pub struct RemoteEndpoint {
    pub url: String,
    pub timeout: Duration,
    /// Extra attempts after a transport failure or timeout.
    pub retries: u32,
    pub headers: Vec<(String, String)>,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff_base: Duration,
    /// Upper bound on concurrent requests to this endpoint.
    pub max_connections: usize,
}

impl RemoteEndpoint {
    pub fn new(url: impl Into<String>) -> Self {
        RemoteEndpoint {
            url: url.into(),
            timeout: Duration::from_secs(30),
            retries: 3,
            headers: Vec::new(),
            backoff_base: Duration::from_secs(1),
            max_connections: 4,
        }
    }

    /// Sends `query` verbatim and parses the JSON results.
    pub fn execute(&self, query: &str) -> Result<SolutionTable, ExecError> {
        let agent = ureq::AgentBuilder::new().timeout(self.timeout).build();
        let mut attempt = 0;
        loop {
            match self.attempt(&agent, query) {
                Err(e @ (ExecError::Transport(_) | ExecError::Timeout))
                    if attempt < self.retries =>
                {
                    let delay = self.backoff_base.saturating_mul(1 << attempt.min(16));
                    log::warn!("endpoint {}: {e}; retrying in {delay:?}", self.url);
                    std::thread::sleep(delay);
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    fn attempt(&self, agent: &ureq::Agent, query: &str) -> Result<SolutionTable, ExecError> {
        let mut req = agent
            .post(&self.url)
            .set("Accept", "application/sparql-results+json");
        for (k, v) in &self.headers {
            req = req.set(k, v);
        }
        let response = match req.send_form(&[("query", query)]) {
            Ok(r) => r,
            Err(ureq::Error::Status(code, _)) => return Err(ExecError::HttpStatus(code)),
            Err(ureq::Error::Transport(t)) => return Err(classify_transport(&t)),
        };
        let mut body = Vec::new();
        std::io::Read::read_to_end(&mut response.into_reader(), &mut body).map_err(|e| {
            if e.kind() == std::io::ErrorKind::TimedOut
                || e.kind() == std::io::ErrorKind::WouldBlock
            {
                ExecError::Timeout
            } else {
                ExecError::Transport(e.to_string())
            }
        })?;
        parse_results_json(&body)
    }
}

fn classify_transport(t: &ureq::Transport) -> ExecError {
    let text = t.to_string();
    let timed_out = std::error::Error::source(t)
        .and_then(|s| s.downcast_ref::<std::io::Error>())
        .is_some_and(|io| {
            matches!(
                io.kind(),
                std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
            )
        })
        || text.contains("timed out");
    if timed_out {
        ExecError::Timeout
    } else {
        ExecError::Transport(text)
    }
}
