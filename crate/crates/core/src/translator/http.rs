use std::time::Duration;

use super::protocol::decode_response;
use super::{Translate, TranslationRequest, TranslatorError};

/// A translator service answering `POST {url}/translate`.
pub struct HttpTranslator {
    agent: ureq::Agent,
    endpoint: String,
}

impl HttpTranslator {
    pub fn new(url: &str, timeout: Duration) -> Self {
        HttpTranslator {
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
            endpoint: format!("{}/translate", url.trim_end_matches('/')),
        }
    }
}

impl Translate for HttpTranslator {
    fn translate(&mut self, request: &TranslationRequest) -> Result<String, TranslatorError> {
        let body = serde_json::to_string(request).expect("request serializes");
        let response = self
            .agent
            .post(&self.endpoint)
            .set("Content-Type", "application/json")
            .send_string(&body);
        let text = match response {
            Ok(r) => r.into_string(),
            // error bodies may still carry a protocol {id, error} object
            Err(ureq::Error::Status(code, r)) => {
                let text = r.into_string().unwrap_or_default();
                return match decode_response(&text, request) {
                    Err(TranslatorError::Reported(e)) => Err(TranslatorError::Reported(e)),
                    _ => Err(TranslatorError::Http(format!("HTTP {code}"))),
                };
            }
            Err(ureq::Error::Transport(t)) => return Err(TranslatorError::Http(t.to_string())),
        }
        .map_err(|e| TranslatorError::Http(e.to_string()))?;
        decode_response(&text, request)
    }
}
