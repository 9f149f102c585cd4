use serde::{Deserialize, Serialize};

use super::TranslatorError;

/// One translation request, serialized as a single JSON line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRequest {
    pub id: String,
    pub question: String,
    pub dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epoch: Option<u32>,
}

/// Wire form of a response: exactly one of `query` and `error` is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationResponse {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TranslationResponse {
    pub fn ok(id: impl Into<String>, query: impl Into<String>) -> Self {
        TranslationResponse {
            id: id.into(),
            query: Some(query.into()),
            error: None,
        }
    }

    pub fn err(id: impl Into<String>, error: impl Into<String>) -> Self {
        TranslationResponse {
            id: id.into(),
            query: None,
            error: Some(error.into()),
        }
    }
}

/// Decodes one response line for `request`, checking the id echo.
pub fn decode_response(
    line: &str,
    request: &TranslationRequest,
) -> Result<String, TranslatorError> {
    let response: TranslationResponse = serde_json::from_str(line.trim())
        .map_err(|e| TranslatorError::ProtocolViolation(format!("invalid response line: {e}")))?;
    if response.id != request.id {
        return Err(TranslatorError::ProtocolViolation(format!(
            "response id {:?} does not match request id {:?}",
            response.id, request.id
        )));
    }
    match (response.query, response.error) {
        (Some(q), None) => Ok(q.trim().to_string()),
        (None, Some(e)) => Err(TranslatorError::Reported(e)),
        _ => Err(TranslatorError::ProtocolViolation(
            "response must carry exactly one of query and error".into(),
        )),
    }
}
