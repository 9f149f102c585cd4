use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::dataset::{Dataset, DatasetRecord, Split};

use super::{Translate, TranslationRequest, TranslatorError};

/// Strips the paraphrase item suffix so lookups reach the record.
fn record_id(item_id: &str) -> &str {
    item_id.strip_suffix("#p").unwrap_or(item_id)
}

/// Answers every question with its record's gold query.
pub struct GoldOracle {
    gold: HashMap<String, String>,
}

impl GoldOracle {
    pub fn new(dataset: &Dataset) -> Self {
        GoldOracle {
            gold: dataset
                .records
                .iter()
                .map(|r| (r.id.clone(), r.gold_query.clone()))
                .collect(),
        }
    }
}

impl Translate for GoldOracle {
    fn translate(&mut self, request: &TranslationRequest) -> Result<String, TranslatorError> {
        self.gold
            .get(record_id(&request.id))
            .cloned()
            .ok_or_else(|| TranslatorError::Reported(format!("no record with id {:?}", request.id)))
    }
}

/// Echoes the question back.
pub struct Echo;

impl Translate for Echo {
    fn translate(&mut self, request: &TranslationRequest) -> Result<String, TranslatorError> {
        Ok(request.question.clone())
    }
}

pub fn tokens(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Jaccard similarity as an exact fraction (numerator, denominator).
fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> (usize, usize) {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        (0, 1)
    } else {
        (inter, union)
    }
}

/// Record id, question tokens and gold query.
type TrainEntry = (String, BTreeSet<String>, String);

/// Nearest training question by token Jaccard similarity.
pub struct Retrieval {
    train: Vec<TrainEntry>,
}

impl Retrieval {
    pub fn new(dataset: &Dataset) -> Self {
        Retrieval::from_records(dataset.split(Split::Train))
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a DatasetRecord>) -> Self {
        let mut train: Vec<_> = records
            .into_iter()
            .map(|r| (r.id.clone(), tokens(&r.question), r.gold_query.clone()))
            .collect();
        train.sort_by(|a, b| a.0.cmp(&b.0));
        Retrieval { train }
    }

    /// The gold query of the most similar training record; ties go to the smallest id.
    pub fn nearest(&self, question: &str) -> Option<&str> {
        let q = tokens(question);
        let mut best: Option<(&TrainEntry, (usize, usize))> = None;
        for entry in &self.train {
            let score = jaccard(&q, &entry.1);
            let better = match best {
                None => true,
                Some((_, (bn, bd))) => score.0 * bd > bn * score.1,
            };
            if better {
                best = Some((entry, score));
            }
        }
        best.map(|(e, _)| e.2.as_str())
    }
}

impl Translate for Retrieval {
    fn translate(&mut self, request: &TranslationRequest) -> Result<String, TranslatorError> {
        self.nearest(&request.question)
            .map(str::to_string)
            .ok_or_else(|| TranslatorError::Reported("empty training split".into()))
    }
}

#[derive(Deserialize)]
struct TranscriptLine {
    id: String,
    #[serde(default)]
    epoch: Option<u32>,
    #[serde(default)]
    query: Option<String>,
    #[serde(default)]
    error: Option<String>,
}

/// Replays recorded translator output keyed by question id and epoch.
pub struct Transcript {
    entries: HashMap<(String, Option<u32>), Result<String, String>>,
}

impl Transcript {
    pub fn load(path: &Path) -> Result<Self, TranslatorError> {
        let text = fs::read_to_string(path)
            .map_err(|e| TranslatorError::Start(format!("reading {}: {e}", path.display())))?;
        Transcript::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, TranslatorError> {
        let mut entries = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let l: TranscriptLine = serde_json::from_str(line)
                .map_err(|e| TranslatorError::Start(format!("transcript line {}: {e}", n + 1)))?;
            let value = match (l.query, l.error) {
                (Some(q), None) => Ok(q),
                (None, Some(e)) => Err(e),
                _ => {
                    return Err(TranslatorError::Start(format!(
                        "transcript line {}: expected exactly one of query and error",
                        n + 1
                    )))
                }
            };
            entries.insert((l.id, l.epoch), value);
        }
        Ok(Transcript { entries })
    }
}

impl Translate for Transcript {
    fn translate(&mut self, request: &TranslationRequest) -> Result<String, TranslatorError> {
        let hit = self
            .entries
            .get(&(request.id.clone(), request.epoch))
            .or_else(|| self.entries.get(&(request.id.clone(), None)));
        match hit {
            Some(Ok(q)) => Ok(q.trim().to_string()),
            Some(Err(e)) => Err(TranslatorError::Reported(e.clone())),
            None => Err(TranslatorError::Reported(format!(
                "transcript has no entry for {:?} at epoch {:?}",
                request.id, request.epoch
            ))),
        }
    }
}
