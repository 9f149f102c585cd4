//! Benchmark datasets: manifests, splits, run seeds and seeded shuffles.

mod qald;
mod seed;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rdf::{load_graph, Graph, GraphLoadError, PrefixMap};
use crate::sparql::{parse_query_with, ParseOptions, QueryError};

pub use qald::{import_qald, QaldImportError};
pub use seed::{derive_seed, shuffle, RunId, SeedError, SplitMix64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// How gold and generated queries obtain their prefix declarations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryMode {
    /// Queries omit PREFIX lines; the dataset's preamble supplies them.
    AmbientPrefixes,
    /// Queries declare everything they use.
    SelfContained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub id: String,
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paraphrase: Option<String>,
    #[serde(rename = "query")]
    pub gold_query: String,
    pub split: Split,
    /// The gold query uses SPARQL outside the supported subset.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unsupported: bool,
}

/// Where a dataset's queries run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendSpec {
    /// Turtle files or directories, relative to the manifest.
    Turtle(Vec<PathBuf>),
    /// A SPARQL protocol endpoint URL.
    Endpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub test: usize,
}

/// On-disk dataset manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub query_mode: QueryMode,
    #[serde(default)]
    pub prefix_preamble: PrefixMap,
    pub backend: BackendSpec,
    pub counts: SplitCounts,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub expand_paraphrases: bool,
    pub records: Vec<DatasetRecord>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: invalid manifest: {source}")]
    Schema {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("record {0:?} has an empty question")]
    EmptyQuestion(String),
    #[error("{split:?} split has {actual} records but the manifest declares {declared}")]
    CountMismatch {
        split: Split,
        declared: usize,
        actual: usize,
    },
    #[error("query_mode {mode:?} is inconsistent with a {} prefix preamble", if *.preamble_empty { "empty" } else { "non-empty" })]
    ModeMismatch {
        mode: QueryMode,
        preamble_empty: bool,
    },
    #[error("gold query of record {id:?} does not parse: {error}")]
    GoldQuery { id: String, error: QueryError },
    #[error("loading graph: {0}")]
    Graph(#[from] GraphLoadError),
}

/// One question presented to a translator.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalItem<'a> {
    /// Question id; paraphrase items carry a `#p` suffix.
    pub item_id: String,
    pub question: &'a str,
    pub record: &'a DatasetRecord,
}

/// A loaded, validated dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub query_mode: QueryMode,
    pub prefix_preamble: PrefixMap,
    /// Backend with Turtle paths resolved against the manifest directory.
    pub backend: BackendSpec,
    pub expand_paraphrases: bool,
    pub records: Vec<DatasetRecord>,
    /// Lowercase hex SHA-256 of the manifest bytes.
    pub hash: String,
}

impl Dataset {
    /// Loads and validates a manifest file.
    pub fn load(path: &Path) -> Result<Dataset, DatasetError> {
        let (ds, mut failures) = Dataset::load_collecting(path)?;
        match failures.is_empty() {
            true => Ok(ds),
            false => {
                let (id, error) = failures.swap_remove(0);
                Err(DatasetError::GoldQuery { id, error })
            }
        }
    }

    /// Like [`Dataset::load`], but a gold query that does not parse is not
    /// fatal: the record is returned in the failure list and marked
    /// unsupported in the dataset.
    pub fn load_collecting(
        path: &Path,
    ) -> Result<(Dataset, Vec<(String, QueryError)>), DatasetError> {
        let bytes = fs::read(path).map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut manifest: Manifest =
            serde_json::from_slice(&bytes).map_err(|source| DatasetError::Schema {
                path: path.to_path_buf(),
                source,
            })?;
        let mut failures = Vec::new();
        for r in manifest.records.iter_mut().filter(|r| !r.unsupported) {
            let parsed = parse_query_with(
                &r.gold_query,
                Some(&manifest.prefix_preamble),
                ParseOptions::default(),
            );
            if let Err(error) = parsed {
                failures.push((r.id.clone(), error));
                r.unsupported = true;
            }
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let mut ds = Dataset::from_manifest(manifest, &bytes)?;
        if let BackendSpec::Turtle(paths) = &mut ds.backend {
            for p in paths.iter_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok((ds, failures))
    }

    /// Validates an in-memory manifest. `source` is hashed as the manifest bytes.
    pub fn from_manifest(manifest: Manifest, source: &[u8]) -> Result<Dataset, DatasetError> {
        let preamble_empty = manifest.prefix_preamble.is_empty();
        if (manifest.query_mode == QueryMode::SelfContained) != preamble_empty {
            return Err(DatasetError::ModeMismatch {
                mode: manifest.query_mode,
                preamble_empty,
            });
        }
        let mut seen = HashSet::new();
        for r in &manifest.records {
            if !seen.insert(r.id.as_str()) {
                return Err(DatasetError::DuplicateId(r.id.clone()));
            }
            if r.question.trim().is_empty() {
                return Err(DatasetError::EmptyQuestion(r.id.clone()));
            }
        }
        for (split, declared) in [
            (Split::Train, manifest.counts.train),
            (Split::Test, manifest.counts.test),
        ] {
            let actual = manifest.records.iter().filter(|r| r.split == split).count();
            if actual != declared {
                return Err(DatasetError::CountMismatch {
                    split,
                    declared,
                    actual,
                });
            }
        }
        let ds = Dataset {
            name: manifest.name,
            query_mode: manifest.query_mode,
            prefix_preamble: manifest.prefix_preamble,
            backend: manifest.backend,
            expand_paraphrases: manifest.expand_paraphrases,
            records: manifest.records,
            hash: hex::encode(Sha256::digest(source)),
        };
        for r in ds.records.iter().filter(|r| !r.unsupported) {
            ds.parse_gold(r).map_err(|error| DatasetError::GoldQuery {
                id: r.id.clone(),
                error,
            })?;
        }
        Ok(ds)
    }

    /// Parses a record's gold query with the dataset's ambient prefixes.
    pub fn parse_gold(&self, record: &DatasetRecord) -> Result<crate::sparql::Query, QueryError> {
        parse_query_with(
            &record.gold_query,
            Some(&self.prefix_preamble),
            ParseOptions::default(),
        )
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &DatasetRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn count(&self, split: Split) -> usize {
        self.split(split).count()
    }

    pub fn unsupported_count(&self) -> usize {
        self.records.iter().filter(|r| r.unsupported).count()
    }

    pub fn record(&self, id: &str) -> Option<&DatasetRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    /// Test questions in id order. With `expand_paraphrases`, each
    /// paraphrase is a separate item.
    pub fn test_items(&self) -> Vec<EvalItem<'_>> {
        let mut records: Vec<&DatasetRecord> = self.split(Split::Test).collect();
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let mut items = Vec::with_capacity(records.len());
        for r in records {
            items.push(EvalItem {
                item_id: r.id.clone(),
                question: &r.question,
                record: r,
            });
            if self.expand_paraphrases {
                if let Some(p) = &r.paraphrase {
                    items.push(EvalItem {
                        item_id: format!("{}#p", r.id),
                        question: p,
                        record: r,
                    });
                }
            }
        }
        items
    }

    /// Loads the local graph when the backend is Turtle.
    pub fn load_graph(&self) -> Result<Option<Graph>, DatasetError> {
        match &self.backend {
            BackendSpec::Turtle(paths) => Ok(Some(load_graph(paths)?)),
            BackendSpec::Endpoint(_) => Ok(None),
        }
    }
}

/// Loads and validates a manifest file.
pub fn load_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    Dataset::load(path)
}

/// The train split ordered by id, then shuffled with `seed`.
pub fn shuffle_train(dataset: &Dataset, seed: u64) -> Vec<&DatasetRecord> {
    let mut train: Vec<&DatasetRecord> = dataset.split(Split::Train).collect();
    train.sort_by(|a, b| a.id.cmp(&b.id));
    shuffle(&mut train, seed);
    train
}
