use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use textsparql_core::{RemoteEndpoint, RunId, TranslatorHandle, Transport};

/// Effective configuration of `textsparql run`. A frozen copy is written
/// next to the run outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: PathBuf,
    /// `local` (the manifest's graph files) or a SPARQL endpoint URL.
    /// Absent means whatever the manifest declares.
    #[serde(default)]
    pub backend: Option<String>,
    #[serde(default)]
    pub translators: Vec<String>,
    #[serde(default = "default_epochs")]
    pub epochs: Vec<u32>,
    #[serde(default = "default_runs")]
    pub runs: Vec<String>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default = "default_true")]
    pub strict_projection: bool,
    #[serde(default)]
    pub expand_paraphrases: Option<bool>,
    #[serde(default)]
    pub translator_timeout_secs: Option<u64>,
    #[serde(default)]
    pub endpoint: EndpointConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    pub timeout_secs: u64,
    pub retries: u32,
    pub max_connections: usize,
    pub headers: Vec<(String, String)>,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            timeout_secs: 30,
            retries: 3,
            max_connections: 4,
            headers: Vec::new(),
        }
    }
}

impl EndpointConfig {
    pub fn endpoint(&self, url: &str) -> RemoteEndpoint {
        let mut e = RemoteEndpoint::new(url);
        e.timeout = Duration::from_secs(self.timeout_secs);
        e.retries = self.retries;
        e.max_connections = self.max_connections.max(1);
        e.headers = self.headers.clone();
        e
    }
}

fn default_epochs() -> Vec<u32> {
    (1..=20).map(|i| i * 5).collect()
}

fn default_runs() -> Vec<String> {
    RunId::default_runs(10)
        .iter()
        .map(|r| r.to_string())
        .collect()
}

fn default_out() -> PathBuf {
    PathBuf::from("textsparql-out")
}

fn default_jobs() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// Flag values that override the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub dataset: Option<PathBuf>,
    pub backend: Option<String>,
    pub translators: Vec<String>,
    pub runs: Option<String>,
    pub epochs: Option<String>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn with_dataset(dataset: PathBuf) -> Self {
        RunConfig {
            dataset,
            backend: None,
            translators: Vec::new(),
            epochs: default_epochs(),
            runs: default_runs(),
            out: default_out(),
            jobs: default_jobs(),
            strict_projection: true,
            expand_paraphrases: None,
            translator_timeout_secs: None,
            endpoint: EndpointConfig::default(),
        }
    }

    /// Reads a configuration file. Relative dataset and output paths are
    /// taken relative to the file's directory.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if config.dataset.is_relative() {
            config.dataset = base.join(&config.dataset);
        }
        if config.out.is_relative() {
            config.out = base.join(&config.out);
        }
        Ok(config)
    }

    /// Builds the effective configuration from an optional file and flags.
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> anyhow::Result<Self> {
        let mut config = match (file, &flags.dataset) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(dataset)) => RunConfig::with_dataset(dataset.clone()),
            (None, None) => bail!("either --config or --dataset is required"),
        };
        if let Some(d) = flags.dataset {
            config.dataset = d;
        }
        if flags.backend.is_some() {
            config.backend = flags.backend;
        }
        if !flags.translators.is_empty() {
            config.translators = flags.translators;
        }
        if let Some(r) = flags.runs {
            config.runs = parse_runs(&r)?.iter().map(|r| r.to_string()).collect();
        }
        if let Some(e) = flags.epochs {
            config.epochs = parse_epochs(&e)?;
        }
        if let Some(o) = flags.out {
            config.out = o;
        }
        if let Some(j) = flags.jobs {
            config.jobs = j;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.translators.is_empty() {
            bail!("no translator given");
        }
        if self.epochs.is_empty()
            || self.epochs[0] == 0
            || self.epochs.windows(2).any(|w| w[0] >= w[1])
        {
            bail!(
                "epoch schedule must be strictly increasing positive integers, got {:?}",
                self.epochs
            );
        }
        if self.runs.is_empty() {
            bail!("at least one run id is required");
        }
        self.run_ids()?;
        if self.jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        self.translator_handles()?;
        Ok(())
    }

    pub fn run_ids(&self) -> anyhow::Result<Vec<RunId>> {
        let ids = self
            .runs
            .iter()
            .map(|r| RunId::new(r))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sorted: Vec<&str> = ids.iter().map(|r| r.as_str()).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            bail!("duplicate run id in {:?}", self.runs);
        }
        Ok(ids)
    }

    pub fn translator_handles(&self) -> anyhow::Result<Vec<TranslatorHandle>> {
        let mut handles = Vec::new();
        for spec in &self.translators {
            let mut h = TranslatorHandle::parse_spec(spec)?;
            if let Some(secs) = self.translator_timeout_secs {
                let t = Duration::from_secs(secs);
                match &mut h.transport {
                    Transport::Subprocess { timeout, .. } | Transport::Http { timeout, .. } => {
                        *timeout = t
                    }
                    Transport::Builtin(_) => {}
                }
            }
            if handles.iter().any(|o: &TranslatorHandle| o.name == h.name) {
                bail!("translator name {:?} used twice", h.name);
            }
            handles.push(h);
        }
        Ok(handles)
    }
}

/// `N` means R01..RN; otherwise a comma-separated list of run ids.
pub fn parse_runs(text: &str) -> anyhow::Result<Vec<RunId>> {
    let text = text.trim();
    if let Ok(n) = text.parse::<u32>() {
        if n == 0 {
            bail!("run count must be positive");
        }
        return Ok(RunId::default_runs(n));
    }
    text.split(',')
        .map(|s| RunId::new(s.trim()).map_err(Into::into))
        .collect()
}

/// A comma-separated list (`5,10,20`) or a range `FIRST..LAST[:STEP]`
/// with both ends included.
pub fn parse_epochs(text: &str) -> anyhow::Result<Vec<u32>> {
    let text = text.trim();
    if let Some((first, rest)) = text.split_once("..") {
        let (last, step) = match rest.split_once(':') {
            Some((l, s)) => (l, s.trim().parse::<u32>().context("epoch step")?),
            None => (rest, 1),
        };
        let first: u32 = first.trim().parse().context("first epoch")?;
        let last: u32 = last.trim().parse().context("last epoch")?;
        if step == 0 || first > last {
            bail!("empty epoch range {text:?}");
        }
        return Ok((first..=last).step_by(step as usize).collect());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .with_context(|| format!("epoch {s:?}"))
        })
        .collect()
}
