use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{shuffle_train, Dataset, RunId};
use crate::translator::{BuiltinKind, Translate, TranslationRequest, TranslatorHandle, Transport};

use super::{CheckpointEval, EvalContext, EvalError, EvalOutcome, OutcomeKind, RunRecord};

/// One line of a run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub run: String,
    pub epoch: u32,
    pub question_id: String,
    pub outcome: OutcomeKind,
    pub detail: String,
    pub generated_query: Option<String>,
    pub translator: String,
    pub dataset: String,
}

/// Translates every test question at one epoch and classifies the answers.
/// Outcomes are appended to `log` in question order before returning.
pub fn evaluate_checkpoint(
    ctx: &EvalContext,
    translator: &mut dyn Translate,
    translator_name: &str,
    run_id: &str,
    epoch: u32,
    log: &mut dyn Write,
) -> Result<CheckpointEval, EvalError> {
    let items = ctx.dataset.test_items();
    if items.is_empty() {
        return Err(EvalError::EmptyTestSplit);
    }
    let answers: Vec<_> = items
        .iter()
        .map(|item| {
            let request = TranslationRequest {
                id: item.item_id.clone(),
                question: item.question.to_string(),
                dataset: ctx.dataset.name.clone(),
                epoch: Some(epoch),
            };
            (item.record, translator.translate(&request))
        })
        .collect();
    let outcomes = ctx.classify_all(&answers);

    let mut map = BTreeMap::new();
    for ((item, (_, answer)), outcome) in items.iter().zip(&answers).zip(outcomes) {
        let entry = LogEntry {
            run: run_id.to_string(),
            epoch,
            question_id: item.item_id.clone(),
            outcome: outcome.kind,
            detail: outcome.detail.clone(),
            generated_query: answer.as_ref().ok().cloned(),
            translator: translator_name.to_string(),
            dataset: ctx.dataset.name.clone(),
        };
        let mut line = serde_json::to_string(&entry).expect("log entry serializes");
        line.push('\n');
        log.write_all(line.as_bytes())
            .map_err(|source| EvalError::Io {
                path: "run log".into(),
                source,
            })?;
        map.insert(item.item_id.clone(), outcome);
    }
    let correct_count = map
        .values()
        .filter(|o: &&EvalOutcome| o.is_correct())
        .count();
    Ok(CheckpointEval {
        run_id: run_id.to_string(),
        translator: translator_name.to_string(),
        dataset: ctx.dataset.name.clone(),
        epoch,
        outcomes: map,
        correct_count,
    })
}

/// What to run: every translator, for every run, at every epoch.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub translators: Vec<TranslatorHandle>,
    pub runs: Vec<RunId>,
    pub epochs: Vec<u32>,
}

/// All runs of one translator on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslatorRuns {
    pub translator: String,
    pub dataset: String,
    pub runs: Vec<RunRecord>,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub results: Vec<TranslatorRuns>,
    pub log_files: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EvalError + '_ {
    move |source| EvalError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// File-name-safe form of a translator name.
pub fn slug(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Train ids in the shuffled order for `run`, one per line.
pub fn shuffle_listing(dataset: &Dataset, run: &RunId) -> String {
    shuffle_train(dataset, run.seed())
        .iter()
        .map(|r| format!("{}\n", r.id))
        .collect()
}

/// Replaces `{run}` in transport arguments so one spec can address
/// per-run checkpoints or transcripts.
fn for_run(handle: &TranslatorHandle, run: &RunId) -> TranslatorHandle {
    let sub = |s: &str| s.replace("{run}", run.as_str());
    let transport = match &handle.transport {
        Transport::Builtin(BuiltinKind::Transcript(p)) => Transport::Builtin(
            BuiltinKind::Transcript(PathBuf::from(sub(&p.to_string_lossy()))),
        ),
        Transport::Subprocess {
            command,
            args,
            env,
            timeout,
        } => Transport::Subprocess {
            command: sub(command),
            args: args.iter().map(|a| sub(a)).collect(),
            env: env.iter().map(|(k, v)| (k.clone(), sub(v))).collect(),
            timeout: *timeout,
        },
        Transport::Http { url, timeout } => Transport::Http {
            url: sub(url),
            timeout: *timeout,
        },
        other => other.clone(),
    };
    TranslatorHandle {
        name: handle.name.clone(),
        transport,
    }
}

/// Executes a plan, writing `shuffles/<run>.txt` and
/// `logs/<translator>/<run>.ndjson` under `out_dir`.
pub fn run_plan(
    ctx: &EvalContext,
    plan: &RunPlan,
    out_dir: &Path,
) -> Result<RunArtifacts, EvalError> {
    let shuffles = out_dir.join("shuffles");
    fs::create_dir_all(&shuffles).map_err(io_err(&shuffles))?;
    for run in &plan.runs {
        let path = shuffles.join(format!("{run}.txt"));
        fs::write(&path, shuffle_listing(&ctx.dataset, run)).map_err(io_err(&path))?;
    }
    let mut results = Vec::new();
    let mut log_files = Vec::new();
    for handle in &plan.translators {
        let dir = out_dir.join("logs").join(slug(&handle.name));
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let mut runs = Vec::new();
        for run in &plan.runs {
            let path = dir.join(format!("{run}.ndjson"));
            let file = File::create(&path).map_err(io_err(&path))?;
            let mut log = BufWriter::new(file);
            let mut translator = for_run(handle, run).start(&ctx.dataset).map_err(|source| {
                EvalError::Translator {
                    name: handle.name.clone(),
                    source,
                }
            })?;
            let mut checkpoints = Vec::new();
            for &epoch in &plan.epochs {
                let cp = evaluate_checkpoint(
                    ctx,
                    translator.as_mut(),
                    &handle.name,
                    run.as_str(),
                    epoch,
                    &mut log,
                )?;
                log::info!(
                    "{} {} epoch {}: {} correct",
                    handle.name,
                    run,
                    epoch,
                    cp.correct_count
                );
                checkpoints.push(cp);
            }
            log.flush().map_err(io_err(&path))?;
            runs.push(RunRecord::new(run.to_string(), run.seed(), checkpoints));
            log_files.push(path);
        }
        results.push(TranslatorRuns {
            translator: handle.name.clone(),
            dataset: ctx.dataset.name.clone(),
            runs,
        });
    }
    Ok(RunArtifacts { results, log_files })
}

fn collect_logs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), EvalError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_logs(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "ndjson") {
            out.push(p);
        }
    }
    Ok(())
}

/// Rebuilds run records from the NDJSON logs under `dir`. Translators are
/// returned sorted by name, runs by id, checkpoints by epoch.
pub fn read_logs(dir: &Path) -> Result<Vec<TranslatorRuns>, EvalError> {
    let mut files = Vec::new();
    collect_logs(dir, &mut files)?;
    type Epochs = BTreeMap<u32, BTreeMap<String, EvalOutcome>>;
    let mut grouped: BTreeMap<String, (String, BTreeMap<String, Epochs>)> = BTreeMap::new();
    for path in &files {
        let file = File::open(path).map_err(io_err(path))?;
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io_err(path))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| EvalError::Log {
                path: format!("{}:{}", path.display(), n + 1),
                message,
            };
            let entry: LogEntry = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            let slot = grouped
                .entry(entry.translator.clone())
                .or_insert_with(|| (entry.dataset.clone(), BTreeMap::new()));
            if slot.0 != entry.dataset {
                return Err(bad(format!(
                    "translator {} appears with datasets {} and {}",
                    entry.translator, slot.0, entry.dataset
                )));
            }
            let outcomes = slot
                .1
                .entry(entry.run.clone())
                .or_default()
                .entry(entry.epoch)
                .or_default();
            if outcomes
                .insert(
                    entry.question_id.clone(),
                    EvalOutcome {
                        kind: entry.outcome,
                        detail: entry.detail,
                    },
                )
                .is_some()
            {
                return Err(bad(format!(
                    "duplicate outcome for {} at epoch {}",
                    entry.question_id, entry.epoch
                )));
            }
        }
    }
    if grouped.is_empty() {
        return Err(EvalError::Log {
            path: dir.display().to_string(),
            message: "no run logs found".into(),
        });
    }
    let mut result = Vec::new();
    for (translator, (dataset, runs)) in grouped {
        let mut records = Vec::new();
        for (run, epochs) in runs {
            let id = RunId::new(&run).map_err(|e| EvalError::Log {
                path: dir.display().to_string(),
                message: e.to_string(),
            })?;
            let checkpoints = epochs
                .into_iter()
                .map(|(epoch, outcomes)| CheckpointEval {
                    run_id: run.clone(),
                    translator: translator.clone(),
                    dataset: dataset.clone(),
                    epoch,
                    correct_count: outcomes.values().filter(|o| o.is_correct()).count(),
                    outcomes,
                })
                .collect();
            records.push(RunRecord::new(run.clone(), id.seed(), checkpoints));
        }
        result.push(TranslatorRuns {
            translator,
            dataset,
            runs: records,
        });
    }
    Ok(result)
}
