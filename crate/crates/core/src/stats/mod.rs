//! Best-of-run statistics and report files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::evaluator::{RunRecord, TranslatorRuns};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no runs to report")]
    NoRuns,
    #[error("run {run} of {model} has no checkpoints")]
    EmptyRun { model: String, run: String },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Best checkpoint of a run: the highest correct count, earliest epoch on ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BestOfRun {
    pub best: usize,
    pub epoch: u32,
}

pub fn best_of_run(run: &RunRecord) -> Option<BestOfRun> {
    let mut best: Option<BestOfRun> = None;
    for cp in &run.checkpoints {
        let better = match best {
            None => true,
            Some(b) => {
                cp.correct_count > b.best || (cp.correct_count == b.best && cp.epoch < b.epoch)
            }
        };
        if better {
            best = Some(BestOfRun {
                best: cp.correct_count,
                epoch: cp.epoch,
            });
        }
    }
    best
}

/// Mean, population standard deviation and the deviation as a percentage
/// of the mean (absent when the mean is zero). Full precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregate {
    pub average: f64,
    pub std_dev: f64,
    pub std_dev_percent: Option<f64>,
}

pub fn std_dev_percent(average: f64, std_dev: f64) -> Option<f64> {
    (average != 0.0).then(|| 100.0 * std_dev / average)
}

pub fn aggregate(values: &[f64]) -> Option<Aggregate> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let average = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - average).powi(2)).sum::<f64>() / n;
    let std_dev = variance.sqrt();
    Some(Aggregate {
        average,
        std_dev,
        std_dev_percent: std_dev_percent(average, std_dev),
    })
}

/// Two-decimal presentation form.
pub fn present(x: f64) -> String {
    format!("{x:.2}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub run: String,
    pub seed: u64,
    pub best: usize,
    pub best_epoch: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub model: String,
    pub dataset: String,
    pub runs: Vec<RunSummary>,
    #[serde(flatten)]
    pub aggregate: Aggregate,
    /// Mean correct count over runs at each epoch.
    pub per_epoch_average: BTreeMap<u32, f64>,
}

/// Summaries sorted by dataset, then model name.
pub fn summarize(results: &[TranslatorRuns]) -> Result<Vec<ModelSummary>, StatsError> {
    if results.is_empty() || results.iter().all(|r| r.runs.is_empty()) {
        return Err(StatsError::NoRuns);
    }
    let mut out = Vec::new();
    for tr in results.iter().filter(|r| !r.runs.is_empty()) {
        let mut runs = Vec::new();
        let mut per_epoch: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for run in &tr.runs {
            let b = best_of_run(run).ok_or_else(|| StatsError::EmptyRun {
                model: tr.translator.clone(),
                run: run.run_id.clone(),
            })?;
            runs.push(RunSummary {
                run: run.run_id.clone(),
                seed: run.seed,
                best: b.best,
                best_epoch: b.epoch,
            });
            for cp in &run.checkpoints {
                per_epoch
                    .entry(cp.epoch)
                    .or_default()
                    .push(cp.correct_count as f64);
            }
        }
        runs.sort_by(|a, b| a.run.cmp(&b.run));
        let bests: Vec<f64> = runs.iter().map(|r| r.best as f64).collect();
        let aggregate = aggregate(&bests).expect("non-empty runs");
        let per_epoch_average = per_epoch
            .into_iter()
            .map(|(e, v)| (e, v.iter().sum::<f64>() / v.len() as f64))
            .collect();
        out.push(ModelSummary {
            model: tr.translator.clone(),
            dataset: tr.dataset.clone(),
            runs,
            aggregate,
            per_epoch_average,
        });
    }
    out.sort_by(|a, b| (&a.dataset, &a.model).cmp(&(&b.dataset, &b.model)));
    Ok(out)
}

fn by_dataset(summaries: &[ModelSummary]) -> BTreeMap<&str, Vec<&ModelSummary>> {
    let mut m: BTreeMap<&str, Vec<&ModelSummary>> = BTreeMap::new();
    for s in summaries {
        m.entry(s.dataset.as_str()).or_default().push(s);
    }
    m
}

/// Models with the highest average (all of them on an exact tie).
fn best_models<'a>(models: &[&'a ModelSummary]) -> Vec<&'a str> {
    let max = models
        .iter()
        .map(|m| m.aggregate.average)
        .fold(f64::NEG_INFINITY, f64::max);
    models
        .iter()
        .filter(|m| m.aggregate.average == max)
        .map(|m| m.model.as_str())
        .collect()
}

/// Markdown tables, one per dataset; the best model's row is bold.
pub fn summary_markdown(summaries: &[ModelSummary]) -> String {
    let mut md = String::new();
    for (dataset, models) in by_dataset(summaries) {
        let best = best_models(&models);
        let runs = models.iter().map(|m| m.runs.len()).max().unwrap_or(0);
        let _ = writeln!(md, "## {dataset}\n");
        let _ = writeln!(md, "Best-of-run correct answers over {runs} run(s).\n");
        md.push_str("| Model | Average | Std. dev. | Std. dev. % |\n");
        md.push_str("|---|---:|---:|---:|\n");
        for m in &models {
            let pct = m
                .aggregate
                .std_dev_percent
                .map_or_else(|| "n/a".to_string(), present);
            let cells = [
                m.model.clone(),
                present(m.aggregate.average),
                present(m.aggregate.std_dev),
                pct,
            ];
            let cells: Vec<String> = if best.contains(&m.model.as_str()) {
                cells.iter().map(|c| format!("**{c}**")).collect()
            } else {
                cells.to_vec()
            };
            let _ = writeln!(md, "| {} |", cells.join(" | "));
        }
        md.push('\n');
    }
    md
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    metadata: Metadata,
    datasets: Vec<DatasetJson<'a>>,
}

#[derive(Serialize)]
struct Metadata {
    aggregation: &'static str,
    std_dev: &'static str,
    best_tie_break: &'static str,
}

#[derive(Serialize)]
struct DatasetJson<'a> {
    name: &'a str,
    best_models: Vec<&'a str>,
    models: Vec<&'a ModelSummary>,
}

pub fn summary_json(summaries: &[ModelSummary]) -> String {
    let datasets = by_dataset(summaries)
        .into_iter()
        .map(|(name, models)| DatasetJson {
            name,
            best_models: best_models(&models),
            models,
        })
        .collect();
    let doc = SummaryJson {
        metadata: Metadata {
            aggregation: "best-of-run",
            std_dev: "population",
            best_tie_break: "earliest epoch",
        },
        datasets,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("summary serializes");
    s.push('\n');
    s
}

fn csv_string(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, StatsError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| StatsError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
}

fn sorted_runs(results: &[TranslatorRuns]) -> Vec<(&str, &RunRecord)> {
    let mut v: Vec<(&str, &RunRecord)> = results
        .iter()
        .flat_map(|t| t.runs.iter().map(move |r| (t.translator.as_str(), r)))
        .collect();
    v.sort_by(|a, b| (a.0, &a.1.run_id).cmp(&(b.0, &b.1.run_id)));
    v
}

/// Per-checkpoint counts: model, run, epoch, correct_count.
pub fn curves_csv(results: &[TranslatorRuns]) -> Result<String, StatsError> {
    let rows = sorted_runs(results).into_iter().flat_map(|(model, run)| {
        let mut cps: Vec<_> = run.checkpoints.iter().collect();
        cps.sort_by_key(|c| c.epoch);
        cps.into_iter().map(move |c| {
            vec![
                model.to_string(),
                run.run_id.clone(),
                c.epoch.to_string(),
                c.correct_count.to_string(),
            ]
        })
    });
    csv_string(&["model", "run", "epoch", "correct_count"], rows)
}

/// Best-of-run counts: model, run, best.
pub fn bestof_csv(results: &[TranslatorRuns]) -> Result<String, StatsError> {
    let mut rows = Vec::new();
    for (model, run) in sorted_runs(results) {
        let b = best_of_run(run).ok_or_else(|| StatsError::EmptyRun {
            model: model.into(),
            run: run.run_id.clone(),
        })?;
        rows.push(vec![
            model.to_string(),
            run.run_id.clone(),
            b.best.to_string(),
        ]);
    }
    csv_string(&["model", "run", "best"], rows)
}

pub const REPORT_FILES: [&str; 4] = ["curves.csv", "summary.md", "bestof.csv", "summary.json"];

/// Writes the four report files into `out_dir` and returns their paths.
pub fn emit_reports(
    results: &[TranslatorRuns],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, StatsError> {
    let summaries = summarize(results)?;
    let contents = [
        curves_csv(results)?,
        summary_markdown(&summaries),
        bestof_csv(results)?,
        summary_json(&summaries),
    ];
    fs::create_dir_all(out_dir).map_err(|source| StatsError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::new();
    for (name, body) in REPORT_FILES.iter().zip(contents) {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|source| StatsError::Io {
            path: path.clone(),
            source,
        })?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests;
