use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;
use textsparql_core::datagen::{
    build_manifest, generate_candidates, open_chat, paraphrase_all, verify_candidate,
    ChatClientConfig, DatagenError, GENERATE_TEMPLATE, PARAPHRASE_TEMPLATE,
};
use textsparql_core::dataset::{import_qald, BackendSpec, Manifest};
use textsparql_core::evaluator::{read_logs, run_plan, EvalError, RunPlan};
use textsparql_core::rdf::load_graph;
use textsparql_core::stats::{emit_reports, summarize, summary_markdown};
use textsparql_core::{
    derive_seed, Backend, Dataset, EvalContext, EvalOptions, OutcomeKind, Split,
};

use crate::config::{EndpointConfig, RunConfig};
use crate::error::{fail, Categorize, CliResult, Failure};

/// Opens the backend a dataset should be evaluated against. `choice` is
/// `local`, an endpoint URL, or `None` for the manifest's own backend.
pub fn open_backend(
    ds: &Dataset,
    choice: Option<&str>,
    endpoint: &EndpointConfig,
) -> CliResult<Backend> {
    let local = |ds: &Dataset| -> CliResult<Backend> {
        let graph = ds.load_graph().or_fail(Failure::Data)?;
        let graph =
            graph.ok_or_else(|| fail(Failure::Config, "dataset has no local graph files"))?;
        Ok(Backend::Local(Arc::new(graph)))
    };
    match choice {
        Some("local") => local(ds),
        Some(url) if url.starts_with("http://") || url.starts_with("https://") => {
            Ok(Backend::Remote(endpoint.endpoint(url)))
        }
        Some(other) => Err(fail(
            Failure::Config,
            format!("backend must be 'local' or an http(s) URL, got {other:?}"),
        )),
        None => match &ds.backend {
            BackendSpec::Turtle(_) => local(ds),
            BackendSpec::Endpoint(url) => Ok(Backend::Remote(endpoint.endpoint(url))),
        },
    }
}

fn eval_failure(e: &EvalError) -> Failure {
    match e {
        EvalError::GoldUnavailable { .. } | EvalError::Translator { .. } => Failure::Backend,
        EvalError::EmptyTestSplit | EvalError::Log { .. } | EvalError::Io { .. } => Failure::Data,
    }
}

fn eval_err(e: EvalError) -> crate::error::CliError {
    let failure = eval_failure(&e);
    crate::error::CliError {
        failure,
        error: e.into(),
    }
}

/// Loads a manifest, executes every gold query and checks that each one
/// is judged correct against itself.
pub fn validate(
    manifest: &Path,
    backend: Option<&str>,
    endpoint: &EndpointConfig,
    out: &mut dyn Write,
) -> CliResult<()> {
    let (ds, parse_failures) = Dataset::load_collecting(manifest).or_fail(Failure::Data)?;
    let ds = Arc::new(ds);
    let backend = open_backend(&ds, backend, endpoint)?;
    let annotated = ds.records.iter().filter(|r| r.unsupported).count() - parse_failures.len();
    let mut report = format!(
        "{}: {} records, {} test, {} train\n",
        ds.name,
        ds.records.len(),
        ds.count(Split::Test),
        ds.count(Split::Train)
    );
    if annotated > 0 {
        report.push_str(&format!(
            "{annotated} records annotated unsupported (skipped)\n"
        ));
    }
    let ctx = EvalContext::for_all_records(ds.clone(), backend, EvalOptions::default())
        .map_err(eval_err)?;
    let mut failures: Vec<String> = parse_failures
        .iter()
        .map(|(id, e)| format!("{id}: gold query does not parse: {e}"))
        .collect();
    let mut correct = 0;
    for r in ds.records.iter().filter(|r| !r.unsupported) {
        let outcome = ctx.classify(r, &Ok(r.gold_query.clone()));
        if outcome.kind == OutcomeKind::Correct {
            correct += 1;
        } else {
            failures.push(format!("{}: {}: {}", r.id, outcome.kind, outcome.detail));
        }
    }
    failures.sort();
    report.push_str(&format!(
        "gold self-test: {correct} correct, {} failed\n",
        failures.len()
    ));
    for f in &failures {
        report.push_str(&format!("FAIL {f}\n"));
    }
    out.write_all(report.as_bytes()).or_fail(Failure::Data)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(fail(
            Failure::Data,
            format!("{} record(s) failed validation", failures.len()),
        ))
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    dataset: serde_json::Value,
    backend: String,
    translators: Vec<serde_json::Value>,
    runs: Vec<serde_json::Value>,
    epochs: &'a [u32],
    strict_projection: bool,
    expand_paraphrases: bool,
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents)
        .map_err(|e| fail(Failure::Data, format!("writing {}: {e}", path.display())))
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Executes a configured run: logs, shuffle listings, frozen configuration,
/// run manifest and reports, all under `config.out`. Returns the summary
/// table in Markdown.
pub fn run(config: &RunConfig) -> CliResult<String> {
    config.validate().or_fail(Failure::Config)?;
    let handles = config.translator_handles().or_fail(Failure::Config)?;
    let runs = config.run_ids().or_fail(Failure::Config)?;
    let mut ds = Dataset::load(&config.dataset).or_fail(Failure::Data)?;
    if let Some(expand) = config.expand_paraphrases {
        ds.expand_paraphrases = expand;
    }
    let logs_dir = config.out.join("logs");
    if logs_dir.exists()
        && fs::read_dir(&logs_dir)
            .or_fail(Failure::Data)?
            .next()
            .is_some()
    {
        return Err(fail(
            Failure::Config,
            format!(
                "{} already holds run logs; choose a fresh output directory",
                logs_dir.display()
            ),
        ));
    }
    let backend = open_backend(&ds, config.backend.as_deref(), &config.endpoint)?;
    let backend_desc = match &backend {
        Backend::Local(g) => format!("local ({} triples)", g.len()),
        Backend::Remote(e) => e.url.clone(),
    };
    let options = EvalOptions {
        strict_projection: config.strict_projection,
        jobs: config.jobs,
    };
    let expand = ds.expand_paraphrases;
    let ds = Arc::new(ds);
    let ctx = EvalContext::new(ds.clone(), backend, options).map_err(eval_err)?;

    fs::create_dir_all(&config.out).or_fail(Failure::Data)?;
    write_file(&config.out.join("config.json"), &pretty(config))?;
    let manifest = RunManifest {
        tool: "textsparql",
        version: env!("CARGO_PKG_VERSION"),
        dataset: json!({
            "name": ds.name,
            "sha256": ds.hash,
            "records": ds.records.len(),
            "test": ds.count(Split::Test),
            "train": ds.count(Split::Train),
        }),
        backend: backend_desc,
        translators: handles
            .iter()
            .zip(&config.translators)
            .map(|(h, s)| json!({"name": h.name, "spec": s}))
            .collect(),
        runs: runs
            .iter()
            .map(|r| json!({"id": r.as_str(), "seed": r.seed()}))
            .collect(),
        epochs: &config.epochs,
        strict_projection: config.strict_projection,
        expand_paraphrases: expand,
    };
    write_file(&config.out.join("manifest.json"), &pretty(&manifest))?;

    let plan = RunPlan {
        translators: handles,
        runs,
        epochs: config.epochs.clone(),
    };
    run_plan(&ctx, &plan, &config.out).map_err(eval_err)?;
    report(&logs_dir, &config.out.join("reports"))
}

/// Rebuilds every report from the run logs under `logs`. Returns the
/// summary table in Markdown.
pub fn report(logs: &Path, out_dir: &Path) -> CliResult<String> {
    let results = read_logs(logs).or_fail(Failure::Data)?;
    emit_reports(&results, out_dir).or_fail(Failure::Data)?;
    let summaries = summarize(&results).or_fail(Failure::Data)?;
    Ok(summary_markdown(&summaries))
}

/// `LABEL SEED` lines for each label.
pub fn seeds(labels: &[String]) -> CliResult<String> {
    let mut out = String::new();
    for label in labels {
        let seed = derive_seed(label).or_fail(Failure::Config)?;
        out.push_str(&format!("{label} {seed}\n"));
    }
    Ok(out)
}

/// Converts a QALD JSON file into a manifest at `out`. Returns a one-line
/// description of the result.
pub fn import(input: &Path, name: &str, endpoint: &str, out: &Path) -> CliResult<String> {
    let bytes = fs::read(input)
        .map_err(|e| fail(Failure::Data, format!("reading {}: {e}", input.display())))?;
    let manifest = import_qald(&bytes, name, endpoint).or_fail(Failure::Data)?;
    write_file(out, &pretty(&manifest))?;
    let unsupported = manifest.records.iter().filter(|r| r.unsupported).count();
    Ok(format!(
        "{}: {} records, {unsupported} unsupported\n",
        out.display(),
        manifest.records.len()
    ))
}

#[derive(Debug, Clone)]
pub struct DatagenArgs {
    pub name: String,
    pub graphs: Vec<PathBuf>,
    pub count: usize,
    pub test_count: usize,
    pub out: PathBuf,
    pub chat: ChatClientConfig,
    pub paraphrase: bool,
    pub generate_template: Option<PathBuf>,
    pub paraphrase_template: Option<PathBuf>,
    /// Every candidate with its verification result, as NDJSON.
    pub candidates_out: Option<PathBuf>,
}

fn datagen_failure(e: &DatagenError) -> Failure {
    match e {
        DatagenError::Transport(_) => Failure::Backend,
        DatagenError::Replay(_) | DatagenError::PromptBudgetExceeded { .. } => Failure::Data,
    }
}

fn read_template(path: &Option<PathBuf>, default: &str) -> CliResult<String> {
    match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| fail(Failure::Config, format!("reading {}: {e}", p.display()))),
        None => Ok(default.to_string()),
    }
}

/// Paths stored in the manifest, relative to its directory when possible.
fn manifest_paths(graphs: &[PathBuf], out: &Path) -> Vec<PathBuf> {
    let base = out
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let base = fs::canonicalize(base).unwrap_or_else(|_| base.to_path_buf());
    graphs
        .iter()
        .map(|g| {
            let abs = fs::canonicalize(g).unwrap_or_else(|_| g.clone());
            abs.strip_prefix(&base)
                .map(Path::to_path_buf)
                .unwrap_or(abs)
        })
        .collect()
}

/// Generates, verifies and optionally paraphrases candidates, then writes
/// a manifest of the verified ones. Returns a short summary.
pub fn datagen(args: &DatagenArgs) -> CliResult<String> {
    let graph = load_graph(&args.graphs).or_fail(Failure::Data)?;
    let generate = read_template(&args.generate_template, GENERATE_TEMPLATE)?;
    let paraphrase = read_template(&args.paraphrase_template, PARAPHRASE_TEMPLATE)?;
    let mut chat = open_chat(&args.chat).map_err(|e| fail(datagen_failure(&e), e))?;
    let candidates = generate_candidates(&graph, args.count, chat.as_mut(), &args.chat, &generate)
        .map_err(|e| fail(datagen_failure(&e), e))?;
    let candidates: Vec<_> = candidates
        .into_iter()
        .map(|c| verify_candidate(c, &graph))
        .collect();
    if let Some(path) = &args.candidates_out {
        let lines: String = candidates
            .iter()
            .map(|c| serde_json::to_string(c).expect("serializable") + "\n")
            .collect();
        write_file(path, &lines)?;
    }
    for c in candidates.iter().filter(|c| !c.verified) {
        if let Some(r) = &c.rejection_reason {
            log::warn!("rejected {:?}: {:?}: {}", c.question, r.kind, r.detail);
        }
    }
    let mut manifest: Manifest = build_manifest(
        &args.name,
        &candidates,
        &graph,
        manifest_paths(&args.graphs, &args.out),
        args.test_count,
    );
    let mut summary = format!(
        "{} candidates, {} verified, {} test\n",
        candidates.len(),
        manifest.records.len(),
        manifest.counts.test
    );
    let mut aborted = None;
    if args.paraphrase {
        let result = paraphrase_all(
            std::mem::take(&mut manifest.records),
            chat.as_mut(),
            &paraphrase,
        );
        manifest.records = result.records;
        if !result.identical.is_empty() {
            summary.push_str(&format!(
                "paraphrase identical to question: {}\n",
                result.identical.join(", ")
            ));
        }
        aborted = result.aborted;
    }
    write_file(&args.out, &pretty(&manifest))?;
    match aborted {
        Some(e) => Err(fail(
            datagen_failure(&e),
            format!("paraphrasing stopped early, partial manifest written: {e}"),
        )),
        None => Ok(summary),
    }
}
