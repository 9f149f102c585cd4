//! A scriptable translator speaking the NDJSON subprocess protocol, used
//! to exercise the harness side of the protocol.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, ValueEnum};
use serde_json::json;
use textsparql_core::translator::{TranslationRequest, TranslationResponse};
use textsparql_core::Dataset;

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Answer with the gold query of the requested record.
    Oracle,
    /// Answer every request with the same query.
    Fixed,
    /// Answer with an error response.
    Error,
    /// Write a line that is not JSON.
    Garbage,
    /// Answer with a different id.
    WrongId,
}

#[derive(Parser)]
struct Args {
    #[arg(long, value_enum, default_value = "fixed")]
    mode: Mode,
    /// Manifest for oracle mode.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value = "SELECT ?s WHERE { ?s ?p ?o }")]
    query: String,
    /// Exit without answering once this many requests were answered.
    #[arg(long)]
    die_after: Option<usize>,
    /// Delay before each answer, in milliseconds.
    #[arg(long, default_value_t = 0)]
    delay_ms: u64,
    /// Only these epochs have a checkpoint; others get an error response.
    #[arg(long, value_delimiter = ',')]
    epochs: Vec<u32>,
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let gold: HashMap<String, String> = match (&args.mode, &args.manifest) {
        (Mode::Oracle, Some(path)) => Dataset::load(path)?
            .records
            .into_iter()
            .map(|r| (r.id, r.gold_query))
            .collect(),
        (Mode::Oracle, None) => anyhow::bail!("oracle mode needs --manifest"),
        _ => HashMap::new(),
    };
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout().lock();
    let mut answered = 0;
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if args.die_after.is_some_and(|n| answered >= n) {
            std::process::exit(3);
        }
        let req: TranslationRequest = serde_json::from_str(&line)?;
        std::thread::sleep(Duration::from_millis(args.delay_ms));
        let reply = |query: Option<String>, error: Option<String>| TranslationResponse {
            id: req.id.clone(),
            query,
            error,
        };
        let out = match (args.mode, req.epoch) {
            (_, Some(e)) if !args.epochs.is_empty() && !args.epochs.contains(&e) => {
                serde_json::to_string(&reply(None, Some(format!("no checkpoint for epoch {e}"))))?
            }
            (Mode::Oracle, _) => {
                let id = req.id.strip_suffix("#p").unwrap_or(&req.id);
                match gold.get(id) {
                    Some(q) => serde_json::to_string(&reply(Some(q.clone()), None))?,
                    None => serde_json::to_string(&reply(None, Some(format!("unknown id {id}"))))?,
                }
            }
            (Mode::Fixed, _) => serde_json::to_string(&reply(Some(args.query.clone()), None))?,
            (Mode::Error, _) => serde_json::to_string(&reply(None, Some("model failed".into())))?,
            (Mode::Garbage, _) => "this is not json".to_string(),
            (Mode::WrongId, _) => {
                json!({"id": format!("{}-other", req.id), "query": args.query}).to_string()
            }
        };
        writeln!(stdout, "{out}")?;
        stdout.flush()?;
        answered += 1;
    }
    Ok(())
}
