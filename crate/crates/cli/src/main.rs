use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use textsparql_cli::commands::{self, DatagenArgs};
use textsparql_cli::error::{Categorize, CliResult, Failure};
use textsparql_cli::{EndpointConfig, Overrides, RunConfig};
use textsparql_core::datagen::ChatClientConfig;

#[derive(Parser)]
#[command(
    name = "textsparql",
    version,
    about = "Execution-accuracy benchmark harness for text-to-SPARQL translators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a dataset manifest and run the gold self-test.
    Validate {
        /// Manifest path (or use --dataset).
        manifest: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// `local` or a SPARQL endpoint URL; defaults to the manifest's backend.
        #[arg(long)]
        backend: Option<String>,
    },
    /// Evaluate translators over runs and epoch checkpoints.
    Run {
        /// JSON run configuration; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Translator spec, repeatable: [NAME=]gold-oracle | null | retrieval |
        /// transcript:PATH | cmd:PROGRAM ARGS | http(s)://URL. `{run}` is
        /// replaced by the run id.
        #[arg(long = "translator")]
        translators: Vec<String>,
        #[arg(long)]
        backend: Option<String>,
        /// A count N (R01..RN) or a comma-separated list of run ids.
        #[arg(long)]
        runs: Option<String>,
        /// Comma-separated epochs or FIRST..LAST[:STEP].
        #[arg(long)]
        epochs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Rebuild reports from run logs.
    Report {
        /// Directory containing run logs (searched recursively).
        logs: PathBuf,
        /// Report directory; defaults to LOGS/reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a dataset from a graph with a chat-completion model.
    Datagen {
        #[arg(long)]
        name: String,
        /// Turtle files describing the graph, repeatable.
        #[arg(long = "graph", required = true)]
        graphs: Vec<PathBuf>,
        /// Number of candidates to request.
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        test_count: usize,
        /// Output manifest path.
        #[arg(long)]
        out: PathBuf,
        /// JSON chat client configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replay chat responses from this transcript; no network traffic.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Record chat exchanges to this transcript.
        #[arg(long)]
        record: Option<PathBuf>,
        /// Ask for one paraphrase per verified record.
        #[arg(long)]
        paraphrase: bool,
        #[arg(long)]
        generate_template: Option<PathBuf>,
        #[arg(long)]
        paraphrase_template: Option<PathBuf>,
        /// Write every candidate and its verification result as NDJSON.
        #[arg(long)]
        candidates: Option<PathBuf>,
    },
    /// Convert a QALD JSON file into a manifest.
    ImportQald {
        input: PathBuf,
        #[arg(long)]
        name: String,
        /// SPARQL endpoint the gold queries target.
        #[arg(long)]
        endpoint: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the seed derived from each label.
    Seed {
        #[arg(required = true)]
        labels: Vec<String>,
    },
}

fn print(text: &str) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes()).or_fail(Failure::Data)
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Validate {
            manifest,
            dataset,
            backend,
        } => {
            let path = manifest.or(dataset).ok_or_else(|| {
                textsparql_cli::error::fail(Failure::Config, "a manifest path is required")
            })?;
            commands::validate(
                &path,
                backend.as_deref(),
                &EndpointConfig::default(),
                &mut std::io::stdout().lock(),
            )
        }
        Command::Run {
            config,
            dataset,
            translators,
            backend,
            runs,
            epochs,
            out,
            jobs,
        } => {
            let flags = Overrides {
                dataset,
                backend,
                translators,
                runs,
                epochs,
                out,
                jobs,
            };
            let config = RunConfig::resolve(config.as_deref(), flags).or_fail(Failure::Config)?;
            print(&commands::run(&config)?)
        }
        Command::Report { logs, out } => {
            let out = out.unwrap_or_else(|| logs.join("reports"));
            print(&commands::report(&logs, &out)?)
        }
        Command::Datagen {
            name,
            graphs,
            count,
            test_count,
            out,
            config,
            replay,
            record,
            paraphrase,
            generate_template,
            paraphrase_template,
            candidates,
        } => {
            let mut chat: ChatClientConfig = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).or_fail(Failure::Config)?;
                    serde_json::from_str(&text).or_fail(Failure::Config)?
                }
                None => ChatClientConfig::default(),
            };
            if replay.is_some() {
                chat.replay = replay;
            }
            if record.is_some() {
                chat.record = record;
            }
            let args = DatagenArgs {
                name,
                graphs,
                count,
                test_count,
                out,
                chat,
                paraphrase,
                generate_template,
                paraphrase_template,
                candidates_out: candidates,
            };
            print(&commands::datagen(&args)?)
        }
        Command::ImportQald {
            input,
            name,
            endpoint,
            out,
        } => print(&commands::import(&input, &name, &endpoint, &out)?),
        Command::Seed { labels } => print(&commands::seeds(&labels)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.failure.exit_code() as u8)
        }
    }
}
