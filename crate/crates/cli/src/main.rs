//! `senseweave`: build a wordnet from a corpus and sentence embeddings.
//!
//! Each subcommand reads its inputs from the config and the output
//! directory and writes its results back under the output directory. On
//! failure a single JSON object is written to stderr and the exit code is
//! 2 for bad input or configuration, 1 for anything else.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use senseweave_core::{MockEmbedder, MockMode};

use crate::config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "senseweave", version, about = "Automatic wordnet construction")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(short, long, global = true, default_value = "senseweave.toml")]
    config: PathBuf,
    /// Overrides `output_dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Overrides `workers` (0 uses every core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Default)]
struct MockArgs {
    /// Overrides `embedding.mock.dim`.
    #[arg(long)]
    dim: Option<usize>,
    /// Overrides `embedding.mock.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `embedding.mock.mode`.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<MockMode>,
}

fn parse_mode(s: &str) -> Result<MockMode, String> {
    match s {
        "whole_text" => Ok(MockMode::WholeText),
        "bag_of_words" => Ok(MockMode::BagOfWords),
        _ => Err(format!("unknown mock mode {s:?} (whole_text, bag_of_words)")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Preprocess and segment the corpus into a sentence store.
    Ingest,
    /// Import precomputed sentence embeddings.
    EmbedImport {
        /// Overrides `embedding.file`.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Embed every sentence with the deterministic mock embedder.
    EmbedMock {
        #[command(flatten)]
        mock: MockArgs,
    },
    /// Induce senses for the seed words.
    Induce {
        /// Overrides `seed_words`.
        #[arg(long)]
        seed_words: Option<PathBuf>,
    },
    /// Group all senses into synsets.
    Synsets {
        /// Overrides `synset_threshold`.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Validate senses by disambiguating a reference evaluation set.
    EvalWsd {
        #[arg(long)]
        manifest: PathBuf,
        /// Embeddings keyed by the manifest's `sentence_embedding_id`.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Overrides `wsd_threshold`.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Compare induced synsets against a reference wordnet.
    EvalSynsets {
        #[arg(long)]
        reference: PathBuf,
    },
    /// Write the wordnet resource.
    Export {
        /// Overrides `created_at`.
        #[arg(long)]
        created_at: Option<String>,
    },
    /// Print counts for an exported wordnet.
    Stats {
        path: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Ingest, embed, induce, build synsets and export in one go.
    Run {
        #[command(flatten)]
        mock: MockArgs,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::EmbedImport { .. } => "embed-import",
            Command::EmbedMock { .. } => "embed-mock",
            Command::Induce { .. } => "induce",
            Command::Synsets { .. } => "synsets",
            Command::EvalWsd { .. } => "eval-wsd",
            Command::EvalSynsets { .. } => "eval-synsets",
            Command::Export { .. } => "export",
            Command::Stats { .. } => "stats",
            Command::Run { .. } => "run",
        }
    }
}

fn mock_embedder(config: &RunConfig, args: &MockArgs) -> Result<MockEmbedder> {
    let mut m = match (&config.embedding.mock, args.dim) {
        (Some(m), _) => m.clone(),
        (None, Some(dim)) => MockEmbedder::new(dim, 0, MockMode::default()),
        (None, None) => config.mock()?.clone(),
    };
    if let Some(dim) = args.dim {
        m.dim = dim;
    }
    if let Some(seed) = args.seed {
        m.seed = seed;
    }
    if let Some(mode) = args.mode {
        m.mode = mode;
    }
    if m.dim == 0 {
        return Err(ConfigError("mock dim must be at least 1".into()).into());
    }
    Ok(m)
}

fn execute(cli: &Cli) -> Result<()> {
    if let Command::Stats { path, json } = &cli.command {
        return commands::stats(path, *json);
    }
    let mut config = RunConfig::load(&cli.config)?;
    if let Some(dir) = &cli.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(w) = cli.workers {
        config.workers = w;
    }
    match &cli.command {
        Command::Synsets { threshold: Some(t) } => config.synset_threshold = *t,
        Command::EvalWsd { threshold: Some(t), .. } => config.wsd_threshold = *t,
        Command::Export { created_at: Some(t) } => config.created_at = t.clone(),
        _ => {}
    }
    config.validate()?;
    match &cli.command {
        Command::Ingest => commands::ingest(&config),
        Command::EmbedImport { file } => commands::embed_import(&config, file.as_deref()),
        Command::EmbedMock { mock } => commands::embed_mock(&config, &mock_embedder(&config, mock)?),
        Command::Induce { seed_words } => commands::induce(&config, seed_words.as_deref()),
        Command::Synsets { .. } => commands::synsets(&config),
        Command::EvalWsd { manifest, embeddings, .. } => {
            commands::eval_wsd(&config, manifest, embeddings.as_deref())
        }
        Command::EvalSynsets { reference } => commands::eval_synsets(&config, reference),
        Command::Export { .. } => commands::export(&config),
        Command::Run { mock } => {
            let use_mock = config.embedding.file.is_none() || mock.dim.is_some();
            let embedder = if use_mock { Some(mock_embedder(&config, mock)?) } else { None };
            commands::run(&config, embedder.as_ref())
        }
        Command::Stats { .. } => unreachable!(),
    }
}

fn is_input_error(err: &anyhow::Error) -> bool {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<std::io::Error>() {
            return true;
        }
        if let Some(e) = cause.downcast_ref::<senseweave_core::Error>() {
            return e.is_input_error();
        }
    }
    false
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let input = is_input_error(&err);
            let line = serde_json::json!({
                "status": "error",
                "command": cli.command.name(),
                "kind": if input { "input" } else { "internal" },
                "message": format!("{err:#}"),
            });
            eprintln!("{line}");
            ExitCode::from(if input { 2 } else { 1 })
        }
    }
}
