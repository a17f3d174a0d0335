use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crimekb::pipeline::{self, ExportKind, PipelineConfig, PipelineError};

#[derive(Parser)]
#[command(name = "crimekb", version, about = "Annotated text to a queryable criminal-domain event graph")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Use this edit-distance threshold for every term length.
    #[arg(long, global = true)]
    fuzzy_max: Option<usize>,
    /// Base IRI for the schema and minted nodes.
    #[arg(long, global = true)]
    namespace: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate raw text with the rule baseline and write one corpus file.
    Annotate {
        /// Directory of `<case>/<doc>.txt` files (default: `raw_dir` from the config).
        #[arg(long)]
        raw_dir: Option<PathBuf>,
        /// Case id for `.txt` files placed directly in the raw directory.
        #[arg(long, default_value = "case")]
        case: String,
        /// Language code written to every document header.
        #[arg(long)]
        lang: Option<String>,
        /// Corpus file to write (default: `<out>/corpus.tsv`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the whole pipeline and write events, matches, kb.nt and stats.
    Run,
    /// Evaluate a query file against an N-Triples knowledge base.
    Query {
        query_file: PathBuf,
        /// N-Triples file (default: `<out>/kb.nt`).
        #[arg(long)]
        kb: Option<PathBuf>,
    },
    /// Print events, the schema or the populated graph.
    Export {
        #[arg(value_enum)]
        kind: Kind,
        /// Write here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Events,
    Schema,
    Kb,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    cfg.apply_overrides(cli.out.clone(), cli.fuzzy_max, cli.namespace.clone());
    Ok(cfg)
}

fn write_or_print(output: Option<PathBuf>, text: &str) -> Result<(), PipelineError> {
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), PipelineError> {
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::Annotate {
            raw_dir,
            case,
            lang,
            output,
        } => {
            if lang.is_some() {
                cfg.language = lang;
            }
            let raw_dir = raw_dir.or_else(|| cfg.raw_dir.clone()).ok_or_else(|| PipelineError::Config {
                path: "raw_dir".into(),
                message: "give --raw-dir or set raw_dir in the config".into(),
            })?;
            let text = pipeline::annotate(&cfg, &raw_dir, &case)?;
            let output = output.unwrap_or_else(|| cfg.out_dir().join("corpus.tsv"));
            if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| PipelineError::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
            }
            write_or_print(Some(output.clone()), &text)?;
            log::info!("wrote {}", output.display());
        }
        Command::Run => {
            pipeline::run(&cfg)?;
        }
        Command::Query { query_file, kb } => {
            let kb = kb.unwrap_or_else(|| cfg.out_dir().join("kb.nt"));
            print!("{}", pipeline::query(&kb, &query_file)?);
        }
        Command::Export { kind, output } => {
            let kind = match kind {
                Kind::Events => ExportKind::Events,
                Kind::Schema => ExportKind::Schema,
                Kind::Kb => ExportKind::Kb,
            };
            write_or_print(output, &pipeline::export(&cfg, kind)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
