use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use consol::config::SessionConfig;
use consol::consolidate_metrics;
use consol::export::{export, DECISIONS};
use consol::ingest::ingest;
use consol::labels::read_labels;
use consol::log::read_log;
use consol::reviewer::{run_session, Scripted, Terminal};
use consol::server::{resolve_port, serve, AppState};
use consol::session::Session;
use consol_core::candidates::ReplacementStore;

#[derive(Parser)]
#[command(name = "consol", version, about = "Standardize variant values in duplicate clusters")]
struct Cli {
    /// Session config (TOML).
    #[arg(short, long, global = true, default_value = "consol.toml")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read the input and report clusters and candidate replacements.
    Ingest,
    /// Review groups at the terminal, then export.
    Review {
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Serve the review API.
    Serve {
        #[arg(short, long)]
        port: Option<u16>,
        /// Directory for the live decision log and the final export.
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Apply a recorded decision log headlessly, then export.
    Replay {
        #[arg(short, long)]
        decisions: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Print pair-level metrics, after replaying a decision log if given.
    Evaluate {
        #[arg(short, long)]
        labels: PathBuf,
        #[arg(short, long)]
        decisions: Option<PathBuf>,
    },
    /// Write outputs for the input, after replaying a decision log if given.
    Export {
        #[arg(short, long)]
        decisions: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
}

fn open_session(config: &SessionConfig) -> Result<Session> {
    let table = ingest(config)?;
    Session::new(table, config.clone())
}

fn replay(session: &mut Session, path: &Path) -> Result<()> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let records = read_log(BufReader::new(file))?;
    run_session(session, &mut Scripted::new(records))
}

fn labels_of(config: &SessionConfig, path: Option<&Path>) -> Result<Option<Vec<consol_core::consolidate::LabeledPair>>> {
    let Some(path) = path.or(config.labels.as_deref()) else {
        return Ok(None);
    };
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Some(read_labels(BufReader::new(file), config.delimiter as u8)?))
}

fn finish(session: &Session, out: &Path, force: bool) -> Result<()> {
    let labels = labels_of(session.config(), None)?;
    let metrics = consolidate_metrics(session, labels.as_deref())?;
    for path in export(session, metrics.as_ref(), out, force)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[tokio::main]
async fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = SessionConfig::load(&cli.config)?;
    match cli.command {
        Command::Ingest => {
            let table = ingest(&config)?;
            println!("rows = {}", table.row_count());
            println!("clusters = {}", table.clusters().len());
            for name in &config.target_columns {
                let col = table.column_index(name).expect("checked at ingest");
                let store = ReplacementStore::build(&table, col, config.token_level);
                println!("replacements[{name}] = {}", store.len());
            }
        }
        Command::Review { out, force } => {
            let mut session = open_session(&config)?;
            let stdin = std::io::stdin();
            run_session(&mut session, &mut Terminal::new(stdin.lock(), std::io::stdout()))?;
            finish(&session, &out, force)?;
        }
        Command::Serve { port, out, force } => {
            let port = resolve_port(port, std::env::var("CONSOL_PORT").ok().as_deref(), config.port)?;
            let mut session = open_session(&config)?;
            std::fs::create_dir_all(&out)?;
            let log_path = out.join(DECISIONS);
            if log_path.exists() && !force {
                replay(&mut session, &log_path)?;
                eprintln!("resumed {} decisions from {}", session.log().len(), log_path.display());
            }
            let sink = std::fs::OpenOptions::new()
                .create(true)
                .append(!force)
                .write(true)
                .truncate(force)
                .open(&log_path)?;
            let labels = labels_of(&config, None)?;
            let state = AppState::new(session, labels);
            state.0.lock().expect("fresh lock").log_sink = Some(Box::new(sink));
            serve(state.clone(), port).await?;
            let inner = state.0.lock().unwrap_or_else(|e| e.into_inner());
            finish(&inner.session, &out, true)?;
        }
        Command::Replay { decisions, out, force } => {
            let mut session = open_session(&config)?;
            replay(&mut session, &decisions)?;
            println!("replayed {} decisions", session.log().len());
            finish(&session, &out, force)?;
        }
        Command::Evaluate { labels, decisions } => {
            let mut session = open_session(&config)?;
            if let Some(d) = decisions {
                replay(&mut session, &d)?;
            }
            let labels = labels_of(&config, Some(&labels))?.expect("path given");
            print!("{}", session.metrics(&labels)?);
        }
        Command::Export { decisions, out, force } => {
            let mut session = open_session(&config)?;
            if let Some(d) = decisions {
                replay(&mut session, &d)?;
            }
            finish(&session, &out, force)?;
        }
    }
    Ok(())
}
