use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qseal::runner::commands::{self, CommandOutput};
use qseal::runner::{load_config, ExperimentConfig, Format};
use qseal::{Result, SealError};

#[derive(Parser)]
#[command(name = "qseal", version, about = "Quantum string seal simulator")]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent and the config names none.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the sealed state of one message.
    Encode {
        #[arg(long)]
        n: Option<usize>,
        /// Bit string, or message index for non-product seals.
        #[arg(long)]
        message: Option<String>,
    },
    /// Apply the configured strategy to one sealed message.
    Attack {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        message: Option<String>,
    },
    /// One report row per string length.
    Sweep,
    /// Classify the configured family as A, B or C.
    Classify,
    /// Partition-size scaling for the three exemplar families.
    Table1,
    /// Cross-check fast paths against dense reference computations.
    OracleCheck,
}

fn config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| SealError::Config("--config is required for this command".into()))?;
    let mut cfg = load_config(path)?;
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(s) = cli.seed {
        cfg.output.seed = s;
    }
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(CommandOutput, Option<PathBuf>)> {
    let fmt = |cfg: &ExperimentConfig| cfg.output.format;
    match &cli.command {
        Command::Encode { n, message } => {
            let cfg = config(cli)?;
            Ok((
                commands::encode(&cfg, *n, message.as_deref(), fmt(&cfg))?,
                cfg.output.path,
            ))
        }
        Command::Attack { n, message } => {
            let cfg = config(cli)?;
            Ok((
                commands::attack(&cfg, *n, message.as_deref(), fmt(&cfg))?,
                cfg.output.path,
            ))
        }
        Command::Sweep => {
            let cfg = config(cli)?;
            Ok((commands::sweep(&cfg, fmt(&cfg))?, cfg.output.path))
        }
        Command::Classify => {
            let cfg = config(cli)?;
            Ok((commands::classify(&cfg, fmt(&cfg))?, cfg.output.path))
        }
        Command::Table1 => Ok((commands::table1(cli.format)?, cli.out.clone())),
        Command::OracleCheck => {
            let (seed, format, path) = match &cli.config {
                Some(_) => {
                    let cfg = config(cli)?;
                    (cfg.output.seed, cfg.output.format, cfg.output.path)
                }
                None => (
                    cli.seed.unwrap_or(0),
                    cli.format.unwrap_or(Format::Csv),
                    cli.out.clone(),
                ),
            };
            Ok((commands::oracle_check(seed, format)?, path))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, path)) => {
            let written = match path {
                Some(p) => qseal::runner::report::write_bytes(&p, &out.bytes),
                None => std::io::stdout()
                    .write_all(&out.bytes)
                    .map_err(SealError::from),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if out.failed {
                eprintln!("error: oracle check found mismatches");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invariant_failure() { 2 } else { 1 })
        }
    }
}
