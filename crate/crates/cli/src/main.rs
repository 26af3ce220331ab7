use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{error::ErrorKind, Parser, Subcommand};
use sqrw_cli::config::{ConfigError, ExperimentArgs, ExperimentConfig, Kind};
use sqrw_cli::manifest::RunManifest;
use sqrw_cli::{execute, prepare};

/// Scattering quantum random walk search experiments.
///
/// Exit status: 0 on success, 1 for configuration errors, 2 for runtime
/// errors. Results go to `--out`, else `$SQRW_OUTPUT_DIR`, else
/// `./sqrw-output`.
#[derive(Parser)]
#[command(name = "sqrw", version)]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Replace existing result files.
    #[arg(long, global = true)]
    overwrite: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// P(x,y) after a fixed number of unitary steps.
    Snapshot(ExperimentArgs),
    /// Speed curves over U_s and search radius for one target.
    Sweep(ExperimentArgs),
    /// One (U_s, r) plan for an unknown target, scored over every target.
    Blind(ExperimentArgs),
    /// Random-wall ensembles.
    Walls(ExperimentArgs),
    /// Perfect-maze ensembles.
    Maze(ExperimentArgs),
    /// Grid versus cubic lattice at similar node counts.
    LatticeCompare(ExperimentArgs),
    /// Fastest speeds against grid size.
    Trend(ExperimentArgs),
    /// Check a configuration without running it.
    Validate {
        /// Experiment kind; may come from `--config` instead.
        #[arg(value_enum)]
        kind: Option<Kind>,
        #[command(flatten)]
        args: ExperimentArgs,
    },
    /// Rerun the configuration recorded in a manifest and compare checksums.
    Replay {
        manifest: PathBuf,
        /// Output directory for the rerun.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn experiment(kind: Kind, args: ExperimentArgs, overwrite: bool) -> Result<()> {
    let cfg = prepare(args.into_config(kind)?)?;
    execute(&cfg, overwrite)?;
    Ok(())
}

fn validate(kind: Option<Kind>, args: ExperimentArgs) -> Result<()> {
    let kind = match (kind, &args.config) {
        (Some(kind), _) => kind,
        (None, Some(path)) => ExperimentConfig::load(path)?.kind,
        (None, None) => return Err(ConfigError::single("kind: give an experiment kind or --config").into()),
    };
    let cfg = prepare(args.into_config(kind)?)?;
    println!("ok: {}", serde_json::to_string(&cfg)?);
    Ok(())
}

fn replay(path: PathBuf, out: Option<PathBuf>, overwrite: bool) -> Result<()> {
    let recorded = RunManifest::load(&path).map_err(|e| ConfigError::single(format!("{e:#}")))?;
    let mut cfg = recorded.config.clone();
    if out.is_some() {
        cfg.output = out;
    }
    let cfg = prepare(cfg)?;
    let fresh = execute(&cfg, overwrite)?;
    let differ = recorded.mismatches(&fresh.files);
    if differ.is_empty() {
        println!("replay matches {} recorded checksums", recorded.files.len());
        Ok(())
    } else {
        anyhow::bail!("replay differs from the manifest in: {}", differ.join(", "))
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(ConfigError::single("threads: must be at least 1").into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let overwrite = cli.overwrite;
    match cli.command {
        Command::Snapshot(args) => experiment(Kind::Snapshot, args, overwrite),
        Command::Sweep(args) => experiment(Kind::Sweep, args, overwrite),
        Command::Blind(args) => experiment(Kind::Blind, args, overwrite),
        Command::Walls(args) => experiment(Kind::Walls, args, overwrite),
        Command::Maze(args) => experiment(Kind::Maze, args, overwrite),
        Command::LatticeCompare(args) => experiment(Kind::LatticeCompare, args, overwrite),
        Command::Trend(args) => experiment(Kind::Trend, args, overwrite),
        Command::Validate { kind, args } => validate(kind, args),
        Command::Replay { manifest, out } => replay(manifest, out, overwrite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<ConfigError>() {
            Some(config) => {
                eprint!("{config}");
                ExitCode::from(1)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}
