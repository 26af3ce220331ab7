//! Experiment driver behind the `sqrw` binary.

pub mod config;
pub mod experiments;
pub mod manifest;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

use config::{ConfigError, ExperimentConfig, OUTPUT_DIR_ENV};
use manifest::{FileDigest, RunManifest, MANIFEST_NAME};

/// Output directory: the config's own, else `$SQRW_OUTPUT_DIR`, else
/// `sqrw-output`.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("sqrw-output"))
}

/// Resolves defaults and returns the config, or every violation found.
pub fn prepare(mut cfg: ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
    cfg.resolve()?;
    let violations = cfg.validate();
    if !violations.is_empty() {
        return Err(ConfigError(violations));
    }
    cfg.output = Some(output_dir(&cfg));
    Ok(cfg)
}

fn check_collisions(dir: &Path, names: &[&str], overwrite: bool) -> Result<(), ConfigError> {
    if overwrite {
        return Ok(());
    }
    let taken: Vec<String> = names
        .iter()
        .map(|n| dir.join(n))
        .filter(|p| p.exists())
        .map(|p| format!("output: {} already exists (pass --overwrite to replace)", p.display()))
        .collect();
    if taken.is_empty() {
        Ok(())
    } else {
        Err(ConfigError(taken))
    }
}

/// Runs a prepared config and writes its files plus the manifest.
pub fn execute(cfg: &ExperimentConfig, overwrite: bool) -> Result<RunManifest> {
    let dir = output_dir(cfg);
    let mut names = experiments::output_names(cfg);
    names.push(MANIFEST_NAME);
    check_collisions(&dir, &names, overwrite)?;

    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let outcome = experiments::run(cfg)?;
    let duration_seconds = clock.elapsed().as_secs_f64();

    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut files = Vec::new();
    for artifact in &outcome.artifacts {
        let path = dir.join(artifact.name);
        std::fs::write(&path, &artifact.bytes).with_context(|| format!("writing {}", path.display()))?;
        files.push(FileDigest::of(artifact.name, &artifact.bytes));
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        threads: rayon::current_num_threads(),
        started_unix,
        duration_seconds,
        files,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    let path = dir.join(MANIFEST_NAME);
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    println!("{}: {}", cfg.kind, outcome.summary);
    println!("wrote {} files to {} in {:.2}s", manifest.files.len() + 1, dir.display(), duration_seconds);
    Ok(manifest)
}
