//! The `run` subcommand: experiment grid, CSV and manifest.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qldpc_gkp::experiment::CSV_HEADER;
use qldpc_gkp::{CircuitCheckMatrix, Execution, MemoryExperiment, PointResult};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Serialize)]
struct FileHash {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool_version: &'static str,
    config: &'a RunConfig,
    code_name: &'a str,
    h_circ: [usize; 2],
    inputs: Vec<FileHash>,
    results: FileHash,
    points_completed: usize,
    /// Seconds since the Unix epoch; the only nondeterministic field.
    finished_at: u64,
}

fn hash_file(path: &Path) -> Result<FileHash> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(FileHash {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

pub fn run(config: &RunConfig, config_path: &Path, exec: Execution) -> Result<()> {
    config.validate()?;
    let bundle = crate::load_bundle(&config.code)?;
    let schedules = bundle.schedules(&config.schedule)?;
    let ccm = CircuitCheckMatrix::build(&bundle.code, &schedules, config.rounds, exec)?;
    let h_circ = [ccm.rows(), ccm.columns()];
    let code_name = bundle.manifest.name.clone();
    let exp = MemoryExperiment::new(bundle.code.clone(), ccm, config.decoder)?;

    std::fs::create_dir_all(&config.out).with_context(|| format!("cannot create {}", config.out.display()))?;
    let csv_path = config.out.join("results.csv");
    let mut csv = File::create(&csv_path).with_context(|| format!("cannot create {}", csv_path.display()))?;
    writeln!(csv, "{CSV_HEADER}")?;

    // rows are flushed as points finish so an interrupted run keeps them
    let mut completed = 0;
    for &db in &config.squeezing_db {
        for &mode in &config.modes {
            let estimate = exp.run_point(db, mode, config.failure_target, config.trial_cap, config.seed, exec)?;
            let row = PointResult {
                code: code_name.clone(),
                mode,
                squeezing_db: db,
                estimate,
                seed: config.seed,
            };
            writeln!(csv, "{}", row.csv_row())?;
            csv.flush()?;
            completed += 1;
            eprintln!(
                "{db} dB {:<8} fer {:.3e} ({}/{})",
                mode.name(),
                estimate.fer,
                estimate.failures,
                estimate.trials
            );
        }
    }
    drop(csv);

    let mut inputs = vec![hash_file(config_path)?, hash_file(&bundle.root.join("manifest.json"))?];
    let referenced: Vec<PathBuf> = bundle.referenced_files();
    for f in &referenced {
        inputs.push(hash_file(f)?);
    }
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        config,
        code_name: &code_name,
        h_circ,
        inputs,
        results: hash_file(&csv_path)?,
        points_completed: completed,
        finished_at: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    };
    let manifest_path = config.out.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("cannot write {}", manifest_path.display()))?;
    println!("wrote {} and {}", csv_path.display(), manifest_path.display());
    Ok(())
}
