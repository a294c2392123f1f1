mod config;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qldpc_gkp::io::CodeBundle;
use qldpc_gkp::{Basis, CircuitCheckMatrix, Execution, FaultKind};

use crate::config::RunConfig;

#[derive(Parser)]
#[command(name = "qldpc-gkp", version, about = "Circuit-level decoding of GKP-qubit LDPC codes with analog soft information")]
struct Cli {
    /// Worker threads; 1 runs sequentially, 0 uses all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the circuit-level check matrix and export it with its column sidecar.
    Build {
        /// Code bundle directory or manifest.
        code: PathBuf,
        #[arg(long, default_value = "greedy")]
        schedule: String,
        #[arg(long, default_value_t = 3)]
        rounds: usize,
        /// Output directory; nothing is written without it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a memory experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check code bundles: CSS commutation, declared parameters and schedules.
    Validate {
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
    },
}

fn execution(workers: Option<usize>) -> Execution {
    match workers {
        None | Some(0) => Execution::Auto,
        Some(w) => Execution::with_workers(w),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = execution(cli.workers);
    let result = match cli.command {
        Command::Build {
            code,
            schedule,
            rounds,
            out,
        } => build(&code, &schedule, rounds, out.as_deref(), exec),
        Command::Run { config, seed, out } => RunConfig::load(&config).and_then(|mut c| {
            if let Some(seed) = seed {
                c.seed = seed;
            }
            if let Some(out) = out {
                c.out = out;
            }
            run::run(&c, &config, exec)
        }),
        Command::Validate { bundles } => validate(&bundles),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_bundle(path: &Path) -> Result<CodeBundle> {
    CodeBundle::load(path).with_context(|| format!("cannot load code bundle {}", path.display()))
}

fn build(code: &Path, schedule: &str, rounds: usize, out: Option<&Path>, exec: Execution) -> Result<()> {
    let bundle = load_bundle(code)?;
    let schedules = bundle.schedules(schedule)?;
    let ccm = CircuitCheckMatrix::build(&bundle.code, &schedules, rounds, exec)?;
    let mem = ccm.circuit();
    let c = &bundle.code;
    println!("code {} [[{}, {}, {}]]", bundle.manifest.name, c.n(), c.k(), c.d().map_or("?".into(), |d| d.to_string()));
    for basis in [Basis::X, Basis::Z] {
        if let Some(circ) = mem.circuit(basis) {
            println!(
                "{}-check circuit: depth {}, {} CNOTs, {} locations per round",
                basis.name(),
                circ.depth(),
                circ.cnot_count(),
                circ.location_count()
            );
        }
    }
    println!("rounds {rounds}, fault locations {}", mem.locations().len());
    let counts = mem.kind_counts();
    for kind in FaultKind::ALL {
        println!("  {:<13}{}", kind.name(), counts.get(&kind).copied().unwrap_or(0));
    }
    println!("H_circ {} x {}", ccm.rows(), ccm.columns());
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let (matrix, sidecar) = (dir.join("hcirc.txt"), dir.join("hcirc_columns.txt"));
        ccm.export(&matrix, &sidecar)?;
        println!("wrote {} and {}", matrix.display(), sidecar.display());
    }
    Ok(())
}

fn validate(bundles: &[PathBuf]) -> Result<()> {
    let mut failed = 0;
    for path in bundles {
        let outcome = load_bundle(path).and_then(|b| {
            let c = &b.code;
            let mut line = format!("{}: [[{}, {}]]", b.manifest.name, c.n(), c.k());
            for name in b.schedule_names() {
                let s = b.schedules(name)?;
                let depth = |x: &Option<qldpc_gkp::Schedule>| x.as_ref().map_or(0, |s| s.depth());
                line += &format!(", {name} (depth X {} / Z {})", depth(&s.x), depth(&s.z));
            }
            Ok(line)
        });
        match outcome {
            Ok(line) => println!("ok {line}"),
            Err(e) => {
                failed += 1;
                println!("FAILED {}: {e:#}", path.display());
            }
        }
    }
    anyhow::ensure!(failed == 0, "{failed} of {} bundles failed validation", bundles.len());
    Ok(())
}
