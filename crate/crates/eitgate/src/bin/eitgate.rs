//! Command-line runner. Exit codes: 0 ok, 1 other failure, 2 invalid
//! config, 3 integrator failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eitgate::atom::PRESET_CATALOG;
use eitgate::config::{has_errors, ExperimentConfig};
use eitgate::runner::run;
use eitgate::Error;

#[derive(Parser)]
#[command(name = "eitgate", version, about = "EIT Rydberg gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config and write CSV/JSON outputs.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trajectories: Option<usize>,
        /// Worker threads; 0 lets rayon decide.
        #[arg(long, env = "EITGATE_THREADS", default_value_t = 0)]
        threads: usize,
    },
    /// Print diagnostics for a config without running it.
    Validate { config: PathBuf },
    /// List the built-in presets.
    Presets,
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    let src = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(2)
    })?;
    ExperimentConfig::from_toml_str(&src).map_err(|d| {
        eprintln!("{}: {d}", path.display());
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for (id, what) in PRESET_CATALOG {
                println!("{id:<14} {what}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let diags = cfg.validate();
            for d in &diags {
                println!("{d}");
            }
            if has_errors(&diags) {
                ExitCode::from(2)
            } else {
                println!("ok");
                ExitCode::SUCCESS
            }
        }
        Command::Run { config, out_dir, seed, trajectories, threads } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if cfg.output.stem.is_none() {
                cfg.output.stem = config.file_stem().map(|s| s.to_string_lossy().into_owned());
            }
            if let Some(n) = trajectories {
                cfg.integrator.trajectories = n;
            }
            let diags = cfg.validate();
            for d in &diags {
                eprintln!("{d}");
            }
            if has_errors(&diags) {
                return ExitCode::from(2);
            }
            if threads > 0 {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
                    eprintln!("error: thread pool: {e}");
                    return ExitCode::FAILURE;
                }
            }
            match run(&cfg, &out_dir) {
                Ok(report) => {
                    if let Some(f) = report.fidelity {
                        println!("fidelity {f:.6}");
                    }
                    for f in &report.files {
                        println!("wrote {f}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e @ Error::Integrator { .. }) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
                Err(e @ Error::Config { .. }) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
