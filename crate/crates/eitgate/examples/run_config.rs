//! Runs a bundled TOML config through the same path as the CLI.
//!
//! `cargo run --release --example run_config -- configs/fig_s1c.toml`

use std::path::PathBuf;

use eitgate::config::ExperimentConfig;
use eitgate::runner::run;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/fig_s1c.toml".into());
    let src = std::fs::read_to_string(&path).expect("config readable");
    let cfg = match ExperimentConfig::from_toml_str(&src) {
        Ok(c) => c,
        Err(d) => {
            eprintln!("{d}");
            std::process::exit(2);
        }
    };
    for d in cfg.validate() {
        eprintln!("{d}");
    }
    let out = std::env::temp_dir().join("eitgate-example");
    match run(&cfg, &PathBuf::from(&out)) {
        Ok(r) => {
            println!("{} -> fidelity {:?}, hash {}", r.protocol, r.fidelity, &r.config_hash[..12]);
            for f in r.files {
                println!("  {f}");
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    }
}
