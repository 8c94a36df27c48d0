//! Executes a validated config and writes CSV/JSON artifacts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{
    ac_stark_shift, bright_residual, cnot_truth_table, crosstalk_bound, dark_states, effective_rabi, eit_spectrum,
    ghz_scaling, parity_curve, raman_transfer_scan, simulate_bell, bell_report, ScanResult,
};
use crate::atom::eit_break_margin;
use crate::config::{has_errors, ExperimentConfig, Protocol};
use crate::error::{Error, Result};
use crate::units::{mhz, to_mhz, us};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub protocol: String,
    pub tool_version: String,
    /// SHA-256 of the canonical TOML form of the config.
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub wall_time_s: f64,
    /// Derived model quantities in MHz/µs.
    pub parameters: Value,
    pub fidelity: Option<f64>,
    pub populations: Value,
    pub coherence: Value,
    pub loss: Option<f64>,
    pub result: Value,
    pub files: Vec<String>,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    Sha256::digest(cfg.to_toml_string().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes via a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Header line, then `#` provenance comments, then rows.
fn stamp_csv(csv: &str, hash: &str, protocol: &str) -> String {
    let (header, rows) = csv.split_once('\n').unwrap_or((csv, ""));
    format!("{header}\n# config_sha256={hash}\n# protocol={protocol} tool_version={TOOL_VERSION}\n{rows}")
}

struct Outcome {
    fidelity: Option<f64>,
    populations: Value,
    coherence: Value,
    loss: Option<f64>,
    result: Value,
    csv: Option<String>,
}

impl Outcome {
    fn json(result: Value) -> Self {
        Outcome { fidelity: None, populations: Value::Null, coherence: Value::Null, loss: None, result, csv: None }
    }
}

fn scan_outcome(scan: ScanResult, extremum: (f64, f64), kind: &str) -> Outcome {
    let csv = scan.to_csv();
    let mut o = Outcome::json(json!({
        kind: { "location_mhz": extremum.0, "value": extremum.1 },
        "points": scan.grid.len(),
    }));
    o.csv = Some(csv);
    o
}

/// Validates, runs and writes `{stem}.json` (plus `{stem}.csv` for
/// tabular results) into `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    let diags = cfg.validate();
    if has_errors(&diags) {
        let first = diags.iter().find(|d| d.severity == crate::config::Severity::Error).expect("has errors");
        return Err(Error::Config { path: first.path.clone(), message: first.message.clone() });
    }
    let protocol = cfg.protocol()?;
    let model = cfg.gate_model()?;
    let icfg = cfg.integrator_config();
    let hash = config_hash(cfg);
    let started = Instant::now();

    let target = model.target_scheme()?;
    let parameters = json!({
        "preset": model.preset.id(),
        "raman_detuning_mhz": to_mhz(model.raman_detuning),
        "coupling_detuning_mhz": to_mhz(model.coupling_detuning),
        "tau_us": model.tau()? * 1e6,
        "raman_rabi_mhz": to_mhz(effective_rabi(&target)),
        "control_pi_us": model.control_pi()? * 1e6,
        "separation_um": model.separation,
        "method": icfg.method,
        "seed": icfg.seed,
    });

    let outcome = match protocol {
        Protocol::RamanScan => {
            let grid: Vec<f64> = cfg.scan.as_ref().expect("validated").grid().into_iter().map(mhz).collect();
            let scan = raman_transfer_scan(&model, &grid, &icfg)?;
            let best = scan.maximum();
            let mut o = scan_outcome(scan, best, "maximum");
            o.result["peak_error"] = json!(1.0 - best.1);
            o
        }
        Protocol::EitSpectrum => {
            let grid: Vec<f64> = cfg.scan.as_ref().expect("validated").grid().into_iter().map(mhz).collect();
            let tau = cfg.options.eit_tau_us.map_or(model.tau()?, us);
            let scan = eit_spectrum(&model, &grid, tau, &icfg)?;
            let best = scan.minimum();
            let mut o = scan_outcome(scan, best, "minimum");
            o.result["tau_us"] = json!(tau * 1e6);
            o
        }
        Protocol::CnotTable => {
            let t = cnot_truth_table(&model, &icfg, cfg.options.shots.unwrap_or(100))?;
            let loss: f64 = t.raw.iter().map(|row| 1.0 - row.iter().sum::<f64>()).sum::<f64>() / 4.0;
            Outcome {
                fidelity: Some(t.fidelity_raw),
                populations: json!({ "raw": t.raw, "corrected": t.corrected }),
                coherence: Value::Null,
                loss: Some(loss),
                result: json!({ "fidelity_raw": t.fidelity_raw, "fidelity_corrected": t.fidelity_corrected, "shots": t.shots }),
                csv: Some(t.to_csv()),
            }
        }
        Protocol::Bell => {
            let (sys, run) = simulate_bell(&model, &icfg)?;
            let b = bell_report(&run.state, &sys)?;
            Outcome {
                fidelity: Some(b.fidelity),
                populations: json!({ "p00": b.p00, "p11": b.p11, "rho_xx": b.rho_xx }),
                coherence: json!({ "magnitude": b.coherence, "phase": b.coherence_phase, "secondary": b.secondary }),
                loss: Some(b.loss),
                result: json!({ "bell": b, "max_trace_error": run.max_trace_error }),
                csv: None,
            }
        }
        Protocol::Parity => {
            let phis = cfg.scan.as_ref().expect("validated").grid();
            let c = parity_curve(&model, &phis, &icfg)?;
            Outcome {
                fidelity: Some(c.bell.fidelity),
                populations: json!({ "p00": c.bell.p00, "p11": c.bell.p11, "rho_xx": c.bell.rho_xx }),
                coherence: json!({ "magnitude": c.bell.coherence, "phase": c.bell.coherence_phase }),
                loss: Some(c.bell.loss),
                result: json!({ "fit": c.fit, "elements": c.elements }),
                csv: Some(c.scan.to_csv()),
            }
        }
        Protocol::Ghz => {
            let (geom, pairs) = cfg.geometry(&model).expect("validated");
            let k = geom.len() - 1;
            let r = ghz_scaling(&model, k, geom, pairs, &icfg)?;
            Outcome {
                fidelity: Some(r.fidelity),
                populations: json!({ "p_zero": r.p_zero, "p_one": r.p_one }),
                coherence: json!({ "magnitude": r.coherence, "phase": r.branch_phase }),
                loss: None,
                result: serde_json::to_value(&r).expect("report serializes"),
                csv: None,
            }
        }
        Protocol::Darkstate => {
            let op = mhz(cfg.options.probe_rabi_mhz.unwrap_or(0.0));
            let oc = mhz(cfg.options.coupling_rabi_mhz.expect("validated"));
            let d = dark_states(op, oc)?;
            Outcome::json(json!({
                "x": d.x,
                "d1": d.d1,
                "d2": d.d2,
                "basis": ["q0", "q1", "r"],
                "residual_d1": bright_residual(op, oc, &d.d1),
                "residual_d2": bright_residual(op, oc, &d.d2),
            }))
        }
        Protocol::Shifts => {
            let waist = cfg.model.waist_um.unwrap_or(3.0);
            let v = crate::atom::interaction_strength(&model.preset.interaction(), model.separation)?;
            Outcome::json(json!({
                "raman_rabi_mhz": to_mhz(effective_rabi(&target)),
                "ac_stark_shift_mhz": to_mhz(ac_stark_shift(&target)),
                "tau_us": model.tau()? * 1e6,
                "interaction_mhz": to_mhz(v),
                "eit_break_margin": eit_break_margin(&target, v)?,
                "crosstalk_bound": crosstalk_bound(waist, model.separation)?,
            }))
        }
    };

    let out_dir = cfg.output.dir.as_ref().map_or_else(|| out_dir.to_path_buf(), |d| out_dir.join(d));
    fs::create_dir_all(&out_dir)?;
    let stem = cfg.stem();
    let mut files = Vec::new();
    if let Some(csv) = &outcome.csv {
        let p: PathBuf = out_dir.join(format!("{stem}.csv"));
        write_atomic(&p, stamp_csv(csv, &hash, protocol.id()).as_bytes())?;
        files.push(p.display().to_string());
    }
    let json_path = out_dir.join(format!("{stem}.json"));
    files.push(json_path.display().to_string());
    let report = RunReport {
        protocol: protocol.id().into(),
        tool_version: TOOL_VERSION.into(),
        config_hash: hash,
        config: cfg.clone(),
        wall_time_s: started.elapsed().as_secs_f64(),
        parameters,
        fidelity: outcome.fidelity,
        populations: outcome.populations,
        coherence: outcome.coherence,
        loss: outcome.loss,
        result: outcome.result,
        files,
    };
    let body = serde_json::to_string_pretty(&report).map_err(|e| Error::Undefined(e.to_string()))?;
    write_atomic(&json_path, body.as_bytes())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_stamp_keeps_header_first() {
        let s = stamp_csv("a,b\n1,2\n", "abc", "bell");
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "a,b");
        assert!(lines[1].starts_with("# config_sha256=abc"));
        assert_eq!(lines[3], "1,2");
    }

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = std::env::temp_dir().join(format!("eitgate-atomic-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("x.csv");
        write_atomic(&p, b"hello").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"hello");
        assert!(!dir.join("x.csv.tmp").exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
