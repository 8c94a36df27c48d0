//! One-dimensional scans: Raman transfer against δ and EIT spectra
//! against Δ_c.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evolve, Evolution};
use crate::atom::Beam;
use crate::dynamics::{IntegratorConfig, StateVector};
use crate::error::{Error, Result};
use crate::model::GateModel;
use crate::pulse::{ActiveDrive, Envelope, PulseSequence};
use crate::units::to_mhz;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub axis: String,
    pub unit: String,
    pub observable: String,
    /// Strictly monotone, in `unit`.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl ScanResult {
    pub fn new(axis: &str, unit: &str, observable: &str, grid: Vec<f64>, values: Vec<f64>, errors: Vec<f64>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::param("grid", "scan grid is empty"));
        }
        if values.len() != grid.len() || errors.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        let up = grid.windows(2).all(|w| w[1] > w[0]);
        let down = grid.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::param("grid", "scan grid must be strictly monotone"));
        }
        Ok(ScanResult { axis: axis.into(), unit: unit.into(), observable: observable.into(), grid, values, errors })
    }

    /// Grid minimum refined by a parabola through its neighbours.
    pub fn minimum(&self) -> (f64, f64) {
        self.extremum(|a, b| a < b)
    }

    pub fn maximum(&self) -> (f64, f64) {
        self.extremum(|a, b| a > b)
    }

    fn extremum(&self, better: impl Fn(f64, f64) -> bool) -> (f64, f64) {
        let mut k = 0;
        for i in 1..self.values.len() {
            if better(self.values[i], self.values[k]) {
                k = i;
            }
        }
        if k == 0 || k + 1 == self.values.len() {
            return (self.grid[k], self.values[k]);
        }
        let (x0, x1, x2) = (self.grid[k - 1], self.grid[k], self.grid[k + 1]);
        let (y0, y1, y2) = (self.values[k - 1], self.values[k], self.values[k + 1]);
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let a = (d12 - d01) / (x2 - x0);
        if a == 0.0 {
            return (x1, y1);
        }
        // Newton form p(x) = y0 + d01(x − x0) + a(x − x0)(x − x1).
        let xv = (0.5 * (x0 + x1) - d01 / (2.0 * a)).clamp(x0.min(x2), x0.max(x2));
        let yv = y0 + d01 * (xv - x0) + a * (xv - x0) * (xv - x1);
        (xv, yv)
    }

    /// Header line then one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}_{},{},error\n", self.axis, self.unit, self.observable);
        for ((x, y), e) in self.grid.iter().zip(&self.values).zip(&self.errors) {
            s.push_str(&format!("{x:?},{y:?},{e:?}\n"));
        }
        s
    }
}

/// MHz rounded to 1e-9 so grid columns print cleanly.
fn grid_mhz(w: f64) -> f64 {
    (to_mhz(w) * 1e9).round() / 1e9
}

fn single_pulse(tau: f64, coupling: bool) -> Result<PulseSequence> {
    let mut drives = vec![ActiveDrive { site: 0, beam: Beam::Probe, envelope: Envelope::raised_cosine(tau) }];
    if coupling {
        drives.push(ActiveDrive { site: 0, beam: Beam::Coupling, envelope: Envelope::constant(tau) });
    }
    let mut seq = PulseSequence::new("target_pulse");
    seq.push_segment("target_block", tau, drives)?;
    Ok(seq)
}

/// P(q0) after one adiabatic pulse on a lone target started in q1.
fn transfer(model: &GateModel, probe_scale: f64, tau: f64, coupling: bool, cfg: &IntegratorConfig) -> Result<(f64, f64)> {
    let mut scheme = model.target_scheme()?.scale_beam(Beam::Probe, probe_scale);
    if !coupling {
        scheme = scheme.set_beam_rabi(Beam::Coupling, 0.0);
    }
    let sys = crate::dynamics::CompositeSystem::new(
        vec![scheme],
        crate::atom::Geometry { positions: vec![[0.0, 0.0]] },
        model.preset.interaction(),
    )?;
    let psi = StateVector::basis(sys.dim(), sys.index_of_labels(&["q1"])?);
    let out: Evolution = evolve(&sys, &single_pulse(tau, coupling)?, &psi, cfg)?;
    Ok(out.projection(&[sys.index_of_labels(&["q0"])?]))
}

/// Transfer q1 → q0 against the Raman detuning δ (rad/s) with the coupling
/// laser off.
pub fn raman_transfer_scan(model: &GateModel, deltas: &[f64], cfg: &IntegratorConfig) -> Result<ScanResult> {
    let tau = model.tau()?;
    let points: Vec<Result<(f64, f64)>> = deltas
        .par_iter()
        .map(|&d| transfer(&model.clone().with_detunings(d, model.coupling_detuning), 1.0, tau, false, cfg))
        .collect();
    let (values, errors) = points.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    ScanResult::new("raman_detuning", "mhz", "transfer", deltas.iter().map(|&d| grid_mhz(d)).collect(), values, errors)
}

/// P(q0) for a target started in q1 against the coupling detuning Δ_c
/// (rad/s), for a pulse of length τ.
///
/// The probe intensity and δ are scaled by τ_π/τ so the pulse keeps area π.
pub fn eit_spectrum(model: &GateModel, coupling_detunings: &[f64], tau: f64, cfg: &IntegratorConfig) -> Result<ScanResult> {
    if !(tau > 0.0) {
        return Err(Error::param("tau", "pulse duration must be positive"));
    }
    let scale = model.tau()? / tau;
    let points: Vec<Result<(f64, f64)>> = coupling_detunings
        .par_iter()
        .map(|&dc| {
            let m = model.clone().with_detunings(model.raman_detuning * scale, dc);
            transfer(&m, scale, tau, true, cfg)
        })
        .collect();
    let (values, errors) = points.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    ScanResult::new(
        "coupling_detuning",
        "mhz",
        "p0",
        coupling_detunings.iter().map(|&d| grid_mhz(d)).collect(),
        values,
        errors,
    )
}
