//! Control-atom round trip |1⟩ → |r⟩ → |1⟩ with an idle in the Rydberg state.

use serde::{Deserialize, Serialize};

use crate::atom::{Beam, Geometry};
use crate::dynamics::{evolve_dense, CompositeSystem, DensityMatrix, IntegratorConfig};
use crate::error::Result;
use crate::model::GateModel;
use crate::pulse::{ActiveDrive, Envelope, PulseSequence};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwellReport {
    /// 1 − P(q1) after the second π pulse.
    pub return_loss: f64,
    pub leakage: f64,
    pub rydberg_residual: f64,
    pub p0: f64,
}

/// π, idle of length `gap` (coupling light on the control if
/// `coupling_on`), π, on a lone control atom started in q1.
pub fn control_dwell(model: &GateModel, gap: f64, coupling_on: bool, cfg: &IntegratorConfig) -> Result<DwellReport> {
    let scheme = model.control_scheme()?;
    let sys = CompositeSystem::new(vec![scheme], Geometry { positions: vec![[0.0, 0.0]] }, model.preset.interaction())?;
    let pi = model.control_pi()?;
    let drive = |d: f64| vec![ActiveDrive { site: 0, beam: Beam::Rydberg, envelope: Envelope::constant(d) }];
    let mut seq = PulseSequence::new("control_dwell");
    seq.push_segment("control_pi_up", pi, drive(pi))?;
    if gap > 0.0 {
        let idle = if coupling_on {
            vec![ActiveDrive { site: 0, beam: Beam::Coupling, envelope: Envelope::constant(gap) }]
        } else {
            Vec::new()
        };
        seq.push_segment("dwell", gap, idle)?;
    }
    seq.push_segment("control_pi_down", pi, drive(pi))?;
    let i = |l: &str| sys.index_of_labels(&[l]);
    let run = evolve_dense(&DensityMatrix::basis(sys.dim(), i("q1")?), &sys, &seq, cfg)?;
    let p = |l: &str| -> Result<f64> { Ok(run.state.get(i(l)?, i(l)?).re) };
    Ok(DwellReport { return_loss: 1.0 - p("q1")?, leakage: p("d")?, rydberg_residual: p("r")?, p0: p("q0")? })
}
