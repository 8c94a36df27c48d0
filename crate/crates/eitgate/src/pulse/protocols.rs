//! Named protocol timelines.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ActiveDrive, Envelope, Gate, PulseSequence};
use crate::atom::Beam;
use crate::error::{Error, Result};

/// Which sites play which role in a gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateLayout {
    pub n_sites: usize,
    pub control: usize,
    pub targets: Vec<usize>,
    /// Coupling laser also illuminates the control during the target block.
    pub coupling_on_control: bool,
    /// Idle time between the three CNOT segments.
    pub gap: f64,
}

impl GateLayout {
    /// Control on site 0, targets on sites 1..=k.
    pub fn star(k: usize) -> Self {
        GateLayout {
            n_sites: k + 1,
            control: 0,
            targets: (1..=k).collect(),
            coupling_on_control: false,
            gap: 0.0,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n_sites < 2 || self.targets.is_empty() {
            return Err(Error::param("layout", "a gate needs a control and at least one target"));
        }
        if self.control >= self.n_sites || self.targets.iter().any(|&t| t >= self.n_sites) {
            return Err(Error::param("layout", "site index out of range"));
        }
        if self.targets.contains(&self.control) {
            return Err(Error::param("layout", "control cannot also be a target"));
        }
        if !(self.gap >= 0.0) {
            return Err(Error::param("gap", "gap must be non-negative"));
        }
        Ok(())
    }
}

/// π/Ω_r for the effective |q1⟩ ↔ |r⟩ control drive.
pub fn control_pi_duration(rydberg_rabi: f64) -> Result<f64> {
    if !(rydberg_rabi > 0.0) || !rydberg_rabi.is_finite() {
        return Err(Error::param("rydberg_rabi", "Rydberg Rabi frequency must be positive"));
    }
    Ok(PI / rydberg_rabi)
}

/// Control π, target Raman+EIT block of length τ, control π.
pub fn cnot_sequence(layout: &GateLayout, tau: f64, control_pi: f64) -> Result<PulseSequence> {
    layout.check()?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::param("tau", "pulse duration must be positive"));
    }
    if !(control_pi > 0.0) || !control_pi.is_finite() {
        return Err(Error::param("control_pi", "control π duration must be positive"));
    }
    let mut seq = PulseSequence::new("cnot");
    let pi = vec![ActiveDrive {
        site: layout.control,
        beam: Beam::Rydberg,
        envelope: Envelope::constant(control_pi),
    }];
    seq.push_segment("control_pi_up", control_pi, pi.clone())?;
    if layout.gap > 0.0 {
        seq.push_segment("gap", layout.gap, Vec::new())?;
    }
    let mut block = Vec::new();
    for &t in &layout.targets {
        block.push(ActiveDrive { site: t, beam: Beam::Probe, envelope: Envelope::raised_cosine(tau) });
        block.push(ActiveDrive { site: t, beam: Beam::Coupling, envelope: Envelope::constant(tau) });
    }
    if layout.coupling_on_control {
        block.push(ActiveDrive {
            site: layout.control,
            beam: Beam::Coupling,
            envelope: Envelope::constant(tau),
        });
    }
    seq.push_segment("target_block", tau, block)?;
    if layout.gap > 0.0 {
        seq.push_segment("gap", layout.gap, Vec::new())?;
    }
    seq.push_segment("control_pi_down", control_pi, pi)?;
    Ok(seq)
}

/// Local X(π/2) and Z(π) on the target, global X(π/2), then the CNOT.
///
/// The target rotations cancel, leaving the control in (|0⟩ − i|1⟩)/√2, so the
/// ideal output is |Φ⁺⟩ up to a local phase.
pub fn bell_prep_sequence(layout: &GateLayout, tau: f64, control_pi: f64) -> Result<PulseSequence> {
    if layout.n_sites != 2 || layout.targets.len() != 1 {
        return Err(Error::param("layout", "Bell preparation needs exactly two sites"));
    }
    let t = layout.targets[0];
    let mut seq = PulseSequence::new("bell_prep");
    let all: Vec<usize> = (0..layout.n_sites).collect();
    seq.push_gate(Gate::x(&[t], PI / 2.0));
    seq.push_gate(Gate::z(&[t], PI));
    seq.push_gate(Gate::x(&all, PI / 2.0));
    seq.extend(&cnot_sequence(layout, tau, control_pi)?);
    Ok(seq)
}

/// Appends a global Z(φ) and a global X(π/2) to a Bell-preparation sequence.
pub fn parity_sequence(bell: &PulseSequence, n_sites: usize, phi: f64) -> Result<PulseSequence> {
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(Error::param("phi", "phase must lie in [0, 2π)"));
    }
    let mut seq = bell.clone();
    seq.name = "parity".into();
    seq.steps.extend(parity_tail(n_sites, phi).steps);
    let t = bell.duration();
    for s in seq.steps.iter_mut().skip(bell.steps.len()) {
        if let super::Step::Instant { at, .. } = s {
            *at = t;
        }
    }
    Ok(seq)
}

/// Just the analysis rotations: global Z(φ) then global X(π/2).
pub fn parity_tail(n_sites: usize, phi: f64) -> PulseSequence {
    let all: Vec<usize> = (0..n_sites).collect();
    let mut seq = PulseSequence::new("parity_tail");
    seq.push_gate(Gate::z(&all, phi));
    seq.push_gate(Gate::x(&all, PI / 2.0));
    seq
}

/// Idle duration realising Z(φ) under a constant detuning.
pub fn z_idle_duration(phi: f64, idle_detuning: f64) -> Result<f64> {
    if idle_detuning == 0.0 {
        return Err(Error::param("idle_detuning", "a phase idle needs a nonzero detuning"));
    }
    Ok(phi / idle_detuning.abs())
}

/// Local shift |Δ′| = Ω√(16π²/θ² − 1) that turns a resonant rotation of area θ
/// into a full 4π cycle on the shifted atom.
pub fn local_microwave_shift(theta: f64, omega: f64) -> Result<f64> {
    if !(theta > 0.0) || theta > 4.0 * PI + 1e-12 {
        return Err(Error::param("theta", "rotation area must lie in (0, 4π]"));
    }
    let x = 16.0 * PI * PI / (theta * theta) - 1.0;
    Ok(omega * x.max(0.0).sqrt())
}

/// Global microwave π pulse of length π/Ω as a timed segment. Sites in
/// `shifted` get |q1⟩ raised by √15·Ω and so complete a 4π cycle instead.
pub fn shifted_microwave_pi(n_sites: usize, shifted: &[usize], omega: f64) -> Result<PulseSequence> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::param("omega", "microwave Rabi frequency must be positive"));
    }
    if let Some(&site) = shifted.iter().find(|&&s| s >= n_sites) {
        return Err(Error::UnknownSite { site, len: n_sites });
    }
    let duration = PI / omega;
    let delta = local_microwave_shift(PI, omega)?;
    let mut seq = PulseSequence::new("shifted_microwave_pi");
    let drives = (0..n_sites)
        .map(|site| ActiveDrive { site, beam: Beam::Microwave, envelope: Envelope::constant(duration) })
        .collect();
    seq.push_segment("microwave_pi", duration, drives)?;
    if let Some(super::Step::Segment(seg)) = seq.steps.last_mut() {
        seg.shifts = shifted
            .iter()
            .map(|&site| super::LevelShift { site, level: "q1".into(), shift: delta })
            .collect();
    }
    Ok(seq)
}

/// Two-qubit computational basis state |control, target⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisState {
    S00,
    S01,
    S10,
    S11,
}

impl BasisState {
    pub const ALL: [BasisState; 4] = [BasisState::S00, BasisState::S01, BasisState::S10, BasisState::S11];

    pub fn bits(self) -> (usize, usize) {
        match self {
            BasisState::S00 => (0, 0),
            BasisState::S01 => (0, 1),
            BasisState::S10 => (1, 0),
            BasisState::S11 => (1, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BasisState::S00 => "00",
            BasisState::S01 => "01",
            BasisState::S10 => "10",
            BasisState::S11 => "11",
        }
    }
}

/// Microwave circuits taking |00⟩ to `basis` and back.
///
/// Site 0 is the control. The "control X(4π)" step is the global microwave
/// π pulse with the control shifted by √15·Ω, so it completes a 4π cycle
/// while the target flips. Readout is the same steps in reverse order.
pub fn prep_and_readout_circuits(basis: BasisState) -> (PulseSequence, PulseSequence) {
    let shifted = local_microwave_shift(PI, 1.0).expect("θ = π is in range");
    let global_pi = |seq: &mut PulseSequence| seq.push_gate(Gate::x(&[0, 1], PI));
    let target_only_pi = |seq: &mut PulseSequence| {
        seq.push_gate(Gate::Rotation {
            sites: vec![0, 1],
            theta: PI,
            phase: 0.0,
            shifted: vec![0],
            detuning_ratio: shifted,
        })
    };
    let mut prep = PulseSequence::new(&format!("prep_{}", basis.label()));
    match basis {
        BasisState::S00 => {}
        BasisState::S01 => target_only_pi(&mut prep),
        BasisState::S10 => {
            global_pi(&mut prep);
            target_only_pi(&mut prep);
        }
        BasisState::S11 => global_pi(&mut prep),
    }
    let mut readout = PulseSequence::new(&format!("readout_{}", basis.label()));
    for s in prep.steps.iter().rev() {
        if let super::Step::Instant { gate, .. } = s {
            readout.push_gate(gate.clone());
        }
    }
    (prep, readout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{khz, mhz};

    #[test]
    fn cnot_structure() {
        let tpi = control_pi_duration(mhz(1.77)).unwrap();
        assert!((tpi * 1e9 - 282.5).abs() < 0.1);
        let seq = cnot_sequence(&GateLayout::star(1), 2e-6, tpi).unwrap();
        let segs: Vec<_> = seq.segments().collect();
        assert_eq!(segs.len(), 3);
        assert!((segs[1].duration - 2e-6).abs() < 1e-18);
        assert!((segs[2].start - segs[1].start - 2e-6).abs() < 1e-18);
        assert!(cnot_sequence(&GateLayout::star(1), 0.0, tpi).is_err());
        assert!(control_pi_duration(0.0).is_err());
    }

    #[test]
    fn microwave_shift_examples() {
        let d = local_microwave_shift(PI, khz(3.31)).unwrap();
        assert!((d / khz(1.0) - 12.82).abs() < 0.01);
        assert!((local_microwave_shift(2.0 * PI, 1.0).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert!(local_microwave_shift(4.0 * PI, 1.0).unwrap().abs() < 1e-12);
        assert!(local_microwave_shift(5.0 * PI, 1.0).is_err());
    }

    #[test]
    fn parity_counts() {
        let layout = GateLayout::star(1);
        let bell = bell_prep_sequence(&layout, 2e-6, 2.8e-7).unwrap();
        let p = parity_sequence(&bell, 2, 1.0).unwrap();
        assert_eq!(p.steps.len(), bell.steps.len() + 2);
        assert!(parity_sequence(&bell, 2, 2.0 * PI).is_err());
        assert_eq!(z_idle_duration(0.0, 1.0).unwrap(), 0.0);
        let a = z_idle_duration(PI, 3.0).unwrap();
        let b = z_idle_duration(2.0 * PI, 3.0).unwrap();
        assert!((2.0 * a - b).abs() < 1e-15);
    }

    #[test]
    fn prep_circuits() {
        let (p, r) = prep_and_readout_circuits(BasisState::S00);
        assert!(p.steps.is_empty() && r.steps.is_empty());
        let (p, r) = prep_and_readout_circuits(BasisState::S10);
        assert_eq!(p.steps.len(), 2);
        assert_eq!(r.steps.len(), 2);
    }
}
