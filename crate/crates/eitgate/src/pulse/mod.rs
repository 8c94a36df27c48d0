//! Pulse envelopes and protocol timelines.
//!
//! A [`PulseSequence`] is an ordered list of [`Step`]s. Timed segments switch
//! beams on per site with an envelope; instant steps are ideal single-qubit
//! gates on the clock states (microwave rotations and phase operators).

pub mod protocols;

use std::f64::consts::PI;
use std::fmt::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::atom::Beam;
use crate::error::{Error, Result};
use crate::units::{to_mhz, to_us};

pub use protocols::{
    bell_prep_sequence, cnot_sequence, control_pi_duration, local_microwave_shift, parity_sequence, parity_tail,
    prep_and_readout_circuits, shifted_microwave_pi, z_idle_duration, BasisState, GateLayout,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    Constant,
    RaisedCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub kind: EnvelopeKind,
    pub duration: f64,
    pub peak: f64,
}

impl Envelope {
    pub fn constant(duration: f64) -> Self {
        Envelope { kind: EnvelopeKind::Constant, duration, peak: 1.0 }
    }

    pub fn raised_cosine(duration: f64) -> Self {
        Envelope { kind: EnvelopeKind::RaisedCosine, duration, peak: 1.0 }
    }

    pub fn with_peak(mut self, peak: f64) -> Self {
        self.peak = peak;
        self
    }

    /// Multiplier at local time `t`; zero outside [0, τ].
    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            EnvelopeKind::Constant => {
                if (0.0..=self.duration).contains(&t) {
                    self.peak
                } else {
                    0.0
                }
            }
            EnvelopeKind::RaisedCosine => raised_cosine(t, self.duration, self.peak),
        }
    }
}

/// peak·(1 − cos 2πt/τ)/2 on [0, τ], zero elsewhere.
pub fn raised_cosine(t: f64, tau: f64, peak: f64) -> f64 {
    if !(0.0..=tau).contains(&t) {
        return 0.0;
    }
    peak * 0.5 * (1.0 - (2.0 * PI * t / tau).cos())
}

/// Two-photon area 3τΩ/8 of a raised-cosine field pair.
pub fn two_photon_area(omega_r: f64, tau: f64) -> f64 {
    3.0 * tau * omega_r / 8.0
}

/// τ = 8π/(3Ω_R), the raised-cosine duration with two-photon area π.
pub fn duration_for_pi_area(omega_r: f64) -> Result<f64> {
    if !(omega_r > 0.0) || !omega_r.is_finite() {
        return Err(Error::param("omega_r", "effective Rabi frequency must be positive"));
    }
    Ok(8.0 * PI / (3.0 * omega_r))
}

/// One beam switched on at one site for the length of a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveDrive {
    pub site: usize,
    pub beam: Beam,
    pub envelope: Envelope,
}

/// Extra diagonal energy on one level of one site during a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelShift {
    pub site: usize,
    pub level: String,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub label: String,
    pub start: f64,
    pub duration: f64,
    pub drives: Vec<ActiveDrive>,
    #[serde(default)]
    pub shifts: Vec<LevelShift>,
}

/// Ideal operations on the clock-state subspace of a set of sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    /// Microwave rotation of resonant area θ about cos φ·X + sin φ·Y. Sites in
    /// `shifted` see an extra local detuning Δ′ = detuning_ratio·Ω.
    Rotation {
        sites: Vec<usize>,
        theta: f64,
        phase: f64,
        #[serde(default)]
        shifted: Vec<usize>,
        #[serde(default)]
        detuning_ratio: f64,
    },
    /// diag(1, e^{iφ}) on (|q0⟩, |q1⟩).
    Phase { sites: Vec<usize>, phi: f64 },
}

fn rotation_matrix(theta: f64, phase: f64, r: f64) -> [[C64; 2]; 2] {
    let g = (1.0 + r * r).sqrt();
    let half = 0.5 * theta * g;
    let (s, c) = half.sin_cos();
    let (nx, ny, nz) = (phase.cos() / g, phase.sin() / g, r / g);
    let i = C64::i();
    [
        [C64::new(c, 0.0) - i * s * nz, -i * s * C64::new(nx, -ny)],
        [-i * s * C64::new(nx, ny), C64::new(c, 0.0) + i * s * nz],
    ]
}

impl Gate {
    pub fn x(sites: &[usize], theta: f64) -> Self {
        Gate::Rotation { sites: sites.to_vec(), theta, phase: 0.0, shifted: Vec::new(), detuning_ratio: 0.0 }
    }

    pub fn z(sites: &[usize], phi: f64) -> Self {
        Gate::Phase { sites: sites.to_vec(), phi }
    }

    pub fn sites(&self) -> &[usize] {
        match self {
            Gate::Rotation { sites, .. } | Gate::Phase { sites, .. } => sites,
        }
    }

    /// 2×2 unitary on (|q0⟩, |q1⟩) acting on `site`, row-major. Sites the
    /// gate does not address get the identity.
    pub fn matrix(&self, site: usize) -> [[C64; 2]; 2] {
        let one = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
        if !self.sites().contains(&site) {
            return one;
        }
        match self {
            Gate::Rotation { theta, phase, shifted, detuning_ratio, .. } => {
                let r = if shifted.contains(&site) { *detuning_ratio } else { 0.0 };
                rotation_matrix(*theta, *phase, r)
            }
            Gate::Phase { phi, .. } => [
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
                [C64::new(0.0, 0.0), C64::from_polar(1.0, *phi)],
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Segment(Segment),
    Instant { at: f64, gate: Gate },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub name: String,
    pub steps: Vec<Step>,
}

impl PulseSequence {
    pub fn new(name: &str) -> Self {
        PulseSequence { name: name.to_string(), steps: Vec::new() }
    }

    pub fn duration(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Segment(g) => g.start + g.duration,
                Step::Instant { at, .. } => *at,
            })
            .fold(0.0, f64::max)
    }

    /// Appends a timed segment starting where the sequence currently ends.
    pub fn push_segment(&mut self, label: &str, duration: f64, drives: Vec<ActiveDrive>) -> Result<()> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::param("duration", format!("segment `{label}` needs a positive duration")));
        }
        let start = self.duration();
        self.steps.push(Step::Segment(Segment {
            label: label.to_string(),
            start,
            duration,
            drives,
            shifts: Vec::new(),
        }));
        Ok(())
    }

    pub fn push_gate(&mut self, gate: Gate) {
        let at = self.duration();
        self.steps.push(Step::Instant { at, gate });
    }

    /// Appends every step of `other`, shifted to start at the current end.
    pub fn extend(&mut self, other: &PulseSequence) {
        let t0 = self.duration();
        for s in &other.steps {
            self.steps.push(match s.clone() {
                Step::Segment(mut g) => {
                    g.start += t0;
                    Step::Segment(g)
                }
                Step::Instant { at, gate } => Step::Instant { at: at + t0, gate },
            });
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = &Segment> {
        self.steps.iter().filter_map(|s| match s {
            Step::Segment(g) => Some(g),
            _ => None,
        })
    }

    /// Checks that every addressed site exists.
    pub fn validate(&self, n_sites: usize) -> Result<()> {
        for s in &self.steps {
            let sites: Vec<usize> = match s {
                Step::Segment(g) => g
                    .drives
                    .iter()
                    .map(|d| d.site)
                    .chain(g.shifts.iter().map(|l| l.site))
                    .collect(),
                Step::Instant { gate, .. } => gate.sites().to_vec(),
            };
            if let Some(&site) = sites.iter().find(|&&i| i >= n_sites) {
                return Err(Error::UnknownSite { site, len: n_sites });
            }
        }
        Ok(())
    }

    /// Timeline CSV, one row per active drive or instant gate.
    pub fn timeline_csv(&self) -> String {
        let mut s = String::from(
            "start_us,duration_us,site,coupling,envelope,peak_scale,detuning_MHz,phase_rad\n",
        );
        for step in &self.steps {
            match step {
                Step::Segment(g) => {
                    for d in &g.drives {
                        let env = match d.envelope.kind {
                            EnvelopeKind::Constant => "constant",
                            EnvelopeKind::RaisedCosine => "raised_cosine",
                        };
                        let beam = serde_json::to_value(d.beam).ok();
                        let beam = beam.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{},0,0",
                            to_us(g.start),
                            to_us(g.duration),
                            d.site,
                            beam,
                            env,
                            d.envelope.peak
                        );
                    }
                    for l in &g.shifts {
                        let _ = writeln!(
                            s,
                            "{},{},{},shift:{},constant,1,{},0",
                            to_us(g.start),
                            to_us(g.duration),
                            l.site,
                            l.level,
                            to_mhz(l.shift)
                        );
                    }
                }
                Step::Instant { at, gate } => {
                    for &site in gate.sites() {
                        let _ = match gate {
                            Gate::Rotation { theta, phase, shifted, detuning_ratio, .. } => {
                                let r = if shifted.contains(&site) { *detuning_ratio } else { 0.0 };
                                writeln!(
                                    s,
                                    "{},0,{site},microwave_rotation,instant,{theta},{r},{phase}",
                                    to_us(*at)
                                )
                            }
                            Gate::Phase { phi, .. } => {
                                writeln!(s, "{},0,{site},phase,instant,1,0,{phi}", to_us(*at))
                            }
                        };
                    }
                },
            }
        }
        s
    }
}
