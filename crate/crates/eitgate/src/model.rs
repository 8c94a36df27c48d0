//! A gate model: one preset, an operating point and a register layout.

use serde::{Deserialize, Serialize};

use crate::atom::presets::{interaction_81d, interaction_90d, preset_6p32, preset_7p12, Preset7p12};
use crate::atom::{Beam, DecayChannel, Geometry, InteractionSpec, LevelScheme};
use crate::dynamics::CompositeSystem;
use crate::error::{Error, Result};
use crate::pulse::{
    bell_prep_sequence, cnot_sequence, control_pi_duration, duration_for_pi_area, GateLayout, PulseSequence,
};
use crate::units::mhz;

/// Scheme preset plus its beam settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id")]
pub enum PresetSpec {
    /// Intensity scales relative to the reference powers.
    #[serde(rename = "6p32_table1")]
    P6p32 { raman_power_scale: f64, coupling_power_scale: f64 },
    #[serde(rename = "7p12_figS2")]
    P7p12(Preset7p12),
}

impl PresetSpec {
    pub fn id(&self) -> &'static str {
        match self {
            PresetSpec::P6p32 { .. } => "6p32_table1",
            PresetSpec::P7p12(_) => "7p12_figS2",
        }
    }

    pub fn scheme(&self) -> Result<LevelScheme> {
        match self {
            PresetSpec::P6p32 { raman_power_scale, coupling_power_scale } => {
                if !(*raman_power_scale >= 0.0 && *coupling_power_scale >= 0.0) {
                    return Err(Error::param("power_scale", "intensity scales must be non-negative"));
                }
                Ok(preset_6p32(*raman_power_scale, *coupling_power_scale))
            }
            PresetSpec::P7p12(p) => preset_7p12(p),
        }
    }

    pub fn interaction(&self) -> InteractionSpec {
        match self {
            PresetSpec::P6p32 { .. } => interaction_81d(),
            PresetSpec::P7p12(_) => interaction_90d(),
        }
    }
}

/// How the control atom is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlModel {
    /// q0, q1, r, d with an effective |q1⟩ ↔ |r⟩ drive.
    Reduced,
    /// Same ladder as the target, so the coupling laser can scatter from r.
    FullLadder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateModel {
    pub preset: PresetSpec,
    /// δ in rad/s.
    pub raman_detuning: f64,
    /// Δ_c in rad/s.
    pub coupling_detuning: f64,
    /// Adiabatic pulse length; `None` uses the area-π value.
    pub tau: Option<f64>,
    pub control: ControlModel,
    pub coupling_on_control: bool,
    /// Idle time between the CNOT segments.
    pub gap: f64,
    /// Control-target distance in µm.
    pub separation: f64,
    /// Pure dephasing of r, rad/s.
    pub rydberg_dephasing: f64,
    /// Extra r → d loss on the reduced control, rad/s.
    pub control_scattering: f64,
}

impl GateModel {
    /// 6P3/2 at the reference powers, δ/2π = 0.28 MHz, Δ_c/2π = 1.8 MHz, 6 µm.
    pub fn table_i() -> Self {
        GateModel {
            preset: PresetSpec::P6p32 { raman_power_scale: 1.0, coupling_power_scale: 1.0 },
            raman_detuning: mhz(0.28),
            coupling_detuning: mhz(1.8),
            tau: None,
            control: ControlModel::Reduced,
            coupling_on_control: false,
            gap: 0.0,
            separation: 6.0,
            rydberg_dephasing: 0.0,
            control_scattering: 0.0,
        }
    }

    /// 7P1/2 at the reference powers with a 4 µm control-target spacing.
    pub fn p7() -> Self {
        GateModel {
            preset: PresetSpec::P7p12(Preset7p12::default()),
            raman_detuning: mhz(1.6),
            coupling_detuning: mhz(0.5),
            separation: 4.0,
            ..GateModel::table_i()
        }
    }

    pub fn with_detunings(mut self, raman: f64, coupling: f64) -> Self {
        self.raman_detuning = raman;
        self.coupling_detuning = coupling;
        self
    }

    /// The bare preset with the operating-point detunings applied.
    pub fn target_scheme(&self) -> Result<LevelScheme> {
        let mut s = self.preset.scheme()?.with_detunings(self.raman_detuning, self.coupling_detuning);
        if self.rydberg_dephasing > 0.0 {
            s.decays.push(DecayChannel { from: "r".into(), to: "r".into(), rate: self.rydberg_dephasing });
        }
        Ok(s)
    }

    pub fn control_scheme(&self) -> Result<LevelScheme> {
        let mut s = self.preset.scheme()?.with_detunings(0.0, 0.0);
        if self.rydberg_dephasing > 0.0 {
            s.decays.push(DecayChannel { from: "r".into(), to: "r".into(), rate: self.rydberg_dephasing });
        }
        match self.control {
            ControlModel::FullLadder => Ok(s),
            ControlModel::Reduced => {
                if self.coupling_on_control {
                    return Err(Error::param(
                        "control",
                        "coupling light on the control needs the full-ladder control model",
                    ));
                }
                let mut s = s.restrict(&["q0", "q1", "r", "d"])?;
                if self.control_scattering > 0.0 {
                    s.add_decay("r", "d", self.control_scattering);
                }
                Ok(s)
            }
        }
    }

    /// Peak effective Raman Rabi frequency of the target.
    pub fn raman_rabi(&self) -> Result<f64> {
        Ok(crate::analysis::effective_rabi(&self.target_scheme()?))
    }

    pub fn tau(&self) -> Result<f64> {
        match self.tau {
            Some(t) => Ok(t),
            None => duration_for_pi_area(self.raman_rabi()?),
        }
    }

    pub fn control_pi(&self) -> Result<f64> {
        let s = self.control_scheme()?;
        let omega = s.couplings_of(Beam::Rydberg).map(|c| c.peak_rabi).fold(0.0, f64::max);
        control_pi_duration(omega)
    }

    pub fn layout(&self, k: usize) -> GateLayout {
        GateLayout { coupling_on_control: self.coupling_on_control, gap: self.gap, ..GateLayout::star(k) }
    }

    /// Control on site 0 and k targets. With `target_pairs` false the
    /// target-target interaction terms are dropped.
    pub fn register(&self, geometry: Geometry, target_pairs: bool) -> Result<CompositeSystem> {
        let k = geometry.len().saturating_sub(1);
        if k == 0 {
            return Err(Error::param("geometry", "register needs a control and at least one target"));
        }
        let mut sites = vec![self.control_scheme()?];
        let t = self.target_scheme()?;
        sites.extend(std::iter::repeat_n(t, k));
        CompositeSystem::with_pairs(sites, geometry, self.preset.interaction(), |i, _| target_pairs || i == 0)
    }

    /// Control and one target at the model separation.
    pub fn pair(&self) -> Result<CompositeSystem> {
        self.register(Geometry::pair(self.separation), true)
    }

    /// A lone target atom.
    pub fn single_target(&self) -> Result<CompositeSystem> {
        CompositeSystem::new(vec![self.target_scheme()?], Geometry { positions: vec![[0.0, 0.0]] }, self.preset.interaction())
    }

    pub fn cnot(&self, k: usize) -> Result<PulseSequence> {
        cnot_sequence(&self.layout(k), self.tau()?, self.control_pi()?)
    }

    pub fn bell_prep(&self) -> Result<PulseSequence> {
        bell_prep_sequence(&self.layout(1), self.tau()?, self.control_pi()?)
    }
}
