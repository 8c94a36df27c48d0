//! Caesium level schemes used by the gate protocols.
//!
//! Rabi frequencies are calibrated reference data scaled by √(intensity
//! ratio); no dipole matrix elements are computed from first principles.
//! Relative coupling signs come from the angular factors in [`super::angular`].

use serde::{Deserialize, Serialize};

use super::angular::{hyperfine_dipole_factor, rydberg_dipole_factor};
use super::branching::intermediate_decays;
use super::{
    AngularStructure, Beam, Category, DriveCoupling, InteractionSpec, Level, LevelScheme,
    LightShift,
};
use crate::error::{Error, Result};
use crate::units::{ghz, khz, mhz};

/// Preset identifiers with the figure each one reproduces.
pub const PRESET_CATALOG: &[(&str, &str)] = &[
    ("6p32_table1", "6P3/2 ladder to 81D5/2 at the reference calibration"),
    ("7p12_figS2", "7P1/2 ladder to 90D3/2, 500 ns protocol"),
];

/// Cs clock splitting.
pub const CS_QUBIT_SPLITTING_GHZ: f64 = 9.192_631_770;
const CS_NUCLEAR_SPIN: i32 = 7;

/// Reference calibration: (F', Ω₀, Ω₁, Ω_c in MHz, Δ_{f_e} in GHz).
pub const TABLE_I: [(i32, f64, f64, f64, f64); 4] = [
    (2, 26.1, 0.0, 17.8, 1.474),
    (3, 42.3, 14.1, 38.4, 1.322),
    (4, 26.6, 37.3, 43.6, 1.121),
    (5, 0.0, 39.9, 27.1, 0.870),
];
pub const TABLE_I_REFERENCE_DETUNING_GHZ: f64 = 1.34;
pub const GAMMA_6P32_MHZ: f64 = 5.2;
pub const GAMMA_RYDBERG_KHZ: f64 = 1.0;
/// Effective two-photon Rabi frequency of the control π pulses.
pub const RYDBERG_RABI_81D_MHZ: f64 = 1.77;
pub const MICROWAVE_RABI_KHZ: f64 = 3.31;
/// 81D5/2 pair interaction at 6 µm.
pub const V_81D_MHZ: f64 = 34.9;
pub const V_REF_DISTANCE_UM: f64 = 6.0;

pub const GAMMA_7P12_MHZ: f64 = 1.03;
pub const A_HFS_7P12_MHZ: f64 = 94.35;
/// Reference operating point of the 7P1/2 preset.
pub const P7_PROBE_REF_UW: f64 = 200.0;
pub const P7_COUPLING_REF_MW: f64 = 50.0;
pub const P7_WAIST_REF_UM: f64 = 3.0;
/// Reduced probe Rabi frequency at the reference point. Fitted so that the
/// two-photon area is π for a 500 ns raised-cosine pulse at Δ/2π = 5 GHz.
pub const P7_PROBE_SCALE_MHZ: f64 = 281.988;
/// Reduced coupling Rabi frequency at the reference point, fitted to the
/// protocol (best Bell fidelity at 500 ns).
pub const P7_COUPLING_SCALE_MHZ: f64 = 500.0;
pub const RYDBERG_RABI_90D_MHZ: f64 = 10.0;
/// 90D3/2 decay rate: the 81D5/2 value scaled by (n*₈₁/n*₉₀)³ with quantum
/// defects 2.466 and 2.475.
pub const GAMMA_RYDBERG_90D_KHZ: f64 = 0.7224;
/// 90D3/2 pair interaction at 6 µm, scaled from 81D5/2 by (n*₉₀/n*₈₁)¹¹.
pub const V_90D_MHZ: f64 = 115.0;

fn ground_levels() -> Vec<Level> {
    vec![
        Level::new("q0", 0.0, Category::Computational).with_hyperfine(3, 0),
        Level::new("q1", 0.0, Category::Computational).with_hyperfine(4, 0),
    ]
}

fn coupling(lower: &str, upper: &str, rabi: f64, beam: Beam) -> DriveCoupling {
    DriveCoupling {
        lower: lower.into(),
        upper: upper.into(),
        peak_rabi: rabi.abs(),
        detuning: 0.0,
        beam,
        phase: if rabi < 0.0 { std::f64::consts::PI } else { 0.0 },
    }
}

/// Sideband light shifts of the bichromatic probe on the clock states.
///
/// Each probe tone also drives the other clock state, detuned by a further
/// ±ω_q; the resulting shift is kept as a diagonal term.
fn sideband_shifts(couplings: &[DriveCoupling], levels: &[Level], wq: f64) -> Vec<LightShift> {
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for c in couplings.iter().filter(|c| c.beam == Beam::Probe) {
        let d = levels.iter().find(|l| l.label == c.upper).map_or(0.0, |l| l.energy_offset);
        let o2 = c.peak_rabi * c.peak_rabi;
        match c.lower.as_str() {
            "q1" => s1 -= o2 / (4.0 * (d + wq)),
            "q0" => s0 -= o2 / (4.0 * (d - wq)),
            _ => {}
        }
    }
    vec![
        LightShift { level: "q0".into(), beam: Beam::Probe, peak_shift: s0 },
        LightShift { level: "q1".into(), beam: Beam::Probe, peak_shift: s1 },
    ]
}

fn finish(mut s: LevelScheme, gamma_e: f64, gamma_r: f64) -> Result<LevelScheme> {
    s.decays = intermediate_decays(&s, gamma_e)?;
    s.add_decay("r", "d", gamma_r);
    s.light_shifts = sideband_shifts(&s.couplings, &s.levels, s.qubit_splitting);
    let s = s.with_detunings(0.0, 0.0);
    s.validate()?;
    Ok(s)
}

/// 6P3/2 ladder at the reference calibration.
///
/// Scale factors are intensity ratios relative to the reference powers
/// (110 nW probe, 170 mW coupling); negative values are clamped to zero.
pub fn preset_6p32(raman_power_scale: f64, coupling_power_scale: f64) -> LevelScheme {
    let ang = AngularStructure { nuclear_spin: CS_NUCLEAR_SPIN, ground_j: 1, excited_j: 3, rydberg_j: 5 };
    let sp = raman_power_scale.max(0.0).sqrt();
    let sc = coupling_power_scale.max(0.0).sqrt();
    let mut levels = ground_levels();
    let mut couplings = Vec::new();
    for &(f, o0, o1, oc, d) in &TABLE_I {
        let label = format!("fe{f}");
        levels.push(Level::new(&label, ghz(d), Category::Intermediate).with_hyperfine(f, 1));
        let tfp = 2 * f;
        let g0 = hyperfine_dipole_factor(ang.nuclear_spin, 1, 3, 6, 0, tfp);
        let g1 = hyperfine_dipole_factor(ang.nuclear_spin, 1, 3, 8, 0, tfp);
        let gc = rydberg_dipole_factor(ang.nuclear_spin, 3, tfp, 2, ang.rydberg_j);
        if o0 > 0.0 {
            couplings.push(coupling("q0", &label, g0.signum() * sp * mhz(o0), Beam::Probe));
        }
        if o1 > 0.0 {
            couplings.push(coupling("q1", &label, g1.signum() * sp * mhz(o1), Beam::Probe));
        }
        couplings.push(coupling(&label, "r", gc.signum() * sc * mhz(oc), Beam::Coupling));
    }
    levels.push(Level::new("r", 0.0, Category::Rydberg));
    levels.push(Level::new("d", 0.0, Category::Leakage));
    couplings.push(coupling("q1", "r", mhz(RYDBERG_RABI_81D_MHZ), Beam::Rydberg));
    couplings.push(coupling("q0", "q1", khz(MICROWAVE_RABI_KHZ), Beam::Microwave));
    let s = LevelScheme {
        name: "6p32_table1".into(),
        levels,
        decays: Vec::new(),
        couplings,
        light_shifts: Vec::new(),
        reference_detuning: ghz(TABLE_I_REFERENCE_DETUNING_GHZ),
        qubit_splitting: ghz(CS_QUBIT_SPLITTING_GHZ),
        angular: Some(ang),
    };
    finish(s, mhz(GAMMA_6P32_MHZ), khz(GAMMA_RYDBERG_KHZ))
        .expect("built-in 6P3/2 preset is consistent")
}

/// Operating point of the 7P1/2 preset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preset7p12 {
    pub probe_power_uw: f64,
    pub coupling_power_mw: f64,
    pub waist_um: f64,
    pub detuning_mhz: f64,
}

impl Default for Preset7p12 {
    fn default() -> Self {
        Preset7p12 {
            probe_power_uw: P7_PROBE_REF_UW,
            coupling_power_mw: P7_COUPLING_REF_MW,
            waist_um: P7_WAIST_REF_UM,
            detuning_mhz: 5000.0,
        }
    }
}

/// Hyperfine energy of 7P1/2 F' relative to the centroid.
fn hfs_7p12(f: i32) -> f64 {
    let (i, j) = (3.5, 0.5);
    let f = f as f64;
    0.5 * A_HFS_7P12_MHZ * (f * (f + 1.0) - i * (i + 1.0) - j * (j + 1.0))
}

/// 7P1/2 ladder to 90D3/2 with only F' = 3, 4.
pub fn preset_7p12(p: &Preset7p12) -> Result<LevelScheme> {
    if !(p.waist_um > 0.0) {
        return Err(Error::param("waist_um", "waist must be positive"));
    }
    if !(p.probe_power_uw >= 0.0) || !(p.coupling_power_mw >= 0.0) {
        return Err(Error::param("power", "beam powers must be non-negative"));
    }
    if p.detuning_mhz == 0.0 || !p.detuning_mhz.is_finite() {
        return Err(Error::param("detuning_mhz", "intermediate detuning must be nonzero"));
    }
    let ang = AngularStructure { nuclear_spin: CS_NUCLEAR_SPIN, ground_j: 1, excited_j: 1, rydberg_j: 3 };
    let geom = P7_WAIST_REF_UM / p.waist_um;
    let sp = (p.probe_power_uw / P7_PROBE_REF_UW).sqrt() * geom * mhz(P7_PROBE_SCALE_MHZ);
    let sc = (p.coupling_power_mw / P7_COUPLING_REF_MW).sqrt() * geom * mhz(P7_COUPLING_SCALE_MHZ);
    let mut levels = ground_levels();
    let mut couplings = Vec::new();
    for f in [3, 4] {
        let label = format!("fe{f}");
        let d = mhz(p.detuning_mhz - hfs_7p12(f));
        levels.push(Level::new(&label, d, Category::Intermediate).with_hyperfine(f, 1));
        let tfp = 2 * f;
        let g0 = hyperfine_dipole_factor(ang.nuclear_spin, 1, 1, 6, 0, tfp);
        let g1 = hyperfine_dipole_factor(ang.nuclear_spin, 1, 1, 8, 0, tfp);
        let gc = rydberg_dipole_factor(ang.nuclear_spin, 1, tfp, 2, ang.rydberg_j);
        // q0 phase convention: flip its sign so both probe legs of each F'
        // share a sign, as in the 6P3/2 preset.
        couplings.push(coupling("q0", &label, -g0 * sp, Beam::Probe));
        couplings.push(coupling("q1", &label, g1 * sp, Beam::Probe));
        couplings.push(coupling(&label, "r", gc * sc, Beam::Coupling));
    }
    levels.push(Level::new("r", 0.0, Category::Rydberg));
    levels.push(Level::new("d", 0.0, Category::Leakage));
    couplings.push(coupling("q1", "r", mhz(RYDBERG_RABI_90D_MHZ), Beam::Rydberg));
    couplings.push(coupling("q0", "q1", khz(MICROWAVE_RABI_KHZ), Beam::Microwave));
    let s = LevelScheme {
        name: "7p12_figS2".into(),
        levels,
        decays: Vec::new(),
        couplings,
        light_shifts: Vec::new(),
        reference_detuning: mhz(p.detuning_mhz),
        qubit_splitting: ghz(CS_QUBIT_SPLITTING_GHZ),
        angular: Some(ang),
    };
    finish(s, mhz(GAMMA_7P12_MHZ), khz(GAMMA_RYDBERG_90D_KHZ))
}

pub fn interaction_81d() -> InteractionSpec {
    InteractionSpec { reference_strength: mhz(V_81D_MHZ), reference_distance: V_REF_DISTANCE_UM, exponent: 6.0 }
}

pub fn interaction_90d() -> InteractionSpec {
    InteractionSpec { reference_strength: mhz(V_90D_MHZ), reference_distance: V_REF_DISTANCE_UM, exponent: 6.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::to_mhz;

    fn rabi(s: &LevelScheme, lower: &str, upper: &str) -> f64 {
        s.couplings
            .iter()
            .find(|c| c.lower == lower && c.upper == upper)
            .map_or(0.0, |c| to_mhz(c.peak_rabi))
    }

    #[test]
    fn table_one_reference_values() {
        let s = preset_6p32(1.0, 1.0);
        assert!((rabi(&s, "q0", "fe3") - 42.3).abs() < 1e-9);
        assert!((rabi(&s, "fe4", "r") - 43.6).abs() < 1e-9);
        assert!((to_mhz(s.level("fe5").unwrap().energy_offset) - 870.0).abs() < 1e-6);
        let labels: Vec<&str> = s.labels().collect();
        assert_eq!(labels, ["q0", "q1", "fe2", "fe3", "fe4", "fe5", "r", "d"]);
    }

    #[test]
    fn power_scaling() {
        let s = preset_6p32(4.0, 1.0);
        assert!((rabi(&s, "q0", "fe3") - 84.6).abs() < 1e-9);
        let z = preset_6p32(0.0, 1.0);
        assert!(z.couplings_of(Beam::Probe).all(|c| c.peak_rabi == 0.0));
        assert!((rabi(&z, "fe4", "r") - 43.6).abs() < 1e-9);
    }

    #[test]
    fn linewidths() {
        let s = preset_6p32(1.0, 1.0);
        for f in ["fe2", "fe3", "fe4", "fe5"] {
            let g = s.total_decay_from(f);
            assert!((g / mhz(GAMMA_6P32_MHZ) - 1.0).abs() < 1e-12, "{f}");
        }
        assert_eq!(s.decays.iter().filter(|d| d.from == "r").count(), 1);
        assert!((s.total_decay_from("r") - khz(1.0)).abs() < 1e-9);
    }

    #[test]
    fn p7_structure() {
        let s = preset_7p12(&Preset7p12::default()).unwrap();
        let labels: Vec<&str> = s.labels().collect();
        assert_eq!(labels, ["q0", "q1", "fe3", "fe4", "r", "d"]);
        assert!((to_mhz(s.level("fe4").unwrap().energy_offset) - (5000.0 - 1.75 * 94.35)).abs() < 1e-9);
        assert!((s.total_decay_from("fe3") / mhz(1.03) - 1.0).abs() < 1e-12);
        let off = preset_7p12(&Preset7p12 { coupling_power_mw: 0.0, ..Default::default() }).unwrap();
        assert!(off.couplings_of(Beam::Coupling).all(|c| c.peak_rabi == 0.0));
        assert!(preset_7p12(&Preset7p12 { waist_um: 0.0, ..Default::default() }).is_err());
        assert!(preset_7p12(&Preset7p12 { detuning_mhz: 0.0, ..Default::default() }).is_err());
        let twice = preset_7p12(&Preset7p12 { probe_power_uw: 400.0, ..Default::default() }).unwrap();
        for (a, b) in s.couplings_of(Beam::Probe).zip(twice.couplings_of(Beam::Probe)) {
            assert!((b.peak_rabi / a.peak_rabi - 2f64.sqrt()).abs() < 1e-12);
        }
    }
}
