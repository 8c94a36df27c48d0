//! Atomic level schemes, drive couplings, decay structure and interactions.
//!
//! Energies are rotating-frame diagonal entries in rad/s. With the conventions
//! used by the presets, |q1⟩ sits at zero, |q0⟩ at −δ, each intermediate
//! |f_e⟩ at +Δ_{f_e} and the Rydberg level at −Δ_c.

pub mod angular;
pub mod branching;
pub mod presets;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use branching::{branching_csv, branching_fractions, BranchingTable};
pub use presets::{preset_6p32, preset_7p12, Preset7p12, PRESET_CATALOG};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Computational,
    Intermediate,
    Rydberg,
    Leakage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub label: String,
    pub energy_offset: f64,
    pub category: Category,
    /// Doubled hyperfine quantum numbers (2F, 2m_F), when the level has them.
    #[serde(default)]
    pub hyperfine: Option<(i32, i32)>,
}

impl Level {
    pub fn new(label: &str, energy_offset: f64, category: Category) -> Self {
        Level { label: label.to_string(), energy_offset, category, hyperfine: None }
    }

    pub fn with_hyperfine(mut self, f: i32, m_f: i32) -> Self {
        self.hyperfine = Some((2 * f, 2 * m_f));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayChannel {
    pub from: String,
    pub to: String,
    pub rate: f64,
}

/// Which laser or microwave field a coupling belongs to.
///
/// Pulse segments switch fields on per beam and per site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Beam {
    /// Bichromatic Raman probe driving both qubit legs.
    Probe,
    /// Coupling laser from the intermediate states to the Rydberg level.
    Coupling,
    /// Effective two-photon drive |q1⟩ ↔ |r⟩ used for the control π pulses.
    Rydberg,
    /// Global qubit microwave.
    Microwave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveCoupling {
    pub lower: String,
    pub upper: String,
    pub peak_rabi: f64,
    /// energy(upper) − energy(lower) in the rotating frame.
    pub detuning: f64,
    pub beam: Beam,
    pub phase: f64,
}

/// Diagonal light shift that scales with the square of a beam envelope.
///
/// Used for the off-resonant sideband of the bichromatic probe, which is not
/// represented as an explicit coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightShift {
    pub level: String,
    pub beam: Beam,
    pub peak_shift: f64,
}

/// Angular momenta needed to compute branching ratios, all doubled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularStructure {
    pub nuclear_spin: i32,
    pub ground_j: i32,
    pub excited_j: i32,
    pub rydberg_j: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub name: String,
    pub levels: Vec<Level>,
    pub decays: Vec<DecayChannel>,
    pub couplings: Vec<DriveCoupling>,
    #[serde(default)]
    pub light_shifts: Vec<LightShift>,
    /// Center-of-mass intermediate detuning Δ.
    pub reference_detuning: f64,
    /// Qubit hyperfine splitting ω_q.
    pub qubit_splitting: f64,
    #[serde(default)]
    pub angular: Option<AngularStructure>,
}

impl LevelScheme {
    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| l.label == label)
            .ok_or_else(|| Error::UnknownLevel(label.to_string()))
    }

    pub fn level(&self, label: &str) -> Result<&Level> {
        Ok(&self.levels[self.index(label)?])
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.levels.iter().map(|l| l.label.as_str())
    }

    pub fn levels_in(&self, category: Category) -> impl Iterator<Item = &Level> {
        self.levels.iter().filter(move |l| l.category == category)
    }

    pub fn leakage_label(&self) -> Result<&str> {
        self.levels_in(Category::Leakage)
            .map(|l| l.label.as_str())
            .next()
            .ok_or_else(|| Error::Undefined(format!("scheme `{}` has no leakage level", self.name)))
    }

    pub fn couplings_of(&self, beam: Beam) -> impl Iterator<Item = &DriveCoupling> {
        self.couplings.iter().filter(move |c| c.beam == beam)
    }

    /// Total decay rate out of `label`.
    pub fn total_decay_from(&self, label: &str) -> f64 {
        self.decays.iter().filter(|d| d.from == label).map(|d| d.rate).sum()
    }

    /// Checks the structural invariants of a scheme.
    pub fn validate(&self) -> Result<()> {
        for (i, l) in self.levels.iter().enumerate() {
            if self.levels[..i].iter().any(|o| o.label == l.label) {
                return Err(Error::param("levels", format!("duplicate label `{}`", l.label)));
            }
        }
        let leak = self.levels_in(Category::Leakage).count();
        if leak != 1 {
            return Err(Error::param("levels", format!("expected one leakage level, found {leak}")));
        }
        let mut comp: Vec<&str> =
            self.levels_in(Category::Computational).map(|l| l.label.as_str()).collect();
        comp.sort_unstable();
        if comp != ["q0", "q1"] {
            return Err(Error::param("levels", "computational levels must be exactly q0, q1"));
        }
        for c in &self.couplings {
            self.index(&c.lower)?;
            self.index(&c.upper)?;
            if c.lower == c.upper {
                return Err(Error::param("couplings", format!("self coupling on `{}`", c.lower)));
            }
            if !(c.peak_rabi >= 0.0) {
                return Err(Error::param("couplings", "peak Rabi frequency must be non-negative"));
            }
        }
        for d in &self.decays {
            self.index(&d.from)?;
            self.index(&d.to)?;
            if !(d.rate >= 0.0) {
                return Err(Error::param("decays", "negative decay rate"));
            }
        }
        for s in &self.light_shifts {
            self.index(&s.level)?;
        }
        Ok(())
    }

    fn refresh_detunings(&mut self) {
        let energies: Vec<(String, f64)> =
            self.levels.iter().map(|l| (l.label.clone(), l.energy_offset)).collect();
        let e = |label: &str| energies.iter().find(|(l, _)| l == label).map_or(0.0, |(_, e)| *e);
        for c in &mut self.couplings {
            c.detuning = e(&c.upper) - e(&c.lower);
        }
    }

    /// Sets the two-photon Raman detuning δ (|q0⟩ at −δ) and the coupling
    /// detuning Δ_c (Rydberg level at −Δ_c).
    pub fn with_detunings(&self, raman: f64, coupling: f64) -> Self {
        let mut s = self.clone();
        for l in &mut s.levels {
            match (l.category, l.label.as_str()) {
                (Category::Computational, "q0") => l.energy_offset = -raman,
                (Category::Rydberg, _) => l.energy_offset = -coupling,
                _ => {}
            }
        }
        s.refresh_detunings();
        s
    }

    /// Scales the intensity of one beam: Rabi frequencies by √factor and
    /// light shifts by factor.
    pub fn scale_beam(&self, beam: Beam, factor: f64) -> Self {
        let mut s = self.clone();
        let amp = factor.max(0.0).sqrt();
        for c in s.couplings.iter_mut().filter(|c| c.beam == beam) {
            c.peak_rabi *= amp;
        }
        for l in s.light_shifts.iter_mut().filter(|l| l.beam == beam) {
            l.peak_shift *= factor.max(0.0);
        }
        s
    }

    /// Sets the peak Rabi frequency of every coupling on `beam`.
    pub fn set_beam_rabi(&self, beam: Beam, rabi: f64) -> Self {
        let mut s = self.clone();
        for c in s.couplings.iter_mut().filter(|c| c.beam == beam) {
            c.peak_rabi = rabi;
        }
        s
    }

    /// Keeps only the listed levels. Couplings, shifts and decays touching a
    /// removed level are dropped.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        for k in keep {
            self.index(k)?;
        }
        let kept = |l: &str| keep.contains(&l);
        let mut s = self.clone();
        s.levels.retain(|l| kept(&l.label));
        s.couplings.retain(|c| kept(&c.lower) && kept(&c.upper));
        s.decays.retain(|d| kept(&d.from) && kept(&d.to));
        s.light_shifts.retain(|l| kept(&l.level));
        s.validate()?;
        Ok(s)
    }

    /// Appends a decay channel, merging with an existing one on the same path.
    pub fn add_decay(&mut self, from: &str, to: &str, rate: f64) {
        if let Some(d) = self.decays.iter_mut().find(|d| d.from == from && d.to == to) {
            d.rate += rate;
        } else {
            self.decays.push(DecayChannel { from: from.into(), to: to.into(), rate });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionSpec {
    /// V_ref in rad/s.
    pub reference_strength: f64,
    /// R_ref in µm.
    pub reference_distance: f64,
    pub exponent: f64,
}

impl InteractionSpec {
    pub fn new(reference_strength: f64, reference_distance: f64) -> Result<Self> {
        if !(reference_strength > 0.0) || !(reference_distance > 0.0) {
            return Err(Error::param("interaction", "V_ref and R_ref must be positive"));
        }
        Ok(InteractionSpec { reference_strength, reference_distance, exponent: 6.0 })
    }
}

/// V(R) = V_ref·(R_ref/R)^exponent.
pub fn interaction_strength(spec: &InteractionSpec, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::param("R", "separation must be positive"));
    }
    Ok(spec.reference_strength * (spec.reference_distance / r).powf(spec.exponent))
}

/// Site positions in µm; index 0 is the control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub positions: Vec<[f64; 2]>,
}

impl Geometry {
    pub fn new(positions: Vec<[f64; 2]>) -> Result<Self> {
        let g = Geometry { positions };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..self.positions.len() {
            for j in 0..i {
                if !(self.distance(i, j) > 0.0) {
                    return Err(Error::param("geometry", format!("sites {j} and {i} coincide")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let [xi, yi] = self.positions[i];
        let [xj, yj] = self.positions[j];
        (xi - xj).hypot(yi - yj)
    }

    /// Control at the origin, one target at distance `r`.
    pub fn pair(r: f64) -> Self {
        Geometry { positions: vec![[0.0, 0.0], [r, 0.0]] }
    }

    /// Control at the origin with targets on a cross of radius `r`, filled in
    /// the order +x, −x, +y, −y. k = 2 gives the line geometry.
    pub fn cross(k: usize, r: f64) -> Self {
        let dirs = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]];
        let mut positions = vec![[0.0, 0.0]];
        positions.extend(dirs.iter().take(k).map(|[x, y]| [r * x, r * y]));
        Geometry { positions }
    }

    /// Two targets at right angles around the control.
    pub fn right_angle(r: f64) -> Self {
        Geometry { positions: vec![[0.0, 0.0], [r, 0.0], [0.0, r]] }
    }
}

/// Ratio V / (Ω_c²/4Δ) using the quadrature sum of the coupling-beam Rabi
/// frequencies and the scheme's reference detuning.
///
/// Returns infinity when the coupling beam is off.
pub fn eit_break_margin(scheme: &LevelScheme, v: f64) -> Result<f64> {
    let oc2: f64 = scheme.couplings_of(Beam::Coupling).map(|c| c.peak_rabi * c.peak_rabi).sum();
    eit_break_margin_raw(oc2.sqrt(), scheme.reference_detuning, v)
}

pub fn eit_break_margin_raw(omega_c: f64, delta: f64, v: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::param("reference_detuning", "Δ must be nonzero"));
    }
    if omega_c == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(v / (omega_c * omega_c / (4.0 * delta.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mhz;

    #[test]
    fn margin_hand_example() {
        let m = eit_break_margin_raw(mhz(40.0), mhz(1340.0), mhz(35.0)).unwrap();
        assert!((m - 35.0 / (1600.0 / 5360.0)).abs() < 1e-9);
        assert!((m - 117.25).abs() < 0.01);
        assert_eq!(eit_break_margin_raw(mhz(40.0), mhz(1340.0), 0.0).unwrap(), 0.0);
        assert!(eit_break_margin_raw(0.0, mhz(1340.0), 1.0).unwrap().is_infinite());
        assert!(eit_break_margin_raw(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn interaction_examples() {
        let spec = InteractionSpec::new(mhz(35.0), 6.0).unwrap();
        assert!((interaction_strength(&spec, 6.0).unwrap() - mhz(35.0)).abs() < 1e-6);
        let v4 = interaction_strength(&spec, 4.0).unwrap();
        assert!((crate::units::to_mhz(v4) - 398.671875).abs() < 1e-9);
        assert!(interaction_strength(&spec, 0.0).is_err());
        assert!(interaction_strength(&spec, -1.0).is_err());
    }

    #[test]
    fn geometry_distances() {
        let g = Geometry::cross(2, 4.0);
        assert!((g.distance(1, 2) - 8.0).abs() < 1e-12);
        let r = Geometry::right_angle(4.0);
        assert!((r.distance(1, 2) - 4.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(Geometry::new(vec![[0.0, 0.0], [0.0, 0.0]]).is_err());
    }
}
