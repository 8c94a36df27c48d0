//! Blow-away readout, loss correction and the parity signal.
//!
//! Each site is partitioned into {0, 1, x}, where x is every level outside
//! the clock states. A blow-away image (A) shows • for 0 and ◦ for 1 or x;
//! an image without blow-away (B) shows • for 0 or 1 and ◦ for x.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::atom::{Category, Geometry, InteractionSpec, Level, LevelScheme};
use crate::dynamics::{CompositeSystem, DensityMatrix, QuantumState};
use crate::error::{Error, Result};
use crate::pulse::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteClass {
    Zero,
    One,
    Lost,
}

/// Outcome probabilities in the order ••, •◦, ◦•, ◦◦ (control first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub a: [f64; 4],
    pub b: [f64; 4],
}

impl OutcomeDistribution {
    /// Π̃ = A•• + A◦◦ − A•◦ − A◦•.
    pub fn parity(&self) -> f64 {
        self.a[0] + self.a[3] - self.a[1] - self.a[2]
    }
}

/// Class of every level of every site.
pub fn site_classes(system: &CompositeSystem) -> Vec<Vec<SiteClass>> {
    system
        .sites
        .iter()
        .map(|s| {
            s.levels
                .iter()
                .map(|l| match l.label.as_str() {
                    "q0" => SiteClass::Zero,
                    "q1" => SiteClass::One,
                    _ => SiteClass::Lost,
                })
                .collect()
        })
        .collect()
}

fn require_pair(system: &CompositeSystem) -> Result<()> {
    if system.n_sites() != 2 {
        return Err(Error::param("system", "readout algebra is defined for two sites"));
    }
    Ok(())
}

pub fn apply_measurement(state: &dyn QuantumState, system: &CompositeSystem) -> Result<OutcomeDistribution> {
    require_pair(system)?;
    if state.dim() != system.dim() {
        return Err(Error::DimensionMismatch { expected: system.dim(), got: state.dim() });
    }
    let classes = site_classes(system);
    let pops = state.populations();
    let mut a = [0.0; 4];
    let mut b = [0.0; 4];
    for (i, p) in pops.iter().enumerate() {
        let c0 = classes[0][system.site_level(i, 0)];
        let c1 = classes[1][system.site_level(i, 1)];
        let bright_a = |c| c == SiteClass::Zero;
        let bright_b = |c| c != SiteClass::Lost;
        let slot = |x: bool, y: bool| (!x as usize) * 2 + (!y as usize);
        a[slot(bright_a(c0), bright_a(c1))] += p;
        b[slot(bright_b(c0), bright_b(c1))] += p;
    }
    let (ta, tb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if !(ta > 0.0) {
        return Err(Error::Undefined("state has zero trace".into()));
    }
    a.iter_mut().for_each(|x| *x /= ta);
    b.iter_mut().for_each(|x| *x /= tb);
    Ok(OutcomeDistribution { a, b })
}

/// ρ₀₀^cor = A•• / B••.
pub fn loss_correct(dist: &OutcomeDistribution) -> Result<f64> {
    if !(dist.b[0] > 0.0) {
        return Err(Error::Undefined("B•• = 0: no atom pair survived".into()));
    }
    Ok(dist.a[0] / dist.b[0])
}

/// δP = √(P(1 − P)/n).
pub fn binomial_error(p: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || n == 0 {
        return Err(Error::param("binomial", "need 0 ≤ P ≤ 1 and n ≥ 1"));
    }
    Ok((p * (1.0 - p) / n as f64).sqrt())
}

/// The density-matrix elements the parity signal depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityElements {
    /// c = ρ_{00,11}.
    pub c: C64,
    /// d = ρ_{01,10}.
    pub d: C64,
    /// Both atoms outside the clock states.
    pub rho_xx: f64,
    /// Σ_x ρ_{0x,1x} + ρ_{x0,x1}: clock coherence of one atom while the other
    /// is lost.
    pub single_loss: C64,
}

impl ParityElements {
    /// φ_c with c* = |c|e^{iφ_c}.
    pub fn coherence_phase(&self) -> f64 {
        -self.c.arg()
    }
}

pub fn parity_elements(state: &dyn QuantumState, system: &CompositeSystem) -> Result<ParityElements> {
    require_pair(system)?;
    let idx = |a: &str, b: &str| system.index_of_labels(&[a, b]);
    let c = state.element(idx("q0", "q0")?, idx("q1", "q1")?);
    let d = state.element(idx("q0", "q1")?, idx("q1", "q0")?);
    let classes = site_classes(system);
    let lost: Vec<Vec<usize>> =
        classes.iter().map(|cl| (0..cl.len()).filter(|&l| cl[l] == SiteClass::Lost).collect()).collect();
    let q = |s: usize, label: &str| system.sites[s].index(label);
    let mut rho_xx = 0.0;
    for &x0 in &lost[0] {
        for &x1 in &lost[1] {
            let i = system.index_of(&[x0, x1])?;
            rho_xx += state.element(i, i).re;
        }
    }
    let mut single_loss = C64::new(0.0, 0.0);
    for &x in &lost[1] {
        single_loss += state.element(system.index_of(&[q(0, "q0")?, x])?, system.index_of(&[q(0, "q1")?, x])?);
    }
    for &x in &lost[0] {
        single_loss += state.element(system.index_of(&[x, q(1, "q0")?])?, system.index_of(&[x, q(1, "q1")?])?);
    }
    Ok(ParityElements { c, d, rho_xx, single_loss })
}

/// Π̃(φ) after global Z(φ) and X(π/2):
/// 2ℜ(d) − 2|c|cos(2φ + φ_c) + ρ_xx − 2ℜ(i e^{−iφ} u), u = single-loss term.
///
/// The last term vanishes when a lone surviving atom carries no clock
/// coherence.
pub fn parity_closed_form(e: &ParityElements, phi: f64) -> f64 {
    let single = C64::i() * C64::from_polar(1.0, -phi) * e.single_loss;
    2.0 * e.d.re - 2.0 * e.c.norm() * (2.0 * phi + e.coherence_phase()).cos() + e.rho_xx - 2.0 * single.re
}

/// Π̃(φ) by rotating ρ explicitly and summing projectors.
pub fn parity_brute_force(rho: &DensityMatrix, system: &CompositeSystem, phi: f64) -> Result<f64> {
    let mut r = rho.clone();
    r.apply_gate(system, &Gate::z(&[0, 1], phi))?;
    r.apply_gate(system, &Gate::x(&[0, 1], PI / 2.0))?;
    Ok(apply_measurement(&r, system)?.parity())
}

/// Two sites with levels (q0, q1, d): the smallest register the readout
/// algebra acts on.
pub fn qutrit_pair() -> CompositeSystem {
    let s = LevelScheme {
        name: "qutrit".into(),
        levels: vec![
            Level::new("q0", 0.0, Category::Computational),
            Level::new("q1", 0.0, Category::Computational),
            Level::new("d", 0.0, Category::Leakage),
        ],
        decays: vec![],
        couplings: vec![],
        light_shifts: vec![],
        reference_detuning: 1.0,
        qubit_splitting: 0.0,
        angular: None,
    };
    CompositeSystem::new(vec![s.clone(), s], Geometry::pair(1.0), InteractionSpec::new(1.0, 1.0).expect("unit spec"))
        .expect("qutrit pair is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(sys: &CompositeSystem, a: &str, b: &str) -> DensityMatrix {
        DensityMatrix::basis(sys.dim(), sys.index_of_labels(&[a, b]).unwrap())
    }

    #[test]
    fn basis_outcomes() {
        let sys = qutrit_pair();
        let m = apply_measurement(&basis(&sys, "q0", "q0"), &sys).unwrap();
        assert_eq!((m.a[0], m.b[0]), (1.0, 1.0));
        let m = apply_measurement(&basis(&sys, "q1", "q1"), &sys).unwrap();
        assert_eq!((m.a[3], m.b[0]), (1.0, 1.0));
        let m = apply_measurement(&basis(&sys, "d", "q1"), &sys).unwrap();
        assert_eq!((m.a[3], m.b[2]), (1.0, 1.0));
    }

    #[test]
    fn linear_in_populations() {
        let sys = qutrit_pair();
        let mut rho = DensityMatrix::zeros(9);
        for (labels, p) in [(("q0", "d"), 0.3), (("q0", "q1"), 0.2), (("q1", "q1"), 0.5)] {
            let i = sys.index_of_labels(&[labels.0, labels.1]).unwrap();
            rho.data[i * 9 + i] = C64::new(p, 0.0);
        }
        let m = apply_measurement(&rho, &sys).unwrap();
        assert!((m.a[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn binomial_examples() {
        assert!((binomial_error(0.5, 100).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(binomial_error(1.0, 7).unwrap(), 0.0);
        assert!((binomial_error(0.25, 200).unwrap() - 0.0306).abs() < 1e-4);
        assert!(binomial_error(0.5, 0).is_err());
    }

    #[test]
    fn ideal_bell_parity() {
        let sys = qutrit_pair();
        let mut psi = vec![C64::new(0.0, 0.0); 9];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        psi[sys.index_of_labels(&["q0", "q0"]).unwrap()] = C64::new(s, 0.0);
        psi[sys.index_of_labels(&["q1", "q1"]).unwrap()] = C64::new(s, 0.0);
        let rho = DensityMatrix::from_pure(&crate::dynamics::StateVector::from_amplitudes(psi));
        let e = parity_elements(&rho, &sys).unwrap();
        for k in 0..16 {
            let phi = k as f64 * PI / 8.0;
            let want = -(2.0 * phi).cos();
            assert!((parity_closed_form(&e, phi) - want).abs() < 1e-14);
            assert!((parity_brute_force(&rho, &sys, phi).unwrap() - want).abs() < 1e-14);
        }
    }
}
