//! Bell-state metrics and parity oscillations.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::measurement::{apply_measurement, parity_elements, site_classes, ParityElements, SiteClass};
use super::scan::ScanResult;
use crate::atom::Category;
use crate::dynamics::{evolve_dense, CompositeSystem, DenseRun, DensityMatrix, IntegratorConfig, QuantumState};
use crate::error::{Error, Result};
use crate::model::GateModel;
use crate::pulse::parity_tail;

/// Elements of a two-site state relevant to |Φ⁺⟩ = (|00⟩ + |11⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub p00: f64,
    pub p11: f64,
    /// |c| with c = ρ_{00,11}.
    pub coherence: f64,
    /// φ_c with c* = |c|e^{iφ_c}.
    pub coherence_phase: f64,
    /// d = ρ_{01,10}.
    pub secondary: C64,
    /// Both atoms outside the clock states.
    pub rho_xx: f64,
    /// Population with at least one atom in the leakage level.
    pub leakage: f64,
    /// 1 − population of the four clock-state products.
    pub loss: f64,
    /// (ρ₀₀ + ρ₁₁)/2 + |c|.
    pub fidelity: f64,
}

pub fn bell_report(state: &dyn QuantumState, system: &CompositeSystem) -> Result<BellReport> {
    let e = parity_elements(state, system)?;
    let idx = |a: &str, b: &str| system.index_of_labels(&[a, b]);
    let pops = state.populations();
    let p00 = pops[idx("q0", "q0")?];
    let p11 = pops[idx("q1", "q1")?];
    let classes = site_classes(system);
    let mut leakage = 0.0;
    let mut computational = 0.0;
    for (i, p) in pops.iter().enumerate() {
        let levels: Vec<usize> = (0..2).map(|s| system.site_level(i, s)).collect();
        if (0..2).any(|s| system.sites[s].levels[levels[s]].category == Category::Leakage) {
            leakage += p;
        }
        if (0..2).all(|s| classes[s][levels[s]] != SiteClass::Lost) {
            computational += p;
        }
    }
    let coherence = e.c.norm();
    Ok(BellReport {
        p00,
        p11,
        coherence,
        coherence_phase: e.coherence_phase(),
        secondary: e.d,
        rho_xx: e.rho_xx,
        leakage,
        loss: 1.0 - computational,
        fidelity: 0.5 * (p00 + p11) + coherence,
    })
}

/// Bell fidelity estimated from measured populations and a fitted parity
/// amplitude, |c| ≈ A/2. This is the experimental estimator; simulations
/// read c from ρ directly via [`bell_report`].
pub fn fidelity_from_parity(p00: f64, p11: f64, parity_amplitude: f64) -> f64 {
    0.5 * (p00 + p11) + 0.5 * parity_amplitude
}

/// Runs the Bell-preparation sequence from |00⟩ on the model's pair.
pub fn simulate_bell(model: &GateModel, cfg: &IntegratorConfig) -> Result<(CompositeSystem, DenseRun)> {
    let sys = model.pair()?;
    let start = DensityMatrix::basis(sys.dim(), sys.index_of_labels(&["q0", "q0"])?);
    let run = evolve_dense(&start, &sys, &model.bell_prep()?, cfg)?;
    Ok((sys, run))
}

/// A·cos(2φ + ψ) + B. `phase` is `None` when the curve is flat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityFit {
    pub amplitude: f64,
    pub phase: Option<f64>,
    pub offset: f64,
}

/// Least squares on (cos 2φ, sin 2φ, 1).
pub fn fit_parity(phis: &[f64], values: &[f64]) -> Result<ParityFit> {
    if phis.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: phis.len(), got: values.len() });
    }
    let mut ata = Matrix3::<f64>::zeros();
    let mut aty = Vector3::<f64>::zeros();
    for (&p, &y) in phis.iter().zip(values) {
        let row = Vector3::new((2.0 * p).cos(), (2.0 * p).sin(), 1.0);
        ata += row * row.transpose();
        aty += row * y;
    }
    let sol = ata
        .lu()
        .solve(&aty)
        .filter(|_| ata.determinant().abs() > 1e-12 * (phis.len() as f64).powi(3))
        .ok_or_else(|| Error::Undefined("parity fit is singular: phases do not resolve cos 2φ and sin 2φ".into()))?;
    let (a, b, offset) = (sol[0], sol[1], sol[2]);
    let amplitude = a.hypot(b);
    let phase = (amplitude > 1e-9).then(|| (-b).atan2(a));
    Ok(ParityFit { amplitude, phase, offset })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityCurve {
    pub scan: ScanResult,
    pub fit: ParityFit,
    pub elements: ParityElements,
    pub bell: BellReport,
}

/// Uniform phases on [0, 2π).
pub fn phase_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| 2.0 * PI * i as f64 / points as f64).collect()
}

/// Simulates Bell preparation once, then applies the ideal Z(φ)·X(π/2)
/// analysis rotations for every φ and reads Π̃ through the blow-away model.
pub fn parity_curve(model: &GateModel, phis: &[f64], cfg: &IntegratorConfig) -> Result<ParityCurve> {
    let (sys, run) = simulate_bell(model, cfg)?;
    parity_from_state(&run.state, &sys, phis)
}

pub fn parity_from_state(rho: &DensityMatrix, sys: &CompositeSystem, phis: &[f64]) -> Result<ParityCurve> {
    let mut values = Vec::with_capacity(phis.len());
    for &phi in phis {
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::param("phi", "phase must lie in [0, 2π)"));
        }
        let mut r = rho.clone();
        for step in parity_tail(2, phi).steps {
            if let crate::pulse::Step::Instant { gate, .. } = step {
                r.apply_gate(sys, &gate)?;
            }
        }
        values.push(apply_measurement(&r, sys)?.parity());
    }
    let fit = fit_parity(phis, &values)?;
    let scan = ScanResult::new("phase", "rad", "parity", phis.to_vec(), values, vec![0.0; phis.len()])?;
    Ok(ParityCurve { scan, fit, elements: parity_elements(rho, sys)?, bell: bell_report(rho, sys)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::measurement::qutrit_pair;
    use crate::dynamics::StateVector;

    #[test]
    fn ideal_and_mixed_reports() {
        let sys = qutrit_pair();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![C64::new(0.0, 0.0); 9];
        psi[0] = C64::new(s, 0.0);
        psi[4] = C64::new(s, 0.0);
        let rho = DensityMatrix::from_pure(&StateVector::from_amplitudes(psi));
        let r = bell_report(&rho, &sys).unwrap();
        assert!((r.fidelity - 1.0).abs() < 1e-15 && (r.coherence - 0.5).abs() < 1e-15);
        let mut mixed = DensityMatrix::zeros(9);
        for i in [0, 1, 3, 4] {
            mixed.data[i * 9 + i] = C64::new(0.25, 0.0);
        }
        assert!((bell_report(&mixed, &sys).unwrap().fidelity - 0.25).abs() < 1e-15);
        let curve = parity_from_state(&rho, &sys, &phase_grid(24)).unwrap();
        assert!((curve.fit.amplitude - 1.0).abs() < 1e-12);
        assert!(curve.fit.offset.abs() < 1e-12);
        assert!((curve.fit.phase.unwrap().abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn flat_and_singular_fits() {
        let phis = phase_grid(8);
        let f = fit_parity(&phis, &[0.3; 8]).unwrap();
        assert!(f.phase.is_none() && (f.offset - 0.3).abs() < 1e-12);
        assert!(fit_parity(&[0.0, PI], &[1.0, 1.0]).is_err());
    }
}
