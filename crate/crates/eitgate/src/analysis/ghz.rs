//! CNOTᵏ from (|0⟩ + |1⟩)/√2 ⊗ |0⟩^k towards a GHZ state.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{evolve, Evolution};
use crate::atom::Geometry;
use crate::dynamics::{CompositeSystem, IntegratorConfig, Method, StateVector};
use crate::error::{Error, Result};
use crate::model::GateModel;
use crate::pulse::PulseSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzReport {
    pub k: usize,
    pub target_pairs: bool,
    /// (P_0…0 + P_1…1)/2 + |ρ_{0…0,1…1}|.
    pub fidelity: f64,
    pub standard_error: f64,
    pub p_zero: f64,
    pub p_one: f64,
    pub coherence: f64,
    /// arg(⟨1…1|ρ|0…0⟩): phase of the |1…1⟩ branch relative to |0…0⟩.
    pub branch_phase: f64,
    /// Ideal relative sign of the two branches: (−1)^k from the target
    /// transfers times −1 from the control's 2π round trip.
    pub expected_sign: f64,
    pub method: Method,
    pub trajectories: usize,
    pub jumped: usize,
}

/// Simulates CNOTᵏ on `geometry` (site 0 = control). `target_pairs` false
/// drops the target-target interaction terms.
pub fn ghz_scaling(
    model: &GateModel,
    k: usize,
    geometry: Geometry,
    target_pairs: bool,
    cfg: &IntegratorConfig,
) -> Result<GhzReport> {
    if !(1..=4).contains(&k) {
        return Err(Error::param("k", "CNOT^k is supported for 1 ≤ k ≤ 4"));
    }
    if geometry.len() != k + 1 {
        return Err(Error::DimensionMismatch { expected: k + 1, got: geometry.len() });
    }
    let sys = model.register(geometry, target_pairs)?;
    ghz_on(&sys, &model.cnot(k)?, cfg)
}

/// GHZ metrics for an arbitrary register whose sites all carry q0 and q1.
/// Site 0 is the control and `seq` is the CNOTᵏ timeline.
pub fn ghz_on(sys: &CompositeSystem, seq: &PulseSequence, cfg: &IntegratorConfig) -> Result<GhzReport> {
    let k = sys.n_sites().checked_sub(1).filter(|&k| k > 0).ok_or_else(|| {
        Error::param("register", "GHZ needs a control and at least one target")
    })?;
    let zeros = vec!["q0"; k + 1];
    let a = sys.index_of_labels(&zeros)?;
    let b = sys.index_of_labels(&vec!["q1"; k + 1])?;
    let c1 = {
        let mut l = zeros.clone();
        l[0] = "q1";
        sys.index_of_labels(&l)?
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); sys.dim()];
    amps[a] = C64::new(s, 0.0);
    amps[c1] = C64::new(s, 0.0);
    let out = evolve(sys, seq, &StateVector::from_amplitudes(amps), cfg)?;

    let state = out.state();
    let pa = state.element(a, a).re;
    let pb = state.element(b, b).re;
    let rho_ba = state.element(b, a);
    let coherence = rho_ba.norm();
    let fidelity = 0.5 * (pa + pb) + coherence;
    let (standard_error, trajectories, jumped) = match &out {
        Evolution::Dense(_) => (0.0, 0, 0),
        Evolution::Trajectories(run) => {
            // Linearised at the phase of the mean coherence.
            let u = if coherence > 0.0 { rho_ba.conj() / coherence } else { C64::new(1.0, 0.0) };
            let (_, se) = run.estimate(|p| {
                let (x, y) = (p.amplitudes[a], p.amplitudes[b]);
                0.5 * (x.norm_sqr() + y.norm_sqr()) + (y * x.conj() * u).re
            });
            (se, run.trajectories, run.jumped)
        }
    };
    Ok(GhzReport {
        k,
        target_pairs: sys.pairs.iter().any(|p| p.i != 0),
        fidelity,
        standard_error,
        p_zero: pa,
        p_one: pb,
        coherence,
        branch_phase: rho_ba.arg(),
        expected_sign: if k % 2 == 0 { -1.0 } else { 1.0 },
        method: cfg.method,
        trajectories,
        jumped,
    })
}
