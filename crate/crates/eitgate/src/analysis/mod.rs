//! Derived quantities: dark states, light shifts, scans, readout algebra,
//! Bell, truth-table and GHZ metrics.

pub mod bell;
pub mod darkstate;
pub mod dwell;
pub mod ghz;
pub mod measurement;
pub mod scan;
pub mod shifts;
pub mod truth;

pub use bell::{
    bell_report, fidelity_from_parity, fit_parity, parity_curve, parity_from_state, phase_grid, simulate_bell,
    BellReport, ParityCurve, ParityFit,
};
pub use darkstate::{bright_residual, dark_states, excited_coupling_row, target_hamiltonian, DarkStates};
pub use dwell::{control_dwell, DwellReport};
pub use ghz::{ghz_on, ghz_scaling, GhzReport};
pub use measurement::{
    apply_measurement, binomial_error, loss_correct, parity_brute_force, parity_closed_form, parity_elements,
    qutrit_pair, site_classes, OutcomeDistribution, ParityElements, SiteClass,
};
pub use scan::{eit_spectrum, raman_transfer_scan, ScanResult};
pub use shifts::{ac_stark_shift, effective_rabi};
pub use truth::{cnot_truth_table, ideal_cnot_table, table_fidelity, TruthTable};

use crate::dynamics::{
    evolve_dense, evolve_trajectories, CompositeSystem, DenseRun, DensityMatrix, IntegratorConfig, Method,
    QuantumState, StateVector, TrajectoryRun,
};
use crate::error::{Error, Result};
use crate::pulse::PulseSequence;

/// Result of either integrator.
#[derive(Debug, Clone)]
pub enum Evolution {
    Dense(DenseRun),
    Trajectories(TrajectoryRun),
}

impl Evolution {
    pub fn state(&self) -> &dyn QuantumState {
        match self {
            Evolution::Dense(r) => &r.state,
            Evolution::Trajectories(r) => &r.ensemble,
        }
    }

    /// Σ_{i∈subspace} ρ_ii and its standard error (zero for dense runs).
    pub fn projection(&self, subspace: &[usize]) -> (f64, f64) {
        match self {
            Evolution::Dense(r) => (subspace.iter().map(|&i| r.state.get(i, i).re).sum(), 0.0),
            Evolution::Trajectories(r) => r.projection(subspace),
        }
    }
}

/// Dispatches on `cfg.method`.
pub fn evolve(system: &CompositeSystem, seq: &PulseSequence, psi: &StateVector, cfg: &IntegratorConfig) -> Result<Evolution> {
    match cfg.method {
        Method::Trajectories => Ok(Evolution::Trajectories(evolve_trajectories(psi, system, seq, cfg)?)),
        Method::AdaptiveRk | Method::FixedRk4 => {
            Ok(Evolution::Dense(evolve_dense(&DensityMatrix::from_pure(psi), system, seq, cfg)?))
        }
    }
}

/// Gaussian-beam intensity at distance `separation` from the beam axis,
/// relative to the peak: exp(−2 s²/w²).
pub fn crosstalk_bound(waist: f64, separation: f64) -> Result<f64> {
    if !(waist > 0.0) || !(separation >= 0.0) {
        return Err(Error::param("crosstalk", "waist must be positive and separation non-negative"));
    }
    Ok((-2.0 * (separation / waist).powi(2)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crosstalk_examples() {
        assert!((crosstalk_bound(3.0, 6.0).unwrap() - (-8f64).exp()).abs() < 1e-18);
        assert_eq!(crosstalk_bound(3.0, 0.0).unwrap(), 1.0);
        assert!((crosstalk_bound(2.0, 2.0).unwrap() - (-2f64).exp()).abs() < 1e-16);
    }
}
