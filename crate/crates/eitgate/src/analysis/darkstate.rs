//! Dark states of the single-intermediate target Hamiltonian.
//!
//! Basis order (q0, q1, e, r). Both probe legs carry Ω_p/2, the coupling
//! leg Ω_c/2 and the intermediate sits at −Δ.

use crate::error::{Error, Result};

/// Amplitudes on (q0, q1, r); the intermediate amplitude is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkStates {
    pub d1: [f64; 3],
    pub d2: [f64; 3],
    /// x = √2 Ω_p / Ω_c.
    pub x: f64,
}

/// |d₁⟩ = (|1⟩ − |0⟩)/√2 and |d₂⟩ = (1 + x²)^{−1/2}[(|1⟩ + |0⟩)/√2 − x|r⟩].
pub fn dark_states(omega_p: f64, omega_c: f64) -> Result<DarkStates> {
    if !(omega_c > 0.0) {
        return Err(Error::Undefined("|d2> needs a nonzero coupling Rabi frequency".into()));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = 2f64.sqrt() * omega_p / omega_c;
    let n = (1.0 + x * x).sqrt().recip();
    Ok(DarkStates { d1: [-s, s, 0.0], d2: [s * n, s * n, -x * n], x })
}

/// ⟨e|H on the (q0, q1, r) subspace: the only row through which the dark
/// subspace could couple out.
pub fn excited_coupling_row(omega_p: f64, omega_c: f64) -> [f64; 3] {
    [0.5 * omega_p, 0.5 * omega_p, 0.5 * omega_c]
}

/// Full 4×4 target Hamiltonian in the (q0, q1, e, r) basis.
pub fn target_hamiltonian(omega_p: f64, omega_c: f64, delta: f64) -> [[f64; 4]; 4] {
    let (p, c) = (0.5 * omega_p, 0.5 * omega_c);
    [[0.0, 0.0, p, 0.0], [0.0, 0.0, p, 0.0], [p, p, -delta, c], [0.0, 0.0, c, 0.0]]
}

/// ⟨e|H|ψ⟩ for ψ on (q0, q1, r).
pub fn bright_residual(omega_p: f64, omega_c: f64, psi: &[f64; 3]) -> f64 {
    excited_coupling_row(omega_p, omega_c).iter().zip(psi).map(|(a, b)| a * b).sum()
}
