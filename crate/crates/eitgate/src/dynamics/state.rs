//! Density matrices, pure states and weighted ensembles of pure states.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::system::CompositeSystem;
use crate::error::{Error, Result};
use crate::pulse::Gate;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Read access shared by every state representation.
pub trait QuantumState {
    fn dim(&self) -> usize;
    /// ρ_ij.
    fn element(&self, i: usize, j: usize) -> C64;
    /// Diagonal of ρ.
    fn populations(&self) -> Vec<f64>;
    /// ρ ← UρU† for an ideal clock-state gate.
    fn apply_gate(&mut self, system: &CompositeSystem, gate: &Gate) -> Result<()>;

    fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }
}

/// Σ_{i∈subspace} ρ_ii.
pub fn project(state: &dyn QuantumState, subspace: &[usize]) -> Result<f64> {
    let pops = state.populations();
    subspace
        .iter()
        .map(|&i| pops.get(i).copied().ok_or(Error::DimensionMismatch { expected: pops.len(), got: i + 1 }))
        .sum()
}

/// Tr(ρO) for a dense row-major operator; errors if O is not Hermitian
/// enough to give a real result (imaginary residue above 1e-10).
pub fn expectation(state: &dyn QuantumState, op: &[C64]) -> Result<f64> {
    let n = state.dim();
    if op.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: op.len() });
    }
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            let o = op[j * n + i];
            if o != ZERO {
                acc += state.element(i, j) * o;
            }
        }
    }
    if acc.im.abs() > 1e-10 * acc.norm().max(1.0) {
        return Err(Error::Undefined(format!("expectation has imaginary part {:.3e}", acc.im)));
    }
    Ok(acc.re)
}

/// (q0, q1) level indices of every site.
fn clock_indices(system: &CompositeSystem) -> Result<Vec<(usize, usize)>> {
    system.sites.iter().map(|s| Ok((s.index("q0")?, s.index("q1")?))).collect()
}

/// Calls `f(i0, i1, u)` for every composite pair related by the gate on each
/// addressed site.
fn for_gate_pairs(
    system: &CompositeSystem,
    gate: &Gate,
    mut f: impl FnMut(usize, usize, &[[C64; 2]; 2]),
) -> Result<()> {
    let clock = clock_indices(system)?;
    for &site in gate.sites() {
        if site >= system.n_sites() {
            return Err(Error::UnknownSite { site, len: system.n_sites() });
        }
        let u = gate.matrix(site);
        let (l0, l1) = clock[site];
        let stride = system.stride(site);
        for i0 in (0..system.dim()).filter(|&i| system.site_level(i, site) == l0) {
            let i1 = i0 + l1 * stride - l0 * stride;
            f(i0, i1, &u);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub amplitudes: Vec<C64>,
    pub time: f64,
}

impl StateVector {
    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[idx] = C64::new(1.0, 0.0);
        StateVector { amplitudes, time: 0.0 }
    }

    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Self {
        StateVector { amplitudes, time: 0.0 }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn overlap(&self, other: &StateVector) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }
}

impl QuantumState for StateVector {
    fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    fn element(&self, i: usize, j: usize) -> C64 {
        self.amplitudes[i] * self.amplitudes[j].conj()
    }

    fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn apply_gate(&mut self, system: &CompositeSystem, gate: &Gate) -> Result<()> {
        let psi = &mut self.amplitudes;
        for_gate_pairs(system, gate, |i0, i1, u| {
            let (a, b) = (psi[i0], psi[i1]);
            psi[i0] = u[0][0] * a + u[0][1] * b;
            psi[i1] = u[1][0] * a + u[1][1] * b;
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub dim: usize,
    /// Row-major.
    pub data: Vec<C64>,
    pub time: f64,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        DensityMatrix { dim, data: vec![ZERO; dim * dim], time: 0.0 }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let n = psi.dim();
        let mut rho = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                rho.data[i * n + j] = psi.amplitudes[i] * psi.amplitudes[j].conj();
            }
        }
        rho.time = psi.time;
        rho
    }

    pub fn basis(dim: usize, idx: usize) -> Self {
        Self::from_pure(&StateVector::basis(dim, idx))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut e: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                e = e.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        e
    }

    pub fn purity(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim;
        let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (self.get(i, j) + self.get(j, i).conj()));
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Trace, Hermiticity and positivity checks with the tolerances used by
    /// the engine.
    pub fn check_physical(&self, trace_tol: f64, herm_tol: f64, pos_tol: f64) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::Undefined(format!("trace {tr} deviates from 1")));
        }
        let h = self.max_hermiticity_error();
        if h > herm_tol {
            return Err(Error::Undefined(format!("hermiticity error {h:.3e}")));
        }
        let m = self.min_eigenvalue();
        if m < -pos_tol {
            return Err(Error::Undefined(format!("negative eigenvalue {m:.3e}")));
        }
        Ok(())
    }
}

impl QuantumState for DensityMatrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn element(&self, i: usize, j: usize) -> C64 {
        self.get(i, j)
    }

    fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).collect()
    }

    fn apply_gate(&mut self, system: &CompositeSystem, gate: &Gate) -> Result<()> {
        let n = self.dim;
        let data = &mut self.data;
        for_gate_pairs(system, gate, |i0, i1, u| {
            for c in 0..n {
                let (a, b) = (data[i0 * n + c], data[i1 * n + c]);
                data[i0 * n + c] = u[0][0] * a + u[0][1] * b;
                data[i1 * n + c] = u[1][0] * a + u[1][1] * b;
            }
            for r in 0..n {
                let (a, b) = (data[r * n + i0], data[r * n + i1]);
                data[r * n + i0] = a * u[0][0].conj() + b * u[0][1].conj();
                data[r * n + i1] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        })
    }
}

/// ρ = Σ_k w_k |ψ_k⟩⟨ψ_k| with normalised members.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub members: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(w, _)| w).sum()
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        let n = self.dim();
        if n > 4096 {
            return Err(Error::param("dim", "ensemble too large to densify"));
        }
        let mut rho = DensityMatrix::zeros(n);
        for (w, psi) in &self.members {
            for i in 0..n {
                let a = psi.amplitudes[i] * *w;
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    rho.data[i * n + j] += a * psi.amplitudes[j].conj();
                }
            }
        }
        Ok(rho)
    }

    /// Per-member values of ⟨ψ_k|P|ψ_k⟩ for a projector onto basis states.
    pub fn member_projections(&self, subspace: &[usize]) -> Vec<f64> {
        self.members
            .iter()
            .map(|(_, psi)| subspace.iter().map(|&i| psi.amplitudes[i].norm_sqr()).sum())
            .collect()
    }
}

impl QuantumState for Ensemble {
    fn dim(&self) -> usize {
        self.members.first().map_or(0, |(_, p)| p.dim())
    }

    fn element(&self, i: usize, j: usize) -> C64 {
        self.members.iter().map(|(w, p)| p.amplitudes[i] * p.amplitudes[j].conj() * *w).sum()
    }

    fn populations(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (w, p) in &self.members {
            for (o, a) in out.iter_mut().zip(&p.amplitudes) {
                *o += w * a.norm_sqr();
            }
        }
        out
    }

    fn apply_gate(&mut self, system: &CompositeSystem, gate: &Gate) -> Result<()> {
        for (_, p) in &mut self.members {
            p.apply_gate(system, gate)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::presets::{interaction_81d, preset_6p32};
    use crate::atom::Geometry;
    use std::f64::consts::PI;

    fn pair() -> CompositeSystem {
        let c = preset_6p32(1.0, 1.0).restrict(&["q0", "q1", "r", "d"]).unwrap();
        CompositeSystem::new(vec![c.clone(), c], Geometry::pair(6.0), interaction_81d()).unwrap()
    }

    #[test]
    fn trace_and_projectors() {
        let sys = pair();
        let i = sys.index_of_labels(&["q1", "q1"]).unwrap();
        let rho = DensityMatrix::basis(sys.dim(), i);
        let mut id = vec![ZERO; 256];
        for k in 0..16 {
            id[k * 16 + k] = C64::new(1.0, 0.0);
        }
        assert!((expectation(&rho, &id).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(project(&rho, &[i]).unwrap(), 1.0);
    }

    #[test]
    fn gates_agree_between_representations() {
        let sys = pair();
        let mut psi = StateVector::basis(16, 0);
        let mut rho = DensityMatrix::from_pure(&psi);
        for g in [Gate::x(&[0, 1], PI / 2.0), Gate::z(&[1], 0.4), Gate::x(&[1], 1.3)] {
            psi.apply_gate(&sys, &g).unwrap();
            rho.apply_gate(&sys, &g).unwrap();
        }
        let from_psi = DensityMatrix::from_pure(&psi);
        for (a, b) in rho.data.iter().zip(&from_psi.data) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        assert!(rho.min_eigenvalue() > -1e-12);
    }
}
