//! CNOT truth tables with prep/readout circuits and blow-away readout.

use serde::{Deserialize, Serialize};

use super::measurement::{apply_measurement, binomial_error, loss_correct};
use crate::dynamics::{evolve_dense, DensityMatrix, IntegratorConfig, QuantumState};
use crate::error::Result;
use crate::model::GateModel;
use crate::pulse::{prep_and_readout_circuits, BasisState, PulseSequence, Step};

pub type Table = [[f64; 4]; 4];

/// Rows: prepared input; columns: measured output, both in the order
/// 00, 01, 10, 11 (control bit first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub raw: Table,
    pub corrected: Table,
    /// Nominal shots per entry used for counts and error bars.
    pub shots: usize,
    pub counts: [[u64; 4]; 4],
    pub raw_errors: Table,
    pub fidelity_raw: f64,
    pub fidelity_corrected: f64,
}

impl TruthTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("input,output,raw,raw_error,corrected,counts\n");
        for (i, a) in BasisState::ALL.iter().enumerate() {
            for (j, b) in BasisState::ALL.iter().enumerate() {
                s.push_str(&format!(
                    "{},{},{:?},{:?},{:?},{}\n",
                    a.label(),
                    b.label(),
                    self.raw[i][j],
                    self.raw_errors[i][j],
                    self.corrected[i][j],
                    self.counts[i][j]
                ));
            }
        }
        s
    }
}

/// Identity with the 10 and 11 rows swapped.
pub fn ideal_cnot_table() -> Table {
    let mut t = [[0.0; 4]; 4];
    for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        t[i][j] = 1.0;
    }
    t
}

/// ℱ = ¼ Σ_ij M_ij I_ij, the element-wise overlap of probability tables.
pub fn table_fidelity(measured: &Table, ideal: &Table) -> f64 {
    0.25 * measured.iter().flatten().zip(ideal.iter().flatten()).map(|(a, b)| a * b).sum::<f64>()
}

fn apply_instants(rho: &mut DensityMatrix, sys: &crate::dynamics::CompositeSystem, seq: &PulseSequence) -> Result<()> {
    for step in &seq.steps {
        if let Step::Instant { gate, .. } = step {
            rho.apply_gate(sys, gate)?;
        }
    }
    Ok(())
}

/// Simulates prep → CNOT → readout for every input and output pair.
pub fn cnot_truth_table(model: &GateModel, cfg: &IntegratorConfig, shots: usize) -> Result<TruthTable> {
    let sys = model.pair()?;
    let cnot = model.cnot(1)?;
    let start = sys.index_of_labels(&["q0", "q0"])?;
    let mut raw = [[0.0; 4]; 4];
    let mut corrected = [[0.0; 4]; 4];
    let mut raw_errors = [[0.0; 4]; 4];
    let mut counts = [[0u64; 4]; 4];
    for (i, input) in BasisState::ALL.iter().enumerate() {
        let mut rho = DensityMatrix::basis(sys.dim(), start);
        apply_instants(&mut rho, &sys, &prep_and_readout_circuits(*input).0)?;
        let after = evolve_dense(&rho, &sys, &cnot, cfg)?.state;
        for (j, output) in BasisState::ALL.iter().enumerate() {
            let mut r = after.clone();
            apply_instants(&mut r, &sys, &prep_and_readout_circuits(*output).1)?;
            let dist = apply_measurement(&r, &sys)?;
            let p = dist.a[0].clamp(0.0, 1.0);
            raw[i][j] = p;
            corrected[i][j] = loss_correct(&dist)?.clamp(0.0, 1.0);
            raw_errors[i][j] = binomial_error(p, shots.max(1))?;
            counts[i][j] = (p * shots as f64).round() as u64;
        }
    }
    let ideal = ideal_cnot_table();
    Ok(TruthTable {
        fidelity_raw: table_fidelity(&raw, &ideal),
        fidelity_corrected: table_fidelity(&corrected, &ideal),
        raw,
        corrected,
        shots,
        counts,
        raw_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_table_has_unit_fidelity() {
        let t = ideal_cnot_table();
        assert_eq!(table_fidelity(&t, &t), 1.0);
        let flat = [[0.25; 4]; 4];
        assert_eq!(table_fidelity(&flat, &t), 0.25);
    }
}
