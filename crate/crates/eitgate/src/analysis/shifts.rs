//! Raman Rabi frequency and differential light shift of the clock states.

use crate::atom::{Beam, Category, LevelScheme};

/// (Ω₀, Ω₁, Δ_{f_e}) for every intermediate level, with signs from the
/// coupling phases (0 or π).
fn probe_legs(scheme: &LevelScheme) -> Vec<(f64, f64, f64)> {
    let signed = |lower: &str, upper: &str| {
        scheme
            .couplings_of(Beam::Probe)
            .find(|c| c.lower == lower && c.upper == upper)
            .map_or(0.0, |c| c.peak_rabi * c.phase.cos())
    };
    scheme
        .levels_in(Category::Intermediate)
        .map(|l| (signed("q0", &l.label), signed("q1", &l.label), l.energy_offset))
        .collect()
}

/// Ω_R = Σ Ω₁Ω₀ / 2Δ_{f_e} at peak envelope.
///
/// Levels reached by only one probe leg contribute nothing.
pub fn effective_rabi(scheme: &LevelScheme) -> f64 {
    probe_legs(scheme)
        .into_iter()
        .filter(|&(o0, o1, d)| o0 != 0.0 && o1 != 0.0 && d != 0.0)
        .map(|(o0, o1, d)| o1 * o0 / (2.0 * d))
        .sum()
}

/// δ_AC = Σ (Ω₁² − Ω₀²)/4Δ + Ω₁²/4(Δ + ω_q) − Ω₀²/4(Δ − ω_q) at peak envelope.
pub fn ac_stark_shift(scheme: &LevelScheme) -> f64 {
    let wq = scheme.qubit_splitting;
    probe_legs(scheme)
        .into_iter()
        .filter(|&(_, _, d)| d != 0.0)
        .map(|(o0, o1, d)| {
            let (a0, a1) = (o0 * o0, o1 * o1);
            let mut s = (a1 - a0) / (4.0 * d);
            if a1 != 0.0 {
                s += a1 / (4.0 * (d + wq));
            }
            if a0 != 0.0 {
                s -= a0 / (4.0 * (d - wq));
            }
            s
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::presets::preset_6p32;
    use crate::units::to_mhz;

    #[test]
    fn table_i_rabi() {
        let s = preset_6p32(1.0, 1.0);
        assert!((to_mhz(effective_rabi(&s)) - 0.67).abs() < 0.01);
        assert_eq!(effective_rabi(&preset_6p32(0.0, 1.0)), 0.0);
    }

    #[test]
    fn shift_vanishes_for_symmetric_legs_without_splitting() {
        let mut s = preset_6p32(1.0, 1.0);
        s.qubit_splitting = 0.0;
        for c in s.couplings.iter_mut().filter(|c| c.beam == Beam::Probe) {
            c.peak_rabi = 1e8;
        }
        // Symmetric legs need both ends present on each level.
        s.couplings.retain(|c| !(c.beam == Beam::Probe && (c.upper == "fe2" || c.upper == "fe5")));
        assert!(ac_stark_shift(&s).abs() < 1e-6);
        assert_eq!(ac_stark_shift(&preset_6p32(0.0, 1.0)), 0.0);
    }
}
