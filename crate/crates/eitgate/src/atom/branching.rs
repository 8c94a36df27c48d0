//! Hyperfine-resolved branching of intermediate-state decay.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::angular::decay_fraction;
use super::{Category, DecayChannel, LevelScheme};
use crate::error::{Error, Result};

/// Per intermediate level, the fraction of its decay landing on each
/// destination. Destinations are q0, q1 and the leakage level.
pub type BranchingTable = BTreeMap<String, Vec<(String, f64)>>;

/// Decay fractions from each intermediate |F', m'⟩ into the clock states;
/// whatever is left over goes to the leakage level.
pub fn branching_fractions(scheme: &LevelScheme) -> Result<BranchingTable> {
    let ang = scheme
        .angular
        .ok_or_else(|| Error::Undefined(format!("scheme `{}` has no angular data", scheme.name)))?;
    let leak = scheme.leakage_label()?.to_string();
    let mut table = BranchingTable::new();
    for upper in scheme.levels_in(Category::Intermediate) {
        let (tfp, tmp) = upper.hyperfine.ok_or_else(|| {
            Error::Undefined(format!("intermediate level `{}` lacks F, m_F", upper.label))
        })?;
        let mut row = Vec::new();
        let mut rest = 1.0;
        for lower in scheme.levels_in(Category::Computational) {
            let (tf, tm) = lower.hyperfine.ok_or_else(|| {
                Error::Undefined(format!("computational level `{}` lacks F, m_F", lower.label))
            })?;
            let frac = decay_fraction(
                ang.nuclear_spin,
                ang.ground_j,
                ang.excited_j,
                tfp,
                tmp,
                tf,
                tm,
            );
            rest -= frac;
            row.push((lower.label.clone(), frac));
        }
        row.push((leak.clone(), rest.max(0.0)));
        table.insert(upper.label.clone(), row);
    }
    Ok(table)
}

/// Decay channels at total rate `gamma` out of every intermediate level.
pub fn intermediate_decays(scheme: &LevelScheme, gamma: f64) -> Result<Vec<DecayChannel>> {
    let table = branching_fractions(scheme)?;
    let mut out = Vec::new();
    for (from, row) in &table {
        for (to, frac) in row {
            if *frac > 0.0 {
                out.push(DecayChannel { from: from.clone(), to: to.clone(), rate: gamma * frac });
            }
        }
    }
    Ok(out)
}

/// CSV export with columns from, to, fraction.
pub fn branching_csv(table: &BranchingTable) -> String {
    let mut s = String::from("from,to,fraction\n");
    for (from, row) in table {
        for (to, frac) in row {
            let _ = writeln!(s, "{from},{to},{frac:.15e}");
        }
    }
    s
}
