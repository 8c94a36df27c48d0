//! Compiles a register plus one pulse segment into a sparse generator.

use num_complex::Complex64 as C64;

use super::operator::{Coefficient, Jump, TimeDepOp};
use super::system::CompositeSystem;
use crate::error::{Error, Result};
use crate::pulse::{PulseSequence, Segment, Step};

/// Everything the integrators need for one segment: H(t) in local segment
/// time, the diagonal of Σ L†L, and the jump list.
#[derive(Debug, Clone)]
pub struct Generator {
    pub h: TimeDepOp,
    pub decay_diag: Vec<f64>,
    pub jumps: Vec<Jump>,
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn has_decay(&self) -> bool {
        self.jumps.iter().any(|j| j.rate > 0.0)
    }
}

/// One jump operator per (site, decay channel) with nonzero rate.
pub fn build_jump_operators(system: &CompositeSystem) -> Result<Vec<Jump>> {
    let n = system.dim();
    let mut jumps = Vec::new();
    for (site, scheme) in system.sites.iter().enumerate() {
        let stride = system.stride(site);
        for d in scheme.decays.iter().filter(|d| d.rate > 0.0) {
            let from = scheme.index(&d.from)?;
            let to = scheme.index(&d.to)?;
            let pairs = (0..n)
                .filter(|&i| system.site_level(i, site) == from)
                .map(|i| (i as u32, (i + to * stride - from * stride) as u32))
                .collect();
            jumps.push(Jump { label: format!("{}:{}->{}", site, d.from, d.to), site, rate: d.rate, pairs });
        }
    }
    Ok(jumps)
}

/// Compiles the generator for `segment`, or the idle generator for `None`.
pub fn compile(system: &CompositeSystem, segment: Option<&Segment>) -> Result<Generator> {
    let n = system.dim();
    let mut coefficients = vec![Coefficient::One];
    let mut triples: Vec<(usize, usize, u16, C64)> = Vec::new();

    let mut diag = vec![0.0; n];
    for (i, d) in diag.iter_mut().enumerate() {
        *d = system.interaction_energy(i);
        for (site, scheme) in system.sites.iter().enumerate() {
            *d += scheme.levels[system.site_level(i, site)].energy_offset;
        }
    }
    if let Some(seg) = segment {
        for shift in &seg.shifts {
            let scheme = system
                .sites
                .get(shift.site)
                .ok_or(Error::UnknownSite { site: shift.site, len: system.n_sites() })?;
            let lvl = scheme.index(&shift.level)?;
            for (i, d) in diag.iter_mut().enumerate() {
                if system.site_level(i, shift.site) == lvl {
                    *d += shift.shift;
                }
            }
        }
        for drive in &seg.drives {
            let scheme = system
                .sites
                .get(drive.site)
                .ok_or(Error::UnknownSite { site: drive.site, len: system.n_sites() })?;
            let active: Vec<_> = scheme.couplings_of(drive.beam).collect();
            let shifts: Vec<_> = scheme.light_shifts.iter().filter(|l| l.beam == drive.beam).collect();
            if active.is_empty() && shifts.is_empty() {
                return Err(Error::param(
                    "sequence",
                    format!(
                        "segment `{}` drives {:?} on site {} whose scheme `{}` has no such coupling",
                        seg.label, drive.beam, drive.site, scheme.name
                    ),
                ));
            }
            let slot_env = coefficients.len() as u16;
            coefficients.push(Coefficient::Envelope(drive.envelope));
            let slot_sq = coefficients.len() as u16;
            coefficients.push(Coefficient::EnvelopeSquared(drive.envelope));
            let stride = system.stride(drive.site);
            for c in active {
                let lo = scheme.index(&c.lower)?;
                let up = scheme.index(&c.upper)?;
                let v = C64::from_polar(0.5 * c.peak_rabi, c.phase);
                for i in (0..n).filter(|&i| system.site_level(i, drive.site) == lo) {
                    let j = i + up * stride - lo * stride;
                    triples.push((j, i, slot_env, v));
                    triples.push((i, j, slot_env, v.conj()));
                }
            }
            for l in shifts {
                let lvl = scheme.index(&l.level)?;
                for i in (0..n).filter(|&i| system.site_level(i, drive.site) == lvl) {
                    triples.push((i, i, slot_sq, C64::new(l.peak_shift, 0.0)));
                }
            }
        }
    }
    for (i, d) in diag.into_iter().enumerate() {
        if d != 0.0 {
            triples.push((i, i, 0, C64::new(d, 0.0)));
        }
    }
    let h = TimeDepOp::from_triples(n, triples, coefficients);
    let jumps = build_jump_operators(system)?;
    let mut decay_diag = vec![0.0; n];
    for j in &jumps {
        for &(f, _) in &j.pairs {
            decay_diag[f as usize] += j.rate;
        }
    }
    Ok(Generator { h, decay_diag, jumps })
}

/// Dense Hamiltonian at absolute sequence time `t`, row-major.
pub fn build_hamiltonian(system: &CompositeSystem, sequence: &PulseSequence, t: f64) -> Result<Vec<C64>> {
    sequence.validate(system.n_sites())?;
    if t < 0.0 || t > sequence.duration() {
        return Err(Error::param("t", "time outside the sequence span"));
    }
    let seg = sequence.steps.iter().find_map(|s| match s {
        Step::Segment(g) if t >= g.start && t <= g.start + g.duration => Some(g),
        _ => None,
    });
    let local = seg.map_or(0.0, |g| t - g.start);
    Ok(compile(system, seg)?.h.dense(local))
}
