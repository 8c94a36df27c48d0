//! Dense Lindblad integration.

use num_complex::Complex64 as C64;

use super::hamiltonian::{compile, Generator};
use super::integrate::{rk4_integrate, Dop853, IntegratorConfig, Method, Stats};
use super::state::{DensityMatrix, QuantumState};
use super::system::CompositeSystem;
use crate::error::{Error, Result};
use crate::pulse::{PulseSequence, Step};

/// Largest dimension evolved as a dense density matrix.
pub const DENSE_CAP: usize = 4096;

/// dρ/dt = −i(H_eff ρ − ρ H_eff†) + Σ_k L_k ρ L_k†, with H_eff = H − iK/2.
///
/// Uses ρH_eff† = (H_eff ρ)† so only one sparse product is needed; the
/// result is Hermitian to rounding by construction.
pub struct LindbladRhs<'a> {
    gen: &'a Generator,
    coeffs: Vec<f64>,
    m: Vec<C64>,
}

impl<'a> LindbladRhs<'a> {
    pub fn new(gen: &'a Generator) -> Self {
        let n = gen.dim();
        LindbladRhs { gen, coeffs: Vec::new(), m: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn eval(&mut self, t: f64, rho: &[C64], drho: &mut [C64]) {
        let n = self.gen.dim();
        self.gen.h.coefficient_values(t, &mut self.coeffs);
        let m = &mut self.m;
        for i in 0..n {
            let row = &mut m[i * n..(i + 1) * n];
            let half_k = -0.5 * self.gen.decay_diag[i];
            let src = &rho[i * n..(i + 1) * n];
            if half_k != 0.0 {
                // −iK/2 term: multiply by −i·(K/2) → real part scaling of −i
                for (r, s) in row.iter_mut().zip(src) {
                    *r = C64::new(0.0, half_k) * s;
                }
            } else {
                row.iter_mut().for_each(|r| *r = C64::new(0.0, 0.0));
            }
            for (k, v) in self.gen.h.row(i, &self.coeffs) {
                let src = &rho[k * n..(k + 1) * n];
                for (r, s) in row.iter_mut().zip(src) {
                    *r += v * s;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let d = m[i * n + j] - m[j * n + i].conj();
                drho[i * n + j] = C64::new(d.im, -d.re);
            }
        }
        for jump in &self.gen.jumps {
            let g = jump.rate;
            for &(f1, t1) in &jump.pairs {
                let (f1, t1) = (f1 as usize, t1 as usize);
                for &(f2, t2) in &jump.pairs {
                    drho[t1 * n + t2 as usize] += rho[f1 * n + f2 as usize] * g;
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DenseRun {
    pub state: DensityMatrix,
    /// States at the requested sample interval and at every segment end.
    pub samples: Vec<DensityMatrix>,
    pub stats: Stats,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
}

fn record(run: &mut DenseRun, rho: &DensityMatrix, keep: bool) {
    run.max_trace_error = run.max_trace_error.max((rho.trace() - 1.0).abs());
    run.max_hermiticity_error = run.max_hermiticity_error.max(rho.max_hermiticity_error());
    if keep {
        run.samples.push(rho.clone());
    }
}

/// Evolves a density matrix through every step of `sequence`.
pub fn evolve_dense(
    state: &DensityMatrix,
    system: &CompositeSystem,
    sequence: &PulseSequence,
    config: &IntegratorConfig,
) -> Result<DenseRun> {
    evolve_dense_sampled(state, system, sequence, config, None)
}

/// As [`evolve_dense`], also keeping states every `sample_interval` seconds.
pub fn evolve_dense_sampled(
    state: &DensityMatrix,
    system: &CompositeSystem,
    sequence: &PulseSequence,
    config: &IntegratorConfig,
    sample_interval: Option<f64>,
) -> Result<DenseRun> {
    let n = system.dim();
    if n > DENSE_CAP {
        return Err(Error::param("dim", format!("dimension {n} exceeds the dense cap {DENSE_CAP}; use trajectories")));
    }
    if state.dim != n {
        return Err(Error::DimensionMismatch { expected: n, got: state.dim });
    }
    config.validate()?;
    sequence.validate(system.n_sites())?;
    let keep = sample_interval.is_some();
    let mut run = DenseRun {
        state: state.clone(),
        samples: Vec::new(),
        stats: Stats::default(),
        max_trace_error: 0.0,
        max_hermiticity_error: 0.0,
    };
    let mut rho = state.clone();
    record(&mut run, &rho, keep);
    let mut dop = Dop853::new(n * n);
    for step in &sequence.steps {
        match step {
            Step::Instant { gate, .. } => rho.apply_gate(system, gate)?,
            Step::Segment(seg) => {
                let gen = compile(system, Some(seg))?;
                let mut rhs = LindbladRhs::new(&gen);
                let mut f = |t: f64, y: &[C64], dy: &mut [C64]| rhs.eval(t, y, dy);
                let chunk = sample_interval.unwrap_or(seg.duration).min(seg.duration);
                let mut t = 0.0;
                let mut h = 0.0;
                while t < seg.duration {
                    let t_next = (t + chunk).min(seg.duration);
                    let t_next = if seg.duration - t_next < 1e-6 * chunk { seg.duration } else { t_next };
                    match config.method {
                        Method::FixedRk4 => {
                            let s = rk4_integrate(&mut f, t, t_next, &mut rho.data, config.fixed_step)?;
                            run.stats.accepted += s.accepted;
                            run.stats.rhs_evals += s.rhs_evals;
                        }
                        _ => {
                            dop.integrate(&mut f, t, t_next, &mut rho.data, &mut h, config, |_| false)
                                .map_err(|e| shift_time(e, seg.start))?;
                        }
                    }
                    t = t_next;
                    rho.time = seg.start + t;
                    record(&mut run, &rho, keep && t < seg.duration);
                }
                record(&mut run, &rho, keep);
            }
        }
    }
    run.stats.accepted += dop.stats.accepted;
    run.stats.rejected += dop.stats.rejected;
    run.stats.rhs_evals += dop.stats.rhs_evals;
    rho.time = sequence.duration();
    run.state = rho;
    Ok(run)
}

pub(crate) fn shift_time(e: Error, t0: f64) -> Error {
    match e {
        Error::Integrator { time, reason } => Error::Integrator { time: time + t0, reason },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::{Beam, Category, DriveCoupling, Geometry, InteractionSpec, Level, LevelScheme};
    use crate::dynamics::hamiltonian::compile;
    use crate::pulse::{ActiveDrive, Envelope};

    pub(crate) fn two_level(gamma: f64) -> LevelScheme {
        LevelScheme {
            name: "tl".into(),
            levels: vec![
                Level::new("q0", 0.0, Category::Computational),
                Level::new("q1", 0.0, Category::Computational),
                Level::new("d", 0.0, Category::Leakage),
            ],
            decays: if gamma > 0.0 {
                vec![crate::atom::DecayChannel { from: "q1".into(), to: "q0".into(), rate: gamma }]
            } else {
                vec![]
            },
            couplings: vec![DriveCoupling {
                lower: "q0".into(),
                upper: "q1".into(),
                peak_rabi: 1.0,
                detuning: 0.0,
                beam: Beam::Microwave,
                phase: 0.0,
            }],
            light_shifts: vec![],
            reference_detuning: 1.0,
            qubit_splitting: 0.0,
            angular: None,
        }
    }

    fn single(s: LevelScheme) -> CompositeSystem {
        CompositeSystem::new(vec![s], Geometry { positions: vec![[0.0, 0.0]] }, InteractionSpec::new(1.0, 1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn resonant_pi_pulse() {
        let sys = single(two_level(0.0));
        let mut seq = PulseSequence::new("pi");
        let t = std::f64::consts::PI;
        seq.push_segment("pi", t, vec![ActiveDrive { site: 0, beam: Beam::Microwave, envelope: Envelope::constant(t) }])
            .unwrap();
        let cfg = IntegratorConfig { rtol: 1e-11, atol: 1e-13, ..Default::default() };
        let run = evolve_dense(&DensityMatrix::basis(3, 0), &sys, &seq, &cfg).unwrap();
        assert!(1.0 - run.state.get(1, 1).re <= 1e-8);
    }

    #[test]
    fn exponential_decay() {
        let g = 0.7;
        let sys = single(two_level(g));
        let mut seq = PulseSequence::new("idle");
        seq.push_segment("idle", 2.0, vec![]).unwrap();
        let run = evolve_dense(&DensityMatrix::basis(3, 1), &sys, &seq, &IntegratorConfig::default()).unwrap();
        assert!((run.state.get(1, 1).re - (-g * 2.0f64).exp()).abs() < 1e-8);
        assert!(run.max_trace_error < 1e-12);
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let sys = single(two_level(0.3));
        let mut seq = PulseSequence::new("d");
        seq.push_segment("d", 1.0, vec![ActiveDrive { site: 0, beam: Beam::Microwave, envelope: Envelope::constant(1.0) }])
            .unwrap();
        let gen = compile(&sys, seq.segments().next()).unwrap();
        let mut rhs = LindbladRhs::new(&gen);
        let rho: Vec<C64> = vec![
            C64::new(0.5, 0.0), C64::new(0.1, 0.2), C64::new(0.0, 0.1),
            C64::new(0.1, -0.2), C64::new(0.3, 0.0), C64::new(0.05, 0.0),
            C64::new(0.0, -0.1), C64::new(0.05, 0.0), C64::new(0.2, 0.0),
        ];
        let mut d = vec![C64::new(0.0, 0.0); 9];
        rhs.eval(0.5, &rho, &mut d);
        let tr: C64 = (0..3).map(|i| d[i * 3 + i]).sum();
        assert!(tr.norm() < 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                assert!((d[i * 3 + j] - d[j * 3 + i].conj()).norm() < 1e-15);
            }
        }
    }
}
