//! Monte-Carlo wavefunction unraveling of the master equation.
//!
//! The no-jump branch is shared: it is integrated once, and its final norm
//! p_nj is the exact probability that a trajectory never jumps. Trajectory
//! i draws r_i from its own counter stream and jumps iff r_i ≥ p_nj, so only
//! jumping trajectories are integrated. The estimator is stratified,
//! ρ = p_nj·ρ_nj + (1 − p_nj)·mean(ρ_jumped).

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::hamiltonian::{compile, Generator};
use super::integrate::{Dop853, IntegratorConfig, Outcome, Stats};
use super::master::shift_time;
use super::state::{Ensemble, QuantumState, StateVector};
use super::system::CompositeSystem;
use crate::error::{Error, Result};
use crate::pulse::{PulseSequence, Step};

const MAX_RESAMPLES: u64 = 16;
const COLLAPSE_WEIGHT: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct TrajectoryRun {
    /// Member 0 is the no-jump branch; the rest are jumped trajectories.
    pub ensemble: Ensemble,
    pub no_jump_probability: f64,
    pub trajectories: usize,
    pub jumped: usize,
    /// Trajectories whose jump had zero weight and were redrawn.
    pub collapsed: usize,
    pub stats: Stats,
}

impl TrajectoryRun {
    /// Stratified mean and standard error of a per-member observable.
    pub fn estimate<F: Fn(&StateVector) -> f64>(&self, f: F) -> (f64, f64) {
        let mean = self.ensemble.members.iter().map(|(w, p)| w * f(p)).sum();
        let jumped: Vec<f64> = self.ensemble.members[1..].iter().map(|(_, p)| f(p)).collect();
        let m = jumped.len();
        if m < 2 {
            return (mean, 0.0);
        }
        let mu = jumped.iter().sum::<f64>() / m as f64;
        let var = jumped.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (m - 1) as f64;
        (mean, (1.0 - self.no_jump_probability) * (var / m as f64).sqrt())
    }

    /// Estimate of Σ_{i∈subspace} ρ_ii with its standard error.
    pub fn projection(&self, subspace: &[usize]) -> (f64, f64) {
        self.estimate(|p| subspace.iter().map(|&i| p.amplitudes[i].norm_sqr()).sum())
    }
}

/// dψ/dt = −i(H − iK/2)ψ.
fn nonhermitian_rhs(gen: &Generator, coeffs: &mut Vec<f64>, t: f64, y: &[C64], dy: &mut [C64]) {
    gen.h.coefficient_values(t, coeffs);
    for i in 0..y.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, v) in gen.h.row(i, coeffs) {
            acc += v * y[k];
        }
        dy[i] = C64::new(acc.im, -acc.re) - y[i] * (0.5 * gen.decay_diag[i]);
    }
}

fn norm_sqr(y: &[C64]) -> f64 {
    y.iter().map(|a| a.norm_sqr()).sum()
}

struct Engine<'a> {
    system: &'a CompositeSystem,
    sequence: &'a PulseSequence,
    generators: Vec<Option<Generator>>,
    config: &'a IntegratorConfig,
}

enum Fate {
    Finished,
    Collapsed,
}

impl Engine<'_> {
    /// Evolves ψ to the end of the sequence, jumping whenever ‖ψ‖² falls
    /// below `r`. A negative `r` never jumps.
    fn run<R: Rng>(&self, psi: &mut Vec<C64>, mut r: f64, rng: &mut R, stats: &mut Stats) -> Result<Fate> {
        let n = psi.len();
        let mut dop = Dop853::new(n);
        let mut scratch = vec![C64::new(0.0, 0.0); n];
        let mut coeffs = Vec::new();
        for (step, gen) in self.sequence.steps.iter().zip(&self.generators) {
            match step {
                Step::Instant { gate, .. } => {
                    let mut sv = StateVector::from_amplitudes(std::mem::take(psi));
                    sv.apply_gate(self.system, gate)?;
                    *psi = sv.amplitudes;
                }
                Step::Segment(seg) => {
                    let gen = gen.as_ref().expect("compiled segment");
                    let mut f = |t: f64, y: &[C64], dy: &mut [C64]| nonhermitian_rhs(gen, &mut coeffs, t, y, dy);
                    let mut t = 0.0;
                    let mut h = 0.0;
                    loop {
                        let threshold = r;
                        let out = dop
                            .integrate(&mut f, t, seg.duration, psi, &mut h, self.config, |s| norm_sqr(s.y1) < threshold)
                            .map_err(|e| shift_time(e, seg.start))?;
                        let Outcome::Stopped { t0, h: h_step } = out else { break };
                        t = locate_crossing(&mut dop, &mut f, t0, h_step, psi, r);
                        let weights: Vec<f64> = gen.jumps.iter().map(|j| j.weight(psi)).collect();
                        let total: f64 = weights.iter().sum();
                        if !(total > COLLAPSE_WEIGHT) {
                            return Ok(Fate::Collapsed);
                        }
                        let mut pick = rng.random::<f64>() * total;
                        let mut chosen = weights.len() - 1;
                        for (k, w) in weights.iter().enumerate() {
                            if pick < *w {
                                chosen = k;
                                break;
                            }
                            pick -= w;
                        }
                        gen.jumps[chosen].apply(psi, &mut scratch);
                        let norm = norm_sqr(&scratch).sqrt();
                        for (p, s) in psi.iter_mut().zip(&scratch) {
                            *p = s / norm;
                        }
                        r = rng.random::<f64>();
                        h = 0.0;
                    }
                }
            }
        }
        stats.accepted += dop.stats.accepted;
        stats.rejected += dop.stats.rejected;
        stats.rhs_evals += dop.stats.rhs_evals;
        Ok(Fate::Finished)
    }
}

/// With ψ at t0 (‖ψ‖² ≥ r) and a step h that ends below r, advances ψ to
/// the crossing time by bisection on the step length. Returns that time.
fn locate_crossing<F>(dop: &mut Dop853, f: &mut F, t0: f64, h: f64, psi: &mut [C64], r: f64) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let start = psi.to_vec();
    let (mut lo, mut hi) = (0.0, h);
    let mut trial = start.clone();
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        trial.copy_from_slice(&start);
        dop.step_fixed(f, t0, mid, &mut trial);
        let nm = norm_sqr(&trial);
        if nm >= r {
            lo = mid;
        } else {
            hi = mid;
        }
        if (nm - r).abs() <= 1e-13 * r || hi - lo <= 1e-15 * h {
            break;
        }
    }
    psi.copy_from_slice(&start);
    if hi > 0.0 {
        dop.step_fixed(f, t0, hi, psi);
    }
    t0 + hi
}

/// Trajectory-averaged evolution of a pure state.
///
/// Results depend only on the seed and trajectory count, never on the
/// number of worker threads.
pub fn evolve_trajectories(
    state: &StateVector,
    system: &CompositeSystem,
    sequence: &PulseSequence,
    config: &IntegratorConfig,
) -> Result<TrajectoryRun> {
    config.validate()?;
    sequence.validate(system.n_sites())?;
    let n = system.dim();
    if state.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: state.dim() });
    }
    let generators = sequence
        .steps
        .iter()
        .map(|s| match s {
            Step::Segment(seg) => compile(system, Some(seg)).map(Some),
            Step::Instant { .. } => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    let engine = Engine { system, sequence, generators, config };

    let mut stats = Stats::default();
    let mut psi = state.amplitudes.clone();
    let norm0 = norm_sqr(&psi);
    if (norm0 - 1.0).abs() > 1e-9 {
        return Err(Error::param("state", format!("initial norm {norm0} is not 1")));
    }
    let mut never = stream(config.seed, u64::MAX >> 24, 0);
    engine.run(&mut psi, -1.0, &mut never, &mut stats)?;
    let p_nj = norm_sqr(&psi).min(1.0);
    let mut no_jump = StateVector::from_amplitudes(psi);
    no_jump.normalize();
    no_jump.time = sequence.duration();

    let draws: Vec<(usize, f64)> = (0..config.trajectories)
        .map(|i| (i, stream(config.seed, i as u64, 0).random::<f64>()))
        .filter(|&(_, r)| r >= p_nj)
        .collect();

    let results: Vec<Result<(StateVector, usize, Stats)>> = draws
        .par_iter()
        .map(|&(i, r0)| {
            let mut local = Stats::default();
            let mut collapsed = 0;
            for attempt in 0..MAX_RESAMPLES {
                let mut rng = stream(config.seed, i as u64, attempt);
                let first = rng.random::<f64>();
                // Redraws stay conditioned on at least one jump.
                let r = if attempt == 0 { r0.max(first) } else { p_nj + (1.0 - p_nj) * first };
                let mut psi = state.amplitudes.clone();
                match engine.run(&mut psi, r, &mut rng, &mut local)? {
                    Fate::Finished => {
                        let mut sv = StateVector::from_amplitudes(psi);
                        sv.normalize();
                        sv.time = sequence.duration();
                        return Ok((sv, collapsed, local));
                    }
                    Fate::Collapsed => collapsed += 1,
                }
            }
            Err(Error::Integrator { time: 0.0, reason: format!("trajectory {i} collapsed {MAX_RESAMPLES} times") })
        })
        .collect();

    let jumped = draws.len();
    let w_jump = if jumped > 0 { (1.0 - p_nj) / jumped as f64 } else { 0.0 };
    let w_nj = if jumped > 0 { p_nj } else { 1.0 };
    let mut members = vec![(w_nj, no_jump)];
    let mut collapsed = 0;
    for res in results {
        let (sv, c, s) = res?;
        collapsed += c;
        stats.accepted += s.accepted;
        stats.rejected += s.rejected;
        stats.rhs_evals += s.rhs_evals;
        members.push((w_jump, sv));
    }
    Ok(TrajectoryRun {
        ensemble: Ensemble { members },
        no_jump_probability: p_nj,
        trajectories: config.trajectories,
        jumped,
        collapsed,
        stats,
    })
}

/// Counter-based stream: one per (trajectory, attempt).
fn stream(seed: u64, index: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index | (attempt << 40));
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::{Beam, Category, DecayChannel, DriveCoupling, Geometry, InteractionSpec, Level, LevelScheme};
    use crate::dynamics::master::evolve_dense;
    use crate::dynamics::state::DensityMatrix;
    use crate::pulse::{ActiveDrive, Envelope};

    fn driven_decay(gamma: f64) -> (CompositeSystem, PulseSequence) {
        let scheme = LevelScheme {
            name: "toy".into(),
            levels: vec![
                Level::new("q0", 0.0, Category::Computational),
                Level::new("q1", 0.0, Category::Computational),
                Level::new("d", 0.0, Category::Leakage),
            ],
            decays: vec![
                DecayChannel { from: "q1".into(), to: "q0".into(), rate: 0.6 * gamma },
                DecayChannel { from: "q1".into(), to: "d".into(), rate: 0.4 * gamma },
            ],
            couplings: vec![DriveCoupling {
                lower: "q0".into(),
                upper: "q1".into(),
                peak_rabi: 2.0,
                detuning: 0.0,
                beam: Beam::Microwave,
                phase: 0.0,
            }],
            light_shifts: vec![],
            reference_detuning: 1.0,
            qubit_splitting: 0.0,
            angular: None,
        };
        let sys = CompositeSystem::new(
            vec![scheme],
            Geometry { positions: vec![[0.0, 0.0]] },
            InteractionSpec::new(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let mut seq = PulseSequence::new("toy");
        seq.push_segment("drive", 2.0, vec![ActiveDrive { site: 0, beam: Beam::Microwave, envelope: Envelope::constant(2.0) }])
            .unwrap();
        (sys, seq)
    }

    #[test]
    fn no_decay_matches_schrodinger() {
        let (sys, seq) = driven_decay(0.0);
        let cfg = IntegratorConfig { trajectories: 50, ..Default::default() };
        let run = evolve_trajectories(&StateVector::basis(3, 0), &sys, &seq, &cfg).unwrap();
        assert_eq!(run.jumped, 0);
        assert_eq!(run.ensemble.members.len(), 1);
        // Rabi angle Ωt = 4 rad.
        let p1 = run.ensemble.members[0].1.amplitudes[1].norm_sqr();
        assert!((p1 - (2.0f64).sin().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn agrees_with_dense_and_is_thread_independent() {
        let (sys, seq) = driven_decay(0.5);
        let cfg = IntegratorConfig { trajectories: 2000, seed: 7, ..Default::default() };
        let run = evolve_trajectories(&StateVector::basis(3, 0), &sys, &seq, &cfg).unwrap();
        let dense = evolve_dense(&DensityMatrix::basis(3, 0), &sys, &seq, &cfg).unwrap();
        for i in 0..3 {
            let (m, se) = run.projection(&[i]);
            let exact = dense.state.get(i, i).re;
            assert!((m - exact).abs() <= 3.0 * se + 1e-9, "level {i}: {m} ± {se} vs {exact}");
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let again = pool.install(|| evolve_trajectories(&StateVector::basis(3, 0), &sys, &seq, &cfg).unwrap());
        assert_eq!(again.ensemble, run.ensemble);
    }
}
