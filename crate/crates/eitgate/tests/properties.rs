//! Invariants as property tests.

mod common;

use std::f64::consts::PI;

use eitgate::analysis::{
    apply_measurement, bell_report, bright_residual, dark_states, effective_rabi, ghz_on, loss_correct,
    parity_brute_force, parity_closed_form, parity_elements, qutrit_pair,
};
use eitgate::atom::{
    branching_fractions, interaction_strength, preset_6p32, preset_7p12, Beam, Geometry, InteractionSpec, Preset7p12,
};
use eitgate::config::ExperimentConfig;
use eitgate::dynamics::{
    build_hamiltonian, compile, evolve_dense, master::LindbladRhs, CompositeSystem, DensityMatrix, IntegratorConfig,
    Method, QuantumState, StateVector,
};
use eitgate::model::GateModel;
use eitgate::pulse::{
    cnot_sequence, control_pi_duration, duration_for_pi_area, local_microwave_shift, prep_and_readout_circuits,
    two_photon_area, BasisState, Gate, GateLayout, PulseSequence,
};
use eitgate::units::{khz, mhz, us};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pair_and_cnot(delta: f64, dc: f64, sp: f64, sc: f64) -> (CompositeSystem, PulseSequence) {
    let mut m = GateModel::table_i().with_detunings(mhz(delta), mhz(dc));
    m.preset = eitgate::model::PresetSpec::P6p32 { raman_power_scale: sp, coupling_power_scale: sc };
    (m.pair().unwrap(), m.cnot(1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hamiltonian_is_hermitian(
        delta in -2.0..2.0f64, dc in -3.0..3.0f64, sp in 0.1..3.0f64, sc in 0.1..3.0f64, frac in 0.0..1.0f64,
    ) {
        let (sys, seq) = pair_and_cnot(delta, dc, sp, sc);
        let h = build_hamiltonian(&sys, &seq, frac * seq.duration()).unwrap();
        let n = sys.dim();
        let scale = h.iter().map(|x| x.norm()).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((h[i * n + j] - h[j * n + i].conj()).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn decay_fractions_sum_to_one(sp in 0.0..4.0f64, sc in 0.0..4.0f64, p in 10.0..500.0f64, d in 500.0..9000.0f64) {
        let six = preset_6p32(sp, sc);
        let seven = preset_7p12(&Preset7p12 { probe_power_uw: p, detuning_mhz: d, ..Default::default() }).unwrap();
        for s in [six, seven] {
            for (upper, row) in branching_fractions(&s).unwrap() {
                let total: f64 = row.iter().map(|(_, f)| f).sum();
                prop_assert!((total - 1.0).abs() < 1e-12, "{upper}: {total}");
                prop_assert!(row.iter().all(|(_, f)| *f >= 0.0));
            }
        }
    }

    #[test]
    fn interaction_scales_as_r6(v in 1.0..500.0f64, r0 in 1.0..10.0f64, r in 1.0..20.0f64, s in 0.2..5.0f64) {
        let spec = InteractionSpec::new(mhz(v), r0).unwrap();
        let a = interaction_strength(&spec, r).unwrap();
        let b = interaction_strength(&spec, r * s).unwrap();
        prop_assert!((b * s.powi(6) / a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rabi_scales_as_sqrt_intensity(s in 0.01..9.0f64) {
        let base = preset_6p32(1.0, 1.0);
        let scaled = preset_6p32(s, s);
        for beam in [Beam::Probe, Beam::Coupling] {
            let a: Vec<f64> = base.couplings_of(beam).map(|c| c.peak_rabi).collect();
            let b: Vec<f64> = scaled.couplings_of(beam).map(|c| c.peak_rabi).collect();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((y / x - s.sqrt()).abs() < 1e-12);
            }
        }
        let p7 = |uw: f64| preset_7p12(&Preset7p12 { probe_power_uw: uw, ..Default::default() }).unwrap();
        let (a, b) = (effective_rabi(&p7(200.0)), effective_rabi(&p7(200.0 * s)));
        prop_assert!((b / a - s).abs() < 1e-9);
    }

    #[test]
    fn pi_area_identity(omega in 0.01..50.0f64) {
        let w = mhz(omega);
        let tau = duration_for_pi_area(w).unwrap();
        prop_assert!((two_photon_area(w, tau) - PI).abs() < 1e-12);
    }

    #[test]
    fn shifted_rotation_is_identity(theta in 0.05..(4.0 * PI), phase in 0.0..(2.0 * PI)) {
        let r = local_microwave_shift(theta, 1.0).unwrap();
        let g = Gate::Rotation { sites: vec![0], theta, phase, shifted: vec![0], detuning_ratio: r };
        let m = g.matrix(0);
        prop_assert!((m[0][0] - 1.0).norm() < 1e-9 && (m[1][1] - 1.0).norm() < 1e-9);
        prop_assert!(m[0][1].norm() < 1e-9 && m[1][0].norm() < 1e-9);
    }

    #[test]
    fn sequence_serde_round_trip(tau in 0.1..5.0f64, pi_ns in 10.0..1000.0f64, gap in 0.0..2.0f64, k in 1usize..5, on in any::<bool>()) {
        let layout = GateLayout { coupling_on_control: on, gap: us(gap), ..GateLayout::star(k) };
        let seq = cnot_sequence(&layout, us(tau), pi_ns * 1e-9).unwrap();
        let back: PulseSequence = serde_json::from_str(&serde_json::to_string(&seq).unwrap()).unwrap();
        prop_assert_eq!(back, seq);
    }

    #[test]
    fn dark_state_nullity(op in 0.0..200.0f64, oc in 0.01..200.0f64) {
        let (op, oc) = (mhz(op), mhz(oc));
        let d = dark_states(op, oc).unwrap();
        prop_assert_eq!(bright_residual(op, oc, &d.d1), 0.0);
        prop_assert!(bright_residual(op, oc, &d.d2).abs() <= 1e-15 * (op + oc));
        for v in [d.d1, d.d2] {
            prop_assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_rabi_is_bilinear(s in 0.0..5.0f64, leg in 0usize..2) {
        let base = preset_6p32(1.0, 1.0);
        let mut scaled = base.clone();
        let lower = ["q0", "q1"][leg];
        for c in scaled.couplings.iter_mut().filter(|c| c.beam == Beam::Probe && c.lower == lower) {
            c.peak_rabi *= s;
        }
        prop_assert!((effective_rabi(&scaled) - s * effective_rabi(&base)).abs() <= 1e-12 * effective_rabi(&base));
    }

    #[test]
    fn config_round_trip(
        preset in 0usize..2, delta in proptest::option::of(-2.0..2.0f64), tau in proptest::option::of(0.1..3.0f64),
        seed in any::<u64>(), k in 1usize..5, traj in 1usize..5000, pairs in any::<bool>(),
    ) {
        let mut src = format!(
            "protocol = \"ghz\"\nseed = {seed}\n[model]\npreset = \"{}\"\n",
            ["6p32_table1", "7p12_figS2"][preset]
        );
        if let Some(d) = delta {
            src.push_str(&format!("raman_detuning_mhz = {d:?}\n"));
        }
        if let Some(t) = tau {
            src.push_str(&format!("tau_us = {t:?}\n"));
        }
        src.push_str(&format!("[geometry]\nk = {k}\ntarget_pairs = {pairs}\n[integrator]\nmethod = \"trajectories\"\ntrajectories = {traj}\n"));
        let a = ExperimentConfig::from_toml_str(&src).unwrap();
        let b = ExperimentConfig::from_toml_str(&a.to_toml_string()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.to_toml_string(), b.to_toml_string());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn liouvillian_is_trace_free(seed in any::<u64>(), frac in 0.0..1.0f64) {
        let (sys, seq) = pair_and_cnot(0.28, 1.8, 1.0, 1.0);
        let seg = seq.segments().nth(1).unwrap();
        let gen = compile(&sys, Some(seg)).unwrap();
        let rho = common::random_density(sys.dim(), &mut ChaCha8Rng::seed_from_u64(seed));
        let mut drho = vec![C64::new(0.0, 0.0); rho.data.len()];
        LindbladRhs::new(&gen).eval(frac * seg.duration, &rho.data, &mut drho);
        let n = sys.dim();
        let scale = drho.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let tr: C64 = (0..n).map(|i| drho[i * n + i]).sum();
        prop_assert!(tr.norm() <= 1e-12 * scale);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((drho[i * n + j] - drho[j * n + i].conj()).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn purity_conserved_without_decay(delta in 0.0..1.0f64, dc in -1.0..3.0f64) {
        let mut m = GateModel::table_i().with_detunings(mhz(delta), mhz(dc));
        m.preset = eitgate::model::PresetSpec::P6p32 { raman_power_scale: 1.0, coupling_power_scale: 1.0 };
        let mut sys = m.pair().unwrap();
        for s in &mut sys.sites {
            s.decays.clear();
        }
        let psi = {
            let mut a = vec![C64::new(0.0, 0.0); sys.dim()];
            a[sys.index_of_labels(&["q1", "q0"]).unwrap()] = C64::new(0.6, 0.0);
            a[sys.index_of_labels(&["q0", "q1"]).unwrap()] = C64::new(0.0, 0.8);
            StateVector::from_amplitudes(a)
        };
        let run = evolve_dense(&DensityMatrix::from_pure(&psi), &sys, &m.cnot(1).unwrap(), &IntegratorConfig::default()).unwrap();
        prop_assert!((run.state.purity() - 1.0).abs() < 1e-7);
        prop_assert!((run.state.trace() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn time_reversal(det in -5.0..5.0f64, rabi in 0.5..5.0f64, phase in 0.0..(2.0 * PI), t in 0.1..2.0f64) {
        // Constant drive on q1 ↔ r of a lone site: H → −H undoes the evolution.
        let forward = {
            let mut s = preset_6p32(1.0, 1.0).with_detunings(0.0, mhz(det)).restrict(&["q0", "q1", "r", "d"]).unwrap();
            s.decays.clear();
            for c in s.couplings.iter_mut() {
                c.peak_rabi = mhz(rabi);
                c.phase = phase;
            }
            s
        };
        let mut backward = forward.clone();
        for l in backward.levels.iter_mut() {
            l.energy_offset = -l.energy_offset;
        }
        for c in backward.couplings.iter_mut() {
            c.phase += PI;
            c.detuning = -c.detuning;
        }
        let g = Geometry { positions: vec![[0.0, 0.0]] };
        let spec = eitgate::atom::presets::interaction_81d();
        let sys_f = CompositeSystem::new(vec![forward], g.clone(), spec).unwrap();
        let sys_b = CompositeSystem::new(vec![backward], g, spec).unwrap();
        let mut seq = PulseSequence::new("drive");
        let env = eitgate::pulse::Envelope::constant(us(t));
        seq.push_segment("drive", us(t), vec![eitgate::pulse::ActiveDrive { site: 0, beam: Beam::Rydberg, envelope: env }]).unwrap();
        let cfg = IntegratorConfig::default();
        let start = DensityMatrix::basis(4, 1);
        let mid = evolve_dense(&start, &sys_f, &seq, &cfg).unwrap().state;
        prop_assert!(mid.get(1, 1).re < 1.0 - 1e-6 || rabi * t < 1e-3);
        let mut mid0 = mid.clone();
        mid0.time = 0.0;
        let end = evolve_dense(&mid0, &sys_b, &seq, &cfg).unwrap().state;
        prop_assert!((end.get(1, 1).re - 1.0).abs() < 1e-7);
    }

    #[test]
    fn register_swap_symmetry(rabi in 0.5..3.0f64, sep in 3.0..10.0f64) {
        // Two identical sites driven identically from |q1 q1⟩.
        let mut s = preset_6p32(1.0, 1.0).with_detunings(0.0, 0.0).restrict(&["q0", "q1", "r", "d"]).unwrap();
        for c in s.couplings.iter_mut().filter(|c| c.beam == Beam::Rydberg) {
            c.peak_rabi = mhz(rabi);
        }
        let sys = CompositeSystem::new(vec![s.clone(), s], Geometry::pair(sep), eitgate::atom::presets::interaction_81d()).unwrap();
        let t = control_pi_duration(mhz(rabi)).unwrap();
        let drive = |site| eitgate::pulse::ActiveDrive { site, beam: Beam::Rydberg, envelope: eitgate::pulse::Envelope::constant(t) };
        let mut seq = PulseSequence::new("both");
        seq.push_segment("both", t, vec![drive(0), drive(1)]).unwrap();
        let i11 = sys.index_of_labels(&["q1", "q1"]).unwrap();
        let rho = evolve_dense(&DensityMatrix::basis(16, i11), &sys, &seq, &IntegratorConfig::default()).unwrap().state;
        let swap = |i: usize| sys.index_of(&[sys.site_level(i, 1), sys.site_level(i, 0)]).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                prop_assert!((rho.get(i, j) - rho.get(swap(i), swap(j))).norm() < 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn measurement_algebra(seed in any::<u64>(), x in 0.0..0.5f64, phi in 0.0..(2.0 * PI)) {
        let sys = qutrit_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rho = common::random_density(9, &mut rng);
        common::inject_x(&mut rho, &sys, x);
        let m = apply_measurement(&rho, &sys).unwrap();
        prop_assert!((m.a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((m.b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let e = parity_elements(&rho, &sys).unwrap();
        prop_assert!((parity_closed_form(&e, phi) - parity_brute_force(&rho, &sys, phi).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn loss_correction_recovers_conditionals(seed in any::<u64>(), loss in 0.0..0.6f64) {
        let sys = qutrit_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rho = common::random_density(9, &mut rng);
        common::inject_x(&mut rho, &sys, 0.0);
        let lossy = common::with_uniform_loss(&rho, &sys, loss);
        let p00 = rho.get(0, 0).re;
        let comp: f64 = ["q0", "q1"].iter().flat_map(|a| ["q0", "q1"].map(|b| (*a, b)))
            .map(|(a, b)| { let i = sys.index_of_labels(&[a, b]).unwrap(); rho.get(i, i).re })
            .sum();
        let got = loss_correct(&apply_measurement(&lossy, &sys).unwrap()).unwrap();
        prop_assert!((got - p00 / comp).abs() < 1e-12);
    }

    #[test]
    fn fidelity_bounds(seed in any::<u64>(), a in 0.0..PI, b in 0.0..PI, pa in 0.0..(2.0 * PI), pb in 0.0..(2.0 * PI)) {
        let sys = qutrit_pair();
        let rho = common::random_density(9, &mut ChaCha8Rng::seed_from_u64(seed));
        let f = bell_report(&rho, &sys).unwrap().fidelity;
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        // Product of two single-qubit pure states.
        let q = |t: f64, p: f64| [C64::new((t / 2.0).cos(), 0.0), C64::from_polar((t / 2.0).sin(), p), C64::new(0.0, 0.0)];
        let (u, v) = (q(a, pa), q(b, pb));
        let amps: Vec<C64> = (0..9).map(|i| u[i / 3] * v[i % 3]).collect();
        let prod = DensityMatrix::from_pure(&StateVector::from_amplitudes(amps));
        prop_assert!(bell_report(&prod, &sys).unwrap().fidelity <= 0.5 + 1e-12);
    }
}

#[test]
fn prep_readout_round_trip() {
    let sys = qutrit_pair();
    let start = sys.index_of_labels(&["q0", "q0"]).unwrap();
    for basis in BasisState::ALL {
        let (prep, readout) = prep_and_readout_circuits(basis);
        let mut rho = DensityMatrix::basis(9, start);
        for seq in [&prep, &readout] {
            for s in &seq.steps {
                if let eitgate::pulse::Step::Instant { gate, .. } = s {
                    rho.apply_gate(&sys, gate).unwrap();
                }
            }
        }
        assert!((rho.get(start, start).re - 1.0).abs() < 1e-12, "{basis:?}");
        let mut mid = DensityMatrix::basis(9, start);
        for s in &prep.steps {
            if let eitgate::pulse::Step::Instant { gate, .. } = s {
                mid.apply_gate(&sys, gate).unwrap();
            }
        }
        let (c, t) = basis.bits();
        let want = sys.index_of_labels(&[["q0", "q1"][c], ["q0", "q1"][t]]).unwrap();
        assert!((mid.get(want, want).re - 1.0).abs() < 1e-12, "{basis:?}");
    }
}

/// Lossless limit: the |1…1⟩ branch carries (−1)^k from the target
/// transfers times −1 from the control's 2π round trip.
#[test]
fn ghz_sign_rule_in_ideal_limit() {
    let toy = common::ideal_ladder();
    let tau = duration_for_pi_area(effective_rabi(&toy)).unwrap();
    let cfg = IntegratorConfig { method: Method::Trajectories, trajectories: 1, ..Default::default() };
    for k in 1..=4 {
        let sys = CompositeSystem::with_pairs(
            vec![toy.clone(); k + 1],
            Geometry::cross(k, 4.0),
            InteractionSpec::new(mhz(500.0), 4.0).unwrap(),
            |i, _| i == 0,
        )
        .unwrap();
        let seq = cnot_sequence(&GateLayout::star(k), tau, control_pi_duration(mhz(2.0)).unwrap()).unwrap();
        let r = ghz_on(&sys, &seq, &cfg).unwrap();
        let sign = -(-1f64).powi(k as i32);
        assert_eq!(r.expected_sign, sign);
        assert!(r.branch_phase.cos() * sign > 0.95, "k {k}: phase {}", r.branch_phase);
        assert!(r.fidelity > 0.99, "k {k}: F {}", r.fidelity);
    }
}

#[test]
fn microwave_shift_formula() {
    let d = local_microwave_shift(PI, khz(3.31)).unwrap();
    assert!((d - 15f64.sqrt() * khz(3.31)).abs() < 1e-9 * d);
}

#[test]
fn dense_reruns_are_byte_identical() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/fig_s1b.toml")).unwrap();
    let cfg = ExperimentConfig::from_toml_str(&src).unwrap();
    let base = std::env::temp_dir().join(format!("eitgate-rerun-{}", std::process::id()));
    let a = eitgate::runner::run(&cfg, &base.join("a")).unwrap();
    let b = eitgate::runner::run(&cfg, &base.join("b")).unwrap();
    let read = |r: &eitgate::runner::RunReport| std::fs::read(r.files.iter().find(|f| f.ends_with(".csv")).unwrap()).unwrap();
    assert_eq!(read(&a), read(&b));
    std::fs::remove_dir_all(&base).unwrap();
}
