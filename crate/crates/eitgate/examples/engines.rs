//! Dense master equation against quantum trajectories on a decaying
//! three-level atom with a leakage sink driven on its upper transition.

use eitgate::atom::{Beam, Category, DecayChannel, DriveCoupling, Geometry, InteractionSpec, Level, LevelScheme};
use eitgate::dynamics::{
    evolve_dense, evolve_trajectories, CompositeSystem, DensityMatrix, IntegratorConfig, Method, StateVector,
};
use eitgate::pulse::{ActiveDrive, Envelope, PulseSequence};
use eitgate::units::mhz;

fn main() -> eitgate::Result<()> {
    let scheme = LevelScheme {
        name: "toy".into(),
        levels: vec![
            Level::new("q0", 0.0, Category::Computational),
            Level::new("q1", 0.0, Category::Computational),
            Level::new("e", 0.0, Category::Intermediate),
            Level::new("d", 0.0, Category::Leakage),
        ],
        decays: vec![
            DecayChannel { from: "e".into(), to: "q0".into(), rate: mhz(0.3) },
            DecayChannel { from: "e".into(), to: "q1".into(), rate: mhz(0.2) },
            DecayChannel { from: "e".into(), to: "d".into(), rate: mhz(0.1) },
        ],
        couplings: vec![DriveCoupling {
            lower: "q1".into(),
            upper: "e".into(),
            peak_rabi: mhz(1.0),
            detuning: 0.0,
            beam: Beam::Probe,
            phase: 0.0,
        }],
        light_shifts: vec![],
        reference_detuning: mhz(1.0),
        qubit_splitting: mhz(1.0),
        angular: None,
    };
    let sys = CompositeSystem::new(vec![scheme], Geometry::new(vec![[0.0, 0.0]])?, InteractionSpec::new(1.0, 1.0)?)?;
    let mut seq = PulseSequence::new("drive");
    let t = 2e-6;
    seq.push_segment("drive", t, vec![ActiveDrive { site: 0, beam: Beam::Probe, envelope: Envelope::constant(t) }])?;
    let dense = evolve_dense(&DensityMatrix::basis(4, 1), &sys, &seq, &IntegratorConfig::default())?;
    let cfg = IntegratorConfig { method: Method::Trajectories, trajectories: 5000, seed: 3, ..Default::default() };
    let traj = evolve_trajectories(&StateVector::basis(4, 1), &sys, &seq, &cfg)?;
    for (i, l) in ["q0", "q1", "e", "d"].iter().enumerate() {
        let (m, se) = traj.projection(&[i]);
        println!("P({l}): dense {:.5}  trajectories {m:.5} ± {se:.5}", dense.state.get(i, i).re);
    }
    println!("jumped {}/{}", traj.jumped, traj.trajectories);
    Ok(())
}
