//! Global microwave π with the control shifted by √15·Ω: the target flips,
//! the control completes a 4π cycle.

use eitgate::atom::{presets::interaction_81d, preset_6p32, Geometry};
use eitgate::dynamics::{evolve_dense, CompositeSystem, DensityMatrix, IntegratorConfig};
use eitgate::pulse::{local_microwave_shift, shifted_microwave_pi};
use eitgate::units::khz;

fn main() -> eitgate::Result<()> {
    let omega = khz(3.31);
    println!("|Delta'|/2pi = {:.2} kHz", local_microwave_shift(std::f64::consts::PI, omega)? / khz(1.0));
    let site = preset_6p32(1.0, 1.0).with_detunings(0.0, 0.0).restrict(&["q0", "q1", "d"])?;
    let sys = CompositeSystem::new(vec![site.clone(), site], Geometry::pair(6.0), interaction_81d())?;
    let seq = shifted_microwave_pi(2, &[0], omega)?;
    for c in ["q0", "q1"] {
        let start = sys.index_of_labels(&[c, "q0"])?;
        let want = sys.index_of_labels(&[c, "q1"])?;
        let run = evolve_dense(&DensityMatrix::basis(sys.dim(), start), &sys, &seq, &IntegratorConfig::default())?;
        println!("control {c}: P(control kept, target flipped) = {:.9}", run.state.get(want, want).re);
    }
    Ok(())
}
