//! The two EIT dark states as the probe ramps up, and their decoupling
//! from the intermediate level.

use eitgate::analysis::{bright_residual, dark_states};
use eitgate::units::mhz;

fn main() -> eitgate::Result<()> {
    let oc = mhz(40.0);
    println!("omega_p_mhz,x,d2_q,d2_r,residual_d1,residual_d2");
    for i in 0..=8 {
        let op = mhz(5.0 * i as f64);
        let d = dark_states(op, oc)?;
        println!(
            "{},{:.4},{:.6},{:.6},{:.1e},{:.1e}",
            5 * i,
            d.x,
            d.d2[0],
            d.d2[2],
            bright_residual(op, oc, &d.d1),
            bright_residual(op, oc, &d.d2)
        );
    }
    Ok(())
}
