//! Static quantities of the two presets: Ω_R, τ, δ_AC, blockade margin and
//! cross-talk.

use eitgate::analysis::{ac_stark_shift, crosstalk_bound, effective_rabi};
use eitgate::atom::{eit_break_margin, interaction_strength};
use eitgate::model::GateModel;
use eitgate::units::to_mhz;

fn main() -> eitgate::Result<()> {
    for (name, m) in [("6P3/2", GateModel::table_i()), ("7P1/2", GateModel::p7())] {
        let s = m.target_scheme()?;
        let v = interaction_strength(&m.preset.interaction(), m.separation)?;
        println!("{name}");
        println!("  Omega_R/2pi   {:.4} MHz", to_mhz(effective_rabi(&s)));
        println!("  tau           {:.4} us", m.tau()? * 1e6);
        println!("  delta_AC/2pi  {:.4} MHz", to_mhz(ac_stark_shift(&s)));
        println!("  control pi    {:.1} ns", m.control_pi()? * 1e9);
        println!("  V/2pi at {} um {:.1} MHz, margin {:.1}", m.separation, to_mhz(v), eit_break_margin(&s, v)?);
    }
    println!("cross-talk at 6 um with a 3 um waist: {:.3e}", crosstalk_bound(3.0, 6.0)?);
    Ok(())
}
