//! π, 2 µs in |r⟩, π on a lone control, with and without coupling light.

use eitgate::analysis::control_dwell;
use eitgate::dynamics::IntegratorConfig;
use eitgate::model::{ControlModel, GateModel};
use eitgate::units::us;

fn main() -> eitgate::Result<()> {
    let m = GateModel { control: ControlModel::FullLadder, ..GateModel::table_i() };
    let cfg = IntegratorConfig::default();
    for on in [false, true] {
        let r = control_dwell(&m, us(2.0), on, &cfg)?;
        println!(
            "coupling {}: return loss {:.4} (d {:.4}, r {:.4}, q0 {:.4})",
            if on { "on " } else { "off" },
            r.return_loss,
            r.leakage,
            r.rydberg_residual,
            r.p0
        );
    }
    Ok(())
}
