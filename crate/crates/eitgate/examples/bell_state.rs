//! Bell preparation, with and without coupling light on the control.

use eitgate::analysis::{bell_report, simulate_bell};
use eitgate::dynamics::IntegratorConfig;
use eitgate::model::{ControlModel, GateModel};
use eitgate::units::mhz;

fn main() -> eitgate::Result<()> {
    let cfg = IntegratorConfig::default();
    let base = GateModel::table_i().with_detunings(mhz(0.294), mhz(1.0));
    let with_control = GateModel { control: ControlModel::FullLadder, coupling_on_control: true, ..base.clone() };
    for (name, m) in [("target-only coupling", base), ("coupling on control", with_control)] {
        let (sys, run) = simulate_bell(&m, &cfg)?;
        let b = bell_report(&run.state, &sys)?;
        println!("{name}");
        println!("  F {:.4}  p00 {:.4}  p11 {:.4}  |c| {:.4}", b.fidelity, b.p00, b.p11, b.coherence);
        println!("  leakage {:.4}  loss {:.4}  trace error {:.1e}", b.leakage, b.loss, run.max_trace_error);
    }
    Ok(())
}
