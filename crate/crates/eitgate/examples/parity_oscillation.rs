//! Parity fringe after Bell preparation, read through the blow-away model.

use eitgate::analysis::{parity_curve, phase_grid};
use eitgate::dynamics::IntegratorConfig;
use eitgate::model::GateModel;
use eitgate::units::mhz;

fn main() -> eitgate::Result<()> {
    let model = GateModel::table_i().with_detunings(mhz(0.294), mhz(1.0));
    let c = parity_curve(&model, &phase_grid(24), &IntegratorConfig::default())?;
    print!("{}", c.scan.to_csv());
    eprintln!(
        "fit: amplitude {:.4} (2|c| = {:.4}), offset {:.4} (2Re d + rho_xx = {:.4})",
        c.fit.amplitude,
        2.0 * c.elements.c.norm(),
        c.fit.offset,
        2.0 * c.elements.d.re + c.elements.rho_xx
    );
    Ok(())
}
