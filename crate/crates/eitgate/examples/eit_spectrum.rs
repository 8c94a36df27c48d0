//! EIT spectra for τ = 1.5, 2 and 3 µs.

use eitgate::analysis::eit_spectrum;
use eitgate::dynamics::IntegratorConfig;
use eitgate::model::GateModel;
use eitgate::units::{mhz, us};

fn main() -> eitgate::Result<()> {
    let model = GateModel::table_i();
    let grid: Vec<f64> = (0..=60).map(|i| mhz(-1.0 + 0.1 * i as f64)).collect();
    let cfg = IntegratorConfig::default();
    for tau in [1.5, 2.0, 3.0] {
        let s = eit_spectrum(&model, &grid, us(tau), &cfg)?;
        let (dc, p0) = s.minimum();
        let edge = s.values[0].max(*s.values.last().unwrap());
        println!("tau {tau} us: minimum P0 {p0:.4} at {dc:.2} MHz, edge {edge:.3}");
    }
    Ok(())
}
