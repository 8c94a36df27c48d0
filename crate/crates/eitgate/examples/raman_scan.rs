//! Raman transfer against δ with the coupling laser off. Writes CSV to
//! stdout and the located optimum to stderr.

use eitgate::analysis::raman_transfer_scan;
use eitgate::dynamics::IntegratorConfig;
use eitgate::model::GateModel;
use eitgate::units::mhz;

fn main() -> eitgate::Result<()> {
    let grid: Vec<f64> = (0..=30).map(|i| mhz(0.02 * i as f64)).collect();
    let scan = raman_transfer_scan(&GateModel::table_i(), &grid, &IntegratorConfig::default())?;
    print!("{}", scan.to_csv());
    let (d, p) = scan.maximum();
    eprintln!("optimum delta/2pi = {d:.3} MHz, transfer {p:.5}, error {:.2e}", 1.0 - p);
    Ok(())
}
