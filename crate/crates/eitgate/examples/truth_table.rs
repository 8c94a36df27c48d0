//! CNOT truth table through microwave prep/readout and blow-away imaging.

use eitgate::analysis::cnot_truth_table;
use eitgate::dynamics::IntegratorConfig;
use eitgate::model::GateModel;
use eitgate::units::mhz;

fn main() -> eitgate::Result<()> {
    let model = GateModel::table_i().with_detunings(mhz(0.294), mhz(1.0));
    let t = cnot_truth_table(&model, &IntegratorConfig::default(), 100)?;
    print!("{}", t.to_csv());
    eprintln!("F raw {:.4}, loss-corrected {:.4}", t.fidelity_raw, t.fidelity_corrected);
    Ok(())
}
