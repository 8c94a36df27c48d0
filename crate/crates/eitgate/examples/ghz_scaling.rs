//! CNOTᵏ towards GHZ states on the 7P1/2 scheme, by trajectories.
//!
//! `cargo run --release --example ghz_scaling -- 3` stops at k = 3.

use eitgate::analysis::ghz_scaling;
use eitgate::atom::Geometry;
use eitgate::dynamics::{IntegratorConfig, Method};
use eitgate::model::GateModel;

fn main() -> eitgate::Result<()> {
    let kmax: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let cfg = IntegratorConfig { method: Method::Trajectories, trajectories: 2000, seed: 7, ..Default::default() };
    let model = GateModel::p7();
    let mut f1 = None;
    for k in 1..=kmax.min(4) {
        let r = ghz_scaling(&model, k, Geometry::cross(k, 4.0), false, &cfg)?;
        let f1 = *f1.get_or_insert(r.fidelity);
        println!(
            "k {k}: F {:.5} ± {:.1e}  F1^k {:.5}  branch phase {:+.3}  jumped {}/{}",
            r.fidelity,
            r.standard_error,
            f1.powi(k as i32),
            r.branch_phase,
            r.jumped,
            r.trajectories
        );
    }
    Ok(())
}
