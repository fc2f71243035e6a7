//! Factor Φ_d(2) and show where each prime came from.
//!
//!     cargo run --example factor_phi -- 11 35 64 105

use wagstaff_bls::cyclotomic;
use wagstaff_bls::factor::{factor_fully, BudgetSpec, SourceSet};

fn main() {
    let ds: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let ds = if ds.is_empty() { vec![11, 35, 64, 105, 127] } else { ds };
    let budget = BudgetSpec::default();
    for d in ds {
        let v = cyclotomic::phi_at_2(d).expect("d >= 1");
        let fz = factor_fully(&v, d, &budget, &SourceSet::local());
        println!("Φ_{d}(2) = {fz}");
    }
}
