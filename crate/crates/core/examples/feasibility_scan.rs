//! Which exponents have enough small cyclotomic terms for a BLS proof.
//!
//!     cargo run --release --example feasibility_scan -- 2617 3539 10501

use wagstaff_bls::scan::{self, ScanOptions};
use wagstaff_bls::{known, SourceSet};

fn main() {
    let mut ps: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    if ps.is_empty() {
        ps = known::all().into_iter().filter(|&p| p > 3).collect();
    }
    let opts = ScanOptions { skip_digits: ps.iter().any(|&p| p > 50_000), ..Default::default() };
    println!("{}", scan::HEADER);
    for row in scan::feasibility_scan(&ps, &SourceSet::local(), &opts) {
        println!("{row}");
    }
}
