//! Prove W_2617 with the bundled factor table for its large terms.
//! Table lines are claims; every prime is re-checked and certified.
//!
//!     cargo run --release --example factor_tables

use std::path::Path;

use wagstaff_bls::bls;
use wagstaff_bls::factor::table::load_factor_table;
use wagstaff_bls::{BudgetSpec, SourceSet};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/w2617_table.txt");
    let table = load_factor_table(&path).expect("bundled table");
    println!("{} table entries from {}", table.len(), path.display());
    let budget = BudgetSpec { max_term_bits: Some(400), ..BudgetSpec::default() };
    match bls::prove_wagstaff_detailed(2617, &SourceSet::with_tables(table), &budget) {
        Ok(proof) => {
            for r in proof.reports() {
                println!("{r}");
            }
            let (_, digits, _, primes, m) = bls::summary_row(&proof);
            println!("W_2617 ({digits} digits): {primes} primes, M = {m}, form {}", proof.decomposition.form);
        }
        Err(e) => println!("{e}"),
    }
}
