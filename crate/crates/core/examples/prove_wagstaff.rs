//! Prove W_p prime and print the summary row, the factored part and the
//! certificate digest.
//!
//!     cargo run --release --example prove_wagstaff -- 127

use wagstaff_bls::bls::{self, BlsError};
use wagstaff_bls::{BudgetSpec, SourceSet};

fn main() {
    let p: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(127);
    let budget = BudgetSpec::default();
    match bls::prove_wagstaff_detailed(p, &SourceSet::local(), &budget) {
        Ok(proof) => {
            let (p, digits, tau, primes, m) = bls::summary_row(&proof);
            println!("W_{p}: {digits} digits, tau(p-1) = {tau}, {primes} primes in F, M = {m}");
            println!("form: {}", proof.decomposition.form);
            for e in &proof.decomposition.entries {
                println!("  q = {} ^ {}  witness {}  ({})", e.q, e.e, e.witness.as_ref().map_or("-".into(), |w| w.to_string()), e.provenance);
            }
            let cert = wagstaff_bls::BlsCertificate::from_proof(&proof);
            println!("digest: {}", cert.digest);
        }
        Err(BlsError::CompositeDetected { witness }) => println!("W_{p} is composite: {witness}"),
        Err(e) => println!("W_{p}: {e}"),
    }
}
