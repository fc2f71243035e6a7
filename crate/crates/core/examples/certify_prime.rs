//! Certify an arbitrary prime with a recursive N − 1 proof and replay it.
//!
//!     cargo run --example certify_prime -- 170141183460469231731687303715884105727

use num_bigint::BigUint;
use wagstaff_bls::certify::{self, PrimalityProof};
use wagstaff_bls::BudgetSpec;

fn show(p: &PrimalityProof, depth: usize) {
    let pad = "  ".repeat(depth);
    match p {
        PrimalityProof::SmallDeterministic { n } => println!("{pad}{n}: small, deterministic bases"),
        PrimalityProof::NMinusOne(np) => {
            println!("{pad}{}: n - 1 proof ({:?})", np.n, np.form);
            for f in &np.factors {
                println!("{pad}  q = {}^{}  a = {}", f.q, f.exponent, f.witness);
                show(&f.proof, depth + 2);
            }
        }
    }
}

fn main() {
    let n: BigUint = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "170141183460469231731687303715884105727".into())
        .parse()
        .expect("decimal integer");
    match certify::prove_prime(&n, &BudgetSpec::default()) {
        Ok(proof) => {
            show(&proof, 0);
            println!("nodes {}, depth {}, replay ok: {}", proof.size(), proof.depth(), certify::verify_proof(&n, &proof));
        }
        Err(e) => println!("{e}"),
    }
}
