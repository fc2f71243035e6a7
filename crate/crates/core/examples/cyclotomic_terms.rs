//! The decomposition W_p − 1 = 2·∏ Φ_d(2) over d | p − 1, d ≥ 3.

use wagstaff_bls::cyclotomic;

fn main() {
    let p = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(61);
    let (nm1, terms) = cyclotomic::wagstaff_n_minus_one(p).expect("p odd prime");
    println!("W_{p} - 1 = {nm1}");
    // Φ_1(2) = 1 and Φ_2(2) = 3 cancel against the /3
    let terms: Vec<_> = terms.into_iter().filter(|t| t.d >= 3).collect();
    for t in &terms {
        println!("  Φ_{}(2) = {}  ({} bits)", t.d, t.value, t.bit_length);
    }
    let prod: num_bigint::BigUint = terms.iter().map(|t| &t.value).product::<num_bigint::BigUint>() * 2u32;
    println!("product check: {}", prod == nm1);
}
