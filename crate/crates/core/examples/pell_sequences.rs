//! Pell pairs (U_n, V_n) with (3 + 2√2)^n-style growth and the identity
//! V_n² − 8U_n² = 4(−1)^n.

use wagstaff_bls::quad_ring;

fn main() {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    for k in 0..=n {
        let pp = quad_ring::pell(k);
        println!("{k:>3}  U = {:<12} V = {:<12} identity {}", pp.u, pp.v, pp.satisfies_identity());
    }
}
