//! The congruence ω_a^{(Q−ε)/2} ≡ δ (mod Q) with ω_a = a + √(a²−1),
//! for a handful of (Q, a), and condition (II) for small Wagstaff exponents.

use num_bigint::{BigInt, BigUint};
use wagstaff_bls::quad_ring;

fn main() {
    for (q, a) in [(7u64, 3i64), (11, 3), (13, 5), (101, 10), (65537, 3), (341, 3)] {
        match quad_ring::chua_outcome(&BigInt::from(a), &BigUint::from(q)) {
            Ok(o) => println!("Q = {q:>6}, a = {a:>3}: ε = {:>2}, δ = {:>2}, holds = {}", o.epsilon, o.delta, o.holds),
            Err(e) => println!("Q = {q:>6}, a = {a:>3}: {e}"),
        }
    }
    println!();
    for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 43] {
        println!("W_{p:<3} condition (II): {}", quad_ring::condition_two(p).unwrap());
    }
}
