//! Run the BLS decision on every prime N < 2000 whose N − 1 has an even
//! unitary divisor F with F³ > N, and count composites it wrongly accepts
//! (there should be none).

use num_bigint::BigUint;
use wagstaff_bls::bigmath::{factor_u64, is_prime_u64};
use wagstaff_bls::bls;

fn main() {
    let (mut proved, mut rejected) = (0, 0);
    for n in (5u64..2000).step_by(2) {
        let fac = factor_u64(n - 1);
        // all subsets of distinct primes containing 2
        for mask in 0u32..(1 << fac.len()) {
            if mask & 1 == 0 {
                continue;
            }
            let primes: Vec<BigUint> =
                fac.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &(q, _))| q.into()).collect();
            let f: u64 = fac.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &(q, e))| q.pow(e)).product();
            if (f as u128).pow(3) <= n as u128 {
                continue;
            }
            let ok = bls::prove_with_factored_part(&BigUint::from(n), &primes).is_ok();
            if ok && !is_prime_u64(n) {
                println!("accepted composite {n} with F = {f}");
            }
            if ok { proved += 1 } else { rejected += 1 }
        }
    }
    println!("{proved} accepted, {rejected} rejected");
}
