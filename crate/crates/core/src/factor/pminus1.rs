//! Pollard p − 1, stage 1.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use super::NoFactorFound;
use crate::bigmath;

const BASES: [u32; 4] = [2, 3, 5, 7];
const PRIMES_PER_GCD: usize = 64;

fn primes_table(b1: u64) -> Vec<u64> {
    static CACHE: OnceLock<Vec<u64>> = OnceLock::new();
    const CACHED_LIMIT: u64 = 1_000_000;
    if b1 <= CACHED_LIMIT {
        let all = CACHE.get_or_init(|| bigmath::primes_up_to(CACHED_LIMIT));
        let end = all.partition_point(|&p| p <= b1);
        all[..end].to_vec()
    } else {
        bigmath::primes_up_to(b1)
    }
}

fn prime_power(q: u64, b1: u64) -> u64 {
    let mut pk = q;
    while pk <= b1 / q {
        pk *= q;
    }
    pk
}

/// A nontrivial divisor of `n` if some prime `r | n` has `B1`-smooth `r − 1`.
///
/// When one block's gcd swallows all of `n`, the block is replayed one prime
/// power at a time (ascending, then descending) before moving to the next base.
pub fn pollard_p_minus_1(n: &BigUint, b1: u64) -> Result<BigUint, NoFactorFound> {
    if n < &BigUint::from(4u32) || b1 < 2 {
        return Err(NoFactorFound);
    }
    if n.is_even() {
        return Ok(BigUint::from(2u32));
    }
    let primes = primes_table(b1);
    let powers: Vec<BigUint> = primes.iter().map(|&q| BigUint::from(prime_power(q, b1))).collect();
    for base in BASES {
        let mut a = BigUint::from(base);
        let g = a.gcd(n);
        if !g.is_one() {
            if &g != n {
                return Ok(g);
            }
            continue;
        }
        let mut overshoot = false;
        for block in powers.chunks(PRIMES_PER_GCD) {
            let start = a.clone();
            for pk in block {
                a = a.modpow(pk, n);
            }
            let g = gcd_minus_one(&a, n);
            if g.is_one() {
                continue;
            }
            if &g != n {
                return Ok(g);
            }
            if let Some(f) = replay(&start, block.iter(), n).or_else(|| replay(&start, block.iter().rev(), n)) {
                return Ok(f);
            }
            overshoot = true;
            break;
        }
        if !overshoot {
            // every block stayed coprime: no smooth r − 1 for this base
            return Err(NoFactorFound);
        }
    }
    Err(NoFactorFound)
}

fn gcd_minus_one(a: &BigUint, n: &BigUint) -> BigUint {
    if a.is_one() || a == &BigUint::from(0u32) {
        return n.clone();
    }
    (a - 1u32).gcd(n)
}

fn replay<'a>(start: &BigUint, block: impl Iterator<Item = &'a BigUint>, n: &BigUint) -> Option<BigUint> {
    let mut a = start.clone();
    for pk in block {
        a = a.modpow(pk, n);
        let g = gcd_minus_one(&a, n);
        if g.is_one() {
            continue;
        }
        return if &g != n { Some(g) } else { None };
    }
    None
}
