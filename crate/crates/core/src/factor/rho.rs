//! Pollard ρ with Brent's cycle detection.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::NoFactorFound;
use crate::bigmath;

/// Differences multiplied together between gcds.
const BATCH: u64 = 64;

/// A nontrivial divisor of `n`, or [`NoFactorFound`] once `budget` iterations
/// of `x ↦ x² + c` have been spent. Seeds run `c = 1, 2, 3, …`, so the result
/// is a function of `(n, budget)` alone.
pub fn pollard_rho(n: &BigUint, budget: u64) -> Result<BigUint, NoFactorFound> {
    if n < &BigUint::from(4u32) {
        return Err(NoFactorFound);
    }
    if n.is_even() {
        return Ok(BigUint::from(2u32));
    }
    if let Some(root) = bigmath::perfect_square_root(&n.clone().into()) {
        return Ok(root);
    }
    let mut remaining = budget;
    let mut c = 1u64;
    while remaining > 0 {
        match brent(n, &BigUint::from(c), &mut remaining) {
            Some(g) => return Ok(g),
            None => c += 1,
        }
    }
    Err(NoFactorFound)
}

fn step(y: &BigUint, c: &BigUint, n: &BigUint) -> BigUint {
    (y * y + c) % n
}

fn abs_diff(a: &BigUint, b: &BigUint) -> BigUint {
    if a > b {
        a - b
    } else {
        b - a
    }
}

/// One Brent run for a fixed `c`; `None` means retry with the next seed (or the
/// budget ran out).
fn brent(n: &BigUint, c: &BigUint, remaining: &mut u64) -> Option<BigUint> {
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g;
    let mut x;
    let mut ys;
    loop {
        x = y.clone();
        for _ in 0..r {
            y = step(&y, c, n);
        }
        *remaining = remaining.saturating_sub(r);
        let mut k = 0u64;
        loop {
            ys = y.clone();
            let m = BATCH.min(r - k);
            for _ in 0..m {
                y = step(&y, c, n);
                q = q * abs_diff(&x, &y) % n;
            }
            *remaining = remaining.saturating_sub(m);
            g = q.gcd(n);
            k += m;
            if k >= r || !g.is_one() {
                break;
            }
        }
        if !g.is_one() {
            break;
        }
        if *remaining == 0 {
            return None;
        }
        r *= 2;
    }
    if &g == n {
        // batched product overshot; walk the last batch one step at a time
        loop {
            ys = step(&ys, c, n);
            g = abs_diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n || g.is_zero() {
        None
    } else {
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::big;

    #[test]
    fn splits_8051() {
        let g = pollard_rho(&big(8051), 10_000).unwrap();
        assert!(g == big(83) || g == big(97));
        assert_eq!(big(8051) % &g, big(0));
    }

    #[test]
    fn prime_squares() {
        for q in [101u64, 65_521, 4_294_967_291] {
            assert_eq!(pollard_rho(&(big(q) * big(q)), 100_000).unwrap(), big(q));
        }
    }

    #[test]
    fn primes_yield_nothing() {
        assert_eq!(pollard_rho(&big(1_000_003), 5_000), Err(NoFactorFound));
        assert_eq!(pollard_rho(&big(3), 5_000), Err(NoFactorFound));
    }

    #[test]
    fn deterministic() {
        let n = big(1_000_003) * big(998_244_353);
        let a = pollard_rho(&n, 1_000_000).unwrap();
        let b = pollard_rho(&n, 1_000_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(&n % &a, big(0));
    }

    #[test]
    fn splits_a_40_bit_pair() {
        let n = big(1_099_511_627_791) * big(1_099_511_628_401);
        let g = pollard_rho(&n, 20_000_000).unwrap();
        assert!(g == big(1_099_511_627_791) || g == big(1_099_511_628_401));
    }
}
