use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::bigmath;
use crate::cyclotomic;

/// `n mod q` without allocating.
pub fn rem_u64(n: &BigUint, q: u64) -> u64 {
    let q128 = q as u128;
    n.iter_u64_digits()
        .rev()
        .fold(0u128, |acc, limb| ((acc << 64) | limb as u128) % q128) as u64
}

/// Prime divisors `q <= bound` of `n` with `q ≡ 1 (mod d)`, plus the intrinsic
/// candidate (largest prime factor of `d`), probed first.
///
/// Returns `(prime, exponent)` pairs in discovery order and the cofactor.
pub fn progression_divisors(n: &BigUint, d: u64, bound: &BigUint) -> (Vec<(u64, u32)>, BigUint) {
    let mut found = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return (found, rest);
    }
    let bound = bound.to_u64().unwrap_or(u64::MAX);

    if d > 1 {
        if let Some(ell) = cyclotomic::largest_prime_factor(d) {
            if ell <= bound {
                divide_out(&mut rest, ell, &mut found);
            }
        }
    }

    // candidates q ≡ 1 (mod d); only odd q can divide when d is odd and q > 2
    let (start, step) = match d {
        0 | 1 => (2u64, 1u64),
        d if d % 2 == 1 => (1 + 2 * d, 2 * d),
        d => (1 + d, d),
    };
    let mut q = start;
    while q <= bound && rest > BigUint::from(1u32) {
        if rem_u64(&rest, q) == 0 && bigmath::is_prime_u64(q)
            && !found.iter().any(|&(p, _)| p == q) {
                divide_out(&mut rest, q, &mut found);
            }
        let rest_small = rest.to_u128().unwrap_or(u128::MAX);
        if (q as u128) > rest_small {
            break;
        }
        // plain trial division: once q^2 exceeds the cofactor it is prime
        if d <= 1 && (q as u128) * (q as u128) > rest_small {
            if let Some(r) = rest.to_u64() {
                if r > 1 && r <= bound {
                    divide_out(&mut rest, r, &mut found);
                }
            }
            break;
        }
        q = match q.checked_add(step) {
            Some(next) => next,
            None => break,
        };
    }
    (found, rest)
}

fn divide_out(rest: &mut BigUint, q: u64, found: &mut Vec<(u64, u32)>) {
    let mut e = 0;
    while rem_u64(rest, q) == 0 {
        *rest /= q;
        e += 1;
    }
    if e > 0 {
        found.push((q, e));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::big;
    use proptest::prelude::*;

    /// Plain trial division over every prime, filtered afterwards.
    fn oracle(n: u64, d: u64, bound: u64) -> Vec<(u64, u32)> {
        let ell = cyclotomic::largest_prime_factor(d).filter(|_| d > 1);
        let mut out: Vec<(u64, u32)> = bigmath::factor_u64(n)
            .into_iter()
            .filter(|&(q, _)| q <= bound && ((q - 1) % d == 0 || Some(q) == ell))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn examples() {
        let (f, r) = progression_divisors(&big(2047), 11, &big(10_000));
        assert_eq!(f, vec![(23, 1), (89, 1)]);
        assert_eq!(r, big(1));

        let (f, _) = progression_divisors(&big(5), 4, &big(100));
        assert_eq!(f, vec![(5, 1)]);
    }

    #[test]
    fn intrinsic_prime_is_probed() {
        // Φ_21(2) = 7 · 337; 7 is not ≡ 1 (mod 21)
        let phi21 = cyclotomic::phi_at_2(21).unwrap();
        assert_eq!(phi21, big(7 * 337));
        let (f, r) = progression_divisors(&phi21, 21, &big(50));
        assert_eq!(f, vec![(7, 1)]);
        assert_eq!(r, big(337));
        let (f, r) = progression_divisors(&phi21, 21, &big(1000));
        assert_eq!(f, vec![(7, 1), (337, 1)]);
        assert_eq!(r, big(1));
    }

    #[test]
    fn rem_matches_bigint() {
        let n = (BigUint::from(1u32) << 300usize) + 12345u32;
        for q in [2u64, 3, 97, 1_000_003, u64::MAX - 58] {
            assert_eq!(rem_u64(&n, q), (&n % q).to_u64().unwrap());
        }
    }

    proptest! {
        #[test]
        fn agrees_with_plain_trial_division(n in 2u64..1_000_000_000, d in 1u64..60, bound in 2u64..100_000) {
            let (mut f, rest) = progression_divisors(&big(n), d, &big(bound));
            f.sort();
            prop_assert_eq!(&f, &oracle(n, d, bound));
            let product: u64 = f.iter().map(|&(q, e)| q.pow(e)).product();
            prop_assert_eq!(big(product) * rest, big(n));
        }
    }
}
