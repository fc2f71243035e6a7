//! Exact big-integer helpers shared by every other module.
//!
//! Nothing in here touches floating point. Word-sized variants (`*_u64`) exist
//! for the hot loops of trial division and the small-number primality leaf.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("undefined: {0}")]
    Undefined(String),
}

/// `base^exp mod modulus`.
///
/// num-bigint switches to Montgomery multiplication for odd moduli and uses
/// Karatsuba/Toom-3 for large operands, which covers the multi-thousand-bit
/// Wagstaff moduli.
pub fn mod_pow(base: &BigUint, exp: &BigUint, modulus: &BigUint) -> Result<BigUint, MathError> {
    if modulus < &BigUint::from(2u32) {
        return Err(MathError::InvalidModulus(format!("modulus {modulus} < 2")));
    }
    Ok(base.modpow(exp, modulus))
}

/// Jacobi symbol `(a/n)` for odd `n >= 3`, by binary reciprocity.
pub fn jacobi(a: &BigInt, n: &BigUint) -> Result<i8, MathError> {
    if n.is_even() || n < &BigUint::from(3u32) {
        return Err(MathError::InvalidModulus(format!("jacobi needs odd n >= 3, got {n}")));
    }
    let n_signed = BigInt::from_biguint(Sign::Plus, n.clone());
    let mut a = a.mod_floor(&n_signed).magnitude().clone();
    let mut n = n.clone();
    let mut result = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let n8 = low_u64(&n) & 7;
            if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if low_u64(&a) & 3 == 3 && low_u64(&n) & 3 == 3 {
            result = -result;
        }
        a %= &n;
    }
    Ok(if n.is_one() { result } else { 0 })
}

fn low_u64(n: &BigUint) -> u64 {
    n.iter_u64_digits().next().unwrap_or(0)
}

/// Exact integer square root (floor) of a non-negative integer.
pub fn isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

/// Floor of the integer cube root.
pub fn icbrt(n: &BigUint) -> BigUint {
    n.cbrt()
}

/// Returns `Some(t)` with `t >= 0` and `t^2 == z`, or `None`.
pub fn perfect_square_root(z: &BigInt) -> Option<BigUint> {
    if z.is_negative() {
        return None;
    }
    let z = z.magnitude();
    // quadratic-residue prefilter mod 64; only ever rules candidates out
    let low = low_u64(z) & 63;
    if !SQUARES_MOD_64[low as usize] {
        return None;
    }
    let t = isqrt(z);
    if &(&t * &t) == z {
        Some(t)
    } else {
        None
    }
}

pub fn is_perfect_square(z: &BigInt) -> bool {
    perfect_square_root(z).is_some()
}

const SQUARES_MOD_64: [bool; 64] = {
    let mut table = [false; 64];
    let mut i = 0;
    while i < 64 {
        table[(i * i) % 64] = true;
        i += 1;
    }
    table
};

/// q-adic valuation: the largest `e` with `q^e | n`.
pub fn valuation(n: &BigUint, q: &BigUint) -> Result<u32, MathError> {
    if n.is_zero() {
        return Err(MathError::Undefined("valuation of 0".into()));
    }
    if q < &BigUint::from(2u32) {
        return Err(MathError::InvalidModulus(format!("valuation base {q} < 2")));
    }
    let mut e = 0;
    let mut m = n.clone();
    loop {
        let (quot, rem) = m.div_rem(q);
        if !rem.is_zero() {
            return Ok(e);
        }
        m = quot;
        e += 1;
    }
}

/// Exact number of decimal digits of `n` (`0` and `1..=9` both have one digit).
pub fn digits10(n: &BigUint) -> u64 {
    if n.is_zero() {
        return 1;
    }
    let bits = n.bits();
    // floor((bits - 1) * log10(2)) <= digits - 1; 30102/100000 < log10(2)
    let mut k = (bits - 1) * 30102 / 100000;
    let mut pow = BigUint::from(10u32).pow(k as u32);
    // pow = 10^k <= n is guaranteed by the lower bound above
    let ten = BigUint::from(10u32);
    loop {
        let next = &pow * &ten;
        if &next > n {
            return k + 1;
        }
        pow = next;
        k += 1;
    }
}

/// Bit length of `n`, with `bit_length(0) == 0`.
pub fn bit_length(n: &BigUint) -> u64 {
    n.bits()
}

/// `floor(log2 n)` for `n >= 1`.
pub fn floor_log2(n: &BigUint) -> u64 {
    n.bits().saturating_sub(1)
}

pub fn to_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}

// --- word-sized arithmetic ---------------------------------------------------

#[inline]
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The twelve bases that make the strong test deterministic far beyond 2^64.
pub const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Strong probable-prime test of odd `n > 2` to base `a`.
pub fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for every `u64`, strong test over [`DETERMINISTIC_BASES`].
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &DETERMINISTIC_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    DETERMINISTIC_BASES
        .iter()
        .all(|&a| strong_probable_prime_u64(n, a))
}

/// Prime factorization of a machine word by trial division, ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Primes `<= limit`, Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Decimal string codec used by every serialized big integer.
pub fn parse_decimal(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if s.len() > 1 && s.starts_with('0') {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}

pub fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

pub fn one() -> BigUint {
    BigUint::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn slow_pow(b: u64, e: u64, m: u64) -> u64 {
        let mut acc = 1 % m;
        for _ in 0..e {
            acc = mul_mod_u64(acc, b, m);
        }
        acc
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(slow_pow(3, 42, 43), 1);
        assert_eq!(mod_pow(&big(3), &big(42), &big(43)).unwrap(), big(1));
        assert_eq!(mod_pow(&big(2), &big(10), &big(1000)).unwrap(), big(24));
        assert_eq!(mod_pow(&big(12345), &big(0), &big(7)).unwrap(), big(1));
        assert!(matches!(
            mod_pow(&big(3), &big(2), &big(1)),
            Err(MathError::InvalidModulus(_))
        ));
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(&BigInt::from(2), &big(11)).unwrap(), -1);
        assert_eq!(jacobi(&BigInt::from(2), &big(7)).unwrap(), 1);
        assert_eq!(jacobi(&BigInt::from(15), &big(9)).unwrap(), 0);
        assert_eq!(jacobi(&BigInt::from(-1), &big(7)).unwrap(), -1);
        assert!(jacobi(&BigInt::from(2), &big(8)).is_err());
        assert!(jacobi(&BigInt::from(2), &big(1)).is_err());
    }

    #[test]
    fn jacobi_matches_euler_criterion_below_10k() {
        for q in primes_up_to(10_000).into_iter().skip(1) {
            for a in 0..q {
                let euler = pow_mod_u64(a, (q - 1) / 2, q);
                let expected = match euler {
                    0 => 0,
                    1 => 1,
                    x if x == q - 1 => -1,
                    x => panic!("euler criterion gave {x} mod {q}"),
                };
                assert_eq!(jacobi(&BigInt::from(a), &big(q)).unwrap(), expected, "({a}/{q})");
            }
        }
    }

    #[test]
    fn perfect_squares() {
        assert!(!is_perfect_square(&BigInt::from(-7)));
        assert_eq!(perfect_square_root(&BigInt::from(25)), Some(big(5)));
        let two128 = BigInt::from(1) << 128;
        assert_eq!(perfect_square_root(&two128), Some(BigUint::one() << 64));
        assert_eq!(perfect_square_root(&BigInt::from(0)), Some(big(0)));
    }

    #[test]
    fn perfect_square_matches_enumeration() {
        let mut squares = std::collections::HashSet::new();
        let mut t = 0i64;
        while t * t <= 1_000_000 {
            squares.insert(t * t);
            t += 1;
        }
        for z in -1_000_000i64..=1_000_000 {
            assert_eq!(is_perfect_square(&BigInt::from(z)), squares.contains(&z), "{z}");
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&big(10), &big(2)).unwrap(), 1);
        assert_eq!(valuation(&big(54), &big(3)).unwrap(), 3);
        assert_eq!(valuation(&big(7), &big(5)).unwrap(), 0);
        assert!(matches!(valuation(&big(0), &big(5)), Err(MathError::Undefined(_))));
    }

    #[test]
    fn digits10_examples() {
        assert_eq!(digits10(&big(11)), 2);
        assert_eq!(digits10(&big(9)), 1);
        assert_eq!(digits10(&big(10)), 2);
        assert_eq!(digits10(&big(999_999)), 6);
        assert_eq!(digits10(&big(1_000_000)), 7);
        let w2617 = ((BigUint::one() << 2617usize) + 1u32) / 3u32;
        assert_eq!(digits10(&w2617), 788);
        assert_eq!(digits10(&w2617), w2617.to_string().len() as u64);
        let w12391 = ((BigUint::one() << 12391usize) + 1u32) / 3u32;
        assert_eq!(digits10(&w12391), 3730);
    }

    #[test]
    fn word_primality_small() {
        let sieve = primes_up_to(100_000);
        let set: std::collections::HashSet<u64> = sieve.iter().copied().collect();
        for n in 0..100_000u64 {
            assert_eq!(is_prime_u64(n), set.contains(&n), "{n}");
        }
        assert!(!is_prime_u64(3_215_031_751));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    proptest! {
        #[test]
        fn mod_pow_is_multiplicative(a in 0u64..u64::MAX, e1 in 0u64..1_000_000, e2 in 0u64..1_000_000, m in 2u64..u64::MAX) {
            let (a, m) = (big(a), big(m));
            let lhs = mod_pow(&a, &big(e1 + e2), &m).unwrap();
            let rhs = mod_pow(&a, &big(e1), &m).unwrap() * mod_pow(&a, &big(e2), &m).unwrap() % &m;
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn valuation_is_exact(n in 1u64..u64::MAX, q in 2u64..1000) {
            let e = valuation(&big(n), &big(q)).unwrap();
            let qe = big(q).pow(e);
            prop_assert!((big(n) % &qe).is_zero());
            prop_assert!(!(big(n) % (qe * q)).is_zero());
        }

        #[test]
        fn decimal_round_trip(digits in "[1-9][0-9]{0,80}") {
            let n = parse_decimal(&digits).unwrap();
            prop_assert_eq!(n.to_string(), digits);
        }
    }
}
