//! Reference implementations used as test oracles. Deliberately naive and
//! independent of the library code paths they check.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Eratosthenes: `is_prime[n]` for `n <= limit`.
pub fn sieve(limit: usize) -> Vec<bool> {
    let mut s = vec![true; limit + 1];
    s[0] = false;
    if limit >= 1 {
        s[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if s[i] {
            let mut j = i * i;
            while j <= limit {
                s[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    s
}

pub fn sieve_primes(limit: usize) -> Vec<u64> {
    sieve(limit).iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u64).collect()
}

/// Trial division by every integer up to √n; fine for `n <= 10^12`.
pub fn brute_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        let mut e = 0;
        while n.is_multiple_of(q) {
            n /= q;
            e += 1;
        }
        if e > 0 {
            out.push((q, e));
        }
        q += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `(x + y√d)^k mod n` by k-fold multiplication in i128 arithmetic.
pub fn schoolbook_quad_pow(x: i64, y: i64, d: i64, n: u64, k: u64) -> (u64, u64) {
    let n = n as i128;
    let red = |v: i128| v.rem_euclid(n);
    let (bx, by, d) = (red(x as i128), red(y as i128), red(d as i128));
    let (mut ax, mut ay) = (red(1), 0i128);
    for _ in 0..k {
        let nx = red(ax * bx + red(ay * by) * d);
        let ny = red(ax * by + ay * bx);
        ax = nx;
        ay = ny;
    }
    (ax as u64, ay as u64)
}

fn pow_mod_u128(mut b: u128, mut e: u128, m: u128) -> u128 {
    // m < 2^64 so products fit
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Miller–Rabin on `BigUint` with explicit bases.
pub fn miller_rabin(n: &BigUint, bases: &[u64]) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if n.is_even() {
        return n == &two;
    }
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for &a in bases {
        let a = BigUint::from(a) % n;
        if a.is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Deterministic for `n < 2^64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u128(a as u128, d as u128, n as u128);
        if x == 1 || x == (n - 1) as u128 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n as u128;
            if x == (n - 1) as u128 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// `Φ_n(x)` as integer coefficients, by dividing `x^n − 1` by `Φ_d` for proper
/// divisors `d`.
pub fn cyclotomic_poly(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = -BigInt::one();
    p[n] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_exact(&p, &cyclotomic_poly(d));
        }
    }
    p
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![BigInt::zero(); num.len() - dd];
    for i in (0..q.len()).rev() {
        let c = &r[i + dd] / &den[dd];
        for (j, dj) in den.iter().enumerate() {
            r[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    assert!(r.iter().all(|c| c.is_zero()), "inexact division");
    q
}

pub fn eval_at_2(p: &[BigInt]) -> BigUint {
    let v = p.iter().rev().fold(BigInt::zero(), |acc, c| acc * 2 + c);
    assert!(!v.is_negative());
    v.magnitude().clone()
}

/// Legendre symbol by Euler's criterion, `q` an odd prime.
pub fn legendre(a: i64, q: u64) -> i8 {
    let a = a.rem_euclid(q as i64) as u128;
    match pow_mod_u128(a, ((q - 1) / 2) as u128, q as u128) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}
