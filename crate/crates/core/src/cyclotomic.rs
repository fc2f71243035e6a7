//! Divisors, Möbius function and exact values of `Φ_d(2)`.
//!
//! For a Wagstaff number `N = W_p` the decomposition
//! `N − 1 = 2(2^{p−1} − 1)/3 = 2 · ∏_{d | p−1, d ≠ 2} Φ_d(2)` supplies the
//! multiplicands from which the factored part is harvested.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::bigmath;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("invalid exponent p = {0}: must be a prime >= 5")]
    InvalidExponent(u64),
    #[error("internal error: {0}")]
    Internal(String),
}

/// One factor `Φ_d(2)` of `2^n − 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicTerm {
    pub d: u64,
    pub value: BigUint,
    pub bit_length: u64,
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors of 0");
    let mut out = vec![1u64];
    for (q, e) in bigmath::factor_u64(n) {
        let len = out.len();
        let mut qk = 1u64;
        for _ in 0..e {
            qk *= q;
            for i in 0..len {
                out.push(out[i] * qk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Number of divisors.
pub fn tau(n: u64) -> usize {
    bigmath::factor_u64(n).iter().map(|&(_, e)| e as usize + 1).product()
}

pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1, "mobius of 0");
    let mut sign = 1i8;
    for (_, e) in bigmath::factor_u64(n) {
        if e > 1 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

pub fn euler_phi(n: u64) -> u64 {
    bigmath::factor_u64(n)
        .iter()
        .fold(n, |acc, &(q, _)| acc / q * (q - 1))
}

/// Largest prime factor of `d` (`None` for `d = 1`).
pub fn largest_prime_factor(d: u64) -> Option<u64> {
    bigmath::factor_u64(d).last().map(|&(q, _)| q)
}

/// Exact `Φ_d(2) = ∏_{e | d} (2^e − 1)^{μ(d/e)}`.
///
/// Numerator and denominator are accumulated separately and divided once.
pub fn phi_at_2(d: u64) -> Result<BigUint, CyclotomicError> {
    phi_at(d, 2)
}

/// `Φ_d(base)` for `base >= 2`; only base 2 is used by the prover.
pub fn phi_at(d: u64, base: u32) -> Result<BigUint, CyclotomicError> {
    if d == 0 {
        return Err(CyclotomicError::Internal("Φ_0 is undefined".into()));
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let b = BigUint::from(base);
    for e in divisors(d) {
        let term = b.pow(e as u32) - 1u32;
        match mobius(d / e) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(CyclotomicError::Internal(format!("inexact division evaluating Φ_{d}({base})")));
    }
    Ok(q)
}

pub fn term(d: u64) -> Result<CyclotomicTerm, CyclotomicError> {
    let value = phi_at_2(d)?;
    let bit_length = value.bits();
    Ok(CyclotomicTerm { d, value, bit_length })
}

/// All `Φ_d(2)` for `d | n`, ordered by `d`. Terms are evaluated in parallel.
pub fn terms_of(n: u64) -> Result<Vec<CyclotomicTerm>, CyclotomicError> {
    divisors(n).into_par_iter().map(term).collect()
}

/// `N − 1` for `N = W_p`, with the terms `Φ_d(2)` for every `d | p − 1`.
///
/// Checks `∏ Φ_d(2) = 2^{p−1} − 1` and `N − 1 = 2·∏/3` exactly.
pub fn wagstaff_n_minus_one(p: u64) -> Result<(BigUint, Vec<CyclotomicTerm>), CyclotomicError> {
    if p < 5 || !bigmath::is_prime_u64(p) {
        return Err(CyclotomicError::InvalidExponent(p));
    }
    let terms = terms_of(p - 1)?;
    let product: BigUint = terms.iter().map(|t| &t.value).product();
    let mersenne = (BigUint::one() << (p - 1) as usize) - 1u32;
    if product != mersenne {
        return Err(CyclotomicError::Internal(format!("∏ Φ_d(2) != 2^{} − 1", p - 1)));
    }
    let n_minus_one = (crate::quad_ring::wagstaff(p)) - 1u32;
    let (q, r) = (&product << 1usize).div_rem(&BigUint::from(3u32));
    if !r.is_zero() || q != n_minus_one {
        return Err(CyclotomicError::Internal(format!("N − 1 != 2(2^{} − 1)/3", p - 1)));
    }
    Ok((n_minus_one, terms))
}
