//! Arithmetic in `Z[√D]/(N)`: Chebyshev bases `ω_a = a + √(a²−1)`, the Pell
//! sequences of `α = 1 + √2`, and the Chua congruence.
//!
//! For `a = 3` the ring is represented canonically with `D = 2` and
//! `ω_3 = 3 + 2√2`, since `√8 = 2√2`; every other base uses `D = a² − 1`
//! directly.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigmath::{self, MathError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("ring mismatch: (D, N) = ({0}) vs ({1})")]
    RingMismatch(String, String),
    #[error("gcd(a^2 - 1, Q) = {gcd} is not 1")]
    NotCoprime {
        /// Surfaced when `1 < gcd < Q`: a proper factor of `Q`.
        gcd: BigUint,
    },
    #[error("invalid exponent p = {0}: must be a prime >= 5")]
    InvalidExponent(u64),
    #[error(transparent)]
    Math(#[from] MathError),
}

impl QuadError {
    /// A proper factor of the modulus, when the error uncovered one.
    pub fn found_factor(&self, modulus: &BigUint) -> Option<&BigUint> {
        match self {
            QuadError::NotCoprime { gcd } if !gcd.is_one() && gcd != modulus => Some(gcd),
            _ => None,
        }
    }
}

/// An element `x + y√D` of `Z[√D]/(N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadResidue {
    x: BigUint,
    y: BigUint,
    d: BigInt,
    n: BigUint,
}

impl QuadResidue {
    pub fn new(x: BigInt, y: BigInt, d: BigInt, n: BigUint) -> Result<Self, QuadError> {
        if n.is_even() || n < BigUint::from(3u32) {
            return Err(MathError::InvalidModulus(format!("ring modulus {n} must be odd >= 3")).into());
        }
        let x = reduce(&x, &n);
        let y = reduce(&y, &n);
        Ok(QuadResidue { x, y, d, n })
    }

    pub fn from_unsigned(x: BigUint, y: BigUint, d: BigInt, n: BigUint) -> Result<Self, QuadError> {
        Self::new(
            BigInt::from_biguint(Sign::Plus, x),
            BigInt::from_biguint(Sign::Plus, y),
            d,
            n,
        )
    }

    pub fn one(d: BigInt, n: BigUint) -> Result<Self, QuadError> {
        Self::new(BigInt::one(), BigInt::zero(), d, n)
    }

    pub fn x(&self) -> &BigUint {
        &self.x
    }

    pub fn y(&self) -> &BigUint {
        &self.y
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.d
    }

    pub fn modulus(&self) -> &BigUint {
        &self.n
    }

    /// `(x, y)` as a plain pair, convenient in assertions.
    pub fn pair(&self) -> (BigUint, BigUint) {
        (self.x.clone(), self.y.clone())
    }

    fn d_mod_n(&self) -> BigUint {
        reduce(&self.d, &self.n)
    }

    fn same_ring(&self, other: &Self) -> Result<(), QuadError> {
        if self.d != other.d || self.n != other.n {
            return Err(QuadError::RingMismatch(
                format!("{}, {}", self.d, self.n),
                format!("{}, {}", other.d, other.n),
            ));
        }
        Ok(())
    }

    /// `(x1 + y1√D)(x2 + y2√D) = x1x2 + D·y1y2 + (x1y2 + x2y1)√D`.
    pub fn mul(&self, other: &Self) -> Result<Self, QuadError> {
        self.same_ring(other)?;
        Ok(self.mul_unchecked(other, &self.d_mod_n()))
    }

    fn mul_unchecked(&self, other: &Self, d_mod: &BigUint) -> Self {
        let n = &self.n;
        let x = (&self.x * &other.x + d_mod * (&self.y * &other.y) % n) % n;
        let y = (&self.x * &other.y + &other.x * &self.y) % n;
        QuadResidue { x, y, d: self.d.clone(), n: n.clone() }
    }

    fn square(&self, d_mod: &BigUint) -> Self {
        let n = &self.n;
        let x = (&self.x * &self.x + d_mod * (&self.y * &self.y) % n) % n;
        let y = ((&self.x * &self.y) << 1usize) % n;
        QuadResidue { x, y, d: self.d.clone(), n: n.clone() }
    }

    /// `self^k`, left-to-right square and multiply.
    pub fn pow(&self, k: &BigUint) -> Self {
        let d_mod = self.d_mod_n();
        let mut acc = QuadResidue {
            x: BigUint::one() % &self.n,
            y: BigUint::zero(),
            d: self.d.clone(),
            n: self.n.clone(),
        };
        for i in (0..k.bits()).rev() {
            acc = acc.square(&d_mod);
            if k.bit(i) {
                acc = acc.mul_unchecked(self, &d_mod);
            }
        }
        acc
    }

    /// Norm `x² − D·y²` reduced mod `N`.
    pub fn norm(&self) -> BigUint {
        let n = &self.n;
        let xx = &self.x * &self.x % n;
        let dyy = self.d_mod_n() * (&self.y * &self.y % n) % n;
        (xx + n - dyy) % n
    }

    pub fn is_rational(&self, value: &BigUint) -> bool {
        self.y.is_zero() && self.x == value % &self.n
    }
}

fn reduce(v: &BigInt, n: &BigUint) -> BigUint {
    let n = BigInt::from_biguint(Sign::Plus, n.clone());
    v.mod_floor(&n).magnitude().clone()
}

pub fn quad_mul(u: &QuadResidue, v: &QuadResidue) -> Result<QuadResidue, QuadError> {
    u.mul(v)
}

pub fn quad_pow(u: &QuadResidue, k: &BigUint) -> QuadResidue {
    u.pow(k)
}

/// Exact `(U_n, V_n)` with `(1 + √2)^n = V_n/2 + U_n√2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PellPair {
    pub u: BigUint,
    pub v: BigUint,
    pub n: u64,
}

impl PellPair {
    /// `V_n² − 8·U_n² == 4·(−1)^n`, exactly.
    pub fn satisfies_identity(&self) -> bool {
        let lhs = BigInt::from(self.v.clone()).pow(2) - BigInt::from(8) * BigInt::from(self.u.clone()).pow(2);
        let rhs = if self.n.is_multiple_of(2) { 4 } else { -4 };
        lhs == BigInt::from(rhs)
    }
}

/// Pell pair via `X_{n+1} = 2X_n + X_{n−1}` from `(U, V) = (0, 2), (1, 2)`.
pub fn pell(n: u64) -> PellPair {
    let (mut u0, mut u1) = (BigUint::zero(), BigUint::one());
    let (mut v0, mut v1) = (BigUint::from(2u32), BigUint::from(2u32));
    for _ in 0..n {
        let u2 = (&u1 << 1usize) + &u0;
        let v2 = (&v1 << 1usize) + &v0;
        u0 = std::mem::replace(&mut u1, u2);
        v0 = std::mem::replace(&mut v1, v2);
    }
    PellPair { u: u0, v: v0, n }
}

/// `ω_a = a + √(a²−1)` in its canonical ring for modulus `n`.
pub fn chebyshev_base(a: &BigInt, n: &BigUint) -> Result<QuadResidue, QuadError> {
    if a == &BigInt::from(3) {
        return QuadResidue::new(BigInt::from(3), BigInt::from(2), BigInt::from(2), n.clone());
    }
    let d = a * a - BigInt::one();
    QuadResidue::new(a.clone(), BigInt::one(), d, n.clone())
}

/// `ω_a` with `D = a² − 1` taken literally, no canonicalisation.
pub fn chebyshev_base_literal(a: &BigInt, n: &BigUint) -> Result<QuadResidue, QuadError> {
    let d = a * a - BigInt::one();
    QuadResidue::new(a.clone(), BigInt::one(), d, n.clone())
}

/// `(ε, δ) = ((a²−1)/Q, 2(a+1)/Q)`.
pub fn chua_symbols(a: &BigInt, q: &BigUint) -> Result<(i8, i8), QuadError> {
    let d = a * a - BigInt::one();
    let g = d.magnitude().gcd(q);
    if !g.is_one() {
        return Err(QuadError::NotCoprime { gcd: g });
    }
    let eps = bigmath::jacobi(&d, q)?;
    let delta = bigmath::jacobi(&(BigInt::from(2) * (a + BigInt::one())), q)?;
    // gcd(a²−1, Q) = 1 with Q odd forces both symbols to be nonzero
    debug_assert!(eps != 0 && delta != 0);
    Ok((eps, delta))
}

/// Outcome of the Chua congruence `ω_a^{(Q−ε)/2} ≡ δ (mod Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChuaOutcome {
    pub epsilon: i8,
    pub delta: i8,
    pub holds: bool,
}

pub fn chua_outcome(a: &BigInt, q: &BigUint) -> Result<ChuaOutcome, QuadError> {
    let (epsilon, delta) = chua_symbols(a, q)?;
    let omega = chebyshev_base(a, q)?;
    let holds = chua_congruence(&omega, q, epsilon, delta);
    Ok(ChuaOutcome { epsilon, delta, holds })
}

fn chua_congruence(omega: &QuadResidue, q: &BigUint, epsilon: i8, delta: i8) -> bool {
    let exp = if epsilon == 1 { (q - 1u32) >> 1usize } else { (q + 1u32) >> 1usize };
    let target = if delta == 1 { BigUint::one() } else { q - 1u32 };
    omega.pow(&exp).is_rational(&target)
}

/// True iff `ω_a^{(Q−ε)/2} ≡ δ` in `Z[√D]/(Q)`.
pub fn chua_check(a: &BigInt, q: &BigUint) -> Result<bool, QuadError> {
    Ok(chua_outcome(a, q)?.holds)
}

/// Same congruence evaluated in the literal ring `D = a² − 1`.
pub fn chua_check_literal(a: &BigInt, q: &BigUint) -> Result<bool, QuadError> {
    let (epsilon, delta) = chua_symbols(a, q)?;
    let omega = chebyshev_base_literal(a, q)?;
    Ok(chua_congruence(&omega, q, epsilon, delta))
}

/// `W_p = (2^p + 1)/3`.
pub fn wagstaff(p: u64) -> BigUint {
    ((BigUint::one() << p as usize) + 1u32) / 3u32
}

/// Condition (II): `ω_3^{(N+1)/2} ≡ −1` in `Z[√2]/(N)`, `N = W_p`.
pub fn condition_two(p: u64) -> Result<bool, QuadError> {
    if p < 5 || !bigmath::is_prime_u64(p) {
        return Err(QuadError::InvalidExponent(p));
    }
    let n = wagstaff(p);
    let omega = chebyshev_base(&BigInt::from(3), &n)?;
    let exp = (&n + 1u32) >> 1usize;
    Ok(omega.pow(&exp).is_rational(&(&n - 1u32)))
}

/// [`condition_two`] packaged with the symbols forced by `W_p ≡ 3 (mod 8)`.
pub fn condition_two_outcome(p: u64) -> Result<ChuaOutcome, QuadError> {
    let holds = condition_two(p)?;
    Ok(ChuaOutcome { epsilon: -1, delta: -1, holds })
}
