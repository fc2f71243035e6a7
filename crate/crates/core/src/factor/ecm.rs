//! Lenstra's elliptic curve method on Montgomery curves `By² = x³ + Ax² + x`,
//! x-only arithmetic, Suyama parametrisation with `σ = 6, 7, 8, …`.
//!
//! Stage 1 multiplies by every prime power up to `B1`; stage 2 is the
//! baby-step giant-step continuation over primes in `(B1, B2]` with
//! `D = 2310`. Moduli up to 1024 bits; larger inputs are declined.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::NoFactorFound;
use crate::bigmath;

const D: u64 = 2310;

/// Largest modulus handled, in 64-bit limbs.
const MAX_LIMBS: usize = 16;

/// A residue mod `n` in Montgomery form, little-endian limbs; only the
/// first `k` are used.
type Fe = [u64; MAX_LIMBS];

struct Mont {
    n: Fe,
    k: usize,
    /// `−n⁻¹ mod 2^64`
    ninv: u64,
}

impl Mont {
    fn new(n: &BigUint) -> Self {
        let limbs = n.to_u64_digits();
        let mut inv: u64 = 1;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(limbs[0].wrapping_mul(inv)));
        }
        let mut nn = [0u64; MAX_LIMBS];
        nn[..limbs.len()].copy_from_slice(&limbs);
        Mont { n: nn, k: limbs.len(), ninv: inv.wrapping_neg() }
    }

    fn geq_n(&self, a: &[u64]) -> bool {
        for i in (0..self.k).rev() {
            if a[i] != self.n[i] {
                return a[i] > self.n[i];
            }
        }
        true
    }

    fn sub_n(&self, a: &mut [u64]) {
        let mut borrow = 0u64;
        for (ai, &ni) in a[..self.k].iter_mut().zip(&self.n) {
            let (d, b1) = ai.overflowing_sub(ni);
            let (d, b2) = d.overflowing_sub(borrow);
            *ai = d;
            borrow = (b1 | b2) as u64;
        }
    }

    fn lift(&self, x: &BigUint, n: &BigUint) -> Fe {
        let r = ((x % n) << (64 * self.k)) % n;
        let mut v = [0u64; MAX_LIMBS];
        for (i, w) in r.to_u64_digits().into_iter().enumerate() {
            v[i] = w;
        }
        v
    }

    fn to_big(&self, a: &Fe) -> BigUint {
        BigUint::from_slice(&a[..self.k].iter().flat_map(|&w| [w as u32, (w >> 32) as u32]).collect::<Vec<_>>())
    }

    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        let k = self.k;
        let mut t = [0u64; MAX_LIMBS + 2];
        for &ai in &a[..k] {
            let mut carry = 0u128;
            for j in 0..k {
                let v = t[j] as u128 + ai as u128 * b[j] as u128 + carry;
                t[j] = v as u64;
                carry = v >> 64;
            }
            let v = t[k] as u128 + carry;
            t[k] = v as u64;
            t[k + 1] = (v >> 64) as u64;
            let m = t[0].wrapping_mul(self.ninv);
            let mut carry = (t[0] as u128 + m as u128 * self.n[0] as u128) >> 64;
            for j in 1..k {
                let v = t[j] as u128 + m as u128 * self.n[j] as u128 + carry;
                t[j - 1] = v as u64;
                carry = v >> 64;
            }
            let v = t[k] as u128 + carry;
            t[k - 1] = v as u64;
            t[k] = t[k + 1] + (v >> 64) as u64;
        }
        if t[k] != 0 || self.geq_n(&t) {
            self.sub_n(&mut t);
        }
        let mut r = [0u64; MAX_LIMBS];
        r[..k].copy_from_slice(&t[..k]);
        r
    }

    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        let mut r = [0u64; MAX_LIMBS];
        let mut carry = false;
        for i in 0..self.k {
            let (s, c1) = a[i].overflowing_add(b[i]);
            let (s, c2) = s.overflowing_add(carry as u64);
            r[i] = s;
            carry = c1 | c2;
        }
        if carry || self.geq_n(&r) {
            self.sub_n(&mut r);
        }
        r
    }

    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        let mut r = [0u64; MAX_LIMBS];
        let mut borrow = false;
        for i in 0..self.k {
            let (d, b1) = a[i].overflowing_sub(b[i]);
            let (d, b2) = d.overflowing_sub(borrow as u64);
            r[i] = d;
            borrow = b1 | b2;
        }
        if borrow {
            let mut carry = false;
            for (ri, &ni) in r[..self.k].iter_mut().zip(&self.n) {
                let (s, c1) = ri.overflowing_add(ni);
                let (s, c2) = s.overflowing_add(carry as u64);
                *ri = s;
                carry = c1 | c2;
            }
        }
        r
    }
}

#[derive(Clone, Copy)]
struct Point {
    x: Fe,
    z: Fe,
}

struct Curve<'a> {
    n: &'a BigUint,
    m: Mont,
    a24: Fe,
}

enum Setup {
    Curve(BigUint, BigUint, BigUint),
    Factor(BigUint),
    Degenerate,
}

impl<'a> Curve<'a> {
    fn new(n: &'a BigUint, a24: &BigUint) -> Self {
        let m = Mont::new(n);
        let a24 = m.lift(a24, n);
        Curve { n, m, a24 }
    }

    fn point(&self, x: &BigUint, z: &BigUint) -> Point {
        Point { x: self.m.lift(x, self.n), z: self.m.lift(z, self.n) }
    }

    fn gcd(&self, a: &Fe) -> BigUint {
        self.m.to_big(a).gcd(self.n)
    }

    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        self.m.mul(a, b)
    }

    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        self.m.sub(a, b)
    }

    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        self.m.add(a, b)
    }

    fn double(&self, p: &Point) -> Point {
        let s = self.add(&p.x, &p.z);
        let d = self.sub(&p.x, &p.z);
        let t1 = self.mul(&s, &s);
        let t2 = self.mul(&d, &d);
        let t3 = self.sub(&t1, &t2);
        let x = self.mul(&t1, &t2);
        let z = self.mul(&t3, &self.add(&t2, &self.mul(&self.a24, &t3)));
        Point { x, z }
    }

    /// `p + q` given `diff = p − q`.
    fn add_diff(&self, p: &Point, q: &Point, diff: &Point) -> Point {
        let u = self.mul(&self.sub(&p.x, &p.z), &self.add(&q.x, &q.z));
        let v = self.mul(&self.add(&p.x, &p.z), &self.sub(&q.x, &q.z));
        let s = self.add(&u, &v);
        let t = self.sub(&u, &v);
        Point { x: self.mul(&diff.z, &self.mul(&s, &s)), z: self.mul(&diff.x, &self.mul(&t, &t)) }
    }

    /// Montgomery ladder, `k >= 1`.
    fn ladder(&self, p: &Point, k: &BigUint) -> Point {
        let mut r0 = *p;
        let mut r1 = self.double(p);
        for i in (0..k.bits().saturating_sub(1)).rev() {
            if k.bit(i) {
                r0 = self.add_diff(&r1, &r0, p);
                r1 = self.double(&r1);
            } else {
                r1 = self.add_diff(&r1, &r0, p);
                r0 = self.double(&r0);
            }
        }
        r0
    }
}

fn mod_inverse(a: &BigUint, n: &BigUint) -> Result<BigUint, BigUint> {
    let (a, m) = (BigInt::from(a.clone()), BigInt::from(n.clone()));
    let eg = a.extended_gcd(&m);
    if !eg.gcd.is_one() {
        return Err(eg.gcd.magnitude().clone());
    }
    Ok(eg.x.mod_floor(&m).magnitude().clone())
}

fn suyama(n: &BigUint, sigma: u64) -> Setup {
    let s = BigUint::from(sigma);
    let u = (&s * &s + n - 5u32) % n;
    let v = (&s * 4u32) % n;
    let u3 = u.modpow(&BigUint::from(3u32), n);
    let v3 = v.modpow(&BigUint::from(3u32), n);
    let vmu = (&v + n - &u) % n;
    let num = (vmu.modpow(&BigUint::from(3u32), n) * ((&u * 3u32 + &v) % n)) % n;
    let den = (&u3 * &v * 16u32) % n;
    match mod_inverse(&den, n) {
        Ok(inv) => Setup::Curve((num * inv) % n, u3, v3),
        Err(g) if !g.is_one() && &g != n => Setup::Factor(g),
        Err(_) => Setup::Degenerate,
    }
}

/// A nontrivial divisor of `n` from at most `curves` curves.
pub fn ecm(n: &BigUint, curves: u32, b1: u64, b2: u64) -> Result<BigUint, NoFactorFound> {
    ecm_from(n, 6, curves, b1, b2)
}

/// As [`ecm`], starting the curve family at `σ = sigma0`.
pub fn ecm_from(n: &BigUint, sigma0: u64, curves: u32, b1: u64, b2: u64) -> Result<BigUint, NoFactorFound> {
    if n < &BigUint::from(4u32) || curves == 0 || b1 < 2 || n.bits() > 64 * MAX_LIMBS as u64 {
        return Err(NoFactorFound);
    }
    if n.is_even() {
        return Ok(BigUint::from(2u32));
    }
    let b2 = b2.max(b1);
    let primes = bigmath::primes_up_to(b2);
    let split = primes.partition_point(|&p| p <= b1);
    let mut is_prime = vec![false; b2 as usize + 1];
    for &p in &primes {
        is_prime[p as usize] = true;
    }
    for sigma in sigma0.max(6)..sigma0.max(6) + curves as u64 {
        let (curve, start) = match suyama(n, sigma) {
            Setup::Curve(a24, x, z) => {
                let c = Curve::new(n, &a24);
                let p = c.point(&x, &z);
                (c, p)
            }
            Setup::Factor(g) => return Ok(g),
            Setup::Degenerate => continue,
        };
        match run_curve(&curve, start, &primes[..split], b1, b2, &is_prime) {
            Some(g) => return Ok(g),
            None => continue,
        }
    }
    Err(NoFactorFound)
}

fn nontrivial(g: BigUint, n: &BigUint) -> Option<BigUint> {
    (!g.is_one() && &g != n && !g.is_zero()).then_some(g)
}

fn run_curve(c: &Curve, start: Point, small: &[u64], b1: u64, b2: u64, is_prime: &[bool]) -> Option<BigUint> {
    let n = c.n;
    let mut q = start;
    for &p in small {
        let mut pk = p;
        while pk <= b1 / p {
            pk *= p;
        }
        q = c.ladder(&q, &BigUint::from(pk));
    }
    let g = c.gcd(&q.z);
    if !g.is_one() {
        return nontrivial(g, n);
    }
    if b2 <= b1 {
        return None;
    }

    // baby steps: [j]Q for odd j < D/2 coprime to D
    let q2 = c.double(&q);
    let half = (D / 2) as usize;
    let mut baby: Vec<Option<Point>> = vec![None; half + 1];
    let mut prev = q;
    let mut cur = c.add_diff(&q2, &q, &q);
    baby[1] = Some(q);
    let mut j = 3usize;
    while j <= half {
        if (j as u64).gcd(&D) == 1 {
            baby[j] = Some(cur);
        }
        let next = c.add_diff(&cur, &q2, &prev);
        prev = std::mem::replace(&mut cur, next);
        j += 2;
    }

    // giant steps R = [kD]Q
    let step = c.ladder(&q, &BigUint::from(D));
    let k0 = (b1 / D).max(1);
    let mut r_prev = c.ladder(&q, &BigUint::from((k0 - 1).max(1) * D));
    let mut r = c.ladder(&q, &BigUint::from(k0 * D));
    if k0 == 1 {
        // r_prev must be [(k0 − 1)D]Q = O; restart one step later instead
        r_prev = r;
        r = c.double(&step);
    }
    let mut k = if k0 == 1 { 2 } else { k0 };
    let mut acc = c.m.lift(&BigUint::one(), n);
    let mut count = 0u32;
    while k * D <= b2 + half as u64 {
        let base = k * D;
        for (j, bp) in baby.iter().enumerate() {
            let Some(bp) = bp else { continue };
            let j = j as u64;
            let hit = |m: u64| m > b1 && m <= b2 && is_prime[m as usize];
            if hit(base - j) || hit(base + j) {
                let t = c.sub(&c.mul(&r.x, &bp.z), &c.mul(&bp.x, &r.z));
                acc = c.mul(&acc, &t);
                count += 1;
            }
        }
        if count >= 256 {
            count = 0;
            let g = c.gcd(&acc);
            if !g.is_one() {
                return nontrivial(g, n);
            }
        }
        let next = c.add_diff(&r, &step, &r_prev);
        r_prev = std::mem::replace(&mut r, next);
        k += 1;
    }
    nontrivial(c.gcd(&acc), n)
}
