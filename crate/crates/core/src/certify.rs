//! Unconditional primality certification for every prime admitted to a
//! factored part, plus the BPSW screen used before any expensive work.
//!
//! Primes below 2^64 are settled by the strong test over the twelve bases
//! 2..=37, which is deterministic far past that range. Larger primes get a
//! recursive N−1 proof (Pocklington when `F² > n`, the BLS cube form
//! otherwise), and each prime in the factored part of `n − 1` carries its own
//! proof, down to the small leaves.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::bigmath::{self, jacobi};
use crate::bls::{self, DiscriminantRecord, WitnessError};
use crate::factor::{pminus1, rho, trial, BudgetSpec};

/// Leaves cover `n < 2^64`.
pub const SMALL_THRESHOLD_BITS: u64 = 64;

/// Method tag recorded on every leaf.
pub const SMALL_METHOD: &str = "strong_bases_2_to_37";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompositeWitness {
    /// `base^{n−1} ≢ 1 (mod n)`.
    Fermat { base: BigUint },
    /// `n` fails the strong test to `base`.
    StrongBase { base: u64 },
    /// `n` fails the strong Lucas test with Selfridge parameter `d`.
    Lucas { d: i64 },
    /// A proper divisor.
    Factor { factor: BigUint },
    /// Cube-form discriminant `r² − 8s` is a nonzero-`s` perfect square.
    SquareDiscriminant { delta: BigInt },
}

impl std::fmt::Display for CompositeWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompositeWitness::Fermat { base } => write!(f, "Fermat witness a = {base}"),
            CompositeWitness::StrongBase { base } => write!(f, "strong-test witness a = {base}"),
            CompositeWitness::Lucas { d } => write!(f, "strong Lucas witness D = {d}"),
            CompositeWitness::Factor { factor } => write!(f, "divisor {factor}"),
            CompositeWitness::SquareDiscriminant { delta } => write!(f, "square discriminant {delta}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("{n} is composite ({witness})")]
    CompositeDetected { n: BigUint, witness: CompositeWitness },
    #[error("could not certify {n}: {reason}")]
    CertificationIncomplete { n: BigUint, reason: String },
    #[error("{0} is below 2")]
    TooSmall(BigUint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimalityProof {
    SmallDeterministic { n: BigUint },
    NMinusOne(Box<NMinusOneProof>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NMinusOneProof {
    pub n: BigUint,
    pub factors: Vec<ProofFactor>,
    pub form: ProofForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofFactor {
    pub q: BigUint,
    pub exponent: u32,
    pub witness: BigUint,
    pub proof: PrimalityProof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofForm {
    /// `F² > n`.
    Sqrt,
    /// `n^{1/3} < F <= n^{1/2}` with a non-square discriminant (or `s = 0`).
    Cube(DiscriminantRecord),
}

impl PrimalityProof {
    pub fn n(&self) -> &BigUint {
        match self {
            PrimalityProof::SmallDeterministic { n } => n,
            PrimalityProof::NMinusOne(p) => &p.n,
        }
    }

    /// Number of nodes in the proof tree.
    pub fn size(&self) -> usize {
        match self {
            PrimalityProof::SmallDeterministic { .. } => 1,
            PrimalityProof::NMinusOne(p) => 1 + p.factors.iter().map(|f| f.proof.size()).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            PrimalityProof::SmallDeterministic { .. } => 1,
            PrimalityProof::NMinusOne(p) => 1 + p.factors.iter().map(|f| f.proof.depth()).max().unwrap_or(0),
        }
    }
}

// --- BPSW screen -------------------------------------------------------------

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| bigmath::primes_up_to(1 << 16))
}

/// Strong base-2 test followed by a strong Lucas test (Selfridge parameters).
pub fn is_probable_prime(n: &BigUint) -> bool {
    bpsw(n).is_ok()
}

/// BPSW with the reason for rejection.
pub fn bpsw(n: &BigUint) -> Result<(), CompositeWitness> {
    if n < &BigUint::from(2u32) {
        return Err(CompositeWitness::Factor { factor: n.clone() });
    }
    for &p in small_primes().iter().take(168) {
        if n == &BigUint::from(p) {
            return Ok(());
        }
        if trial::rem_u64(n, p) == 0 {
            return Err(CompositeWitness::Factor { factor: BigUint::from(p) });
        }
    }
    if let Some(small) = n.to_u64() {
        return bpsw_u64(small);
    }
    if !strong_probable_prime(n, &BigUint::from(2u32)) {
        return Err(CompositeWitness::StrongBase { base: 2 });
    }
    strong_lucas(&BigModulus(n.clone()))
}

/// BPSW on a machine word; exposed so tests can sweep it against a sieve.
pub fn bpsw_u64(n: u64) -> Result<(), CompositeWitness> {
    if n < 2 {
        return Err(CompositeWitness::Factor { factor: BigUint::from(n) });
    }
    if n < 4 {
        return Ok(());
    }
    if n.is_multiple_of(2) {
        return Err(CompositeWitness::Factor { factor: BigUint::from(2u32) });
    }
    if !bigmath::strong_probable_prime_u64(n, 2) {
        return Err(CompositeWitness::StrongBase { base: 2 });
    }
    strong_lucas(&WordModulus(n))
}

/// BPSW on a big integer regardless of size.
pub fn bpsw_big(n: &BigUint) -> Result<(), CompositeWitness> {
    if n < &BigUint::from(4u32) {
        return if n >= &BigUint::from(2u32) { Ok(()) } else { Err(CompositeWitness::Factor { factor: n.clone() }) };
    }
    if n.is_even() {
        return Err(CompositeWitness::Factor { factor: BigUint::from(2u32) });
    }
    if !strong_probable_prime(n, &BigUint::from(2u32)) {
        return Err(CompositeWitness::StrongBase { base: 2 });
    }
    strong_lucas(&BigModulus(n.clone()))
}

pub fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Residue arithmetic shared by the word and big-integer Lucas tests.
trait LucasRing {
    type E: Clone + PartialEq;
    fn n_big(&self) -> BigUint;
    fn lift(&self, v: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn half(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
}

struct WordModulus(u64);

impl LucasRing for WordModulus {
    type E = u64;
    fn n_big(&self) -> BigUint {
        BigUint::from(self.0)
    }
    fn lift(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.0 as i128) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.0 as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.0 as u128 - *b as u128) % self.0 as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        bigmath::mul_mod_u64(*a, *b, self.0)
    }
    fn half(&self, a: &u64) -> u64 {
        let v = *a as u128 + if a % 2 == 1 { self.0 as u128 } else { 0 };
        (v / 2) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

struct BigModulus(BigUint);

impl LucasRing for BigModulus {
    type E = BigUint;
    fn n_big(&self) -> BigUint {
        self.0.clone()
    }
    fn lift(&self, v: i64) -> BigUint {
        let n = BigInt::from(self.0.clone());
        BigInt::from(v).mod_floor(&n).magnitude().clone()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + b) % &self.0
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a + &self.0 - b) % &self.0
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % &self.0
    }
    fn half(&self, a: &BigUint) -> BigUint {
        if a.is_odd() {
            (a + &self.0) >> 1usize
        } else {
            a >> 1usize
        }
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
}

/// Strong Lucas test, Selfridge method A: first `D` in 5, −7, 9, −11, … with
/// `(D/n) = −1`, `P = 1`, `Q = (1 − D)/4`. Assumes `n` odd and > 3.
fn strong_lucas<R: LucasRing>(ring: &R) -> Result<(), CompositeWitness> {
    let n = ring.n_big();
    if let Some(root) = bigmath::perfect_square_root(&BigInt::from(n.clone())) {
        return Err(CompositeWitness::Factor { factor: root });
    }
    let mut d: i64 = 5;
    loop {
        match jacobi(&BigInt::from(d), &n).expect("odd modulus") {
            -1 => break,
            0
                if BigUint::from(d.unsigned_abs()) != n => {
                    let g = BigUint::from(d.unsigned_abs()).gcd(&n);
                    return Err(CompositeWitness::Factor { factor: g });
                }
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let np1 = &n + 1u32;
    let s = np1.trailing_zeros().unwrap_or(0);
    let k = &np1 >> s;

    let dd = ring.lift(d);
    let qq = ring.lift(q);
    let two = ring.lift(2);
    let mut u = ring.lift(1);
    let mut v = ring.lift(1);
    let mut qk = qq.clone();
    for i in (0..k.bits() - 1).rev() {
        // double
        u = ring.mul(&u, &v);
        v = ring.sub(&ring.mul(&v, &v), &ring.mul(&two, &qk));
        qk = ring.mul(&qk, &qk);
        if k.bit(i) {
            // increment, P = 1
            let u_next = ring.half(&ring.add(&u, &v));
            let v_next = ring.half(&ring.add(&ring.mul(&dd, &u), &v));
            u = u_next;
            v = v_next;
            qk = ring.mul(&qk, &qq);
        }
    }
    if ring.is_zero(&u) || ring.is_zero(&v) {
        return Ok(());
    }
    for _ in 1..s {
        v = ring.sub(&ring.mul(&v, &v), &ring.mul(&two, &qk));
        if ring.is_zero(&v) {
            return Ok(());
        }
        qk = ring.mul(&qk, &qk);
    }
    Err(CompositeWitness::Lucas { d })
}

// --- proving -----------------------------------------------------------------

/// Builds a checkable primality proof for `n`, factoring `n − 1` as far as
/// needed within `budget`.
pub fn prove_prime(n: &BigUint, budget: &BudgetSpec) -> Result<PrimalityProof, CertifyError> {
    if n < &BigUint::from(2u32) {
        return Err(CertifyError::TooSmall(n.clone()));
    }
    if let Some(small) = n.to_u64() {
        return prove_small(small);
    }
    if let Err(witness) = bpsw(n) {
        return Err(CertifyError::CompositeDetected { n: n.clone(), witness });
    }
    prove_large(n, budget)
}

fn prove_small(n: u64) -> Result<PrimalityProof, CertifyError> {
    if bigmath::is_prime_u64(n) {
        return Ok(PrimalityProof::SmallDeterministic { n: BigUint::from(n) });
    }
    let witness = if let Some(&p) = bigmath::DETERMINISTIC_BASES.iter().find(|&&p| n.is_multiple_of(p) && n != p) {
        CompositeWitness::Factor { factor: BigUint::from(p) }
    } else {
        let base = bigmath::DETERMINISTIC_BASES
            .iter()
            .copied()
            .find(|&a| !bigmath::strong_probable_prime_u64(n, a))
            .unwrap_or(2);
        CompositeWitness::StrongBase { base }
    };
    Err(CertifyError::CompositeDetected { n: BigUint::from(n), witness })
}

struct Harvest {
    nm1: BigUint,
    primes: Vec<(BigUint, u32, PrimalityProof)>,
    factored: BigUint,
    /// Parts of `n − 1` not yet split, coprime to everything harvested.
    pending: Vec<BigUint>,
    /// Parts that resisted splitting or certification.
    stuck: Vec<BigUint>,
}

impl Harvest {
    fn admit(&mut self, q: BigUint, proof: PrimalityProof) {
        if self.primes.iter().any(|(p, _, _)| p == &q) {
            return;
        }
        let e = bigmath::valuation(&self.nm1, &q).expect("n − 1 > 0");
        debug_assert!(e > 0);
        self.factored *= q.pow(e);
        for part in self.pending.iter_mut().chain(self.stuck.iter_mut()) {
            while (&*part % &q).is_zero() {
                *part /= &q;
            }
        }
        self.pending.retain(|p| !p.is_one());
        self.stuck.retain(|p| !p.is_one());
        self.primes.push((q, e, proof));
    }
}

fn prove_large(n: &BigUint, budget: &BudgetSpec) -> Result<PrimalityProof, CertifyError> {
    let nm1 = n - 1u32;
    let mut h = Harvest {
        nm1: nm1.clone(),
        primes: Vec::new(),
        factored: BigUint::one(),
        pending: Vec::new(),
        stuck: Vec::new(),
    };
    let mut rest = nm1.clone();
    for &p in small_primes() {
        if trial::rem_u64(&rest, p) == 0 {
            while trial::rem_u64(&rest, p) == 0 {
                rest /= p;
            }
            let q = BigUint::from(p);
            h.admit(q.clone(), PrimalityProof::SmallDeterministic { n: q });
        }
        if rest.is_one() {
            break;
        }
    }
    if !rest.is_one() {
        h.pending.push(rest);
    }

    let mut form = threshold_form(n, &h.factored);
    while form.is_none() {
        // certifiable parts first, then the smallest composite
        h.pending.sort_by(|a, b| b.cmp(a));
        let Some(idx) = h
            .pending
            .iter()
            .position(is_probable_prime)
            .or_else(|| if h.pending.is_empty() { None } else { Some(h.pending.len() - 1) })
        else {
            break;
        };
        let part = h.pending.swap_remove(idx);
        if is_probable_prime(&part) {
            match prove_prime(&part, budget) {
                Ok(proof) => h.admit(part, proof),
                Err(CertifyError::CompositeDetected { .. }) | Err(CertifyError::CertificationIncomplete { .. }) => {
                    h.stuck.push(part)
                }
                Err(e) => return Err(e),
            }
        } else {
            let split = pminus1::pollard_p_minus_1(&part, budget.pm1_b1.min(20_000))
                .or_else(|_| rho::pollard_rho(&part, budget.rho_iterations))
                .or_else(|_| budget.ecm(&part));
            match split {
                Ok(g) => {
                    let other = &part / &g;
                    h.pending.push(g);
                    h.pending.push(other);
                }
                Err(_) => h.stuck.push(part),
            }
        }
        form = threshold_form(n, &h.factored);
    }
    let Some(form) = form else {
        return Err(CertifyError::CertificationIncomplete {
            n: n.clone(),
            reason: format!(
                "factored {} of {} bits of n − 1; {} part(s) unsplit",
                h.factored.bits(),
                nm1.bits(),
                h.stuck.len() + h.pending.len()
            ),
        });
    };

    h.primes.sort_by(|a, b| a.0.cmp(&b.0));
    let mut factors = Vec::with_capacity(h.primes.len());
    for (q, exponent, proof) in h.primes {
        let witness = match bls::find_witness(n, &q) {
            Ok(a) => a,
            Err(WitnessError::FermatFailure { base }) => {
                return Err(CertifyError::CompositeDetected { n: n.clone(), witness: CompositeWitness::Fermat { base } })
            }
            Err(WitnessError::FactorFound { factor }) => {
                return Err(CertifyError::CompositeDetected { n: n.clone(), witness: CompositeWitness::Factor { factor } })
            }
            Err(e) => {
                return Err(CertifyError::CertificationIncomplete { n: n.clone(), reason: e.to_string() });
            }
        };
        factors.push(ProofFactor { q, exponent, witness, proof });
    }
    Ok(PrimalityProof::NMinusOne(Box::new(NMinusOneProof { n: n.clone(), factors, form })))
}

/// The form a factored part `f` of `n − 1` supports, if any.
fn threshold_form(n: &BigUint, f: &BigUint) -> Option<ProofForm> {
    if f * f > *n {
        return Some(ProofForm::Sqrt);
    }
    if f.pow(3) > *n && f.is_even() {
        let r = (n - 1u32) / f;
        let record = bls::discriminant_record(f, &r);
        if record.accepts() {
            return Some(ProofForm::Cube(record));
        }
    }
    None
}

// --- replay ------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("proof rejected at n = {n}: {reason}")]
pub struct ProofRejection {
    pub n: BigUint,
    pub reason: String,
}

pub fn verify_proof(n: &BigUint, proof: &PrimalityProof) -> bool {
    check_proof(n, proof).is_ok()
}

/// Replays every node of `proof`: leaf determinism, witness congruences, gcd
/// and threshold conditions, discriminants.
pub fn check_proof(n: &BigUint, proof: &PrimalityProof) -> Result<(), ProofRejection> {
    let reject = |reason: String| ProofRejection { n: n.clone(), reason };
    if proof.n() != n {
        return Err(reject(format!("proof is for {}", proof.n())));
    }
    match proof {
        PrimalityProof::SmallDeterministic { .. } => {
            let small = n.to_u64().ok_or_else(|| reject("leaf above 2^64".into()))?;
            if !bigmath::is_prime_u64(small) {
                return Err(reject("strong test over bases 2..=37 fails".into()));
            }
            Ok(())
        }
        PrimalityProof::NMinusOne(node) => {
            if n < &BigUint::from(3u32) || n.is_even() {
                return Err(reject("N−1 node needs odd n >= 3".into()));
            }
            if node.factors.is_empty() {
                return Err(reject("empty factored part".into()));
            }
            let nm1 = n - 1u32;
            let mut f = BigUint::one();
            for (i, fac) in node.factors.iter().enumerate() {
                if i > 0 && fac.q <= node.factors[i - 1].q {
                    return Err(reject("factors not strictly ascending".into()));
                }
                if fac.exponent == 0 || fac.q < BigUint::from(2u32) || &fac.q >= n {
                    return Err(reject(format!("malformed factor {}", fac.q)));
                }
                check_proof(&fac.q, &fac.proof)?;
                f *= fac.q.pow(fac.exponent);
            }
            let (r, rem) = nm1.div_rem(&f);
            if !rem.is_zero() {
                return Err(reject("F does not divide n − 1".into()));
            }
            if !f.gcd(&r).is_one() {
                return Err(reject("gcd(F, R) != 1".into()));
            }
            for fac in &node.factors {
                let a = &fac.witness;
                if a < &BigUint::from(2u32) || a >= n {
                    return Err(reject(format!("witness {a} out of range")));
                }
                if !a.modpow(&nm1, n).is_one() {
                    return Err(reject(format!("{a}^(n−1) != 1")));
                }
                let t = a.modpow(&(&nm1 / &fac.q), n);
                let g = if t.is_zero() { n.clone() } else { (t + &nm1) % n };
                if !g.gcd(n).is_one() {
                    return Err(reject(format!("gcd({a}^((n−1)/{}) − 1, n) != 1", fac.q)));
                }
            }
            match &node.form {
                ProofForm::Sqrt => {
                    if &f * &f <= *n {
                        return Err(reject("F^2 <= n".into()));
                    }
                }
                ProofForm::Cube(rec) => {
                    if f.pow(3) <= *n {
                        return Err(reject("F^3 <= n".into()));
                    }
                    if f.is_odd() {
                        return Err(reject("cube form needs even F".into()));
                    }
                    let fresh = bls::discriminant_record(&f, &r);
                    if &fresh != rec {
                        return Err(reject("discriminant record mismatch".into()));
                    }
                    if !fresh.accepts() {
                        return Err(reject("discriminant is a nonzero-s perfect square".into()));
                    }
                }
            }
            Ok(())
        }
    }
}
