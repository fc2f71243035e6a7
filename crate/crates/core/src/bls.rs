//! The BLS N − 1 engine.
//!
//! Given certified primes `q | N − 1`, take full valuations to build the
//! factored part `F` and cofactor `R = (N − 1)/F`, pick a witness `a_q` per
//! prime, and decide:
//!
//! * `F² > N`: prime.
//! * `F³ > N`, `F` even: write `R = 2F·s + r` with `0 <= r < 2F`; prime iff
//!   `s = 0` or `r² − 8s` is not a perfect square.
//!
//! [`prove_wagstaff`] runs the whole pipeline for `W_p`, with `F` harvested
//! from the completely factored terms `Φ_d(2)`, `d | p − 1`.

use std::fmt;

use log::{debug, info};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigmath::{self, primes_up_to};
use crate::certificate::BlsCertificate;
use crate::certify::{self, CompositeWitness, PrimalityProof};
use crate::codec;
use crate::cyclotomic::{self, CyclotomicTerm};
use crate::factor::{factor_fully, BudgetSpec, Factorization, Provenance, SourceSet};
use crate::quad_ring::{self, ChuaOutcome};

/// Witness candidates: the first this-many primes.
pub const WITNESS_CANDIDATES: usize = 100;

/// Bases tried, in order, before any factoring of `W_p − 1`. Base 2 is
/// useless here: `2^{2p} ≡ 1 (mod W_p)` always.
pub const WAGSTAFF_SCREEN_BASES: [u32; 3] = [3, 5, 7];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Sqrt,
    Cube,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Sqrt => "sqrt",
            Form::Cube => "cube",
        })
    }
}

/// `R = 2F·s + r`, `Δ = r² − 8s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscriminantRecord {
    #[serde(with = "codec::big_uint")]
    pub s: BigUint,
    #[serde(with = "codec::big_uint")]
    pub r: BigUint,
    #[serde(with = "codec::big_int")]
    pub delta: BigInt,
    pub is_square: bool,
}

impl DiscriminantRecord {
    pub fn accepts(&self) -> bool {
        self.s.is_zero() || !self.is_square
    }
}

/// Decomposition record for cofactor `r_cof` against factored part `f`.
pub fn discriminant_record(f: &BigUint, r_cof: &BigUint) -> DiscriminantRecord {
    let two_f = f << 1usize;
    let (s, r) = r_cof.div_rem(&two_f);
    let delta = BigInt::from(&r * &r) - BigInt::from(&s << 3usize);
    let is_square = bigmath::is_perfect_square(&delta);
    DiscriminantRecord { s, r, delta, is_square }
}

/// The discriminant test for `N − 1 = F·R`; only meaningful in the cube range.
pub fn discriminant_check(n: &BigUint, f: &BigUint, r: &BigUint) -> Result<DiscriminantRecord, BlsError> {
    if f * f > *n {
        return Err(BlsError::NotApplicable);
    }
    if f.pow(3) <= *n {
        return Err(BlsError::InsufficientFactoredPart(Box::new(Shortfall::of(n, f, Vec::new()))));
    }
    if &(f * r) + 1u32 != *n {
        return Err(BlsError::Internal("F·R != N − 1".into()));
    }
    Ok(discriminant_record(f, r))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("Fermat test fails to base {base}")]
    FermatFailure { base: BigUint },
    #[error("found factor {factor}")]
    FactorFound { factor: BigUint },
    #[error("no witness among the first {tried} prime bases")]
    Exhausted { tried: usize },
}

fn witness_bases() -> &'static [u64] {
    static BASES: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    BASES.get_or_init(|| primes_up_to(600).into_iter().take(WITNESS_CANDIDATES).collect())
}

/// Smallest prime `a < n` with `a^{n−1} ≡ 1` and `gcd(a^{(n−1)/q} − 1, n) = 1`.
pub fn find_witness(n: &BigUint, q: &BigUint) -> Result<BigUint, WitnessError> {
    let nm1 = n - 1u32;
    let cofactor = &nm1 / q;
    let mut tried = 0;
    for &a in witness_bases() {
        let a = BigUint::from(a);
        if &a >= n {
            break;
        }
        tried += 1;
        if !a.modpow(&nm1, n).is_one() {
            return Err(WitnessError::FermatFailure { base: a });
        }
        let t = a.modpow(&cofactor, n);
        if t.is_one() {
            continue;
        }
        let g = (t + &nm1) % n;
        let g = g.gcd(n);
        if g.is_one() {
            return Ok(a);
        }
        if &g != n {
            return Err(WitnessError::FactorFound { factor: g });
        }
    }
    Err(WitnessError::Exhausted { tried })
}

/// A prime admitted to a factored part, with its audit label and proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedPrime {
    pub q: BigUint,
    pub provenance: Provenance,
    pub proof: PrimalityProof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionEntry {
    pub q: BigUint,
    /// `v_q(N − 1)`.
    pub e: u32,
    pub witness: Option<BigUint>,
    pub provenance: Provenance,
    pub proof: PrimalityProof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub n: BigUint,
    pub f: BigUint,
    pub r: BigUint,
    /// Sorted by `q`.
    pub entries: Vec<DecompositionEntry>,
    pub margin_bits: i64,
    pub form: Form,
    pub discriminant: Option<DiscriminantRecord>,
}

/// `⌊log₂F³⌋ − ⌊log₂N⌋`.
pub fn margin_bits(f: &BigUint, n: &BigUint) -> i64 {
    bigmath::floor_log2(&f.pow(3)) as i64 - bigmath::floor_log2(n) as i64
}

/// One term's contribution, in the style of a blocking report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermReport {
    pub d: u64,
    pub bits: u64,
    pub factored_bits: u64,
    pub primes: usize,
    pub status: TermStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermStatus {
    Complete,
    /// Some primes found, a cofactor of `residual_bits` bits remains.
    Partial { residual_bits: u64 },
    /// Above the `max_term_bits` budget; not attempted.
    Skipped,
}

impl TermReport {
    pub fn is_complete(&self) -> bool {
        self.status == TermStatus::Complete
    }
}

impl fmt::Display for TermReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            TermStatus::Complete => write!(f, "Φ_{}(2): {} bits, complete ({} primes)", self.d, self.bits, self.primes),
            TermStatus::Partial { residual_bits } => write!(
                f,
                "Φ_{}(2) ~ 2^{}: {} bits factored, {} bits unfactored",
                self.d,
                self.bits - 1,
                self.factored_bits,
                residual_bits
            ),
            TermStatus::Skipped => write!(f, "Φ_{}(2) ~ 2^{}: unfactored (over budget)", self.d, self.bits - 1),
        }
    }
}

/// How far a factored part falls short of `F³ > N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortfall {
    /// `⌊log₂F⌋ + 1`.
    pub factored_bits: u64,
    /// Bits of `F` that guarantee `F³ > N`.
    pub required_bits: u64,
    pub margin_bits: i64,
    pub terms: Vec<TermReport>,
}

impl Shortfall {
    fn of(n: &BigUint, f: &BigUint, terms: Vec<TermReport>) -> Self {
        Shortfall {
            factored_bits: f.bits(),
            required_bits: bigmath::floor_log2(n) / 3 + 1,
            margin_bits: margin_bits(f, n),
            terms,
        }
    }

    /// Incomplete terms, smallest `d` first.
    pub fn blocking(&self) -> impl Iterator<Item = &TermReport> {
        self.terms.iter().filter(|t| !t.is_complete())
    }

    pub fn missing_bits(&self) -> u64 {
        self.required_bits.saturating_sub(self.factored_bits)
    }
}

impl fmt::Display for Shortfall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "factored part has {} bits, needs {} ({} missing, M = {})",
            self.factored_bits,
            self.required_bits,
            self.missing_bits(),
            self.margin_bits
        )?;
        if let Some(t) = self.blocking().next() {
            write!(f, "; blocking d = {}", t.d)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlsError {
    #[error("invalid exponent p = {0}: must be a prime >= 5")]
    InvalidExponent(u64),
    #[error("insufficient factored part: {0}")]
    InsufficientFactoredPart(Box<Shortfall>),
    #[error("N is composite ({witness})")]
    CompositeDetected { witness: CompositeWitness },
    #[error("no witness found for q = {q} among the first {tried} prime bases")]
    WitnessSearchExhausted { q: BigUint, tried: usize },
    #[error("{q} does not divide N − 1")]
    NotADivisor { q: BigUint },
    #[error("discriminant check does not apply when F^2 > N")]
    NotApplicable,
    #[error("internal error: {0}")]
    Internal(String),
}

/// Builds `F` from full valuations of the given primes. Witnesses are unset.
pub fn assemble_factored_part(n: &BigUint, certified: &[CertifiedPrime]) -> Result<Decomposition, BlsError> {
    if n < &BigUint::from(3u32) || n.is_even() {
        return Err(BlsError::Internal(format!("N = {n} must be odd >= 3")));
    }
    let nm1 = n - 1u32;
    let mut sorted: Vec<&CertifiedPrime> = certified.iter().collect();
    sorted.sort_by(|a, b| a.q.cmp(&b.q));
    sorted.dedup_by(|a, b| a.q == b.q);

    let mut f = BigUint::one();
    let mut entries = Vec::with_capacity(sorted.len());
    for c in sorted {
        let e = bigmath::valuation(&nm1, &c.q).map_err(|e| BlsError::Internal(e.to_string()))?;
        if e == 0 {
            return Err(BlsError::NotADivisor { q: c.q.clone() });
        }
        f *= c.q.pow(e);
        entries.push(DecompositionEntry {
            q: c.q.clone(),
            e,
            witness: None,
            provenance: c.provenance,
            proof: c.proof.clone(),
        });
    }
    let r = &nm1 / &f;
    let margin = margin_bits(&f, n);
    let (form, discriminant) = if &f * &f > *n {
        (Form::Sqrt, None)
    } else if f.pow(3) > *n && f.is_even() {
        (Form::Cube, Some(discriminant_record(&f, &r)))
    } else {
        return Err(BlsError::InsufficientFactoredPart(Box::new(Shortfall::of(n, &f, Vec::new()))));
    };
    Ok(Decomposition { n: n.clone(), f, r, entries, margin_bits: margin, form, discriminant })
}

/// Fills in one witness per prime (searched in parallel, reported in order)
/// and applies the discriminant test for the cube form.
pub fn complete_decomposition(dec: &mut Decomposition) -> Result<(), BlsError> {
    let n = dec.n.clone();
    let results: Vec<Result<BigUint, WitnessError>> = dec.entries.par_iter().map(|e| find_witness(&n, &e.q)).collect();
    for (entry, res) in dec.entries.iter_mut().zip(results) {
        match res {
            Ok(a) => entry.witness = Some(a),
            Err(WitnessError::FermatFailure { base }) => {
                return Err(BlsError::CompositeDetected { witness: CompositeWitness::Fermat { base } })
            }
            Err(WitnessError::FactorFound { factor }) => {
                return Err(BlsError::CompositeDetected { witness: CompositeWitness::Factor { factor } })
            }
            Err(WitnessError::Exhausted { tried }) => {
                return Err(BlsError::WitnessSearchExhausted { q: entry.q.clone(), tried })
            }
        }
    }
    if let Some(rec) = &dec.discriminant {
        if !rec.accepts() {
            return Err(BlsError::CompositeDetected {
                witness: CompositeWitness::SquareDiscriminant { delta: rec.delta.clone() },
            });
        }
    }
    Ok(())
}

/// BLS verdict for `n` from a set of primes dividing `n − 1`.
/// Each prime is certified on the way in.
pub fn prove_with_factored_part(n: &BigUint, primes: &[BigUint]) -> Result<Decomposition, BlsError> {
    let budget = BudgetSpec::default();
    let mut certified = Vec::with_capacity(primes.len());
    for q in primes {
        let proof = certify::prove_prime(q, &budget).map_err(|e| BlsError::Internal(format!("factor {q}: {e}")))?;
        certified.push(CertifiedPrime { q: q.clone(), provenance: Provenance::Algebraic, proof });
    }
    let mut dec = assemble_factored_part(n, &certified)?;
    complete_decomposition(&mut dec)?;
    Ok(dec)
}

/// One cyclotomic term and what became of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermOutcome {
    pub term: CyclotomicTerm,
    /// `None` when the term was skipped for budget reasons.
    pub factorization: Option<Factorization>,
}

impl TermOutcome {
    pub fn is_complete(&self) -> bool {
        self.factorization.as_ref().is_some_and(Factorization::is_complete)
    }

    pub fn report(&self) -> TermReport {
        let bits = self.term.bit_length;
        match &self.factorization {
            None => TermReport { d: self.term.d, bits, factored_bits: 0, primes: 0, status: TermStatus::Skipped },
            Some(fz) if fz.is_complete() => TermReport {
                d: self.term.d,
                bits,
                factored_bits: bits,
                primes: fz.factors.len(),
                status: TermStatus::Complete,
            },
            Some(fz) => TermReport {
                d: self.term.d,
                bits,
                factored_bits: fz.factored_bits(),
                primes: fz.factors.len(),
                status: TermStatus::Partial { residual_bits: fz.residual.bits() },
            },
        }
    }
}

/// Everything a Wagstaff proof run produced, before serialization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WagstaffProof {
    pub p: u64,
    pub decomposition: Decomposition,
    /// Terms `Φ_d(2)` for `d | p − 1`, `d >= 3`, ordered by `d`.
    pub terms: Vec<TermOutcome>,
    pub chua: ChuaOutcome,
}

impl WagstaffProof {
    pub fn n(&self) -> &BigUint {
        &self.decomposition.n
    }

    pub fn reports(&self) -> Vec<TermReport> {
        self.terms.iter().map(TermOutcome::report).collect()
    }
}

fn screen_wagstaff(n: &BigUint) -> Result<(), BlsError> {
    let nm1 = n - 1u32;
    for base in WAGSTAFF_SCREEN_BASES {
        let a = BigUint::from(base);
        if !a.modpow(&nm1, n).is_one() {
            return Err(BlsError::CompositeDetected { witness: CompositeWitness::Fermat { base: a } });
        }
    }
    certify::bpsw(n).map_err(|witness| BlsError::CompositeDetected { witness })
}

/// Factors the terms `Φ_d(2)` for `d | p − 1`, `d >= 3` (in parallel).
pub fn harvest_terms(p: u64, sources: &SourceSet, budget: &BudgetSpec) -> Result<Vec<TermOutcome>, BlsError> {
    let (_, terms) = cyclotomic::wagstaff_n_minus_one(p).map_err(|_| BlsError::InvalidExponent(p))?;
    let outcomes = terms
        .into_par_iter()
        .filter(|t| t.d >= 3)
        .map(|term| {
            let skip = budget.max_term_bits.is_some_and(|m| term.bit_length > m);
            let factorization = if skip {
                None
            } else {
                let fz = factor_fully(&term.value, term.d, budget, sources);
                debug!("Φ_{}(2): {}", term.d, fz);
                Some(fz)
            };
            TermOutcome { term, factorization }
        })
        .collect();
    Ok(outcomes)
}

/// Full proof of `W_p` as a structured value.
pub fn prove_wagstaff_detailed(p: u64, sources: &SourceSet, budget: &BudgetSpec) -> Result<WagstaffProof, BlsError> {
    if p < 5 || !bigmath::is_prime_u64(p) {
        return Err(BlsError::InvalidExponent(p));
    }
    let n = quad_ring::wagstaff(p);
    screen_wagstaff(&n)?;

    let terms = harvest_terms(p, sources, budget)?;
    let mut certified = vec![CertifiedPrime {
        q: BigUint::from(2u32),
        provenance: Provenance::Algebraic,
        proof: PrimalityProof::SmallDeterministic { n: BigUint::from(2u32) },
    }];
    for t in terms.iter().filter(|t| t.is_complete()) {
        for pf in &t.factorization.as_ref().expect("complete term").factors {
            if !certified.iter().any(|c| c.q == pf.prime) {
                certified.push(CertifiedPrime { q: pf.prime.clone(), provenance: pf.provenance, proof: pf.proof.clone() });
            }
        }
    }

    let mut dec = match assemble_factored_part(&n, &certified) {
        Ok(dec) => dec,
        Err(BlsError::InsufficientFactoredPart(mut s)) => {
            s.terms = terms.iter().map(TermOutcome::report).collect();
            return Err(BlsError::InsufficientFactoredPart(s));
        }
        Err(e) => return Err(e),
    };
    complete_decomposition(&mut dec)?;
    info!("W_{p}: {} primes in F, form {}, M = {}", dec.entries.len(), dec.form, dec.margin_bits);

    let chua = quad_ring::condition_two_outcome(p).map_err(|e| BlsError::Internal(e.to_string()))?;
    if !chua.holds {
        return Err(BlsError::Internal(format!(
            "condition (II) fails for the certified prime W_{p}; quadratic-ring arithmetic is inconsistent"
        )));
    }
    Ok(WagstaffProof { p, decomposition: dec, terms, chua })
}

/// Proves `W_p` prime and packages the result as a digested certificate.
pub fn prove_wagstaff(p: u64, sources: &SourceSet, budget: &BudgetSpec) -> Result<BlsCertificate, BlsError> {
    let proof = prove_wagstaff_detailed(p, sources, budget)?;
    Ok(BlsCertificate::from_proof(&proof))
}

/// Number of primes in `F` and the margin, as a Table-1 style summary.
pub fn summary_row(proof: &WagstaffProof) -> (u64, u64, usize, usize, i64) {
    let p = proof.p;
    (
        p,
        bigmath::digits10(proof.n()),
        cyclotomic::tau(p - 1),
        proof.decomposition.entries.len(),
        proof.decomposition.margin_bits,
    )
}
