//! Factoring `Φ_d(2)` with per-prime provenance.
//!
//! Pipeline for one term: primality of the whole term, local tables, the
//! external database (when enabled), trial division along `q ≡ 1 (mod d)`,
//! then Pollard p − 1 and Pollard ρ on every composite cofactor. A prime is
//! only recorded after [`certify::prove_prime`] succeeds; anything left over
//! stays in `residual`.

pub mod ecm;
pub mod pminus1;
pub mod rho;
pub mod table;
pub mod trial;

use std::fmt;
use std::sync::Arc;

use log::{debug, warn};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{self, PrimalityProof};
use crate::factordb::FactorDbClient;

pub use pminus1::pollard_p_minus_1;
pub use rho::pollard_rho;
pub use table::{load_factor_table, load_factor_tables, FactorTable, TableError};
pub use trial::progression_divisors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no factor found")]
pub struct NoFactorFound;

/// Where a prime's literal value first entered the pipeline. Audit only; the
/// proof of primality is what admits a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Algebraic,
    TableLookup,
    ExternalDb,
    TrialDivCyclotomic,
    DirectRho,
    #[serde(rename = "direct_pminus1")]
    DirectPMinus1,
    CyclotomicPrime,
    ResidualPrimeCertified,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Algebraic => "algebraic",
            Provenance::TableLookup => "table_lookup",
            Provenance::ExternalDb => "external_db",
            Provenance::TrialDivCyclotomic => "trial_div_cyclotomic",
            Provenance::DirectRho => "direct_rho",
            Provenance::DirectPMinus1 => "direct_pminus1",
            Provenance::CyclotomicPrime => "cyclotomic_prime",
            Provenance::ResidualPrimeCertified => "residual_prime_certified",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFactor {
    pub prime: BigUint,
    pub exponent: u32,
    pub provenance: Provenance,
    pub proof: PrimalityProof,
}

/// `n = ∏ prime^exponent · residual`; `residual > 1` is composite or was not
/// certified within budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: BigUint,
    pub factors: Vec<PrimeFactor>,
    pub residual: BigUint,
}

impl Factorization {
    pub fn trivial(n: BigUint) -> Self {
        Factorization { residual: n.clone(), n, factors: Vec::new() }
    }

    pub fn is_complete(&self) -> bool {
        self.residual.is_one()
    }

    /// Exact re-check of `∏ p^e · residual = n`.
    pub fn product_holds(&self) -> bool {
        let prod: BigUint = self.factors.iter().map(|f| f.prime.pow(f.exponent)).product();
        prod * &self.residual == self.n
    }

    /// Bits of `n` accounted for by certified primes.
    pub fn factored_bits(&self) -> u64 {
        let prod: BigUint = self.factors.iter().map(|f| f.prime.pow(f.exponent)).product();
        prod.bits().saturating_sub(1)
    }

    fn record(&mut self, prime: BigUint, provenance: Provenance, proof: PrimalityProof) {
        let mut e = 0u32;
        while !self.residual.is_zero() && (&self.residual % &prime).is_zero() {
            self.residual /= &prime;
            e += 1;
        }
        if e == 0 {
            return;
        }
        match self.factors.iter_mut().find(|f| f.prime == prime) {
            Some(f) => f.exponent += e,
            None => self.factors.push(PrimeFactor { prime, exponent: e, provenance, proof }),
        }
    }

    fn sort(&mut self) {
        self.factors.sort_by(|a, b| a.prime.cmp(&b.prime));
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() && self.residual.is_one() {
            return write!(f, "{}, empty", self.n);
        }
        // primes sharing a provenance are listed together, label after the run
        let mut parts: Vec<String> = Vec::new();
        let mut run: Vec<String> = Vec::new();
        for (i, p) in self.factors.iter().enumerate() {
            run.push(if p.exponent > 1 { format!("{}^{}", p.prime, p.exponent) } else { p.prime.to_string() });
            let last = i + 1 == self.factors.len() || self.factors[i + 1].provenance != p.provenance;
            if last {
                parts.push(format!("{} ({})", run.join(" · "), p.provenance));
                run.clear();
            }
        }
        if !self.residual.is_one() {
            parts.push(format!("[{} unfactored]", self.residual));
        }
        f.write_str(&parts.join(" · "))
    }
}

/// Work limits for one factoring or certification job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetSpec {
    /// Candidates `q ≡ 1 (mod d)` tried by trial division.
    pub trial_candidates: u64,
    /// ρ iterations per composite.
    pub rho_iterations: u64,
    /// Stage-1 bound for p − 1.
    pub pm1_b1: u64,
    /// Elliptic curves per ECM round; 0 disables ECM.
    pub ecm_curves: u32,
    /// Largest ECM stage-1 bound. Rounds start at B1 = 2000 and grow by 5.5×
    /// up to this cap, each on fresh curves, stage 2 to `100 · B1`.
    pub ecm_b1: u64,
    /// Terms larger than this are left unfactored without any attempt.
    pub max_term_bits: Option<u64>,
}

impl BudgetSpec {
    pub fn ecm(&self, n: &BigUint) -> Result<BigUint, NoFactorFound> {
        let mut b1 = self.ecm_b1.min(2_000);
        let mut sigma = 6;
        loop {
            if let Ok(g) = ecm::ecm_from(n, sigma, self.ecm_curves, b1, b1.saturating_mul(100)) {
                return Ok(g);
            }
            if b1 >= self.ecm_b1 {
                return Err(NoFactorFound);
            }
            sigma += self.ecm_curves as u64;
            b1 = (b1 * 11 / 2).min(self.ecm_b1);
        }
    }
}

impl Default for BudgetSpec {
    fn default() -> Self {
        BudgetSpec {
            trial_candidates: 1_000_000,
            rho_iterations: 200_000,
            pm1_b1: 100_000,
            ecm_curves: 100,
            ecm_b1: 50_000,
            max_term_bits: None,
        }
    }
}

/// An additional splitting method run after ρ and ECM.
/// Primes it isolates are recorded as `direct_rho`.
pub trait FactorHook: Send + Sync {
    fn name(&self) -> &str;
    fn find_factor(&self, n: &BigUint) -> Option<BigUint>;
}

/// External inputs consulted before local factoring.
#[derive(Clone, Default)]
pub struct SourceSet {
    pub tables: FactorTable,
    pub factordb: Option<Arc<FactorDbClient>>,
    pub hook: Option<Arc<dyn FactorHook>>,
}

impl SourceSet {
    pub fn local() -> Self {
        Self::default()
    }

    pub fn with_tables(tables: FactorTable) -> Self {
        SourceSet { tables, ..Default::default() }
    }
}

impl fmt::Debug for SourceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceSet")
            .field("tables", &self.tables.len())
            .field("factordb", &self.factordb.is_some())
            .field("hook", &self.hook.as_ref().map(|h| h.name().to_string()))
            .finish()
    }
}

/// Factor `n` (normally `Φ_d(2)`) as far as `budget` allows.
pub fn factor_fully(n: &BigUint, d: u64, budget: &BudgetSpec, sources: &SourceSet) -> Factorization {
    let mut fz = Factorization::trivial(n.clone());
    if n <= &BigUint::one() {
        return fz;
    }

    if certify::is_probable_prime(n) {
        if let Ok(proof) = certify::prove_prime(n, budget) {
            fz.record(n.clone(), Provenance::CyclotomicPrime, proof);
        }
        return fz;
    }

    if let Some(claims) = sources.tables.get(d) {
        apply_claims(&mut fz, claims, Provenance::TableLookup, budget);
    }

    if let Some(db) = sources.factordb.as_ref().filter(|_| !fz.residual.is_one()) {
        match db.lookup(&fz.residual) {
            Ok(resp) => {
                let claims: Vec<(BigUint, u32)> = resp.claimed_factors.clone();
                apply_claims(&mut fz, &claims, Provenance::ExternalDb, budget);
            }
            Err(e) => warn!("factor database unavailable for d = {d}: {e}"),
        }
    }

    if !fz.residual.is_one() {
        let bound = BigUint::from(d.max(1)) * BigUint::from(budget.trial_candidates) + 1u32;
        let (found, _) = trial::progression_divisors(&fz.residual, d, &bound);
        for (q, _) in found {
            let q = BigUint::from(q);
            if let Ok(proof) = certify::prove_prime(&q, budget) {
                fz.record(q, Provenance::TrialDivCyclotomic, proof);
            }
        }
    }

    let mut queue = Vec::new();
    if !fz.residual.is_one() {
        queue.push(fz.residual.clone());
    }
    while let Some(c) = queue.pop() {
        if c.is_one() {
            continue;
        }
        if certify::is_probable_prime(&c) {
            match certify::prove_prime(&c, budget) {
                Ok(proof) => fz.record(c, Provenance::ResidualPrimeCertified, proof),
                Err(e) => debug!("cofactor left uncertified: {e}"),
            }
            continue;
        }
        let split = pminus1::pollard_p_minus_1(&c, budget.pm1_b1)
            .map(|g| (g, Provenance::DirectPMinus1))
            .or_else(|_| rho::pollard_rho(&c, budget.rho_iterations).map(|g| (g, Provenance::DirectRho)))
            .or_else(|_| budget.ecm(&c).map(|g| (g, Provenance::DirectRho)))
            .ok()
            .or_else(|| {
                sources
                    .hook
                    .as_ref()
                    .and_then(|h| h.find_factor(&c))
                    .filter(|g| !g.is_one() && g != &c && (&c % g).is_zero())
                    .map(|g| (g, Provenance::DirectRho))
            });
        let Some((g, how)) = split else {
            debug!("composite cofactor of {} bits left unsplit for d = {d}", c.bits());
            continue;
        };
        let other = &c / &g;
        for part in [g, other] {
            if certify::is_probable_prime(&part) {
                match certify::prove_prime(&part, budget) {
                    Ok(proof) => fz.record(part, how, proof),
                    Err(e) => debug!("split part left uncertified: {e}"),
                }
            } else {
                queue.push(part);
            }
        }
    }
    fz.sort();
    debug_assert!(fz.product_holds());
    fz
}

/// Admits claimed `(prime, exponent)` pairs that divide the cofactor and
/// certify; everything else is discarded with a warning.
fn apply_claims(fz: &mut Factorization, claims: &[(BigUint, u32)], provenance: Provenance, budget: &BudgetSpec) {
    for (prime, exponent) in claims {
        let pe = prime.pow(*exponent);
        if prime <= &BigUint::one() || !(&fz.residual % &pe).is_zero() {
            warn!("{provenance} claim {prime}^{exponent} does not divide the cofactor; discarded");
            continue;
        }
        match certify::prove_prime(prime, budget) {
            Ok(proof) => fz.record(prime.clone(), provenance, proof),
            Err(e) => warn!("{provenance} claim {prime} rejected: {e}"),
        }
    }
}
