//! Feasibility scan: how much of `W_p − 1` the terms `Φ_d(2)` can supply.
//!
//! A term counts toward `F` when it is completely factored. Without running
//! the factoring, "completely factored" is modelled by a horizon: terms of at
//! most `horizon_bits` bits (estimated by `φ(d)`) count, as do terms that the
//! supplied tables factor completely. With `measure` set, terms are actually
//! factored under the given budget and count only if that succeeds.
//!
//! A row is feasible when the counted bits, plus one for the algebraic 2,
//! exceed `(p − 1)/3`. The blocking term is the smallest `d` that does not count.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::bigmath;
use crate::cyclotomic;
use crate::factor::{factor_fully, BudgetSpec, SourceSet};
use crate::quad_ring;

pub const DEFAULT_HORIZON_BITS: u64 = 1400;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    pub horizon_bits: u64,
    /// Factor terms for real instead of applying the horizon.
    pub measure: Option<BudgetSpec>,
    /// Skip the digit count of `W_p` (the costliest part for large `p`).
    pub skip_digits: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { horizon_bits: DEFAULT_HORIZON_BITS, measure: None, skip_digits: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Within the horizon.
    Horizon,
    /// Completely factored by the supplied tables.
    Table,
    /// Completely factored by a measured run.
    Measured,
    /// Does not count.
    Open,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanTerm {
    pub d: u64,
    /// `φ(d)`, the bit size of `Φ_d(2)` up to a couple of bits.
    pub bits: u64,
    pub basis: Basis,
}

impl ScanTerm {
    pub fn counts(&self) -> bool {
        self.basis != Basis::Open
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible { blocking_d: u64, blocking_bits: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub p: u64,
    /// Prime factorization of `p − 1`.
    pub p_minus_1: Vec<(u64, u32)>,
    pub tau: usize,
    pub digits: Option<u64>,
    pub terms: Vec<ScanTerm>,
    pub factored_bits: u64,
    pub required_bits: u64,
    pub verdict: Verdict,
}

impl ScanRow {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Verdict::Feasible
    }

    /// `2^2·3·5^3·7` style.
    pub fn p_minus_1_string(&self) -> String {
        format_factorization(&self.p_minus_1)
    }
}

pub fn format_factorization(f: &[(u64, u32)]) -> String {
    f.iter()
        .map(|&(q, e)| if e > 1 { format!("{q}^{e}") } else { q.to_string() })
        .collect::<Vec<_>>()
        .join("·")
}

impl fmt::Display for ScanRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.digits.map_or_else(|| "-".to_string(), |d| d.to_string());
        write!(
            f,
            "{:>7}  {:<22} {:>4} {:>7}  {:>6}/{:<6} ",
            self.p,
            self.p_minus_1_string(),
            self.tau,
            digits,
            self.factored_bits,
            self.required_bits
        )?;
        match &self.verdict {
            Verdict::Feasible => write!(f, "feasible"),
            Verdict::Infeasible { blocking_d, blocking_bits } => {
                write!(f, "blocking d = {blocking_d}, Φ_{blocking_d}(2) ~ 2^{blocking_bits} unfactored")
            }
        }
    }
}

pub const HEADER: &str = "      p  p-1                     tau  digits  bits F/needed  verdict";

fn table_complete(d: u64, sources: &SourceSet) -> bool {
    let Some(claims) = sources.tables.get(d) else {
        return false;
    };
    let Ok(value) = cyclotomic::phi_at_2(d) else {
        return false;
    };
    let prod: BigUint = claims.iter().map(|(q, e)| q.pow(*e)).product();
    prod == value
}

pub fn scan_exponent(p: u64, sources: &SourceSet, options: &ScanOptions) -> ScanRow {
    let p_minus_1 = bigmath::factor_u64(p - 1);
    let ds: Vec<u64> = cyclotomic::divisors(p - 1).into_iter().filter(|&d| d >= 3).collect();
    let terms: Vec<ScanTerm> = ds
        .par_iter()
        .map(|&d| {
            let bits = cyclotomic::euler_phi(d);
            let basis = if table_complete(d, sources) {
                Basis::Table
            } else if let Some(budget) = &options.measure {
                let within = budget.max_term_bits.is_none_or(|m| bits <= m);
                let complete = within
                    && cyclotomic::phi_at_2(d).is_ok_and(|v| factor_fully(&v, d, budget, sources).is_complete());
                if complete {
                    Basis::Measured
                } else {
                    Basis::Open
                }
            } else if bits <= options.horizon_bits {
                Basis::Horizon
            } else {
                Basis::Open
            };
            ScanTerm { d, bits, basis }
        })
        .collect();
    let factored_bits = 1 + terms.iter().filter(|t| t.counts()).map(|t| t.bits).sum::<u64>();
    let required_bits = (p - 1) / 3;
    let verdict = if factored_bits > required_bits {
        Verdict::Feasible
    } else {
        match terms.iter().find(|t| !t.counts()) {
            Some(t) => Verdict::Infeasible { blocking_d: t.d, blocking_bits: t.bits },
            None => Verdict::Infeasible { blocking_d: 0, blocking_bits: 0 },
        }
    };
    let digits = (!options.skip_digits).then(|| bigmath::digits10(&quad_ring::wagstaff(p)));
    ScanRow {
        p,
        tau: cyclotomic::tau(p - 1),
        p_minus_1,
        digits,
        terms,
        factored_bits,
        required_bits,
        verdict,
    }
}

/// One row per exponent, in input order.
pub fn feasibility_scan(p_list: &[u64], sources: &SourceSet, options: &ScanOptions) -> Vec<ScanRow> {
    p_list.par_iter().map(|&p| scan_exponent(p, sources, options)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(p: u64) -> ScanRow {
        scan_exponent(p, &SourceSet::local(), &ScanOptions { skip_digits: true, ..Default::default() })
    }

    #[test]
    fn factorization_strings() {
        assert_eq!(row(3539).p_minus_1_string(), "2·29·61");
        assert_eq!(row(10501).p_minus_1_string(), "2^2·3·5^3·7");
        assert_eq!(row(10501).tau, 48);
        assert_eq!(row(42737).p_minus_1_string(), "2^4·2671");
    }

    #[test]
    fn blocking_terms() {
        assert_eq!(row(5807).verdict, Verdict::Infeasible { blocking_d: 2903, blocking_bits: 2902 });
        assert_eq!(row(42737).verdict, Verdict::Infeasible { blocking_d: 2671, blocking_bits: 2670 });
        assert!(matches!(row(3539).verdict, Verdict::Infeasible { blocking_d: 1769, .. }));
    }

    #[test]
    fn small_exponents_feasible() {
        for p in [5, 7, 127, 1709, 2617] {
            assert!(row(p).is_feasible(), "p = {p}");
        }
    }

    #[test]
    fn measured_mode_counts_only_factored_terms() {
        let budget = BudgetSpec { max_term_bits: Some(64), ..BudgetSpec::default() };
        let opts = ScanOptions { measure: Some(budget), skip_digits: true, ..Default::default() };
        let r = scan_exponent(127, &SourceSet::local(), &opts);
        assert!(r.is_feasible());
        assert!(r.terms.iter().all(|t| t.basis == Basis::Measured));
    }
}
