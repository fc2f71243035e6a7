//! Replay of a certificate as untrusted input.
//!
//! Nine steps, always all executed and reported in order:
//!
//! 1. recompute `N` from the exponent and check its digit count;
//! 2. replay every embedded primality proof;
//! 3. recompute `e = v_q(N − 1)` for every prime;
//! 4. rebuild `F` from the recomputed valuations, check `F·R = N − 1`,
//!    `gcd(F, R) = 1` and the recorded cyclotomic terms;
//! 5. threshold of the claimed form (exact comparison) and the margin `M`;
//! 6. both witness congruences per prime;
//! 7. the discriminant record (cube form);
//! 8. condition (II) in `Z[√2]/(N)`;
//! 9. the digest.
//!
//! Nothing is factored and no witness is searched for.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bigmath;
use crate::bls::Form;
use crate::certificate::{self, BlsCertificate, TermState};
use crate::certify;
use crate::cyclotomic;
use crate::quad_ring;

pub const STEP_NAMES: [&str; 9] = [
    "recompute N",
    "replay primality proofs",
    "recompute valuations",
    "rebuild F",
    "threshold and margin",
    "witness congruences",
    "discriminant",
    "condition (II)",
    "digest",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepResult {
    /// 1-based.
    pub step: usize,
    pub name: &'static str,
    pub passed: bool,
    pub reason: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub exponent: u64,
    pub steps: Vec<StepResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.passed)
    }

    pub fn failed_steps(&self) -> Vec<usize> {
        self.steps.iter().filter(|s| !s.passed).map(|s| s.step).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            write!(f, "[{}] step {} {}", if s.passed { "PASS" } else { "FAIL" }, s.step, s.name)?;
            write!(f, " ({:.3} s)", s.elapsed.as_secs_f64())?;
            if let Some(r) = &s.reason {
                write!(f, ": {r}")?;
            }
            writeln!(f)?;
        }
        write!(f, "W_{}: {}", self.exponent, if self.passed() { "VERIFIED" } else { "REJECTED" })
    }
}

type Step = Result<(), String>;

struct Context<'a> {
    cert: &'a BlsCertificate,
    n: Option<BigUint>,
    /// Recomputed valuations, one per entry.
    valuations: Vec<u32>,
    f: Option<BigUint>,
}

pub fn verify_certificate(cert: &BlsCertificate) -> VerificationReport {
    let mut ctx = Context { cert, n: None, valuations: Vec::new(), f: None };
    let mut steps = Vec::with_capacity(9);
    let mut run = |i: usize, ctx: &mut Context, body: fn(&mut Context) -> Step| {
        let t = Instant::now();
        let res = body(ctx);
        steps.push(StepResult {
            step: i + 1,
            name: STEP_NAMES[i],
            passed: res.is_ok(),
            reason: res.err(),
            elapsed: t.elapsed(),
        });
    };
    run(0, &mut ctx, step_n);
    run(1, &mut ctx, step_proofs);
    run(2, &mut ctx, step_valuations);
    run(3, &mut ctx, step_factored_part);
    run(4, &mut ctx, step_threshold);
    run(5, &mut ctx, step_witnesses);
    run(6, &mut ctx, step_discriminant);
    run(7, &mut ctx, step_condition_two);
    run(8, &mut ctx, step_digest);
    VerificationReport { exponent: cert.exponent, steps }
}

fn need_n<'a>(ctx: &'a Context) -> Result<&'a BigUint, String> {
    ctx.n.as_ref().ok_or_else(|| "N unavailable (step 1 failed)".to_string())
}

fn need_f<'a>(ctx: &'a Context) -> Result<&'a BigUint, String> {
    ctx.f.as_ref().ok_or_else(|| "F unavailable (step 3 failed)".to_string())
}

fn step_n(ctx: &mut Context) -> Step {
    let p = ctx.cert.exponent;
    if p < 5 || !bigmath::is_prime_u64(p) {
        return Err(format!("exponent {p} is not a prime >= 5"));
    }
    let two_p_plus_one = (BigUint::one() << p as usize) + 1u32;
    let (n, rem) = two_p_plus_one.div_rem(&BigUint::from(3u32));
    if !rem.is_zero() {
        return Err("3 does not divide 2^p + 1".into());
    }
    let digits = n.to_string().len() as u64;
    ctx.n = Some(n);
    if digits != ctx.cert.n_digits {
        return Err(format!("N has {digits} digits, certificate says {}", ctx.cert.n_digits));
    }
    Ok(())
}

fn step_proofs(ctx: &mut Context) -> Step {
    let cert = ctx.cert;
    let failures: Vec<String> = (0..cert.entries.len())
        .into_par_iter()
        .filter_map(|i| {
            let q = &cert.entries[i].q;
            let proof = match cert.entry_proof(i) {
                Ok(p) => p,
                Err(e) => return Some(format!("q = {q}: {e}")),
            };
            certify::check_proof(q, &proof).err().map(|e| format!("q = {q}: {e}"))
        })
        .collect();
    match failures.first() {
        None => Ok(()),
        Some(first) => Err(format!("{} proof(s) rejected; first: {first}", failures.len())),
    }
}

fn step_valuations(ctx: &mut Context) -> Step {
    let n = need_n(ctx)?.clone();
    let nm1 = &n - 1u32;
    let mut vals = Vec::with_capacity(ctx.cert.entries.len());
    let mut bad = None;
    for (i, e) in ctx.cert.entries.iter().enumerate() {
        if i > 0 && e.q <= ctx.cert.entries[i - 1].q {
            return Err("entries not strictly ascending in q".into());
        }
        if e.q < BigUint::from(2u32) {
            return Err(format!("q = {} below 2", e.q));
        }
        let mut v = 0u32;
        let mut rest = nm1.clone();
        loop {
            let (quo, rem) = rest.div_rem(&e.q);
            if !rem.is_zero() {
                break;
            }
            rest = quo;
            v += 1;
        }
        if v == 0 {
            return Err(format!("q = {} does not divide N − 1", e.q));
        }
        if v != e.e && bad.is_none() {
            bad = Some(format!("v_{}(N − 1) = {v}, certificate says {}", e.q, e.e));
        }
        vals.push(v);
    }
    ctx.valuations = vals;
    ctx.f = Some(ctx.cert.entries.iter().zip(&ctx.valuations).map(|(e, &v)| e.q.pow(v)).product());
    bad.map_or(Ok(()), Err)
}

fn step_factored_part(ctx: &mut Context) -> Step {
    let n = need_n(ctx)?;
    let f = need_f(ctx)?;
    let cert = ctx.cert;
    if cert.entries.is_empty() {
        return Err("no primes in F".into());
    }
    let nm1 = n - 1u32;
    if f * &cert.cofactor != nm1 {
        return Err("F·R != N − 1".into());
    }
    if !f.gcd(&cert.cofactor).is_one() {
        return Err("gcd(F, R) != 1".into());
    }

    // recorded terms: exactly the d | p − 1 with d >= 3, each consistent
    let p = cert.exponent;
    let expected: Vec<u64> = cyclotomic::divisors(p - 1).into_iter().filter(|&d| d >= 3).collect();
    let got: Vec<u64> = cert.cyclotomic_terms.iter().map(|t| t.d).collect();
    if got != expected {
        return Err(format!("cyclotomic terms cover d = {got:?}, expected {expected:?}"));
    }
    for t in &cert.cyclotomic_terms {
        let value = cyclotomic::phi_at_2(t.d).map_err(|e| e.to_string())?;
        if value != t.value {
            return Err(format!("recorded Φ_{}(2) is wrong", t.d));
        }
        let prod: BigUint = t.factors.iter().map(|q| q.q.pow(q.e)).product();
        if prod * &t.residual != value {
            return Err(format!("Φ_{}(2) != ∏ q^e · residual", t.d));
        }
        let consistent = match t.status {
            TermState::Complete => t.residual.is_one(),
            TermState::Partial => !t.residual.is_one(),
            TermState::Skipped => t.factors.is_empty() && t.residual == value,
        };
        if !consistent {
            return Err(format!("Φ_{}(2): status {:?} contradicts the residual", t.d, t.status));
        }
    }
    for e in &cert.entries {
        let listed = e.q == BigUint::from(2u32)
            || cert.cyclotomic_terms.iter().any(|t| t.factors.iter().any(|tf| tf.q == e.q));
        if !listed {
            return Err(format!("q = {} appears in no recorded term", e.q));
        }
    }
    Ok(())
}

fn step_threshold(ctx: &mut Context) -> Step {
    let n = need_n(ctx)?;
    let f = need_f(ctx)?;
    let f3 = f.pow(3);
    match ctx.cert.form {
        Form::Sqrt => {
            if f * f <= *n {
                return Err("sqrt form claimed but F^2 <= N".into());
            }
        }
        Form::Cube => {
            if f3 <= *n {
                return Err("cube form claimed but F^3 <= N".into());
            }
            if f.is_odd() {
                return Err("cube form needs an even F".into());
            }
        }
    }
    let m = bigmath::floor_log2(&f3) as i64 - bigmath::floor_log2(n) as i64;
    if m != ctx.cert.margin_bits {
        return Err(format!("M = {m}, certificate says {}", ctx.cert.margin_bits));
    }
    if m >= 1 && f3 <= *n {
        return Err("M >= 1 but F^3 <= N".into());
    }
    Ok(())
}

fn step_witnesses(ctx: &mut Context) -> Step {
    let n = need_n(ctx)?;
    let nm1 = n - 1u32;
    let failures: Vec<String> = ctx
        .cert
        .entries
        .par_iter()
        .filter_map(|e| {
            let a = &e.witness;
            if a < &BigUint::from(2u32) || a >= n {
                return Some(format!("q = {}: witness {a} out of range", e.q));
            }
            if !a.modpow(&nm1, n).is_one() {
                return Some(format!("q = {}: {a}^(N−1) != 1 (mod N)", e.q));
            }
            let t = a.modpow(&(&nm1 / &e.q), n);
            let t_minus_one = (t + &nm1) % n;
            if !t_minus_one.gcd(n).is_one() {
                return Some(format!("q = {}: gcd({a}^((N−1)/q) − 1, N) != 1", e.q));
            }
            None
        })
        .collect();
    match failures.first() {
        None => Ok(()),
        Some(first) => Err(format!("{} witness(es) invalid; first: {first}", failures.len())),
    }
}

fn step_discriminant(ctx: &mut Context) -> Step {
    let cert = ctx.cert;
    match (cert.form, &cert.discriminant) {
        (Form::Sqrt, None) => Ok(()),
        (Form::Sqrt, Some(_)) => Err("discriminant recorded on sqrt form".into()),
        (Form::Cube, None) => Err("discriminant missing on cube form".into()),
        (Form::Cube, Some(rec)) => {
            let n = need_n(ctx)?;
            let f = need_f(ctx)?;
            let r_cof = (n - 1u32) / f;
            let (s, r) = r_cof.div_rem(&(f << 1usize));
            let delta = BigInt::from(&r * &r) - BigInt::from(&s * 8u32);
            let is_square = match delta.to_biguint() {
                Some(d) => {
                    let root = d.sqrt();
                    &root * &root == d
                }
                None => false,
            };
            if s != rec.s || r != rec.r || delta != rec.delta || is_square != rec.is_square {
                return Err(format!("recomputed (s, r, Δ, square) = ({s}, {r}, {delta}, {is_square}) differs"));
            }
            if !s.is_zero() && is_square {
                return Err(format!("Δ = {delta} is a perfect square with s != 0"));
            }
            Ok(())
        }
    }
}

fn step_condition_two(ctx: &mut Context) -> Step {
    need_n(ctx)?;
    let holds = quad_ring::condition_two(ctx.cert.exponent).map_err(|e| e.to_string())?;
    let c = &ctx.cert.chua;
    if (c.epsilon, c.delta) != (-1, -1) {
        return Err(format!("recorded (ε, δ) = ({}, {}), expected (−1, −1)", c.epsilon, c.delta));
    }
    if holds != c.holds {
        return Err(format!("condition (II) evaluates to {holds}, certificate says {}", c.holds));
    }
    if !holds {
        return Err("condition (II) fails for a certified prime".into());
    }
    Ok(())
}

fn step_digest(ctx: &mut Context) -> Step {
    let fresh = certificate::digest(ctx.cert);
    if fresh != ctx.cert.digest {
        return Err(format!("digest {fresh} != recorded {}", ctx.cert.digest));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bls::prove_wagstaff;
    use crate::factor::{BudgetSpec, SourceSet};

    fn redigest(mut c: BlsCertificate) -> BlsCertificate {
        c.digest = certificate::digest(&c);
        c
    }

    #[test]
    fn fresh_w7_passes() {
        let cert = prove_wagstaff(7, &SourceSet::local(), &BudgetSpec::default()).unwrap();
        let report = verify_certificate(&cert);
        assert!(report.passed(), "{report}");
        assert_eq!(report.steps.len(), 9);
    }

    #[test]
    fn bad_witness_fails_step_6() {
        let cert = prove_wagstaff(7, &SourceSet::local(), &BudgetSpec::default()).unwrap();
        assert_eq!(cert.entries[0].q, BigUint::from(2u32));
        // 4 is a square, so 4^{21} ≡ 1 (mod 43) and the gcd condition fails
        let mut bad = cert.clone();
        bad.entries[0].witness = BigUint::from(4u32);
        let report = verify_certificate(&redigest(bad));
        assert_eq!(report.failed_steps(), vec![6], "{report}");
        // a multiple of N fails the Fermat congruence outright
        let mut bad = cert.clone();
        bad.entries[0].witness = BigUint::from(86u32);
        assert_eq!(verify_certificate(&redigest(bad)).failed_steps(), vec![6]);
    }

    #[test]
    fn altered_digest_fails_step_9() {
        let mut cert = prove_wagstaff(7, &SourceSet::local(), &BudgetSpec::default()).unwrap();
        let c = if cert.digest.starts_with('0') { '1' } else { '0' };
        cert.digest.replace_range(0..1, &c.to_string());
        assert_eq!(verify_certificate(&cert).failed_steps(), vec![9]);
    }
}
