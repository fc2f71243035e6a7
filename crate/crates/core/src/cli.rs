//! Command-line front end: `prove`, `verify`, `scan`, `chua`, `factor-phi`,
//! `digest`.
//!
//! Exit codes for `prove`: 0 proved, 1 composite, 2 insufficient factored
//! part, 3 usage or I/O error. `verify`: 0 pass, 1 rejected, 2 schema or I/O
//! error. Usage errors exit 3 for every command.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};

use crate::bigmath;
use crate::bls::{self, BlsError};
use crate::certificate::{self, BlsCertificate};
use crate::cyclotomic;
use crate::factor::{self, BudgetSpec, FactorTable, SourceSet};
use crate::factordb::{self, FactorDbClient};
use crate::known;
use crate::quad_ring::{self, QuadError};
use crate::scan::{self, ScanOptions};
use crate::verifier;

#[derive(Debug, Parser)]
#[command(name = "wagstaff-bls", version, about = "BLS N-1 primality certificates for Wagstaff numbers")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prove W_p prime and write a certificate plus a run log.
    Prove(ProveArgs),
    /// Replay a certificate.
    Verify {
        cert: PathBuf,
    },
    /// Report which terms Φ_d(2) can supply the factored part.
    Scan(ScanArgs),
    /// Evaluate the Chua congruence.
    Chua(ChuaArgs),
    /// Factor Φ_d(2) and print each prime with its provenance.
    FactorPhi(FactorPhiArgs),
    /// Recompute a certificate's digest.
    Digest {
        cert: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Trial-division candidates q ≡ 1 (mod d) per term.
    #[arg(long, default_value_t = BudgetSpec::default().trial_candidates)]
    pub trial_candidates: u64,
    /// Pollard ρ iterations per composite.
    #[arg(long, default_value_t = BudgetSpec::default().rho_iterations)]
    pub rho_iterations: u64,
    /// Stage-1 bound for Pollard p − 1.
    #[arg(long, default_value_t = BudgetSpec::default().pm1_b1)]
    pub pm1_b1: u64,
    /// Elliptic curves per composite after ρ (0 disables ECM).
    #[arg(long, default_value_t = BudgetSpec::default().ecm_curves)]
    pub ecm_curves: u32,
    /// ECM stage-1 bound.
    #[arg(long, default_value_t = BudgetSpec::default().ecm_b1)]
    pub ecm_b1: u64,
    /// Leave terms Φ_d(2) above this many bits unfactored.
    #[arg(long)]
    pub max_term_bits: Option<u64>,
}

impl BudgetArgs {
    pub fn spec(&self) -> BudgetSpec {
        BudgetSpec {
            trial_candidates: self.trial_candidates,
            rho_iterations: self.rho_iterations,
            pm1_b1: self.pm1_b1,
            ecm_curves: self.ecm_curves,
            ecm_b1: self.ecm_b1,
            max_term_bits: self.max_term_bits,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Factor table file or directory of *.txt tables (repeatable).
    #[arg(long)]
    pub tables: Vec<PathBuf>,
    /// Consult the external factor database (claims are re-certified).
    #[arg(long)]
    pub factordb: bool,
    /// Database endpoint (overrides WAGSTAFF_FACTORDB_URL).
    #[arg(long)]
    pub factordb_url: Option<String>,
    /// Response cache directory (overrides WAGSTAFF_FACTORDB_CACHE).
    #[arg(long)]
    pub factordb_cache: Option<PathBuf>,
}

impl SourceArgs {
    pub fn sources(&self) -> Result<SourceSet, String> {
        let mut tables = FactorTable::new();
        for path in &self.tables {
            let t = factor::load_factor_tables(path).map_err(|e| e.to_string())?;
            tables.merge(t, &path.display().to_string()).map_err(|e| e.to_string())?;
        }
        let factordb = self.factordb.then(|| {
            let url = self
                .factordb_url
                .clone()
                .or_else(|| std::env::var(factordb::ENV_BASE_URL).ok())
                .unwrap_or_else(|| factordb::DEFAULT_BASE_URL.to_string());
            let cache = self.factordb_cache.clone().or_else(|| std::env::var_os(factordb::ENV_CACHE_DIR).map(PathBuf::from));
            Arc::new(FactorDbClient::new(url, cache, true))
        });
        Ok(SourceSet { tables, factordb, hook: None })
    }
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    /// Exponent p (a prime >= 5).
    #[arg(long = "p")]
    pub p: u64,
    #[command(flatten)]
    pub sources: SourceArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Certificate path (default W<p>.json); the run log goes next to it as .log.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Scan the 36 known exponents.
    #[arg(long, conflicts_with = "p_list", required_unless_present = "p_list")]
    pub known: bool,
    /// Comma-separated exponents.
    #[arg(long, value_delimiter = ',')]
    pub p_list: Option<Vec<u64>>,
    /// Terms up to this many bits count as factorable.
    #[arg(long, default_value_t = scan::DEFAULT_HORIZON_BITS)]
    pub horizon_bits: u64,
    /// Factor the terms for real under the budget instead of using the horizon.
    #[arg(long)]
    pub measure: bool,
    #[command(flatten)]
    pub sources: SourceArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["p", "q"]))]
pub struct ChuaArgs {
    /// Condition (II) for W_p.
    #[arg(long = "p", conflicts_with_all = ["q", "a"])]
    pub p: Option<u64>,
    /// Odd modulus Q.
    #[arg(long = "Q", requires = "a")]
    pub q: Option<String>,
    /// Chebyshev parameter a.
    #[arg(long = "a", requires = "q", allow_hyphen_values = true)]
    pub a: Option<String>,
}

#[derive(Debug, Args)]
pub struct FactorPhiArgs {
    #[arg(long = "d")]
    pub d: u64,
    #[command(flatten)]
    pub sources: SourceArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const COMPOSITE: i32 = 1;
    pub const INSUFFICIENT: i32 = 2;
    pub const USAGE: i32 = 3;
    pub const REJECTED: i32 = 1;
    pub const SCHEMA: i32 = 2;
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // already initialised when running in-process more than once; harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    run(cli.command, out, err)
}

pub fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = match command {
        Command::Prove(a) => cmd_prove(&a, out, err),
        Command::Verify { cert } => cmd_verify(&cert, out, err),
        Command::Scan(a) => cmd_scan(&a, out, err),
        Command::Chua(a) => cmd_chua(&a, out, err),
        Command::FactorPhi(a) => cmd_factor_phi(&a, out, err),
        Command::Digest { cert } => cmd_digest(&cert, out, err),
    };
    res.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: writing output: {e}");
        exit::USAGE
    })
}

type CmdResult = std::io::Result<i32>;

pub const TABLE1_HEADER: &str = "      p  digits  tau(p-1)  primes in F      M      time";

pub fn cmd_prove(a: &ProveArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let sources = match a.sources.sources() {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(exit::USAGE);
        }
    };
    let budget = a.budget.spec();
    let path = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("W{}.json", a.p)));
    let log_path = path.with_extension("log");

    let start = Instant::now();
    let result = bls::prove_wagstaff_detailed(a.p, &sources, &budget);
    let elapsed = start.elapsed();

    let mut log = String::new();
    let _ = writeln!(log, "wagstaff-bls {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(log, "command: prove --p {}", a.p);
    let _ = writeln!(
        log,
        "budget: trial_candidates={} rho_iterations={} pm1_b1={} ecm_curves={} ecm_b1={} max_term_bits={}",
        budget.trial_candidates,
        budget.rho_iterations,
        budget.pm1_b1,
        budget.ecm_curves,
        budget.ecm_b1,
        budget.max_term_bits.map_or("none".to_string(), |m| m.to_string())
    );
    let _ = writeln!(log, "sources: {} table entries, factordb={}", sources.tables.len(), sources.factordb.is_some());
    let _ = writeln!(log, "threads: {}", rayon::current_num_threads());

    let code = match result {
        Ok(proof) => {
            let cert = BlsCertificate::from_proof(&proof);
            for r in proof.reports() {
                let _ = writeln!(log, "{r}");
            }
            for t in &proof.terms {
                if let Some(fz) = &t.factorization {
                    let _ = writeln!(log, "  d = {}: {}", t.term.d, fz);
                }
            }
            let dec = &proof.decomposition;
            let _ = writeln!(
                log,
                "F: {} primes, {} bits; form {}; M = {}; condition (II) holds = {}",
                dec.entries.len(),
                dec.f.bits(),
                dec.form,
                dec.margin_bits,
                proof.chua.holds
            );
            if let Err(e) = certificate::write_certificate(&cert, &path) {
                writeln!(err, "error: {e}")?;
                return Ok(exit::USAGE);
            }
            let (p, digits, tau, primes, m) = bls::summary_row(&proof);
            writeln!(out, "{TABLE1_HEADER}")?;
            writeln!(out, "{p:>7}  {digits:>6}  {tau:>8}  {primes:>11}  {m:>5}  {:>7.2}s", elapsed.as_secs_f64())?;
            writeln!(out, "certificate: {}", path.display())?;
            writeln!(out, "digest: {}", cert.digest)?;
            let _ = writeln!(log, "digest: {}", cert.digest);
            let _ = writeln!(log, "result: proved");
            exit::OK
        }
        Err(BlsError::CompositeDetected { witness }) => {
            writeln!(out, "W_{} is composite: {witness}", a.p)?;
            let _ = writeln!(log, "result: composite ({witness})");
            exit::COMPOSITE
        }
        Err(BlsError::InsufficientFactoredPart(s)) => {
            writeln!(out, "W_{}: {s}", a.p)?;
            for t in s.blocking() {
                writeln!(out, "  {t}")?;
            }
            for t in &s.terms {
                let _ = writeln!(log, "{t}");
            }
            let _ = writeln!(log, "result: insufficient factored part ({s})");
            exit::INSUFFICIENT
        }
        Err(e @ BlsError::InvalidExponent(_)) => {
            writeln!(err, "error: {e}")?;
            return Ok(exit::USAGE);
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            let _ = writeln!(log, "result: error ({e})");
            exit::USAGE
        }
    };
    let _ = writeln!(log, "wall time: {:.3} s", elapsed.as_secs_f64());
    if let Err(e) = std::fs::write(&log_path, log) {
        writeln!(err, "warning: could not write {}: {e}", log_path.display())?;
    }
    Ok(code)
}

pub fn cmd_verify(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let cert = match certificate::read_certificate(path) {
        Ok(c) => c,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(exit::SCHEMA);
        }
    };
    let report = verifier::verify_certificate(&cert);
    writeln!(out, "{report}")?;
    Ok(if report.passed() { exit::OK } else { exit::REJECTED })
}

pub fn cmd_scan(a: &ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let list = if a.known { known::all() } else { a.p_list.clone().unwrap_or_default() };
    if let Some(&bad) = list.iter().find(|&&p| p < 5 || !bigmath::is_prime_u64(p)) {
        writeln!(err, "error: {bad} is not a prime >= 5")?;
        return Ok(exit::USAGE);
    }
    let sources = match a.sources.sources() {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(exit::USAGE);
        }
    };
    let options = ScanOptions {
        horizon_bits: a.horizon_bits,
        measure: a.measure.then(|| a.budget.spec()),
        skip_digits: false,
    };
    let rows = scan::feasibility_scan(&list, &sources, &options);
    writeln!(out, "{}", scan::HEADER)?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    Ok(exit::OK)
}

fn parse_int(s: &str) -> Option<BigInt> {
    s.trim().parse::<BigInt>().ok()
}

pub fn cmd_chua(a: &ChuaArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let outcome = if let Some(p) = a.p {
        quad_ring::condition_two_outcome(p)
    } else {
        let (Some(q), Some(av)) = (a.q.as_deref().and_then(parse_int), a.a.as_deref().and_then(parse_int)) else {
            writeln!(err, "error: --Q and --a must be integers")?;
            return Ok(exit::USAGE);
        };
        match q.to_biguint().filter(|q| q >= &BigUint::from(3u32)) {
            Some(q) => quad_ring::chua_outcome(&av, &q),
            None => {
                writeln!(err, "error: Q must be an odd integer >= 3")?;
                return Ok(exit::USAGE);
            }
        }
    };
    match outcome {
        Ok(o) => {
            writeln!(out, "epsilon={} delta={} holds={}", o.epsilon, o.delta, o.holds)?;
            Ok(if o.holds { exit::OK } else { 1 })
        }
        Err(e @ QuadError::NotCoprime { .. }) => {
            writeln!(out, "{e}")?;
            Ok(2)
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(exit::USAGE)
        }
    }
}

pub fn cmd_factor_phi(a: &FactorPhiArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.d == 0 {
        writeln!(err, "error: d must be positive")?;
        return Ok(exit::USAGE);
    }
    let sources = match a.sources.sources() {
        Ok(s) => s,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(exit::USAGE);
        }
    };
    let value = match cyclotomic::phi_at_2(a.d) {
        Ok(v) => v,
        Err(e) => {
            writeln!(err, "error: {e}")?;
            return Ok(exit::USAGE);
        }
    };
    let fz = factor::factor_fully(&value, a.d, &a.budget.spec(), &sources);
    writeln!(out, "{fz}")?;
    Ok(exit::OK)
}

pub fn cmd_digest(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match certificate::read_certificate(path) {
        Ok(cert) => {
            writeln!(out, "{}", certificate::digest(&cert))?;
            Ok(exit::OK)
        }
        Err(e) => {
            writeln!(err, "error: {e}")?;
            Ok(exit::SCHEMA)
        }
    }
}
