//! BLS N − 1 primality certificates for Wagstaff numbers `W_p = (2^p + 1)/3`.
//!
//! The factored part of `W_p − 1 = 2·∏_{d | p−1, d ≥ 3} Φ_d(2)` is harvested
//! from the cyclotomic terms, every prime in it carries a replayable primality
//! proof, and the resulting certificate is checked by an independent
//! [`verifier`]. The Chua congruence in `Z[√2]/(W_p)` is recorded alongside as
//! a cross-check.
//!
//! ```
//! use wagstaff_bls::{bls, factor::{BudgetSpec, SourceSet}, verifier};
//!
//! let cert = bls::prove_wagstaff(13, &SourceSet::local(), &BudgetSpec::default()).unwrap();
//! assert_eq!(cert.n_digits, 4); // W_13 = 2731
//! assert!(verifier::verify_certificate(&cert).passed());
//! ```
//!
//! Runnable examples live in `examples/`, one per capability:
//! `prove_wagstaff`, `verify_certificate`, `certify_prime`, `factor_phi`,
//! `cyclotomic_terms`, `chua_congruence`, `pell_sequences`,
//! `feasibility_scan`, `digest`, `factor_tables`, `bls_small_sweep`.

pub mod bigmath;
pub mod bls;
pub mod certificate;
pub mod certify;
pub mod cli;
mod codec;
pub mod cyclotomic;
pub mod factor;
pub mod factordb;
pub mod known;
pub mod quad_ring;
pub mod scan;
pub mod verifier;

pub use bls::{prove_wagstaff, BlsError};
pub use certificate::BlsCertificate;
pub use factor::{BudgetSpec, SourceSet};
pub use verifier::verify_certificate;
