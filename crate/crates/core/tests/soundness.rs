mod common;

use wagstaff_bls::bls::{self, BlsError};
use wagstaff_bls::certify::CompositeWitness;
use wagstaff_bls::{known, verify_certificate, BudgetSpec, SourceSet};

#[test]
fn prover_agrees_with_known_list_to_127() {
    for p in (5u64..=127).filter(|&p| common::is_prime_u64(p)) {
        match bls::prove_wagstaff(p, &SourceSet::local(), &BudgetSpec::default()) {
            Ok(cert) => {
                assert!(known::is_proved(p), "proved W_{p}, which is composite");
                assert!(verify_certificate(&cert).passed(), "W_{p}");
            }
            Err(BlsError::CompositeDetected { witness }) => {
                assert!(!known::is_proved(p), "W_{p} reported composite");
                assert!(matches!(witness, CompositeWitness::Fermat { .. }), "W_{p}: {witness}");
            }
            Err(e) => panic!("W_{p}: {e}"),
        }
    }
}

#[test]
fn stretch_exponents_prove_with_default_budget() {
    for p in [167u64, 191, 199] {
        let cert = bls::prove_wagstaff(p, &SourceSet::local(), &BudgetSpec::default()).unwrap_or_else(|e| panic!("W_{p}: {e}"));
        assert!(verify_certificate(&cert).passed());
    }
}

#[test]
fn non_prime_exponents_rejected() {
    for p in [0u64, 1, 2, 3, 9, 15, 21] {
        assert!(matches!(
            bls::prove_wagstaff(p, &SourceSet::local(), &BudgetSpec::default()),
            Err(BlsError::InvalidExponent(_))
        ));
    }
}
