//! Build a certificate, verify it, then tamper with one field and verify
//! again to see which step catches it.

use wagstaff_bls::certificate;
use wagstaff_bls::{prove_wagstaff, verify_certificate, BudgetSpec, SourceSet};

fn main() {
    let p = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(61);
    let cert = prove_wagstaff(p, &SourceSet::local(), &BudgetSpec::default()).expect("W_p is prime");
    println!("{}", verify_certificate(&cert));

    let mut bad = cert.clone();
    bad.margin_bits += 1;
    bad.digest = certificate::digest(&bad);
    let report = verify_certificate(&bad);
    println!("\nafter bumping margin_bits:");
    for s in report.steps.iter().filter(|s| !s.passed) {
        println!("  step {} ({}) fails: {}", s.step, s.name, s.reason.as_deref().unwrap_or("-"));
    }
}
