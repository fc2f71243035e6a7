//! Canonical JSON and its SHA-256 digest. Two independent runs give
//! byte-identical certificates.

use wagstaff_bls::certificate;
use wagstaff_bls::{prove_wagstaff, BudgetSpec, SourceSet};

fn main() {
    let run = || prove_wagstaff(31, &SourceSet::local(), &BudgetSpec::default()).unwrap();
    let (a, b) = (run(), run());
    let bytes = certificate::canonical_bytes(&a).unwrap();
    println!("{} canonical bytes", bytes.len());
    println!("{}", String::from_utf8_lossy(&bytes[..bytes.len().min(160)]));
    println!("digest  {}", a.digest);
    println!("recomputed matches: {}", certificate::digest(&a) == a.digest);
    println!("deterministic: {}", certificate::canonical_bytes(&b).unwrap() == bytes);
}
