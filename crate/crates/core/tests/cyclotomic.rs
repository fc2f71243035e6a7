mod common;

use num_bigint::BigUint;
use proptest::prelude::*;
use wagstaff_bls::cyclotomic;

#[test]
fn values_match_polynomial_division() {
    for n in 1..=90usize {
        let oracle = common::eval_at_2(&common::cyclotomic_poly(n));
        assert_eq!(cyclotomic::phi_at_2(n as u64).unwrap(), oracle, "n = {n}");
    }
}

#[test]
fn divisor_helpers_match_brute_force() {
    for n in 1..=2000u64 {
        let divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
        assert_eq!(cyclotomic::divisors(n), divs);
        assert_eq!(cyclotomic::tau(n), divs.len());
        let phi = (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u64;
        assert_eq!(cyclotomic::euler_phi(n), phi);
    }
}

proptest! {
    #[test]
    fn product_over_divisors(n in 1u64..600) {
        let prod: BigUint = cyclotomic::divisors(n).into_iter().map(|d| cyclotomic::phi_at_2(d).unwrap()).product();
        prop_assert_eq!(prod, (BigUint::from(1u32) << n as usize) - 1u32);
    }

    #[test]
    fn primitive_divisors_are_one_mod_d(d in 3u64..200) {
        // every prime factor q of Φ_d(2) is q ≡ 1 (mod d), or divides d
        let v = cyclotomic::phi_at_2(d).unwrap();
        if v.bits() <= 40 {
            let v: u64 = v.try_into().unwrap();
            for (q, _) in common::brute_factor(v) {
                prop_assert!(q % d == 1 || d % q == 0, "q = {} d = {}", q, d);
            }
        }
    }

    #[test]
    fn wagstaff_decomposition(pi in 2usize..60) {
        let p = common::sieve_primes(400)[pi];
        let (nm1, terms) = cyclotomic::wagstaff_n_minus_one(p).unwrap();
        let prod: BigUint = terms.iter().filter(|t| t.d >= 3).map(|t| t.value.clone()).product();
        prop_assert_eq!(nm1, prod * 2u32);
    }
}
