mod common;

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use wagstaff_bls::quad_ring::{self, QuadResidue};

proptest! {
    #[test]
    fn pow_matches_schoolbook(x in -50i64..50, y in -50i64..50, d in 2i64..40, h in 1u64..2500, k in 0u64..300) {
        let n = 2 * h + 1;
        let u = QuadResidue::new(BigInt::from(x), BigInt::from(y), BigInt::from(d), BigUint::from(n)).unwrap();
        let (ex, ey) = common::schoolbook_quad_pow(x, y, d, n, k);
        let got = quad_ring::quad_pow(&u, &BigUint::from(k)).pair();
        prop_assert_eq!(got, (BigUint::from(ex), BigUint::from(ey)));
    }

    #[test]
    fn norm_is_multiplicative(x1 in 0i64..1000, y1 in 0i64..1000, x2 in 0i64..1000, y2 in 0i64..1000, h in 1u64..50_000) {
        let n = 2 * h + 1;
        let mk = |x: i64, y: i64| QuadResidue::new(BigInt::from(x), BigInt::from(y), BigInt::from(2), BigUint::from(n)).unwrap();
        let (a, b) = (mk(x1, y1), mk(x2, y2));
        let prod = quad_ring::quad_mul(&a, &b).unwrap();
        prop_assert_eq!(prod.norm(), (a.norm() * b.norm()) % n);
    }

    #[test]
    fn pell_identity(n in 0u64..400) {
        prop_assert!(quad_ring::pell(n).satisfies_identity());
    }

    #[test]
    fn chua_symbols_are_legendre(qi in 1usize..1200, a in 2i64..200) {
        let q = common::sieve_primes(10_000)[qi];
        let d = a * a - 1;
        prop_assume!(d % q as i64 != 0 && (a + 1) % q as i64 != 0);
        let (eps, delta) = quad_ring::chua_symbols(&BigInt::from(a), &BigUint::from(q)).unwrap();
        prop_assert_eq!(eps, common::legendre(d, q));
        prop_assert_eq!(delta, common::legendre(2 * (a + 1), q));
    }
}

#[test]
fn pell_matches_powers_of_one_plus_sqrt2() {
    // (1 + √2)^n = V_n/2 + U_n√2
    let (mut x, mut y) = (BigInt::from(1), BigInt::from(0));
    for n in 0..60u64 {
        let pp = quad_ring::pell(n);
        assert_eq!(BigInt::from(pp.v.clone()), &x * 2);
        assert_eq!(BigInt::from(pp.u.clone()), y);
        let nx = &x + &y * 2;
        let ny = &x + &y;
        x = nx;
        y = ny;
    }
}

#[test]
fn condition_two_agrees_with_schoolbook_for_small_p() {
    // the oracle multiplies (N + 1)/2 times, so keep W_p small
    for p in [5u64, 7, 11, 13, 17, 19, 23] {
        let n = ((1u64 << p) + 1) / 3;
        let (x, y) = common::schoolbook_quad_pow(3, 1, 8, n, n.div_ceil(2));
        let expect = x == n - 1 && y == 0;
        assert_eq!(quad_ring::condition_two(p).unwrap(), expect, "p = {p}");
    }
}

#[test]
fn condition_two_holds_for_proved_exponents_to_400() {
    for &p in wagstaff_bls::known::PROVED.iter().filter(|&&p| p <= 400) {
        assert!(quad_ring::condition_two(p).unwrap(), "p = {p}");
    }
}
