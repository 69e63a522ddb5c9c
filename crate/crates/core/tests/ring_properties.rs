//! Property-based tests for the cyclotomic ring arithmetic.

use num_bigint::BigInt;
use proptest::prelude::*;

use jsum_core::arith::gcd;
use jsum_core::cycring::{CycInt, Valuation};

fn element(e: u64) -> impl Strategy<Value = CycInt> {
    let phi = jsum_core::arith::euler_phi(e) as usize;
    proptest::collection::vec(-1_000_000i64..1_000_000, phi)
        .prop_map(move |coeffs| CycInt::from_i64_coeffs(e, &coeffs))
}

proptest! {
    #[test]
    fn mul_commutes(a in element(18), b in element(18)) {
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn mul_associates(a in element(9), b in element(9), c in element(9)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn mul_distributes(a in element(25), b in element(25), c in element(25)) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn shift_basis_round_trips(a in element(25)) {
        let shifted = a.shift_basis();
        prop_assert_eq!(CycInt::from_shift_basis(25, &shifted), a);
    }

    #[test]
    fn canonical_form_is_stable(a in element(18)) {
        // re-reducing the canonical coefficients is the identity
        let again = CycInt::reduce_poly(18, a.coeffs().to_vec());
        prop_assert_eq!(again, a);
    }

    #[test]
    fn galois_composes(a in element(18), k in 0u64..6, m in 0u64..6) {
        let units = [1u64, 5, 7, 11, 13, 17];
        let (k, m) = (units[k as usize], units[m as usize]);
        prop_assert_eq!(
            a.galois(k).unwrap().galois(m).unwrap(),
            a.galois(k * m % 18).unwrap()
        );
    }

    #[test]
    fn galois_respects_products(a in element(9), b in element(9), k in 0u64..5) {
        let units = [2u64, 4, 5, 7, 8];
        let k = units[k as usize];
        prop_assert_eq!(
            (&a * &b).galois(k).unwrap(),
            &a.galois(k).unwrap() * &b.galois(k).unwrap()
        );
    }

    #[test]
    fn embed_project_round_trips(a in element(25)) {
        prop_assert_eq!(a.embed_halforder().unwrap().project_halforder().unwrap(), a);
    }

    #[test]
    fn valuation_is_additive(a in element(9), b in element(9)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let va = a.lambda_valuation(3).unwrap();
        let vb = b.lambda_valuation(3).unwrap();
        let vab = (&a * &b).lambda_valuation(3).unwrap();
        match (va, vb, vab) {
            (Valuation::Finite(x), Valuation::Finite(y), Valuation::Finite(z)) => {
                prop_assert_eq!(x + y, z)
            }
            _ => prop_assert!(false, "nonzero elements have finite valuation"),
        }
    }

    #[test]
    fn valuation_shifts_by_phi_under_l(a in element(9)) {
        prop_assume!(!a.is_zero());
        let v = a.lambda_valuation(3).unwrap();
        let vl = a.scale(&BigInt::from(3)).lambda_valuation(3).unwrap();
        match (v, vl) {
            (Valuation::Finite(x), Valuation::Finite(y)) => prop_assert_eq!(y, x + 6),
            _ => prop_assert!(false),
        }
    }

    #[test]
    fn congruence_is_reflexive_and_symmetric(a in element(9), b in element(9), m in 1u64..8) {
        prop_assert!(CycInt::congruent(&a, &a, m, 3).unwrap());
        prop_assert_eq!(
            CycInt::congruent(&a, &b, m, 3).unwrap(),
            CycInt::congruent(&b, &a, m, 3).unwrap()
        );
    }

    #[test]
    fn serde_round_trips(a in element(50)) {
        let s = serde_json::to_string(&a).unwrap();
        let back: CycInt = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn conjugation_fixes_the_norm_style_product(a in element(9)) {
        // a * conj(a) is fixed by conjugation
        let n = &a * &a.conj();
        prop_assert_eq!(n.conj(), n);
    }
}

#[test]
fn galois_units_used_above_are_complete() {
    let units18: Vec<u64> = (1..18).filter(|&k| gcd(k, 18) == 1).collect();
    assert_eq!(units18, vec![1, 5, 7, 11, 13, 17]);
    let units9: Vec<u64> = (1..9).filter(|&k| gcd(k, 9) == 1).collect();
    assert_eq!(units9, vec![1, 2, 4, 5, 7, 8]);
}
