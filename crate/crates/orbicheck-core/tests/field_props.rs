//! Property tests for the exact field arithmetic and the enumeration.

use proptest::prelude::*;

use orbicheck_core::approx::{eval_certified, relative_deviation};
use orbicheck_core::catalog::{build_catalog, CatalogLimits};
use orbicheck_core::cyclotomic::{eq_as_field, euler_phi, CycloNum};
use orbicheck_core::enumerate::{enumerate_count, enumerate_stream};
use orbicheck_core::rational::Rat;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| Rat::frac(p, q))
}

fn conductor() -> impl Strategy<Value = u32> {
    prop_oneof![Just(1u32), Just(2), Just(3), Just(4), Just(5), Just(6), Just(8), Just(12), Just(15), Just(20), Just(24)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_is_a_left_and_right_inverse(n in conductor(), seed in prop::collection::vec((0u32..24u32, small_rat()), 1..4)) {
        let x = CycloNum::from_terms(n, seed.iter().map(|(e, c)| (e % n, c.clone())));
        prop_assume!(!x.is_zero());
        let inv = x.inverse().unwrap();
        prop_assert!(x.mul(&inv).sub(&CycloNum::one(n)).is_zero());
        prop_assert!(inv.mul(&x).sub(&CycloNum::one(n)).is_zero());
    }

    #[test]
    fn conjugation_is_an_involution_and_ring_map(n in conductor(), seed in prop::collection::vec((0u32..24, -9i64..=9), 0..4)) {
        let a = CycloNum::from_terms(n, seed.iter().map(|&(e, c)| (e % n, Rat::from_int(c))));
        prop_assert_eq!(a.conjugate().conjugate(), a.clone());
        let b = a.mul(&a).conjugate();
        let c = a.conjugate().mul(&a.conjugate());
        prop_assert_eq!(b, c);
    }

    #[test]
    fn embedding_round_trip_is_identity(n in conductor(), f in 2u32..=4, seed in prop::collection::vec((0u32..24, -9i64..=9), 0..4)) {
        let a = CycloNum::from_terms(n, seed.iter().map(|&(e, c)| (e % n, Rat::from_int(c))));
        let lifted = a.lift_to(n * f).unwrap();
        let back = lifted.try_descend(n).unwrap();
        prop_assert_eq!(back, a.clone());
        prop_assert!(eq_as_field(&a, &lifted));
    }

    #[test]
    fn canonical_coefficients_have_phi_length(n in conductor(), seed in prop::collection::vec((0u32..24, -9i64..=9), 0..5)) {
        let a = CycloNum::from_terms(n, seed.iter().map(|&(e, c)| (e % n, Rat::from_int(c))));
        prop_assert_eq!(a.canonical_coeffs().len(), euler_phi(n) as usize);
    }

    #[test]
    fn float_evaluation_encloses_rational_values(p in -40i64..=40, q in 1i64..=12, n in conductor()) {
        let r = Rat::frac(p, q);
        let x = CycloNum::from_rat(n, r.clone());
        let (re, im, err) = eval_certified(&x, 80);
        prop_assert!(im.abs() <= err.clone());
        prop_assert!((&re - &r).abs() <= err);
        if !r.is_zero() {
            prop_assert!(relative_deviation(&r, &re) < Rat::frac(1, 1_000_000_000));
        }
    }

    #[test]
    fn count_agrees_with_stream(b2 in 19i64..=23, h21 in 0i64..=2) {
        let catalog = build_catalog(&CatalogLimits {
            cyclic_max: 6,
            dihedral_max: 3,
            cyclic_index2_max: 0,
            dihedral_index2_max: 0,
            order_cap: 12,
            brute_force_threshold: 100,
            include_sporadic: false,
        }).unwrap();
        let b3 = 2 * h21;
        match enumerate_count(&catalog, b2, b3) {
            Err(orbicheck_core::Error::BudgetInfeasible { .. }) => {
                // the stream must agree that the budget is infeasible
                let stream_err = matches!(
                    enumerate_stream(&catalog, b2, b3, 10),
                    Err(orbicheck_core::Error::BudgetInfeasible { .. })
                );
                prop_assert!(stream_err);
            }
            Ok(count) => {
                let (stream, capped) = enumerate_stream(&catalog, b2, b3, 2_000_000).unwrap();
                prop_assert!(!capped);
                prop_assert_eq!(count, num_bigint::BigUint::from(stream.len() as u64));
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }
}

#[test]
fn serde_round_trip_preserves_field_elements() {
    for n in [1u32, 5, 8, 12, 20] {
        let x = CycloNum::from_terms(
            n,
            [(0u32, Rat::frac(1, 3)), (1 % n, Rat::from_int(-2)), ((n / 2).max(1) % n, Rat::frac(7, 2))],
        );
        let json = serde_json::to_string(&x).unwrap();
        let back: CycloNum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
