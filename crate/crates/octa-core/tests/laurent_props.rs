//! Property tests for the polynomial core: ring axioms, exact division
//! round trips, substitution homomorphism, and canonical-form uniqueness.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use octa_core::lattice::EdgeKind;
use octa_core::laurent::{poly_from_json, poly_from_text, poly_to_json, LaurentPoly, Monomial, VarId};

fn var_strategy() -> impl Strategy<Value = VarId> {
    prop_oneof![
        (-2i64..=2, -2i64..=2).prop_map(|(i, j)| VarId::face(i, j)),
        (-2i64..=2, -2i64..=2, 0usize..4).prop_map(|(i, j, k)| {
            let kind = [EdgeKind::A, EdgeKind::B, EdgeKind::C, EdgeKind::D][k];
            // Force odd parity by nudging j.
            let j = if (i + j).rem_euclid(2) == 1 { j } else { j + 1 };
            VarId::edge(i, j, kind).unwrap()
        }),
    ]
}

fn monomial_strategy() -> impl Strategy<Value = Monomial> {
    prop::collection::vec((var_strategy(), -3i64..=3), 0..4)
        .prop_map(Monomial::from_pairs)
}

fn poly_strategy() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((monomial_strategy(), -5i64..=5), 0..5).prop_map(|terms| {
        terms
            .into_iter()
            .fold(LaurentPoly::zero(), |acc, (m, c)| {
                acc.add(&LaurentPoly::monomial(m, BigInt::from(c)))
            })
    })
}

proptest! {
    #[test]
    fn ring_axioms(p in poly_strategy(), q in poly_strategy(), r in poly_strategy()) {
        prop_assert_eq!(p.add(&q), q.add(&p));
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert_eq!(p.add(&q).add(&r), p.add(&q.add(&r)));
        prop_assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn exact_division_round_trip(p in poly_strategy(), q in poly_strategy()) {
        prop_assume!(!q.is_zero());
        let product = p.mul(&q);
        prop_assert_eq!(product.exact_div(&q).unwrap(), p);
    }

    #[test]
    fn substitution_commutes_with_ring_ops(
        p in poly_strategy(),
        q in poly_strategy(),
        c in -3i64..=3,
    ) {
        // Substitute a face variable that may appear at negative exponents
        // with an invertible monomial, and an edge variable with a constant
        // where exponents are nonnegative.
        let mut assign: BTreeMap<VarId, LaurentPoly> = BTreeMap::new();
        assign.insert(
            VarId::face(0, 0),
            LaurentPoly::monomial(Monomial::var(VarId::face(9, 9)), BigInt::from(-1)),
        );
        let zero_safe = |poly: &LaurentPoly| {
            poly.terms().all(|(m, _)| {
                m.exponents()
                    .iter()
                    .all(|&(v, e)| v != VarId::edge(1, 0, EdgeKind::A).unwrap() || e >= 0)
            })
        };
        if zero_safe(&p) && zero_safe(&q) {
            assign.insert(
                VarId::edge(1, 0, EdgeKind::A).unwrap(),
                LaurentPoly::constant(c),
            );
        }
        let sum = p.add(&q).substitute(&assign).unwrap();
        prop_assert_eq!(
            sum,
            p.substitute(&assign).unwrap().add(&q.substitute(&assign).unwrap())
        );
        let product = p.mul(&q).substitute(&assign).unwrap();
        prop_assert_eq!(
            product,
            p.substitute(&assign).unwrap().mul(&q.substitute(&assign).unwrap())
        );
    }

    #[test]
    fn canonical_form_unique(p in poly_strategy(), q in poly_strategy()) {
        let same = p == q;
        prop_assert_eq!(p.to_string() == q.to_string(), same);
        prop_assert_eq!(
            poly_to_json(&p).to_string() == poly_to_json(&q).to_string(),
            same
        );
    }

    #[test]
    fn serializations_round_trip(p in poly_strategy()) {
        prop_assert_eq!(poly_from_text(&p.to_string()).unwrap(), p.clone());
        prop_assert_eq!(poly_from_json(&poly_to_json(&p)).unwrap(), p);
    }
}
