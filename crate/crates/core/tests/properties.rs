mod common;

use kohn_core::exactalg::{parse_poly, BiPoly, Scalar};
use kohn_core::germs::{nu, nu_gamma, nu_k, nu_k_direct, nu_k_gamma, ExtOrder};
use kohn_core::invariants::{colength_truncated, multiplicity, Method};
use kohn_core::membership::{local_basis, staircase};
use kohn_core::Error;
use proptest::prelude::*;

fn term() -> impl Strategy<Value = (i64, u32, u32)> {
    (prop_oneof![-4i64..=-1, 1i64..=4], 0u32..=6, 0u32..=6)
}

fn build(ts: &[(i64, u32, u32)]) -> BiPoly {
    ts.iter().fold(BiPoly::zero(), |acc, &(c, a, b)| acc.add(&BiPoly::monomial(Scalar::int(c), a, b)))
}

/// Nonzero polynomial without constant term.
fn germ() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec(term(), 1..5)
        .prop_map(|ts| build(&ts.into_iter().filter(|t| t.1 + t.2 > 0).collect::<Vec<_>>()))
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn poly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec(term(), 0..5).prop_map(|ts| build(&ts))
}

fn curve() -> impl Strategy<Value = kohn_core::germs::CurveGerm> {
    any::<u64>().prop_map(|s| common::curve(&mut common::rng(s)))
}

fn ge(a: &ExtOrder, b: &ExtOrder) -> bool {
    match a.ge(b) {
        Ok(v) => v,
        Err(Error::Precision(_)) => true,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn order_along_curve_dominates_order(f in germ(), g in curve()) {
        prop_assert!(ge(&nu_gamma(&f, &g), &nu(&f)));
    }

    #[test]
    fn jet_orders_decrease_in_k(f in germ(), g in curve(), k in 0u32..5) {
        prop_assert!(ge(&nu_k(&f, k), &nu_k(&f, k + 1)));
        prop_assert!(ge(&nu_k_gamma(&f, k, &g), &nu_k_gamma(&f, k + 1, &g)));
    }

    #[test]
    fn jet_orders_vanish_past_order(f in germ(), g in curve()) {
        let v = nu(&f).as_int().unwrap() as u32;
        prop_assert_eq!(nu_k(&f, v), ExtOrder::int(0));
        prop_assert_eq!(nu_k_gamma(&f, v, &g), ExtOrder::int(0));
    }

    #[test]
    fn jet_order_formula(f in germ(), k in 0u32..8) {
        let v = nu(&f).as_int().unwrap();
        let expect = ExtOrder::int((v - k as i64).max(0));
        prop_assert_eq!(nu_k(&f, k), expect.clone());
        prop_assert_eq!(nu_k_direct(&f, k), expect);
    }

    #[test]
    fn reparametrization_invariance(f in germ(), g in curve(), r in 2u32..=3, k in 0u32..3) {
        let h = g.reparametrize(r);
        prop_assert_eq!(nu_gamma(&f, &h), nu_gamma(&f, &g));
        prop_assert_eq!(nu_k_gamma(&f, k, &h), nu_k_gamma(&f, k, &g));
    }

    #[test]
    fn order_invariant_under_linear_change(f in germ(), m in prop::array::uniform4(-3i64..=3)) {
        prop_assume!(m[0] * m[3] - m[1] * m[2] != 0);
        let lin = |a: i64, b: i64| BiPoly::z().scale(&Scalar::int(a)).add(&BiPoly::w().scale(&Scalar::int(b)));
        let g = f.compose(&lin(m[0], m[1]), &lin(m[2], m[3]));
        prop_assert_eq!(nu(&g), nu(&f));
        for k in 0..3 {
            prop_assert_eq!(nu_k(&g, k), nu_k(&f, k));
        }
    }

    #[test]
    fn parse_print_round_trip(f in poly()) {
        prop_assert_eq!(parse_poly(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn multiplicity_is_symmetric(f in germ(), g in germ()) {
        let fg = multiplicity(&f, &g, Method::BranchSum);
        let gf = multiplicity(&g, &f, Method::BranchSum);
        if let (Ok(a), Ok(b)) = (&fg, &gf) {
            prop_assert_eq!(a, b);
            let la = multiplicity(&f, &g, Method::LinearAlgebra).unwrap();
            prop_assert_eq!(&la, a);
        } else {
            // A common branch is seen from either side.
            let common = |r: &kohn_core::Result<ExtOrder>| matches!(r, Err(Error::CommonBranch(_)));
            prop_assert!(!(common(&fg) && gf.is_ok()) && !(common(&gf) && fg.is_ok()));
        }
    }

    #[test]
    fn staircase_matches_linear_algebra(gens in prop::collection::vec(germ(), 1..4), d in 2u32..10) {
        let b = local_basis(&gens, d).unwrap();
        prop_assert_eq!(staircase(&b), colength_truncated(&gens, d + 1).unwrap());
    }
}
