mod common;

use common::*;
use proptest::prelude::*;
use signject::injectivity::{
    check_injectivity, check_injectivity_with, gamma_det_poly, monomial_map_injective, CheckOptions, Route,
    SubsetSpec,
};
use signject::linalg::{gale_dual, rank, row_basis};
use signject::numeric::{evaluate_map, evaluate_map_exact, relative_residual_bound};
use signject::oracle::naive_symbolic_gamma_det;
use signject::injectivity::residual_tolerance;
use signject::{Rational, RationalMatrix, SignVector, SignVectorSet};

fn instance(max_n: usize, max_r: usize) -> impl Strategy<Value = (RationalMatrix, RationalMatrix)> {
    (1..=max_n, 1..=max_r).prop_flat_map(|(n, r)| (int_matrix(n, r, 3), int_matrix(r, n, 3)))
}

fn with_route(route: Route) -> CheckOptions {
    CheckOptions { route, ..Default::default() }
}

fn assert_counterexample(a: &RationalMatrix, b: &RationalMatrix, s: &SubsetSpec, v: &signject::injectivity::Verdict) {
    let ce = v.counterexample.as_ref().expect("counterexample");
    assert!(ce.kappa.iter().chain(&ce.x).chain(&ce.y).all(|q| q.cmp0().is_gt()));
    assert_ne!(ce.x, ce.y);
    assert!(s.contains_difference(&ce.x, &ce.y).unwrap());
    match evaluate_map_exact(a, b, &ce.kappa, &ce.x).unwrap() {
        Some(fx) => assert_eq!(Some(fx), evaluate_map_exact(a, b, &ce.kappa, &ce.y).unwrap()),
        None => {
            let fx = evaluate_map(a, b, &ce.kappa, &ce.x, 256).unwrap();
            let fy = evaluate_map(a, b, &ce.kappa, &ce.y, 256).unwrap();
            assert!(relative_residual_bound(&fx, &fy, 256) <= residual_tolerance(256));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn routes_agree_on_image_of_a((a, b) in instance(4, 4)) {
        prop_assume!(rank(&a) > 0);
        let s = SubsetSpec::Image(a.clone());
        let auto = check_injectivity(&a, &b, &s).unwrap();
        let det = check_injectivity_with(&a, &b, &s, &with_route(Route::DetPoly)).unwrap();
        let search = check_injectivity_with(&a, &b, &s, &with_route(Route::SignSearch)).unwrap();
        prop_assert_eq!(auto.injective, det.injective);
        prop_assert_eq!(auto.injective, search.injective);
        if !auto.injective {
            assert_counterexample(&a, &b, &s, &auto);
            assert_counterexample(&a, &b, &s, &search);
        }
    }

    #[test]
    fn birch_instances_are_injective(a in (1usize..=4, 1usize..=7).prop_filter("n<=r", |(n, r)| n <= r).prop_flat_map(|(n, r)| int_matrix(n, r, 5))) {
        prop_assume!(rank(&a) == a.rows());
        prop_assert!(check_injectivity(&a, &a.transpose(), &SubsetSpec::FullSpace).unwrap().injective);
    }

    #[test]
    fn positive_column_scaling_of_a_is_invisible((a, b) in instance(3, 4), d in prop::collection::vec(1i64..=9, 4)) {
        let s = SubsetSpec::FullSpace;
        let scaled = a.scale_columns(&d[..a.cols()].iter().map(|&v| q(v)).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(
            check_injectivity(&a, &b, &s).unwrap().injective,
            check_injectivity(&scaled, &b, &s).unwrap().injective
        );
    }

    #[test]
    fn smaller_orthant_unions_stay_injective((a, b) in instance(3, 4), keep in prop::collection::vec(any::<bool>(), 27)) {
        let n = b.cols();
        let all: Vec<SignVector> = SignVector::all(n).filter(|t| !t.is_zero()).collect();
        let big = SignVectorSet::from_vectors(n, all.iter().cloned()).unwrap();
        let small = SignVectorSet::from_vectors(n, all.iter().zip(&keep).filter(|(_, k)| **k).map(|(t, _)| t.clone())).unwrap();
        let vb = check_injectivity(&a, &b, &SubsetSpec::orthant_union(big).unwrap()).unwrap();
        let s_small = SubsetSpec::orthant_union(small).unwrap();
        let vs = check_injectivity(&a, &b, &s_small).unwrap();
        if vb.injective {
            prop_assert!(vs.injective);
        }
        if !vs.injective {
            assert_counterexample(&a, &b, &s_small, &vs);
        }
    }

    #[test]
    fn injectivity_needs_an_injective_monomial_map((a, b) in instance(3, 4)) {
        let s = SubsetSpec::FullSpace;
        if check_injectivity(&a, &b, &s).unwrap().injective {
            prop_assert!(monomial_map_injective(&b, &s).unwrap());
        }
    }

    #[test]
    fn det_coefficients_match_leibniz((a, b) in instance(4, 4)) {
        let aprime = row_basis(&a);
        prop_assume!(aprime.rows() > 0);
        let n = b.cols();
        let z = if aprime.rows() < n { Some(gale_dual(&signject::linalg::column_basis(&a)).unwrap()) } else { None };
        prop_assert_eq!(
            gamma_det_poly(&aprime, &b, z.as_ref()).unwrap(),
            naive_symbolic_gamma_det(&aprime, &b, z.as_ref()).unwrap()
        );
    }
}

#[test]
fn fractional_exponents_get_bounded_counterexamples() {
    let a = RationalMatrix::from_ints(&[[1, -1]]);
    let b = RationalMatrix::from_rows(vec![vec![Rational::from((3, 2))], vec![Rational::from((1, 2))]]).unwrap();
    let s = SubsetSpec::FullSpace;
    let v = check_injectivity(&a, &b, &s).unwrap();
    assert!(!v.injective);
    assert!(v.counterexample.as_ref().unwrap().residual_bound.is_some());
    assert_counterexample(&a, &b, &s, &v);
}
