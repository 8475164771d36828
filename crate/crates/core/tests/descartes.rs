mod common;

use common::*;
use proptest::prelude::*;
use signject::descartes::{check_at_most_one_solution, check_bnd, check_ex, univariate_sign_variations};
use signject::linalg::rank;
use signject::RationalMatrix;

fn pair() -> impl Strategy<Value = (RationalMatrix, RationalMatrix)> {
    (1usize..=3, 1usize..=5)
        .prop_filter("n <= r", |(n, r)| n <= r)
        .prop_flat_map(|(n, r)| (int_matrix(n, r, 3), int_matrix(r, n, 3)))
        .prop_filter("full rank", |(a, b)| rank(a) == a.rows() && rank(b) == b.cols())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ex_implies_bnd((a, b) in pair()) {
        let rep = check_ex(&a, &b).unwrap();
        if rep.ex_holds {
            prop_assert!(rep.bnd_holds);
        }
        prop_assert_eq!(rep.bnd_holds, check_bnd(&a, &b).unwrap().holds);
    }

    #[test]
    fn square_at_most_one_matches_bnd((a, b) in pair()) {
        prop_assert_eq!(check_at_most_one_solution(&a, &b).unwrap(), check_bnd(&a, &b).unwrap().holds);
    }

    #[test]
    fn variations_ignore_zeros_and_positive_scaling(c in prop::collection::vec(-3i64..=3, 1..8), k in 1i64..5) {
        let v: Vec<_> = c.iter().map(|&x| q(x)).collect();
        let scaled: Vec<_> = c.iter().map(|&x| q(x * k)).collect();
        let nz: Vec<_> = c.iter().filter(|&&x| x != 0).map(|&x| q(x)).collect();
        prop_assert_eq!(univariate_sign_variations(&v), univariate_sign_variations(&scaled));
        prop_assert_eq!(univariate_sign_variations(&v), univariate_sign_variations(&nz));
    }
}

#[test]
fn univariate_example() {
    let b = |k: i64| RationalMatrix::from_ints(&[[1], [2], [k]]);
    for k in [3, 5, 9] {
        assert!(!check_bnd(&RationalMatrix::from_ints(&[[1, -1, 1]]), &b(k)).unwrap().holds);
        assert!(check_bnd(&RationalMatrix::from_ints(&[[1, 2, 3]]), &b(k)).unwrap().holds);
    }
}
