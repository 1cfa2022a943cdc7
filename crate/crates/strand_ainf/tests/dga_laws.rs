mod common;

use common::{composable, with_diagrams};
use proptest::prelude::*;
use strand_ainf::homology::{crossings, in_ideal_f};
use strand_ainf::strand_core::{Element, HalfInt};

fn el(d: strand_ainf::strand_core::Diagram) -> Element {
    Element::from_diagram(d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn differential_squares_to_zero((f, ds) in with_diagrams(1)) {
        prop_assert!(f.alg.d(&f.alg.differential(&ds[0])).is_zero());
    }

    #[test]
    fn differential_keeps_hdata_and_lowers_grading((f, ds) in with_diagrams(1)) {
        let d = ds[0];
        for e in f.alg.differential(&d).iter() {
            prop_assert_eq!(e.hd, d.hd);
            prop_assert_eq!(f.alg.maslov(e), f.alg.maslov(&d) - HalfInt::from_int(1));
        }
    }

    #[test]
    fn leibniz((f, ds) in composable(2)) {
        let alg = &f.alg;
        let (a, b) = (el(ds[0]), el(ds[1]));
        let lhs = alg.d(&alg.mul(&a, &b));
        let rhs = Element::from_terms(
            alg.mul(&alg.d(&a), &b).iter().chain(alg.mul(&a, &alg.d(&b)).iter()).copied(),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn associativity((f, ds) in composable(3)) {
        let alg = &f.alg;
        let (a, b, c) = (el(ds[0]), el(ds[1]), el(ds[2]));
        prop_assert_eq!(alg.mul(&alg.mul(&a, &b), &c), alg.mul(&a, &alg.mul(&b, &c)));
    }

    #[test]
    fn product_gradings((f, ds) in composable(2)) {
        let alg = &f.alg;
        let (a, b) = (ds[0], ds[1]);
        if let Some(ab) = alg.multiply(&a, &b) {
            prop_assert_eq!(ab.hd.h, a.hd.h | b.hd.h);
            prop_assert_eq!(a.hd.h & b.hd.h, 0);
            prop_assert_eq!((ab.hd.s, ab.hd.t), (a.hd.s, b.hd.t));
            prop_assert_eq!(a.hd.t, b.hd.s);
            let expected = alg.maslov(&a) + alg.maslov(&b) + alg.m_pairing(b.hd.h, &alg.boundary(a.hd.h));
            prop_assert_eq!(alg.maslov(&ab), expected);
        }
    }

    #[test]
    fn crossingless_products_stay_crossingless((f, ds) in composable(2)) {
        let n = f.alg.pair_count();
        if crossings(&ds[0], n) == 0 && crossings(&ds[1], n) == 0 {
            if let Some(ab) = f.alg.multiply(&ds[0], &ds[1]) {
                prop_assert_eq!(crossings(&ab, n), 0);
            }
        }
    }

    #[test]
    fn crossed_pair_diagrams_form_an_ideal((f, ds) in with_diagrams(2)) {
        let alg = &f.alg;
        if in_ideal_f(alg, &ds[0]) {
            for p in [alg.multiply(&ds[0], &ds[1]), alg.multiply(&ds[1], &ds[0])].into_iter().flatten() {
                prop_assert!(in_ideal_f(alg, &p));
            }
        }
    }
}

#[test]
fn composable_pairs_often_multiply() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = composable(2);
    let nonzero = (0..400)
        .filter(|_| {
            let (f, ds) = strategy.new_tree(&mut runner).unwrap().current();
            f.alg.multiply(&ds[0], &ds[1]).is_some()
        })
        .count();
    assert!(nonzero >= 40, "only {nonzero} of 400 sampled products were nonzero");
}
