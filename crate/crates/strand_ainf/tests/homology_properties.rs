mod common;

use common::{fixture, Fixture};
use proptest::prelude::*;
use strand_ainf::ainf_engine::Extremal;
use strand_ainf::homology::{
    classify_hdata, homology_class_of, homology_class_of_oracle, homology_dim, solve_boundary, Constraint,
    HDataTightness, Summand,
};
use strand_ainf::strand_core::{Element, HData};

/// A summand and a random subset of its basis.
fn chain() -> impl Strategy<Value = (&'static Fixture, HData, Element)> {
    fixture()
        .prop_flat_map(|f| {
            let all = f.alg.all_hdata();
            (Just(f), proptest::sample::select(all), any::<u64>())
        })
        .prop_map(|(f, hd, mask)| {
            let basis = f.alg.enumerate_diagrams(&hd);
            let x = Element::from_terms(basis.iter().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, d)| *d));
            (f, hd, x)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn boundaries_are_solved((f, _hd, x) in chain(), greatest in any::<bool>()) {
        let y = f.alg.d(&x);
        let which = if greatest { Extremal::Greatest } else { Extremal::Least };
        let z = solve_boundary(&f.alg, &f.ord, &y, Constraint::Unconstrained, which).unwrap();
        prop_assert_eq!(f.alg.d(&z), y);
    }

    #[test]
    fn boundaries_are_null_in_homology((f, _hd, x) in chain()) {
        let y = f.alg.d(&x);
        prop_assert!(homology_class_of(&f.alg, &y).unwrap().is_zero());
    }

    #[test]
    fn parity_agrees_with_the_oracle_on_cycles((f, hd, _x) in chain(), pick in any::<u64>()) {
        let summand = Summand::new(&f.alg, &f.ord, &hd);
        let kernel = summand.boundary.kernel_basis();
        let mut v = Element::zero();
        for (i, k) in kernel.iter().enumerate() {
            if pick >> (i % 64) & 1 == 1 {
                v = xor(&v, &summand.element(k));
            }
        }
        prop_assert!(f.alg.d(&v).is_zero());
        prop_assert_eq!(homology_class_of(&f.alg, &v).unwrap(), homology_class_of_oracle(&f.alg, &v).unwrap());
    }

    #[test]
    fn tight_summands_have_rank_one_homology((f, hd, _x) in chain()) {
        let tight = classify_hdata(&f.alg, &hd) == HDataTightness::Tight;
        prop_assert_eq!(homology_dim(&f.alg, &hd), usize::from(tight));
    }
}

fn xor(a: &Element, b: &Element) -> Element {
    Element::from_terms(a.iter().chain(b.iter()).copied())
}
