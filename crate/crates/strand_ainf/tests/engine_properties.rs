mod common;

use common::{class_tensor, fixture};
use proptest::prelude::*;
use strand_ainf::homology::{project, HomologyClass};
use strand_ainf::optrees::{predict, Prediction};
use strand_ainf::strand_core::{Element, HData, Variant};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn f_values_are_homogeneous_and_standard((f, m) in class_tensor(2, 5)) {
        let e = &f.quotient;
        let n = m.len() as i32;
        let composite = HData::compose_all(&m).unwrap();
        let grading = e.tensor_maslov(&m).doubled() + 2 * (n - 1);
        for d in e.f(&m).unwrap().iter() {
            prop_assert_eq!(d.hd, composite);
            prop_assert_eq!(f.alg.maslov(d).doubled(), grading);
            prop_assert!(f.alg.pairs().all(|p| d.variant(p) != Variant::CPair));
        }
    }

    #[test]
    fn x_values_are_the_composite_class((f, m) in class_tensor(2, 5)) {
        let e = &f.quotient;
        if let HomologyClass::Nonzero(h) = e.x(&m).unwrap() {
            prop_assert_eq!(h, HData::compose_all(&m).unwrap());
            let n = m.len() as i32;
            prop_assert_eq!(f.alg.maslov(&e.f1(&h)).doubled(), e.tensor_maslov(&m).doubled() + 2 * (n - 2));
        }
    }

    #[test]
    fn f_and_x_are_never_both_nonzero((f, m) in class_tensor(2, 5)) {
        let e = &f.quotient;
        prop_assert!(e.f(&m).unwrap().is_zero() || e.x(&m).unwrap().is_zero());
    }

    #[test]
    fn x1_vanishes_and_x2_is_the_product((f, m) in class_tensor(1, 2)) {
        let e = &f.quotient;
        prop_assert!(e.x(&m[..1]).unwrap().is_zero());
        if m.len() == 2 {
            let product = f.alg.mul(&Element::from_diagram(e.f1(&m[0])), &Element::from_diagram(e.f1(&m[1])));
            let class = strand_ainf::homology::homology_class_of(&f.alg, &product).unwrap();
            prop_assert_eq!(e.x(&m).unwrap(), class);
        }
    }

    #[test]
    fn full_mode_defining_identity((f, m) in class_tensor(2, 4)) {
        let e = &f.full;
        let u = e.u(&m).unwrap();
        prop_assert!(f.alg.d(&u).is_zero());
        let mut rhs = u;
        if let HomologyClass::Nonzero(h) = e.x(&m).unwrap() {
            rhs += &Element::from_diagram(e.f1(&h));
        }
        prop_assert_eq!(f.alg.d(&e.f(&m).unwrap()), rhs);
    }

    #[test]
    fn full_and_quotient_modes_agree_modulo_crossed_pairs((f, m) in class_tensor(2, 4)) {
        prop_assert_eq!(f.full.x(&m).unwrap(), f.quotient.x(&m).unwrap());
        prop_assert_eq!(project(&f.alg, &f.full.f(&m).unwrap()), f.quotient.f(&m).unwrap());
    }

    #[test]
    fn non_viable_tensors_are_zero(f in fixture(), a in any::<usize>(), b in any::<usize>()) {
        let all = &f.index.all;
        let m = [all[a % all.len()], all[b % all.len()]];
        if m[0].compose(&m[1]).is_none() {
            prop_assert!(f.quotient.f(&m).unwrap().is_zero());
            prop_assert!(f.quotient.x(&m).unwrap().is_zero());
        }
    }

    #[test]
    fn predictions_are_honoured((f, m) in class_tensor(1, 5)) {
        let e = &f.quotient;
        match predict(&f.alg, &m).unwrap() {
            Prediction::MustBeZero => {
                prop_assert!(e.f(&m).unwrap().is_zero());
                prop_assert!(e.x(&m).unwrap().is_zero());
            }
            Prediction::NonzeroF(d) => prop_assert_eq!(e.f(&m).unwrap(), Element::from_diagram(d)),
            Prediction::NonzeroX(h) => prop_assert_eq!(e.x(&m).unwrap(), HomologyClass::Nonzero(h)),
            Prediction::Undetermined => {}
        }
    }
}
