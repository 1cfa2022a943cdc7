mod common;

use common::{composable, Fixture};
use proptest::prelude::*;
use strand_ainf::strand_core::{Diagram, Variant};
use strand_ainf::tensor_class::{
    classify_tensor, classify_tensor_local, contract, extend, tensor_maslov, TensorTightness,
};

/// Idempotent-matching diagrams that never cover a step twice.
fn viable(lo: usize, hi: usize) -> impl Strategy<Value = (&'static Fixture, Vec<Diagram>)> {
    (lo..=hi).prop_flat_map(composable).prop_filter("a step is covered twice", |(_, ds)| {
        let mut covered = 0u64;
        ds.iter().all(|d| {
            let ok = covered & d.hd.h == 0;
            covered |= d.hd.h;
            ok
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn inserting_an_idempotent_keeps_the_grading((f, ds) in viable(1, 4), at in any::<usize>()) {
        let i = at % (ds.len() + 1);
        let s = if i < ds.len() { ds[i].hd.s } else { ds[i - 1].hd.t };
        let longer = extend(&f.alg, &ds, i, &f.alg.idempotent(s)).unwrap();
        prop_assert_eq!(tensor_maslov(&f.alg, &longer), tensor_maslov(&f.alg, &ds));
    }

    #[test]
    fn contracting_keeps_the_grading((f, ds) in viable(2, 4), a in any::<usize>(), b in any::<usize>()) {
        let (i, j) = {
            let (x, y) = (a % ds.len(), b % ds.len());
            (x.min(y), x.max(y))
        };
        if let Ok(shorter) = contract(&f.alg, &ds, i, j) {
            prop_assert_eq!(tensor_maslov(&f.alg, &shorter), tensor_maslov(&f.alg, &ds));
        }
    }

    #[test]
    fn critical_needs_three_factors((f, ds) in viable(1, 4)) {
        let tight = ds.iter().all(|d| f.alg.pairs().all(|p| matches!(d.variant(p), Variant::U | Variant::G(_))));
        if tight && classify_tensor(&f.alg, &ds).unwrap() == TensorTightness::Critical {
            prop_assert!(ds.len() >= 3);
        }
    }

    #[test]
    fn singular_pairs_have_two_moving_factors((f, ds) in viable(1, 4)) {
        for p in f.alg.pairs() {
            if classify_tensor_local(&f.alg, &ds, p).unwrap() == TensorTightness::Singular {
                let moving = ds.iter().filter(|d| f.alg.local(d, p).hd.bits != 0).count();
                prop_assert_eq!(moving, 2);
            }
        }
    }
}
