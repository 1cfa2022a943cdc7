//! The nine acceptance criteria, run in order with one PASS/FAIL line each.
//!
//! Run with `cargo test -p strand_ainf --test acceptance -- --nocapture` to
//! see the lines.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use strand_ainf::ainf_engine::verify::{
    perturbation_invariance_check, verify_ainf_relations, verify_heisenberg, verify_morphism_relations,
    verify_structure_on_memo, verify_structure_theorems, verify_x_grading,
};
use strand_ainf::ainf_engine::{
    creation_span_dim, init_threads, AinfEngine, EngineConfig, Extremal, Mode, OrderingChoices, Report, TightIndex,
};
use strand_ainf::arc_diagram::{ArcDiagram, PairOrdering};
use strand_ainf::homology::{
    classify_hdata, dim_closed_form, dim_oracle, homology_class_of, homology_class_of_oracle, homology_dim,
    inverting_space_dim, inverting_space_dim_oracle, model_hdata, occupancy, representatives, HDataTightness,
    HomologyClass, Summand,
};
use strand_ainf::optrees::{local_validity_mismatches, verify_predictions, verify_tree_lemmas};
use strand_ainf::strand_core::oracle::{compare_with_rules, derive_local_tables};
use strand_ainf::strand_core::{Algebra, Element, HalfInt, LocalHData};
use strand_ainf::tensor_class::{table2_oracle, table2_reference};
use strand_ainf::worked_examples::{transcript, ExampleRunner, CATALOGUE, GOLDEN};

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn reports(&mut self, reports: &[Report]) {
        for r in reports {
            self.check(r.passed(), || format!("{} {:?}", r.summary(), r.witnesses));
        }
    }
}

fn algebra(pairs: usize) -> Arc<Algebra> {
    let names: Vec<String> = ["P", "Q", "R", "S", "T", "U", "V"][..pairs].iter().map(|s| s.to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Arc::new(Algebra::new(ArcDiagram::disjoint_fragments(&refs)))
}

fn quotient(alg: &Arc<Algebra>, memo_len: usize) -> AinfEngine {
    let ord = PairOrdering::default_for(alg.arc_diagram());
    let config = EngineConfig {
        memo_len,
        ..EngineConfig::default()
    };
    AinfEngine::new(alg.clone(), ord, config)
}

fn full(alg: &Arc<Algebra>, solver: Extremal) -> AinfEngine {
    let ord = PairOrdering::default_for(alg.arc_diagram());
    let config = EngineConfig {
        mode: Mode::Full,
        solver,
        ..EngineConfig::default()
    };
    AinfEngine::new(alg.clone(), ord, config)
}

fn table_regeneration() -> Outcome {
    let mut o = Outcome::new();
    let tables = derive_local_tables().expect("pictures identify");
    for issue in compare_with_rules(&tables) {
        o.failures.push(issue);
    }
    let mut per_hdata: BTreeMap<LocalHData, usize> = BTreeMap::new();
    for (d, _, _) in &tables.diagrams {
        *per_hdata.entry(d.hd).or_default() += 1;
    }
    let histogram = [1, 2, 3].map(|k| per_hdata.values().filter(|&&c| c == k).count());
    o.check(per_hdata.values().all(|c| (1..=3).contains(c)), || "diagram counts outside 1..=3".into());
    o.check(table2_oracle() == table2_reference(), || "tightness by H-data differs".into());
    o.failures.extend(local_validity_mismatches());
    o.detail = format!(
        "{} local diagrams, H-data with 1/2/3 diagrams: {}/{}/{}",
        tables.diagrams.len(),
        histogram[0],
        histogram[1],
        histogram[2]
    );
    o
}

fn dimension_formulas() -> Outcome {
    let mut o = Outcome::new();
    let mut cases = 0;
    for l in 0..=3 {
        for n in 0..=4 {
            let alg = algebra(l + n);
            let hd = model_hdata(&alg, l, n);
            let closed = dim_closed_form(l, n);
            let oracle = dim_oracle(&alg, &hd);
            o.check(closed == oracle, || format!("L={l} N={n}: {closed:?} vs {oracle:?}"));
            o.check(closed.total == 3u64.pow(l as u32) << n, || format!("L={l} N={n}: total {}", closed.total));
            if n > 0 {
                for level in 0..=l + n {
                    let c = inverting_space_dim(l, n, level).unwrap();
                    let e = inverting_space_dim_oracle(&alg, &hd, level).unwrap();
                    o.check(c == e, || format!("inverting L={l} N={n} level={level}: {c} vs {e}"));
                }
            }
            cases += 1;
        }
    }
    for (l, n, level, span, inverting) in [(1, 1, 0, 1, 2), (0, 4, 1, 4, 9)] {
        let alg = algebra(l + n);
        let hd = model_hdata(&alg, l, n);
        let got = (creation_span_dim(&alg, &hd, level).unwrap(), inverting_space_dim(l, n, level).unwrap());
        o.check(got == (span, inverting), || format!("L={l} N={n} level={level}: {got:?}"));
    }
    o.detail = format!("{cases} (L,N) cases");
    o
}

fn dga_laws(algs: &[Arc<Algebra>]) -> Outcome {
    let mut o = Outcome::new();
    let mut counts = [0u64; 4];
    for alg in algs {
        let ds = alg.all_diagrams();
        let mut by_source: BTreeMap<u32, Vec<_>> = BTreeMap::new();
        for d in &ds {
            by_source.entry(d.hd.s).or_default().push(*d);
        }
        for d in &ds {
            let dd = alg.differential(d);
            o.check(alg.d(&dd).is_zero(), || format!("d^2 {d:?}"));
            o.check(
                dd.iter().all(|e| e.hd == d.hd && alg.maslov(e) == alg.maslov(d) - HalfInt::from_int(1)),
                || format!("d grading {d:?}"),
            );
            counts[0] += 1;
        }
        for a in &ds {
            let ea = Element::from_diagram(*a);
            let da = alg.d(&ea);
            for b in by_source.get(&a.hd.t).into_iter().flatten() {
                let eb = Element::from_diagram(*b);
                let ab = alg.mul(&ea, &eb);
                let rhs = &alg.mul(&da, &eb) + &alg.mul(&ea, &alg.d(&eb));
                o.check(alg.d(&ab) == rhs, || format!("Leibniz {a:?} {b:?}"));
                counts[1] += 1;
                if let Some(p) = alg.multiply(a, b) {
                    let grading = alg.maslov(a) + alg.maslov(b) + alg.m_pairing(b.hd.h, &alg.boundary(a.hd.h));
                    o.check(
                        p.hd.h == a.hd.h | b.hd.h && p.hd.s == a.hd.s && p.hd.t == b.hd.t && alg.maslov(&p) == grading,
                        || format!("product grading {a:?} {b:?}"),
                    );
                    counts[2] += 1;
                }
                for c in by_source.get(&b.hd.t).into_iter().flatten() {
                    let ec = Element::from_diagram(*c);
                    o.check(alg.mul(&ab, &ec) == alg.mul(&ea, &alg.mul(&eb, &ec)), || {
                        format!("associativity {a:?} {b:?} {c:?}")
                    });
                    counts[3] += 1;
                }
            }
        }
    }
    o.detail = format!(
        "{} differentials, {} pairs, {} nonzero products, {} triples",
        counts[0], counts[1], counts[2], counts[3]
    );
    o
}

fn homology_checks(algs: &[Arc<Algebra>]) -> Outcome {
    let mut o = Outcome::new();
    let (mut summands, mut cycles) = (0, 0u64);
    for alg in algs {
        let ord = PairOrdering::default_for(alg.arc_diagram());
        for hd in alg.all_hdata() {
            let tight = classify_hdata(alg, &hd) == HDataTightness::Tight;
            o.check(homology_dim(alg, &hd) == usize::from(tight), || format!("homology rank {hd:?}"));
            if tight {
                let reps = representatives(alg, &HomologyClass::Nonzero(hd)).unwrap();
                let l = occupancy(alg, &hd).l;
                o.check(reps.len() == 1 << l, || format!("{} representatives of {hd:?}", reps.len()));
            }
            let summand = Summand::new(alg, &ord, &hd);
            for level in 0..=summand.max_level() {
                let basis = summand.cycle_basis(level);
                if basis.len() > 16 {
                    o.failures.push(format!("{hd:?} level {level}: {} cycle generators", basis.len()));
                    continue;
                }
                for mask in 1u32..1 << basis.len() {
                    let z = Element::from_terms(
                        basis.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).flat_map(|(_, b)| b.iter().copied()),
                    );
                    let fast = homology_class_of(alg, &z).unwrap();
                    let slow = homology_class_of_oracle(alg, &z).unwrap();
                    o.check(fast == slow, || format!("parity {hd:?} level {level}"));
                    cycles += 1;
                }
            }
            summands += 1;
        }
    }
    o.detail = format!("{summands} summands, {cycles} homogeneous cycles");
    o
}

fn summarize(reports: &[Report]) -> String {
    let checked: u64 = reports.iter().map(|r| r.checked).sum();
    format!("{} checks in {} families", checked, reports.len())
}

#[test]
fn acceptance() {
    init_threads();
    let one = algebra(1);
    let two = algebra(2);
    let three = algebra(3);
    let two_index = TightIndex::new(&two);
    let three_index = TightIndex::new(&three);
    let two_quotient = quotient(&two, usize::MAX);
    let three_quotient = quotient(&three, 3);
    let mut runner = ExampleRunner::new();

    let mut criteria: Vec<(&str, Box<dyn FnMut() -> Outcome + '_>)> = Vec::new();
    criteria.push(("table regeneration", Box::new(table_regeneration)));
    criteria.push(("dimension formulas", Box::new(dimension_formulas)));
    criteria.push(("DGA laws", Box::new(|| dga_laws(&[one.clone(), two.clone()]))));
    criteria.push(("homology", Box::new(|| homology_checks(&[one.clone(), two.clone(), three.clone()]))));
    criteria.push((
        "A-infinity relations",
        Box::new(|| {
            let mut o = Outcome::new();
            let mut reports = verify_ainf_relations(&two_quotient, &two_index, 5);
            reports.push(verify_x_grading(&two_quotient, &two_index, 5));
            reports.extend(verify_ainf_relations(&three_quotient, &three_index, 4));
            o.reports(&reports);
            o.detail = format!("2 pairs n<=5, 3 pairs n<=4: {}", summarize(&reports));
            o
        }),
    ));
    criteria.push((
        "morphism relations",
        Box::new(|| {
            let mut o = Outcome::new();
            let least = full(&two, Extremal::Least);
            let greatest = full(&two, Extremal::Greatest);
            let mut reports = verify_morphism_relations(&least, &two_index, 4);
            reports.push(perturbation_invariance_check(&least, &greatest, &two_quotient, &two_index, 4));
            reports.push(verify_heisenberg(&two, &OrderingChoices(least.ordering().clone())));
            o.reports(&reports);
            o.detail = format!("2 pairs n<=4: {}", summarize(&reports));
            o
        }),
    ));
    criteria.push((
        "worked examples",
        Box::new(|| {
            let mut o = Outcome::new();
            let outcomes: Vec<_> = CATALOGUE.iter().map(|ex| runner.run(ex).expect("examples parse")).collect();
            for out in outcomes.iter().filter(|out| !out.as_expected) {
                o.failures.push(format!("{}: {}", out.example.name, out.line));
            }
            o.check(transcript(&outcomes) == GOLDEN, || "transcript differs from golden file".into());
            o.detail = format!("{} examples against the golden transcript", outcomes.len());
            o
        }),
    ));
    criteria.push((
        "structure theorems",
        Box::new(|| {
            let mut o = Outcome::new();
            let mut reports = verify_structure_theorems(&two_quotient, &two_index, 5);
            reports.extend(verify_structure_on_memo(&three_quotient));
            o.reports(&reports);
            o.detail = format!("2 pairs n<=5 and memoized 3-pair values: {}", summarize(&reports));
            o
        }),
    ));
    criteria.push((
        "tree consistency",
        Box::new(|| {
            let mut o = Outcome::new();
            let mut reports = verify_predictions(&two_quotient, &two_index, 5);
            reports.extend(verify_tree_lemmas(&two, &two_index, 4));
            o.reports(&reports);
            o.detail = format!("predictions n<=5, lemmas n<=4: {}", summarize(&reports));
            o
        }),
    ));

    let mut failed = Vec::new();
    let mut lines = Vec::new();
    for (k, (name, run)) in criteria.iter_mut().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if outcome.failures.is_empty() { "PASS" } else { "FAIL" };
        let line = format!("criterion {}\t{verdict}\t{name}\t{}\t{secs:.1}s", k + 1, outcome.detail);
        println!("{line}");
        for f in outcome.failures.iter().take(5) {
            println!("\t{f}");
        }
        if !outcome.failures.is_empty() {
            failed.push(k + 1);
        }
        lines.push(line);
    }
    drop(criteria);
    // Structure checks on the engines the worked examples populated.
    for engine in runner.engines() {
        for r in verify_structure_on_memo(engine) {
            assert!(r.passed(), "worked-example memo: {} {:?}", r.summary(), r.witnesses);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
