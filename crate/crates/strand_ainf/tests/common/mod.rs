#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use strand_ainf::ainf_engine::{AinfEngine, EngineConfig, Mode, TightIndex};
use strand_ainf::arc_diagram::{ArcDiagram, PairOrdering};
use strand_ainf::strand_core::{Algebra, Diagram, HData};

pub struct Fixture {
    pub name: &'static str,
    pub alg: Arc<Algebra>,
    pub ord: PairOrdering,
    pub diagrams: Vec<Diagram>,
    pub index: TightIndex,
    pub quotient: AinfEngine,
    pub full: AinfEngine,
}

impl std::fmt::Debug for Fixture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name)
    }
}

fn build(name: &'static str, z: ArcDiagram) -> Fixture {
    let alg = Arc::new(Algebra::new(z));
    let ord = PairOrdering::default_for(alg.arc_diagram());
    let diagrams = alg.all_diagrams();
    let index = TightIndex::new(&alg);
    let engine = |mode| {
        let config = EngineConfig {
            mode,
            ..EngineConfig::default()
        };
        AinfEngine::new(alg.clone(), ord.clone(), config)
    };
    Fixture {
        quotient: engine(Mode::Quotient),
        full: engine(Mode::Full),
        name,
        alg,
        ord,
        diagrams,
        index,
    }
}

/// The test arc diagrams: one pair, two disjoint pairs, two interleaved pairs.
pub fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        let shared = ArcDiagram::parse("interval a: p q\ninterval b: p' q'\npair P: p p'\npair Q: q q'\n")
            .expect("interleaved diagram is valid");
        vec![
            build("one pair", ArcDiagram::disjoint_fragments(&["P"])),
            build("two pairs", ArcDiagram::disjoint_fragments(&["P", "Q"])),
            build("interleaved", shared),
        ]
    })
}

pub fn fixture() -> impl Strategy<Value = &'static Fixture> {
    (0..fixtures().len()).prop_map(|i| &fixtures()[i])
}

/// A fixture with some of its diagrams, picked by index.
pub fn with_diagrams(k: usize) -> impl Strategy<Value = (&'static Fixture, Vec<Diagram>)> {
    fixture().prop_flat_map(move |f| {
        proptest::collection::vec(0..f.diagrams.len(), k)
            .prop_map(move |ix| (f, ix.into_iter().map(|i| f.diagrams[i]).collect()))
    })
}

/// Follows `seeds` through chains of tight H-data, keeping the tensor viable.
/// Stops early when no factor can follow.
pub fn walk(index: &TightIndex, seeds: &[usize]) -> Vec<HData> {
    let mut out: Vec<HData> = Vec::new();
    let mut covered = 0u64;
    for (k, &seed) in seeds.iter().enumerate() {
        let options: Vec<HData> = if k == 0 {
            index.all.clone()
        } else {
            let t = out[k - 1].t;
            index.starting_at(t).iter().copied().filter(|h| h.h & covered == 0).collect()
        };
        if options.is_empty() {
            break;
        }
        let h = options[seed % options.len()];
        covered |= h.h;
        out.push(h);
    }
    out
}

/// A fixture and a viable class tensor of length between `lo` and `hi` on it.
pub fn class_tensor(lo: usize, hi: usize) -> impl Strategy<Value = (&'static Fixture, Vec<HData>)> {
    (fixture(), proptest::collection::vec(any::<usize>(), hi))
        .prop_map(|(f, seeds)| (f, walk(&f.index, &seeds)))
        .prop_filter("tensor too short", move |(_, m)| m.len() >= lo)
}

/// A fixture with `k` diagrams whose idempotents line up end to start.
pub fn composable(k: usize) -> impl Strategy<Value = (&'static Fixture, Vec<Diagram>)> {
    (fixture(), proptest::collection::vec(any::<usize>(), k)).prop_map(|(f, seeds)| {
        let mut out: Vec<Diagram> = Vec::new();
        for seed in seeds {
            let options: Vec<&Diagram> = match out.last() {
                None => f.diagrams.iter().collect(),
                Some(prev) => f.diagrams.iter().filter(|d| d.hd.s == prev.hd.t).collect(),
            };
            out.push(*options[seed % options.len()]);
        }
        (f, out)
    })
}
