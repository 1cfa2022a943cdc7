//! A catalogue of small hand-checkable computations with their expected
//! outcomes, and a runner that prints one line per computation:
//!
//! ```text
//! f P: * p'+ o p'- * -> [P: 11 p'-,p'+ c]
//! ```
//!
//! Inputs may leave circles implicit; the transcript always prints them.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::ainf_engine::{AinfEngine, EngineConfig, EngineError};
use crate::arc_diagram::{ArcDiagram, PairOrdering};
use crate::homology::HomologyClass;
use crate::shorthand::{format_tensor, parse_tensor, ShorthandError};
use crate::strand_core::text::{format_diagram, format_element};
use crate::strand_core::{Algebra, Diagram, Element, HData, Variant};
use crate::tensor_class::{classify_class_tensor_local, TensorTightness};

#[derive(Debug, Error)]
pub enum ExampleError {
    #[error("example `{name}`: {source}")]
    Shorthand { name: String, source: ShorthandError },
    #[error("example `{name}`: {source}")]
    Engine { name: String, source: EngineError },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    X,
    F,
    U,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::X => "X",
            Op::F => "f",
            Op::U => "U",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Zero,
    /// The class of the tight diagram with the tensor's H-data.
    TightClass,
    /// One diagram, crossed where the tensor is twisted and tight elsewhere.
    CrossedAtTwisted,
    /// Exactly these terms; each word lists variant letters in pair order.
    Terms(&'static [&'static str]),
}

#[derive(Clone, Copy, Debug)]
pub struct WorkedExample {
    pub name: &'static str,
    pub pairs: &'static [&'static str],
    pub op: Op,
    pub input: &'static str,
    pub expect: Expect,
}

const P: &[&str] = &["P"];
const PQ: &[&str] = &["P", "Q"];
const PQR: &[&str] = &["P", "Q", "R"];
const PQRS: &[&str] = &["P", "Q", "R", "S"];

const fn ex(name: &'static str, pairs: &'static [&'static str], op: Op, input: &'static str, expect: Expect) -> WorkedExample {
    WorkedExample {
        name,
        pairs,
        op,
        input,
        expect,
    }
}

pub const CATALOGUE: &[WorkedExample] = &[
    ex("f2 crosses a twisted pair", P, Op::F, "P: * p'+ o p'- *", Expect::Terms(&["c"])),
    ex("X3 of a critical triple", P, Op::X, "P: o p- * p'+ o p'- *", Expect::TightClass),
    ex("U3 with two twisted windows", PQ, Op::U, "P: * p'+ o p'- * . *; Q: * . * q'+ o q'- *", Expect::Terms(&["wc", "cw"])),
    ex("U3 with cancelling terms", P, Op::U, "P: * p'+ o . o p'- *", Expect::Zero),
    ex("f3 nonzero 1", PQ, Op::F, "Q: q'- q+ q-; P: p+ p- .", Expect::CrossedAtTwisted),
    ex("f3 nonzero 2", PQ, Op::F, "Q: . q+ q-; P: p+ p- p'+", Expect::CrossedAtTwisted),
    ex("f3 nonzero 3", PQ, Op::F, "Q: q+ . q-; P: p'- p+ p-", Expect::CrossedAtTwisted),
    ex("f3 nonzero 4", PQ, Op::F, "Q: q+ q- q'+; P: p+ . p-", Expect::CrossedAtTwisted),
    ex("f3 nonzero 5", PQ, Op::F, "Q: q+ q- .; P: . p+ p-", Expect::CrossedAtTwisted),
    ex("f3 nonzero 6", PQ, Op::F, "Q: q+ q- .; P: p'- p+ p-", Expect::CrossedAtTwisted),
    ex("f3 nonzero 7", PQ, Op::F, "Q: q+ q- q'+; P: . p+ p-", Expect::CrossedAtTwisted),
    ex("f3 nonzero 8", PQ, Op::F, "Q: q'- q+ q-; P: p+ . p-", Expect::CrossedAtTwisted),
    ex("f3 nonzero 9", PQ, Op::F, "Q: q+ . q-; P: p+ p- p'+", Expect::CrossedAtTwisted),
    ex("f3 nonzero 10", PQ, Op::F, "Q: . q+ q-; P: p+ p- .", Expect::CrossedAtTwisted),
    ex("f3 nonzero 11", PQ, Op::F, "Q: q+ q- .; P: p+ p- p'+", Expect::CrossedAtTwisted),
    ex("f3 nonzero 12", PQ, Op::F, "Q: q+ q- .; P: p+ . p-", Expect::CrossedAtTwisted),
    ex("f3 nonzero 13", PQ, Op::F, "Q: . q+ q-; P: p+ . p-", Expect::CrossedAtTwisted),
    ex("f3 nonzero 14", PQ, Op::F, "Q: . q+ q-; P: p'- p+ p-", Expect::CrossedAtTwisted),
    ex("f3 zero 1", PQ, Op::F, "Q: q+ q- q'+; P: p+ p- .", Expect::Zero),
    ex("f3 zero 2", PQ, Op::F, "Q: q+ . q-; P: p+ p- .", Expect::Zero),
    ex("f3 zero 3", PQ, Op::F, "Q: q+ . q-; P: . p+ p-", Expect::Zero),
    ex("f3 zero 4", PQ, Op::F, "Q: q'- q+ q-; P: . p+ p-", Expect::Zero),
    ex("rows alike 1", PQ, Op::X, "Q: * q+ o q- * . *; P: * p+ o p- * . *", Expect::Zero),
    ex("rows alike 1", PQ, Op::U, "Q: * q+ o q- * . *; P: * p+ o p- * . *", Expect::Zero),
    ex("rows alike 1", PQ, Op::F, "Q: * q+ o q- * . *; P: * p+ o p- * . *", Expect::Zero),
    ex("rows alike 2", PQ, Op::X, "Q: * q+ o . o q- *; P: * p+ o . o p- *", Expect::Zero),
    ex("rows alike 2", PQ, Op::U, "Q: * q+ o . o q- *; P: * p+ o . o p- *", Expect::Zero),
    ex("rows alike 2", PQ, Op::F, "Q: * q+ o . o q- *; P: * p+ o . o p- *", Expect::Zero),
    ex("rows alike 3", PQ, Op::X, "Q: * . * q+ o q- *; P: * . * p+ o p- *", Expect::Zero),
    ex("rows alike 3", PQ, Op::U, "Q: * . * q+ o q- *; P: * . * p+ o p- *", Expect::Zero),
    ex("rows alike 3", PQ, Op::F, "Q: * . * q+ o q- *; P: * . * p+ o p- *", Expect::Zero),
    ex("X4 zero 1", PQ, Op::X, "Q: * q+ o q- * q'+ o . o; P: * p+ o p- * p'+ o . o", Expect::Zero),
    ex("X4 zero 2", PQ, Op::X, "Q: o q'- * q+ o q- * q'+ o; P: * . * p+ o p- * p'+ o", Expect::Zero),
    ex("X4 zero 3", PQ, Op::X, "Q: * q+ o q- * q'+ o . o; P: * p+ o p- * . * p'+ o", Expect::Zero),
    ex("X4 zero 4", PQ, Op::X, "Q: * q+ o . o q- * q'+ o; P: * p+ o p- * . * p'+ o", Expect::Zero),
    ex("X4 zero 5", PQ, Op::X, "Q: * q+ o q- * q'+ o . o; P: * p+ o p- * p'+ o p'- *", Expect::Zero),
    ex(
        "f4 with two terms",
        PQRS,
        Op::F,
        "S: * s+ o s- * . * . *; R: * r+ o . o r- * . *; Q: * . * . * q+ o q- *; P: * . * p+ o . o p- *",
        Expect::Terms(&["ccwc", "cwcc"]),
    ),
    ex("X5 with an on-on doubly occupied pair", PQR, Op::X, "P: p+ p- . p'+ p'-; Q: q'- . q+ q- .; R: . r+ r- . r'+", Expect::Zero),
    ex("X4 nonzero 1", PQ, Op::X, "P: p+ p- p'+ .; Q: q+ . q- q'+", Expect::TightClass),
    ex("X4 nonzero 2", PQ, Op::X, "P: p+ p- p'+ .; Q: . q+ q- q'+", Expect::TightClass),
    ex("X4 nonzero 3", PQ, Op::X, "P: p+ p- . p'+; Q: . q+ q- q'+", Expect::TightClass),
    ex("X4 nonzero 4", PQ, Op::X, "P: p+ . p- p'+; Q: q+ q- q'+ .", Expect::TightClass),
    ex("X4 nonzero 5", PQ, Op::X, "P: p'- p+ p- p'+; Q: q+ q- . q'+", Expect::TightClass),
    ex("X4 nonzero 6", PQ, Op::X, "P: p'- p+ p- p'+; Q: q+ . q- q'+", Expect::TightClass),
    ex("X4 nonzero 7", PQ, Op::X, "P: p'- p+ p- p'+; Q: q'- q+ . q-", Expect::TightClass),
    ex("X4 nonzero 8", PQ, Op::X, "P: p'- p+ p- p'+; Q: q'- . q+ q-", Expect::TightClass),
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub example: WorkedExample,
    pub line: String,
    pub as_expected: bool,
}

/// Quotient-mode engines with the default ordering, one per pair list.
pub struct ExampleRunner {
    engines: Vec<(&'static [&'static str], AinfEngine)>,
}

impl Default for ExampleRunner {
    fn default() -> Self {
        Self::new()
    }
}

impl ExampleRunner {
    pub fn new() -> Self {
        ExampleRunner { engines: Vec::new() }
    }

    pub fn engine(&mut self, pairs: &'static [&'static str]) -> &AinfEngine {
        let pos = match self.engines.iter().position(|(p, _)| *p == pairs) {
            Some(i) => i,
            None => {
                let alg = Arc::new(Algebra::new(ArcDiagram::disjoint_fragments(pairs)));
                let ord = PairOrdering::default_for(alg.arc_diagram());
                self.engines.push((pairs, AinfEngine::new(alg, ord, EngineConfig::default())));
                self.engines.len() - 1
            }
        };
        &self.engines[pos].1
    }

    /// The engines created so far, with their memo tables.
    pub fn engines(&self) -> impl Iterator<Item = &AinfEngine> {
        self.engines.iter().map(|(_, e)| e)
    }

    pub fn run(&mut self, ex: &WorkedExample) -> Result<Outcome, ExampleError> {
        let engine = self.engine(ex.pairs);
        let alg = engine.algebra();
        let m = parse_tensor(alg, ex.input).map_err(|source| ExampleError::Shorthand {
            name: ex.name.to_string(),
            source,
        })?;
        let engine_err = |source| ExampleError::Engine {
            name: ex.name.to_string(),
            source,
        };
        let composite = HData::compose_all(&m).expect("parsed tensors are viable");
        let (output, value) = evaluate(engine, ex.op, &m).map_err(engine_err)?;
        let as_expected = match (value, ex.expect) {
            (Value::Class(x), Expect::Zero) => x.is_zero(),
            (Value::Class(x), Expect::TightClass) => x == HomologyClass::Nonzero(composite),
            (Value::Element(v), Expect::Zero) => v.is_zero(),
            (Value::Element(v), Expect::CrossedAtTwisted) => crossed_at_twisted(alg, &m, &v),
            (Value::Element(v), Expect::Terms(words)) => {
                let got: BTreeSet<String> = v.iter().map(|d| variant_word(alg, d)).collect();
                got.len() == v.len() && got == words.iter().map(|w| w.to_string()).collect()
            }
            _ => false,
        };
        Ok(Outcome {
            example: *ex,
            line: transcript_line(engine, ex.op, &m, &output),
            as_expected,
        })
    }
}

pub enum Value {
    Class(HomologyClass),
    Element(Element),
}

/// Computes one operation and renders it the way transcripts print outputs.
pub fn evaluate(engine: &AinfEngine, op: Op, m: &[HData]) -> Result<(String, Value), EngineError> {
    let alg = engine.algebra();
    let ord = engine.ordering();
    Ok(match op {
        Op::X => {
            let x = engine.x(m)?;
            let text = match x {
                HomologyClass::Zero => "0".to_string(),
                HomologyClass::Nonzero(h) => format!("class [{}]", format_diagram(alg, ord, &engine.f1(&h))),
            };
            (text, Value::Class(x))
        }
        Op::F | Op::U => {
            let v = if op == Op::F { engine.f(m)? } else { engine.u(m)? };
            (format_element(alg, ord, &v), Value::Element(v))
        }
    })
}

/// `op input -> output`, the line format of transcripts.
pub fn transcript_line(engine: &AinfEngine, op: Op, m: &[HData], output: &str) -> String {
    format!("{} {} -> {}", op.name(), format_tensor(engine.algebra(), engine.ordering(), m), output)
}

fn variant_word(alg: &Algebra, d: &Diagram) -> String {
    alg.pairs()
        .map(|p| match d.variant(p) {
            Variant::U => 'u',
            Variant::W => 'w',
            Variant::C => 'c',
            Variant::G(_) => 'g',
            Variant::CPair => 'x',
        })
        .collect()
}

fn crossed_at_twisted(alg: &Algebra, m: &[HData], value: &Element) -> bool {
    let mut terms = value.iter();
    let (Some(d), None) = (terms.next(), terms.next()) else {
        return false;
    };
    alg.pairs().all(|p| {
        let twisted = classify_class_tensor_local(alg, m, p) == Ok(TensorTightness::Twisted);
        match d.variant(p) {
            Variant::C => twisted,
            Variant::U | Variant::G(_) => !twisted,
            Variant::W | Variant::CPair => false,
        }
    })
}

pub fn run_catalogue() -> Result<Vec<Outcome>, ExampleError> {
    let mut runner = ExampleRunner::new();
    CATALOGUE.iter().map(|ex| runner.run(ex)).collect()
}

/// The expected transcript of [`CATALOGUE`].
pub const GOLDEN: &str = include_str!("../tests/golden/worked_examples.txt");

/// The transcript compared against the golden file: one line per example.
pub fn transcript(outcomes: &[Outcome]) -> String {
    outcomes.iter().map(|o| format!("{}\n", o.line)).collect()
}
