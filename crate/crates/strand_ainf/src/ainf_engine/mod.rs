//! The A∞ operations `X_n` on homology and the quasi-isomorphism components
//! `f_n`, built by the Kadeishvili recursion from a pair ordering.
//!
//! Inputs are class tensors: sequences of tight H-data, each standing for the
//! nonzero homology class of its summand. In quotient mode the values of `f_n`
//! are standard-form representatives modulo F; in full mode they are exact
//! elements of the algebra.

use std::sync::Arc;

use dashmap::DashMap;
use rustc_hash::FxBuildHasher;
pub use linalg_z2::Extremal;
use linalg_z2::{BitMatrix, BitVec};
use rayon::prelude::*;
use thiserror::Error;

use crate::arc_diagram::{PairId, PairOrdering, Slot};
use crate::homology::{
    classify_hdata, homology_class_of, project, solve_boundary, Constraint, HDataTightness, HomologyClass,
    HomologyError, Summand,
};
use crate::strand_core::{Algebra, Diagram, Element, HData, HalfInt, LocalClass, StrandError, Variant};
use crate::tensor_class::representative;

pub mod verify;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("creation at pair {0} needs every term once occupied and all-on there")]
    CreationPrecondition(usize),
    #[error("class tensor entry {0} is not tight H-data")]
    NotTight(usize),
    #[error("U_n is not a cycle on {0}")]
    UnNotCycle(String),
    #[error("f1 X_n + U_n has no preimage on {0}")]
    NoPreimage(String),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Strand(#[from] StrandError),
}

pub type ClassTensor = Vec<HData>;

/// Sizes the global worker pool from `STRAND_AINF_THREADS`, if set. Has no
/// effect once the pool exists.
pub fn init_threads() {
    if let Some(n) = std::env::var("STRAND_AINF_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Cycle and creation choices.
pub trait ChoiceFunctions: Send + Sync {
    /// The place whose strands represent a doubly occupied all-on pair.
    fn cycle_place(&self, hd: &HData, pair: PairId) -> Slot;
    /// The once occupied all-on pair at which to insert a crossing.
    fn creation_pair(&self, alg: &Algebra, hd: &HData) -> Option<PairId>;
}

/// Choices induced by a pair ordering: the unprimed place, and the least
/// once occupied all-on pair.
#[derive(Debug, Clone)]
pub struct OrderingChoices(pub PairOrdering);

impl ChoiceFunctions for OrderingChoices {
    fn cycle_place(&self, _hd: &HData, pair: PairId) -> Slot {
        self.0.unprimed(pair)
    }

    fn creation_pair(&self, alg: &Algebra, hd: &HData) -> Option<PairId> {
        self.0
            .order()
            .iter()
            .copied()
            .find(|&p| matches!(alg.local_class(hd, p), LocalClass::Once11(_)))
    }
}

/// Inserts a crossing at `pair`: `w` becomes `c` and `c` dies.
pub fn creation(alg: &Algebra, pair: PairId, x: &Element) -> Result<Element, EngineError> {
    let mut out = Vec::with_capacity(x.len());
    for d in x.iter() {
        if !matches!(alg.local_class(&d.hd, pair), LocalClass::Once11(_)) {
            return Err(EngineError::CreationPrecondition(pair.0));
        }
        if d.variant(pair) == Variant::W {
            out.push(d.with_variant(pair, Variant::C));
        }
    }
    Ok(Element::from_terms(out))
}

/// Dimension of the span of the creation operators at the once occupied
/// all-on pairs of `hd`, each restricted to the level `level` cycles.
pub fn creation_span_dim(alg: &Algebra, hd: &HData, level: usize) -> Result<usize, EngineError> {
    let ord = PairOrdering::default_for(alg.arc_diagram());
    let summand = Summand::new(alg, &ord, hd);
    let cycles = summand.cycle_basis(level);
    let dim = summand.dim();
    let mut columns = Vec::new();
    for p in alg.pairs().filter(|&p| matches!(alg.local_class(hd, p), LocalClass::Once11(_))) {
        let mut column = BitVec::zeros(dim * cycles.len());
        for (k, z) in cycles.iter().enumerate() {
            for i in summand.vector(&creation(alg, p, z)?).ones() {
                column.set(k * dim + i, true);
            }
        }
        columns.push(column);
    }
    Ok(BitMatrix::from_columns(dim * cycles.len(), &columns).map_or(0, |m| m.rank()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Quotient,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: Mode,
    /// Which preimage to take on tight summands in full mode.
    pub solver: Extremal,
    /// Tensors longer than this are recomputed rather than stored.
    pub memo_len: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Quotient,
            solver: Extremal::Least,
            memo_len: usize::MAX,
        }
    }
}

pub struct AinfEngine {
    alg: Arc<Algebra>,
    ord: PairOrdering,
    choices: Arc<dyn ChoiceFunctions>,
    config: EngineConfig,
    f_memo: DashMap<ClassTensor, Arc<Element>, FxBuildHasher>,
    zero: Arc<Element>,
    x_memo: DashMap<ClassTensor, HomologyClass, FxBuildHasher>,
}

impl AinfEngine {
    pub fn new(alg: Arc<Algebra>, ord: PairOrdering, config: EngineConfig) -> Self {
        let choices = Arc::new(OrderingChoices(ord.clone()));
        Self::with_choices(alg, ord, choices, config)
    }

    pub fn with_choices(
        alg: Arc<Algebra>,
        ord: PairOrdering,
        choices: Arc<dyn ChoiceFunctions>,
        config: EngineConfig,
    ) -> Self {
        AinfEngine {
            alg,
            ord,
            choices,
            config,
            f_memo: DashMap::with_hasher(FxBuildHasher),
            zero: Arc::new(Element::zero()),
            x_memo: DashMap::with_hasher(FxBuildHasher),
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn ordering(&self) -> &PairOrdering {
        &self.ord
    }

    pub fn config(&self) -> EngineConfig {
        self.config
    }

    pub fn memo_sizes(&self) -> (usize, usize) {
        (self.f_memo.len(), self.x_memo.len())
    }

    /// Every stored nonzero `f_n` value, sorted by input.
    pub fn memo_f(&self) -> Vec<(ClassTensor, Element)> {
        let mut v: Vec<_> = self
            .f_memo
            .iter()
            .filter(|e| e.key().len() >= 2 && !e.value().is_zero())
            .map(|e| (e.key().clone(), Element::clone(e.value())))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Every stored nonzero `X_n` value, sorted by input.
    pub fn memo_x(&self) -> Vec<(ClassTensor, HData)> {
        let mut v: Vec<_> = self
            .x_memo
            .iter()
            .filter_map(|e| e.value().hdata().map(|h| (e.key().clone(), h)))
            .collect();
        v.sort();
        v
    }

    fn check_input(&self, m: &[HData]) -> Result<(), EngineError> {
        for (i, h) in m.iter().enumerate() {
            if classify_hdata(&self.alg, h) != HDataTightness::Tight {
                return Err(EngineError::NotTight(i));
            }
        }
        Ok(())
    }

    /// The tight cycle representing a class.
    pub fn f1(&self, hd: &HData) -> Diagram {
        representative(&self.alg, hd, |p| self.choices.cycle_place(hd, p))
    }

    fn composite(&self, m: &[HData]) -> Option<(HData, HDataTightness)> {
        let hd = HData::compose_all(m)?;
        Some((hd, classify_hdata(&self.alg, &hd)))
    }

    fn describe(&self, m: &[HData]) -> String {
        format!("{m:?}")
    }

    /// `U_n(M)`, projected to standard form in quotient mode.
    pub fn u(&self, m: &[HData]) -> Result<Element, EngineError> {
        self.check_input(m)?;
        self.u_inner(m)
    }

    fn u_inner(&self, m: &[HData]) -> Result<Element, EngineError> {
        let n = m.len();
        let mut acc: Vec<Diagram> = Vec::new();
        match self.composite(m) {
            Some((_, HDataTightness::Singular)) | None => return Ok(Element::zero()),
            _ => {}
        }
        for j in 1..n {
            let a = self.f_inner(&m[..j])?;
            if a.is_zero() {
                continue;
            }
            let b = self.f_inner(&m[j..])?;
            if b.is_zero() {
                continue;
            }
            acc.extend(self.alg.mul(&a, &b).iter().copied());
        }
        let mut buf = Vec::with_capacity(n);
        for j in 2..n {
            for k in 0..=n - j {
                if let HomologyClass::Nonzero(h) = self.x_inner(&m[k..k + j])? {
                    buf.clear();
                    buf.extend_from_slice(&m[..k]);
                    buf.push(h);
                    buf.extend_from_slice(&m[k + j..]);
                    acc.extend(self.f_inner(&buf)?.iter().copied());
                }
            }
        }
        let u = Element::from_terms(acc);
        Ok(match self.config.mode {
            Mode::Quotient => project(&self.alg, &u),
            Mode::Full => u,
        })
    }

    /// `X_n(M)`.
    pub fn x(&self, m: &[HData]) -> Result<HomologyClass, EngineError> {
        self.check_input(m)?;
        self.x_inner(m)
    }

    pub(crate) fn x_inner(&self, m: &[HData]) -> Result<HomologyClass, EngineError> {
        if m.len() < 2 {
            return Ok(HomologyClass::Zero);
        }
        let hd = match self.composite(m) {
            Some((hd, HDataTightness::Tight)) => hd,
            _ => return Ok(HomologyClass::Zero),
        };
        if let Some(v) = self.x_memo.get(m) {
            return Ok(*v);
        }
        let class = match self.config.mode {
            Mode::Full => homology_class_of(&self.alg, &self.u_inner(m)?).map_err(|e| match e {
                HomologyError::NotCycle => EngineError::UnNotCycle(self.describe(m)),
                e => e.into(),
            })?,
            // The class is the parity of crossingless terms of U_n. Terms
            // through X_j are values of f, which are crossed, so only products
            // f_j f_{n-j} can contribute.
            Mode::Quotient => {
                if self.crossingless_product_parity(m)? {
                    HomologyClass::Nonzero(hd)
                } else {
                    HomologyClass::Zero
                }
            }
        };
        if m.len() <= self.config.memo_len {
            self.x_memo.insert(m.to_vec(), class);
        }
        Ok(class)
    }

    /// Parity of the crossingless terms in `Σ f_j f_{n-j}`, counted with
    /// multiplicity.
    fn crossingless_product_parity(&self, m: &[HData]) -> Result<bool, EngineError> {
        let mut odd = false;
        for j in 1..m.len() {
            let a = self.f_inner(&m[..j])?;
            if a.is_zero() {
                continue;
            }
            let b = self.f_inner(&m[j..])?;
            for x in a.iter() {
                for y in b.iter() {
                    if self.alg.multiply(x, y).is_some_and(|d| d.is_crossingless()) {
                        odd = !odd;
                    }
                }
            }
        }
        Ok(odd)
    }

    /// `f_n(M)`; for `n = 1` the chosen cycle.
    pub fn f(&self, m: &[HData]) -> Result<Element, EngineError> {
        self.check_input(m)?;
        Ok((*self.f_inner(m)?).clone())
    }

    pub(crate) fn f_inner(&self, m: &[HData]) -> Result<Arc<Element>, EngineError> {
        if let Some(v) = self.f_memo.get(m) {
            return Ok(Arc::clone(&v));
        }
        if m.len() == 1 {
            let v = Arc::new(Element::from_diagram(self.f1(&m[0])));
            self.f_memo.insert(m.to_vec(), Arc::clone(&v));
            return Ok(v);
        }
        let (hd, tightness) = match self.composite(m) {
            Some((_, HDataTightness::Singular)) | None => return Ok(Arc::clone(&self.zero)),
            Some(c) => c,
        };
        if tightness == HDataTightness::Tight && self.config.mode == Mode::Quotient {
            return Ok(Arc::clone(&self.zero));
        }
        let u = self.u_inner(m)?;
        let value = match tightness {
            HDataTightness::Twisted => {
                let pair = self
                    .choices
                    .creation_pair(&self.alg, &hd)
                    .expect("twisted H-data has a once occupied all-on pair");
                let v = creation(&self.alg, pair, &u)?;
                match self.config.mode {
                    Mode::Quotient => project(&self.alg, &v),
                    Mode::Full => v,
                }
            }
            _ => {
                let mut rhs = u;
                if let HomologyClass::Nonzero(h) = self.x_inner(m)? {
                    rhs += &Element::from_diagram(self.f1(&h));
                }
                if rhs.is_zero() {
                    rhs
                } else {
                    solve_boundary(&self.alg, &self.ord, &rhs, Constraint::InsideF, self.config.solver)
                        .map_err(|_| EngineError::NoPreimage(self.describe(m)))?
                }
            }
        };
        let value = Arc::new(value);
        if m.len() <= self.config.memo_len {
            self.f_memo.insert(m.to_vec(), Arc::clone(&value));
        }
        Ok(value)
    }

    /// Maslov grading of a class tensor, from its chosen cycles.
    pub fn tensor_maslov(&self, m: &[HData]) -> HalfInt {
        let iotas: Vec<HalfInt> = m.iter().map(|h| self.alg.maslov(&self.f1(h))).collect();
        self.alg.maslov_tensor(m, &iotas)
    }
}

/// Tight H-data of an algebra, grouped by initial idempotent for fast chaining.
#[derive(Debug, Clone)]
pub struct TightIndex {
    pub all: Vec<HData>,
    by_source: std::collections::HashMap<u32, Vec<HData>>,
}

impl TightIndex {
    pub fn new(alg: &Algebra) -> Self {
        let all: Vec<HData> = alg
            .all_hdata()
            .into_iter()
            .filter(|h| classify_hdata(alg, h) == HDataTightness::Tight)
            .collect();
        let mut by_source: std::collections::HashMap<u32, Vec<HData>> = Default::default();
        for h in &all {
            by_source.entry(h.s).or_default().push(*h);
        }
        TightIndex { all, by_source }
    }

    pub fn starting_at(&self, s: u32) -> &[HData] {
        self.by_source.get(&s).map_or(&[], Vec::as_slice)
    }

    /// Calls `visit` on every viable class tensor of length `n`, in parallel
    /// over the first factor.
    pub fn par_visit<F>(&self, n: usize, visit: F)
    where
        F: Fn(&[HData]) + Sync,
    {
        if n == 0 {
            return;
        }
        self.all.par_iter().for_each(|h| {
            let mut stack = vec![*h];
            visit_mut(self, &mut stack, h.h, n, &mut |m| visit(m));
        });
    }

    /// All viable class tensors of length `n`, sorted.
    pub fn collect(&self, n: usize) -> Vec<ClassTensor> {
        let out = std::sync::Mutex::new(Vec::new());
        self.par_visit(n, |m| out.lock().expect("no panics while held").push(m.to_vec()));
        let mut v = out.into_inner().expect("no panics while held");
        v.sort();
        v
    }
}

/// Outcome of one family of checks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
    /// The first few failures, with witnesses.
    pub witnesses: Vec<String>,
}

const MAX_WITNESSES: usize = 10;

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.failures += other.failures;
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{}\t{}\tchecked={}\tfailures={}",
            self.name,
            if self.passed() { "ok" } else { "FAIL" },
            self.checked,
            self.failures
        )
    }
}

/// Runs `check` over every viable class tensor of length `n`, collecting a report.
pub fn par_check<F>(index: &TightIndex, n: usize, name: &str, check: F) -> Report
where
    F: Fn(&[HData], &mut Report) + Sync,
{
    par_check_many(index, n, &[name], |m, reports| check(m, &mut reports[0]))
        .pop()
        .expect("one report")
}

/// Like [`par_check`] with one report per name.
pub fn par_check_many<F>(index: &TightIndex, n: usize, names: &[&str], check: F) -> Vec<Report>
where
    F: Fn(&[HData], &mut [Report]) + Sync,
{
    let fresh = || names.iter().map(|s| Report::new(*s)).collect::<Vec<_>>();
    if n == 0 {
        return fresh();
    }
    index
        .all
        .par_iter()
        .map(|h| {
            let mut local = fresh();
            let mut stack = vec![*h];
            visit_mut(index, &mut stack, h.h, n, &mut |m| check(m, &mut local));
            local
        })
        .reduce(fresh, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
            a
        })
}

fn visit_mut(index: &TightIndex, stack: &mut Vec<HData>, covered: u64, n: usize, visit: &mut dyn FnMut(&[HData])) {
    if stack.len() == n {
        visit(stack);
        return;
    }
    let t = stack.last().expect("nonempty").t;
    for h in index.starting_at(t) {
        if h.h & covered != 0 {
            continue;
        }
        stack.push(*h);
        visit_mut(index, stack, covered | h.h, n, visit);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::ArcDiagram;
    use crate::shorthand::parse_tensor;
    use crate::strand_core::text::format_element;

    #[test]
    fn creation_spans_are_smaller_than_inverting_spaces() {
        use crate::homology::{inverting_space_dim_oracle, model_hdata};
        for (l, n, level, span, inverting) in [(1, 1, 0, 1, 2), (0, 4, 1, 4, 9)] {
            let names: Vec<String> = (0..l + n).map(|k| format!("P{k}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let alg = Algebra::new(ArcDiagram::disjoint_fragments(&refs));
            let hd = model_hdata(&alg, l, n);
            assert_eq!(creation_span_dim(&alg, &hd, level).unwrap(), span);
            assert_eq!(inverting_space_dim_oracle(&alg, &hd, level).unwrap(), inverting);
        }
    }

    fn engine(names: &[&str], mode: Mode) -> AinfEngine {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(names));
        let ord = PairOrdering::default_for(alg.arc_diagram());
        AinfEngine::new(
            Arc::new(alg),
            ord,
            EngineConfig {
                mode,
                ..Default::default()
            },
        )
    }

    fn show(e: &AinfEngine, x: &Element) -> String {
        format_element(e.algebra(), e.ordering(), x)
    }

    #[test]
    fn f2_crosses_the_twisted_pair() {
        let e = engine(&["P"], Mode::Quotient);
        let m = parse_tensor(e.algebra(), "P: * p'+ o p'- *").unwrap();
        assert_eq!(show(&e, &e.f(&m).unwrap()), "[P: 11 p'-,p'+ c]");
        assert!(e.x(&m).unwrap().is_zero());
    }

    #[test]
    fn u3_with_two_twisted_windows() {
        let e = engine(&["P", "Q"], Mode::Quotient);
        let m = parse_tensor(e.algebra(), "P: * p'+ o p'- * . *; Q: * . * q'+ o q'- *").unwrap();
        assert_eq!(
            show(&e, &e.u(&m).unwrap()),
            "[P: 11 p'-,p'+ w; Q: 11 q'-,q'+ c] + [P: 11 p'-,p'+ c; Q: 11 q'-,q'+ w]"
        );
    }

    #[test]
    fn u3_terms_cancel() {
        let e = engine(&["P"], Mode::Quotient);
        let m = parse_tensor(e.algebra(), "P: * p'+ o . o p'- *").unwrap();
        assert!(e.u(&m).unwrap().is_zero());
    }

    #[test]
    fn x3_of_a_pre_sesqui_critical_tensor() {
        let e = engine(&["P"], Mode::Quotient);
        let m = parse_tensor(e.algebra(), "P: o p- * p'+ o p'- *").unwrap();
        let x = e.x(&m).unwrap();
        let hd = x.hdata().expect("nonzero");
        assert_eq!(e.algebra().local_class(&hd, PairId(0)), LocalClass::PreSesqui01(Slot::Second));
    }

    #[test]
    fn f1_is_broken_at_the_unprimed_place() {
        let e = engine(&["P"], Mode::Quotient);
        let m = parse_tensor(e.algebra(), "P: * p±,p'± *").unwrap();
        assert_eq!(show(&e, &Element::from_diagram(e.f1(&m[0]))), "[P: 11 p-,p+,p'-,p'+ gp]");
        assert!(e.algebra().differential(&e.f1(&m[0])).is_zero());
    }

    #[test]
    fn creation_inverts_the_differential() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]));
        for hd in alg.all_hdata() {
            let Some(pair) = OrderingChoices(PairOrdering::default_for(alg.arc_diagram())).creation_pair(&alg, &hd)
            else {
                continue;
            };
            for d in alg.enumerate_diagrams(&hd) {
                let x = Element::from_diagram(d);
                let lhs = &creation(&alg, pair, &alg.d(&x)).unwrap() + &alg.d(&creation(&alg, pair, &x).unwrap());
                assert_eq!(lhs, x);
            }
        }
    }

    #[test]
    fn creation_rejects_other_summands() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P"]));
        let x = Element::from_diagram(alg.idempotent(1));
        assert_eq!(creation(&alg, PairId(0), &x), Err(EngineError::CreationPrecondition(0)));
    }

    #[test]
    fn full_mode_agrees_modulo_f() {
        let q = engine(&["P", "Q"], Mode::Quotient);
        let f = engine(&["P", "Q"], Mode::Full);
        let index = TightIndex::new(q.algebra());
        for m in index.collect(3) {
            assert_eq!(q.x(&m).unwrap(), f.x(&m).unwrap());
            assert_eq!(q.f(&m).unwrap(), project(f.algebra(), &f.f(&m).unwrap()));
        }
    }

    #[test]
    fn non_tight_inputs_are_errors() {
        let e = engine(&["P"], Mode::Quotient);
        let once = HData::new(0b0011, 1, 1);
        assert_eq!(e.f(&[once]), Err(EngineError::NotTight(0)));
    }
}
