//! Homology of H-data summands, boundary solving, and the ideal F.
//!
//! Within one summand the Maslov grading is a constant plus the number of
//! crossed pairs, so levels below are indexed by crossing count.

use std::collections::HashMap;

use linalg_z2::{BitMatrix, BitVec, Extremal};
use thiserror::Error;

use crate::arc_diagram::{PairId, PairOrdering};
use crate::strand_core::{Algebra, Diagram, Element, HData, LocalClass, StrandError, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("element is not a cycle")]
    NotCycle,
    #[error(transparent)]
    Strand(#[from] StrandError),
    #[error("the zero class has no representatives")]
    ZeroClass,
    #[error("no element has the requested boundary")]
    NoSolution,
    #[error("H-data is not twisted")]
    NotTwisted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HDataTightness {
    Tight,
    Twisted,
    Singular,
}

/// Counts of doubly occupied all-on pairs (`l`) and once occupied all-on pairs (`n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occupancy {
    pub l: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HomologyClass {
    Zero,
    /// The generator of the homology of a tight summand.
    Nonzero(HData),
}

impl HomologyClass {
    pub fn is_zero(&self) -> bool {
        matches!(self, HomologyClass::Zero)
    }

    pub fn hdata(&self) -> Option<HData> {
        match self {
            HomologyClass::Zero => None,
            HomologyClass::Nonzero(h) => Some(*h),
        }
    }
}

pub fn classify_hdata(alg: &Algebra, hd: &HData) -> HDataTightness {
    let mut tightness = HDataTightness::Tight;
    for p in alg.pairs() {
        match alg.local_class(hd, p) {
            LocalClass::Unrealizable => return HDataTightness::Singular,
            LocalClass::Once11(_) => tightness = HDataTightness::Twisted,
            _ => {}
        }
    }
    tightness
}

pub fn occupancy(alg: &Algebra, hd: &HData) -> Occupancy {
    let mut o = Occupancy { l: 0, n: 0 };
    for p in alg.pairs() {
        match alg.local_class(hd, p) {
            LocalClass::Doubly11 => o.l += 1,
            LocalClass::Once11(_) => o.n += 1,
            _ => {}
        }
    }
    o
}

pub fn crossings(d: &Diagram, pairs: usize) -> usize {
    d.crossed_pairs(pairs).count()
}

/// One H-data summand with its basis in ordering order and the matrix of `∂`.
#[derive(Debug, Clone)]
pub struct Summand {
    pub hd: HData,
    pub basis: Vec<Diagram>,
    index: HashMap<Diagram, usize>,
    pub boundary: BitMatrix,
    levels: Vec<usize>,
}

impl Summand {
    pub fn new(alg: &Algebra, ord: &PairOrdering, hd: &HData) -> Self {
        let mut basis = alg.enumerate_diagrams(hd);
        basis.sort_by_key(|d| alg.basis_key(d, ord));
        let index: HashMap<Diagram, usize> = basis.iter().enumerate().map(|(i, d)| (*d, i)).collect();
        let columns: Vec<BitVec> = basis
            .iter()
            .map(|d| BitVec::from_indices(basis.len(), alg.differential(d).iter().map(|e| index[e])))
            .collect();
        let boundary = BitMatrix::from_columns(basis.len(), &columns).expect("columns sized to the basis");
        let levels = basis.iter().map(|d| crossings(d, alg.pair_count())).collect();
        Summand {
            hd: *hd,
            basis,
            index,
            boundary,
            levels,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vector(&self, x: &Element) -> BitVec {
        BitVec::from_indices(self.dim(), x.iter().map(|d| self.index[d]))
    }

    pub fn element(&self, v: &BitVec) -> Element {
        Element::from_terms(v.ones().map(|i| self.basis[i]))
    }

    pub fn level(&self, i: usize) -> usize {
        self.levels[i]
    }

    pub fn max_level(&self) -> usize {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    fn level_columns(&self, n: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.levels[i] == n).collect()
    }

    /// Dimension of the diagrams at crossing level `n`.
    pub fn dim_level(&self, n: usize) -> usize {
        self.level_columns(n).len()
    }

    /// Dimension of the cycles at level `n`.
    pub fn cycles_dim(&self, n: usize) -> usize {
        let cols = self.level_columns(n);
        cols.len() - self.boundary.select_columns(&cols).rank()
    }

    /// A basis of the cycles at level `n`.
    pub fn cycle_basis(&self, n: usize) -> Vec<Element> {
        let cols = self.level_columns(n);
        self.boundary
            .select_columns(&cols)
            .kernel_basis()
            .iter()
            .map(|k| Element::from_terms(k.ones().map(|j| self.basis[cols[j]])))
            .collect()
    }

    /// Dimension of the boundaries at level `n`, the image of level `n + 1`.
    pub fn boundaries_dim(&self, n: usize) -> usize {
        self.boundary.select_columns(&self.level_columns(n + 1)).rank()
    }

    /// Total homology dimension: `dim - 2 rank ∂`, since `∂² = 0`.
    pub fn homology_dim(&self) -> usize {
        self.dim() - 2 * self.boundary.rank()
    }
}

/// Homology dimension of a summand computed by linear algebra.
pub fn homology_dim(alg: &Algebra, hd: &HData) -> usize {
    let ord = PairOrdering::default_for(alg.arc_diagram());
    Summand::new(alg, &ord, hd).homology_dim()
}

/// All crossingless diagrams with the class's H-data.
pub fn representatives(alg: &Algebra, m: &HomologyClass) -> Result<Vec<Diagram>, HomologyError> {
    let hd = m.hdata().ok_or(HomologyError::ZeroClass)?;
    Ok(alg
        .enumerate_diagrams(&hd)
        .into_iter()
        .filter(Diagram::is_crossingless)
        .collect())
}

fn check_cycle(alg: &Algebra, x: &Element) -> Result<Option<HData>, HomologyError> {
    let hd = x.hdata()?;
    if !alg.d(x).is_zero() {
        return Err(HomologyError::NotCycle);
    }
    Ok(hd)
}

/// Class of a cycle: nonzero exactly when the summand is tight and an odd
/// number of crossingless diagrams appear.
pub fn homology_class_of(alg: &Algebra, x: &Element) -> Result<HomologyClass, HomologyError> {
    let Some(hd) = check_cycle(alg, x)? else {
        return Ok(HomologyClass::Zero);
    };
    if classify_hdata(alg, &hd) != HDataTightness::Tight {
        return Ok(HomologyClass::Zero);
    }
    let odd = x.iter().filter(|d| d.is_crossingless()).count() % 2 == 1;
    Ok(if odd {
        HomologyClass::Nonzero(hd)
    } else {
        HomologyClass::Zero
    })
}

/// Class of a cycle decided by asking whether it is a boundary.
pub fn homology_class_of_oracle(alg: &Algebra, x: &Element) -> Result<HomologyClass, HomologyError> {
    let Some(hd) = check_cycle(alg, x)? else {
        return Ok(HomologyClass::Zero);
    };
    let ord = PairOrdering::default_for(alg.arc_diagram());
    let summand = Summand::new(alg, &ord, &hd);
    Ok(if summand.boundary.in_image(&summand.vector(x)) {
        HomologyClass::Zero
    } else {
        HomologyClass::Nonzero(hd)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    InsideF,
    Unconstrained,
}

pub fn in_ideal_f(alg: &Algebra, d: &Diagram) -> bool {
    alg.pairs().any(|p| d.variant(p) == Variant::CPair)
}

/// Standard-form projection to the quotient by F.
pub fn project(alg: &Algebra, x: &Element) -> Element {
    Element::from_terms(x.iter().copied().filter(|d| !in_ideal_f(alg, d)))
}

/// An element of the same summand, one crossing level up, whose boundary is
/// `x`. Picks the lexicographic extreme in ordering order.
pub fn solve_boundary(
    alg: &Algebra,
    ord: &PairOrdering,
    x: &Element,
    constraint: Constraint,
    which: Extremal,
) -> Result<Element, HomologyError> {
    let Some(hd) = x.hdata()? else {
        return Ok(Element::zero());
    };
    let summand = Summand::new(alg, ord, &hd);
    let n = alg.pair_count();
    let mut levels: Vec<usize> = x.iter().map(|d| crossings(d, n)).collect();
    levels.dedup();
    let allowed: Vec<usize> = (0..summand.dim())
        .filter(|&i| levels.len() != 1 || summand.level(i) == levels[0] + 1)
        .filter(|&i| constraint == Constraint::Unconstrained || in_ideal_f(alg, &summand.basis[i]))
        .collect();
    let v = summand
        .boundary
        .solve(&summand.vector(x), Some(&allowed), which)
        .map_err(|_| HomologyError::NoSolution)?;
    Ok(summand.element(&v))
}

fn binom(a: i64, b: i64) -> u64 {
    if b < 0 || a < 0 || b > a {
        return 0;
    }
    let mut r: u64 = 1;
    for k in 0..b as u64 {
        r = r * (a as u64 - k) / (k + 1);
    }
    r
}

/// Dimension counts of a summand, indexed by crossing level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimReport {
    pub total: u64,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

/// Closed forms for a summand with `l` doubly and `n` once occupied all-on pairs.
/// Diagram counts use the sum over crossed doubly occupied pairs and boundary
/// counts the sum over pairs differing from a fixed crossingless reference.
pub fn dim_closed_form(l: usize, n: usize) -> DimReport {
    let (l, n) = (l as i64, n as i64);
    let levels = (l + n + 1) as usize;
    let a = (0..levels as i64)
        .map(|k| (0..=l).map(|i| (1u64 << (l - i)) * binom(l, i) * binom(n, k - i)).sum())
        .collect();
    let b = (0..levels as i64)
        .map(|k| (0..=l).map(|j| binom(l, j) * binom(n + j - 1, k)).sum())
        .collect();
    DimReport {
        total: 3u64.pow(l as u32) << n,
        a,
        b,
    }
}

/// The boundary count summed over crossed doubly occupied pairs. It agrees
/// with [`dim_closed_form`] whenever `n ≥ 1`.
pub fn boundaries_by_crossed_pairs(l: usize, n: usize, level: usize) -> u64 {
    let (l, n, k) = (l as i64, n as i64, level as i64);
    (0..=l).map(|i| (1u64 << (l - i)) * binom(l, i) * binom(n - 1, k - i)).sum()
}

pub fn dim_oracle(alg: &Algebra, hd: &HData) -> DimReport {
    let ord = PairOrdering::default_for(alg.arc_diagram());
    let s = Summand::new(alg, &ord, hd);
    let occ = occupancy(alg, hd);
    let levels = occ.l + occ.n + 1;
    DimReport {
        total: s.dim() as u64,
        a: (0..levels).map(|k| s.dim_level(k) as u64).collect(),
        b: (0..levels).map(|k| s.boundaries_dim(k) as u64).collect(),
    }
}

/// Dimension of the affine space of maps inverting `∂` from level `level`
/// cycles to level `level + 1`, by closed form.
pub fn inverting_space_dim(l: usize, n: usize, level: usize) -> Result<u64, HomologyError> {
    if n == 0 {
        return Err(HomologyError::NotTwisted);
    }
    let b = dim_closed_form(l, n).b;
    let at = |k: usize| b.get(k).copied().unwrap_or(0);
    Ok(at(level) * at(level + 1))
}

pub fn inverting_space_dim_oracle(alg: &Algebra, hd: &HData, level: usize) -> Result<u64, HomologyError> {
    if classify_hdata(alg, hd) != HDataTightness::Twisted {
        return Err(HomologyError::NotTwisted);
    }
    let ord = PairOrdering::default_for(alg.arc_diagram());
    let s = Summand::new(alg, &ord, hd);
    Ok((s.cycles_dim(level) * s.cycles_dim(level + 1)) as u64)
}

/// Builds H-data with `l` doubly occupied and `n` once occupied all-on pairs
/// on a diagram of `l + n` disjoint fragments.
pub fn model_hdata(alg: &Algebra, l: usize, n: usize) -> HData {
    assert!(alg.pair_count() >= l + n);
    let z = alg.arc_diagram();
    let mut hd = HData::default();
    for k in 0..l + n {
        let pair = PairId(k);
        let f = z.fragment(pair);
        let steps: &[usize] = if k < l { &[0, 1, 2, 3] } else { &[0, 1] };
        for &j in steps {
            hd.h |= 1 << f.steps[j].0;
        }
        hd.s |= 1 << k;
        hd.t |= 1 << k;
    }
    hd
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::{ArcDiagram, Slot};

    fn alg(n: usize) -> Algebra {
        let names: Vec<String> = (0..n).map(|k| format!("P{k}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Algebra::new(ArcDiagram::disjoint_fragments(&refs))
    }

    #[test]
    fn classification_examples() {
        let a = alg(2);
        assert_eq!(classify_hdata(&a, &model_hdata(&a, 1, 0)), HDataTightness::Tight);
        assert_eq!(classify_hdata(&a, &model_hdata(&a, 0, 1)), HDataTightness::Twisted);
        let singular = HData::new(0b1001, 0, 0);
        assert_eq!(classify_hdata(&a, &singular), HDataTightness::Singular);
        assert_eq!(homology_dim(&a, &singular), 0);
    }

    #[test]
    fn doubly_occupied_boundary() {
        let a = alg(1);
        let hd = model_hdata(&a, 1, 0);
        let ds = a.enumerate_diagrams(&hd);
        let g = |s| *ds.iter().find(|d| d.variant(PairId(0)) == Variant::G(s)).unwrap();
        let sum = Element::from_terms([g(Slot::First), g(Slot::Second)]);
        assert_eq!(homology_class_of(&a, &sum).unwrap(), HomologyClass::Zero);
        assert_eq!(
            homology_class_of(&a, &Element::from_diagram(g(Slot::First))).unwrap(),
            HomologyClass::Nonzero(hd)
        );
        let ord = PairOrdering::default_for(a.arc_diagram());
        let c = solve_boundary(&a, &ord, &sum, Constraint::InsideF, Extremal::Least).unwrap();
        assert_eq!(c.len(), 1);
        assert!(in_ideal_f(&a, &c.terms()[0]));
        assert_eq!(
            solve_boundary(&a, &ord, &Element::from_diagram(g(Slot::First)), Constraint::Unconstrained, Extremal::Least),
            Err(HomologyError::NoSolution)
        );
        assert_eq!(representatives(&a, &HomologyClass::Nonzero(hd)).unwrap().len(), 2);
    }

    #[test]
    fn closed_form_spot_values() {
        assert_eq!(dim_closed_form(1, 1).total, 6);
        let r = dim_closed_form(0, 2);
        assert_eq!((r.a[1], r.b[0]), (2, 1));
        assert_eq!(inverting_space_dim(1, 1, 0).unwrap(), 2);
        assert_eq!(inverting_space_dim(0, 4, 1).unwrap(), 9);
        assert_eq!(inverting_space_dim(0, 1, 0).unwrap(), 0);
    }

    #[test]
    fn crossed_pair_form_needs_a_once_occupied_pair() {
        assert_eq!(boundaries_by_crossed_pairs(1, 0, 0), 0);
        assert_eq!(dim_closed_form(1, 0).b[0], 1);
        assert_eq!(boundaries_by_crossed_pairs(2, 3, 1), dim_closed_form(2, 3).b[1]);
    }
}
