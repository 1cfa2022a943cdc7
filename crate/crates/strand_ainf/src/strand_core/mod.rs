//! Strand diagrams on an arc diagram, modulo non-viable diagrams.
//!
//! A diagram is stored as its H-data plus one 4-bit variant code per pair.
//! Everything is computed pair by pair from the rules in [`local`]; the
//! picture-level oracle in [`oracle`] regenerates those rules independently.

pub mod local;
pub mod oracle;
pub mod text;

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use thiserror::Error;

use crate::arc_diagram::{ArcDiagram, PairId, PairOrdering, PlaceId, Slot};

pub use local::{LocalClass, LocalDiagram, LocalHData, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrandError {
    #[error("step {step} has multiplicity {multiplicity}")]
    NonViable { step: usize, multiplicity: u32 },
    #[error("pair {0} has no local diagram for this H-data")]
    Unrealizable(String),
    #[error("variant {variant:?} is not allowed at pair {pair}")]
    BadVariant { pair: String, variant: Variant },
    #[error("element is not homogeneous")]
    NotHomogeneous,
}

/// A half-integer, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub fn from_doubled(d: i32) -> Self {
        HalfInt(d)
    }

    pub fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub fn doubled(self) -> i32 {
        self.0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, o: HalfInt) {
        self.0 += o.0;
    }
}

impl std::iter::Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(iter: I) -> HalfInt {
        HalfInt(iter.map(|h| h.0).sum())
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Step coverage (bit per global step) and idempotents (bit per pair).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HData {
    pub h: u64,
    pub s: u32,
    pub t: u32,
}

impl HData {
    pub fn new(h: u64, s: u32, t: u32) -> Self {
        HData { h, s, t }
    }

    pub fn idempotent(s: u32) -> Self {
        HData { h: 0, s, t: s }
    }

    pub fn is_idempotent(&self) -> bool {
        self.h == 0 && self.s == self.t
    }

    /// Builds H-data from step multiplicities, failing on any step covered twice.
    pub fn from_multiplicities(mult: &[u32], s: u32, t: u32) -> Result<Self, StrandError> {
        let mut h = 0u64;
        for (step, &m) in mult.iter().enumerate() {
            match m {
                0 => {}
                1 => h |= 1 << step,
                _ => {
                    return Err(StrandError::NonViable {
                        step,
                        multiplicity: m,
                    })
                }
            }
        }
        Ok(HData { h, s, t })
    }

    /// H-data of a product: coverage adds, idempotents compose. `None` when the
    /// result is not viable.
    pub fn compose(&self, next: &HData) -> Option<HData> {
        (self.t == next.s && self.h & next.h == 0).then_some(HData {
            h: self.h | next.h,
            s: self.s,
            t: next.t,
        })
    }

    /// H-data of a tensor, if the tensor is viable.
    pub fn compose_all<'a>(hds: impl IntoIterator<Item = &'a HData>) -> Option<HData> {
        let mut it = hds.into_iter();
        let first = *it.next()?;
        it.try_fold(first, |acc, h| acc.compose(h))
    }
}

/// A viable symmetrised diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    pub hd: HData,
    var: u64,
}

impl Diagram {
    pub fn variant(&self, pair: PairId) -> Variant {
        Variant::from_code((self.var >> (4 * pair.0) & 15) as u8).expect("stored codes are valid")
    }

    pub(crate) fn with_variant(mut self, pair: PairId, v: Variant) -> Self {
        self.var &= !(15u64 << (4 * pair.0));
        self.var |= u64::from(v.code()) << (4 * pair.0);
        self
    }

    pub fn variant_codes(&self) -> u64 {
        self.var
    }

    pub fn is_crossingless(&self) -> bool {
        (0..16).all(|k| !matches!(self.var >> (4 * k) & 15, 2 | 5))
    }

    pub fn crossed_pairs(&self, n: usize) -> impl Iterator<Item = PairId> + '_ {
        (0..n).map(PairId).filter(|&p| self.variant(p).is_crossed())
    }
}

/// A Z₂ sum of diagrams, kept sorted without repeats.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Element(Vec<Diagram>);

impl Element {
    pub fn zero() -> Self {
        Element(Vec::new())
    }

    pub fn from_diagram(d: Diagram) -> Self {
        Element(vec![d])
    }

    /// Sums the given diagrams mod 2.
    pub fn from_terms(terms: impl IntoIterator<Item = Diagram>) -> Self {
        let mut v: Vec<Diagram> = terms.into_iter().collect();
        v.sort_unstable();
        let mut out: Vec<Diagram> = Vec::with_capacity(v.len());
        for d in v {
            if out.last() == Some(&d) {
                out.pop();
            } else {
                out.push(d);
            }
        }
        Element(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[Diagram] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, d: &Diagram) -> bool {
        self.0.binary_search(d).is_ok()
    }

    /// The common H-data of all terms, or `None` for zero.
    pub fn hdata(&self) -> Result<Option<HData>, StrandError> {
        let Some(first) = self.0.first() else {
            return Ok(None);
        };
        if self.0.iter().all(|d| d.hd == first.hd) {
            Ok(Some(first.hd))
        } else {
            Err(StrandError::NotHomogeneous)
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Diagram> {
        self.0.iter()
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, o: &Element) -> Element {
        let (a, b) = (&self.0, &o.0);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Element(out)
    }
}

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, o: &Element) {
        *self = &*self + o;
    }
}

impl FromIterator<Diagram> for Element {
    fn from_iter<I: IntoIterator<Item = Diagram>>(iter: I) -> Self {
        Element::from_terms(iter)
    }
}

impl<'a> IntoIterator for &'a Element {
    type Item = &'a Diagram;
    type IntoIter = std::slice::Iter<'a, Diagram>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// The strand algebra of an arc diagram.
#[derive(Debug, Clone)]
pub struct Algebra {
    z: ArcDiagram,
    /// Global step index of each of the four local steps, per pair.
    frag: Vec<[u32; 4]>,
}

impl Algebra {
    pub fn new(z: ArcDiagram) -> Self {
        let frag = z
            .fragments()
            .iter()
            .map(|f| f.steps.map(|s| s.0 as u32))
            .collect();
        Algebra { z, frag }
    }

    pub fn arc_diagram(&self) -> &ArcDiagram {
        &self.z
    }

    pub fn pair_count(&self) -> usize {
        self.frag.len()
    }

    pub fn pairs(&self) -> impl Iterator<Item = PairId> {
        (0..self.frag.len()).map(PairId)
    }

    pub fn local_hdata(&self, hd: &HData, pair: PairId) -> LocalHData {
        let f = &self.frag[pair.0];
        let bits = (0..4).fold(0u8, |b, k| b | (((hd.h >> f[k]) & 1) as u8) << k);
        LocalHData::new(bits, hd.s >> pair.0 & 1 == 1, hd.t >> pair.0 & 1 == 1)
    }

    pub fn local_class(&self, hd: &HData, pair: PairId) -> LocalClass {
        self.local_hdata(hd, pair).class()
    }

    pub fn local(&self, d: &Diagram, pair: PairId) -> LocalDiagram {
        LocalDiagram {
            hd: self.local_hdata(&d.hd, pair),
            var: d.variant(pair),
        }
    }

    pub fn is_realizable(&self, hd: &HData) -> bool {
        self.pairs().all(|p| self.local_class(hd, p).is_realizable())
    }

    /// Steps that no fragment sees cannot exist, since intervals are nonempty.
    pub(crate) fn local_bits_to_global(&self, pair: PairId, bits: u8) -> u64 {
        let f = &self.frag[pair.0];
        (0..4).filter(|k| bits >> k & 1 == 1).fold(0u64, |h, k| h | 1 << f[k])
    }

    /// Builds a diagram from H-data and variants at the ambiguous pairs.
    pub fn diagram(&self, hd: HData, variants: &[(PairId, Variant)]) -> Result<Diagram, StrandError> {
        let mut d = Diagram { hd, var: 0 };
        for p in self.pairs() {
            let class = self.local_class(&hd, p);
            if !class.is_realizable() {
                return Err(StrandError::Unrealizable(self.z.pair(p).name.clone()));
            }
            let v = variants
                .iter()
                .find(|(q, _)| *q == p)
                .map(|&(_, v)| v)
                .unwrap_or(class.variants()[0]);
            if !class.variants().contains(&v) {
                return Err(StrandError::BadVariant {
                    pair: self.z.pair(p).name.clone(),
                    variant: v,
                });
            }
            d = d.with_variant(p, v);
        }
        Ok(d)
    }

    pub fn idempotent(&self, s: u32) -> Diagram {
        Diagram {
            hd: HData::idempotent(s),
            var: 0,
        }
    }

    /// Diagrams with the given H-data: `3^L 2^N` of them when every pair is
    /// realizable, none otherwise.
    pub fn enumerate_diagrams(&self, hd: &HData) -> Vec<Diagram> {
        let mut out = vec![Diagram { hd: *hd, var: 0 }];
        for p in self.pairs() {
            let vars = self.local_class(hd, p).variants();
            out = out
                .into_iter()
                .flat_map(|d| vars.iter().map(move |&v| d.with_variant(p, v)))
                .collect();
        }
        out.sort_unstable();
        out
    }

    /// All realizable H-data, built pair by pair from the realizable local
    /// H-data that agree on shared steps.
    pub fn all_hdata(&self) -> Vec<HData> {
        let options: Vec<LocalHData> = LocalHData::all().filter(|h| h.class().is_realizable()).collect();
        let n = self.pair_count();
        let mut out = Vec::new();
        let mut stack: Vec<(usize, HData, u64)> = vec![(0, HData::default(), 0)];
        while let Some((k, hd, fixed)) = stack.pop() {
            if k == n {
                out.push(hd);
                continue;
            }
            let pair = PairId(k);
            let mask = self.local_bits_to_global(pair, 0b1111);
            for o in &options {
                let h = self.local_bits_to_global(pair, o.bits);
                if (h ^ hd.h) & mask & fixed != 0 {
                    continue;
                }
                let next = HData {
                    h: hd.h | h,
                    s: hd.s | u32::from(o.s) << k,
                    t: hd.t | u32::from(o.t) << k,
                };
                stack.push((k + 1, next, fixed | mask));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn all_diagrams(&self) -> Vec<Diagram> {
        self.all_hdata().iter().flat_map(|hd| self.enumerate_diagrams(hd)).collect()
    }

    pub fn multiply(&self, a: &Diagram, b: &Diagram) -> Option<Diagram> {
        let hd = a.hd.compose(&b.hd)?;
        let mut d = Diagram { hd, var: 0 };
        for p in self.pairs() {
            let prod = self.local(a, p).product(self.local(b, p))?;
            d = d.with_variant(p, prod.var);
        }
        Some(d)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut terms = Vec::new();
        for x in a {
            for y in b {
                if let Some(z) = self.multiply(x, y) {
                    terms.push(z);
                }
            }
        }
        Element::from_terms(terms)
    }

    pub fn differential(&self, d: &Diagram) -> Element {
        let mut terms = Vec::new();
        for p in self.pairs() {
            match d.variant(p) {
                Variant::C => terms.push(d.with_variant(p, Variant::W)),
                Variant::CPair => {
                    terms.push(d.with_variant(p, Variant::G(Slot::First)));
                    terms.push(d.with_variant(p, Variant::G(Slot::Second)));
                }
                _ => {}
            }
        }
        Element::from_terms(terms)
    }

    pub fn d(&self, x: &Element) -> Element {
        Element::from_terms(x.iter().flat_map(|d| self.differential(d).0))
    }

    pub fn maslov(&self, d: &Diagram) -> HalfInt {
        self.pairs().map(|p| self.local(d, p).maslov()).sum()
    }

    /// Coefficient of each place in `∂h`: ends minus starts, read off from the
    /// jump in coverage across the place.
    pub fn boundary(&self, h: u64) -> Vec<(PlaceId, i32)> {
        let mut out = Vec::new();
        for (i, _) in self.z.places().iter().enumerate() {
            let place = PlaceId(i);
            let below = (h >> self.z.step_below(place).0 & 1) as i32;
            let above = (h >> self.z.step_above(place).0 & 1) as i32;
            if below != above {
                out.push((place, below - above));
            }
        }
        out
    }

    /// `m(h, c)`: each place contributes its coefficient times the average of
    /// `h` on the two adjacent steps.
    pub fn m_pairing(&self, h: u64, chain: &[(PlaceId, i32)]) -> HalfInt {
        let d: i32 = chain
            .iter()
            .map(|&(place, c)| {
                let below = (h >> self.z.step_below(place).0 & 1) as i32;
                let above = (h >> self.z.step_above(place).0 & 1) as i32;
                c * (below + above)
            })
            .sum();
        HalfInt::from_doubled(d)
    }

    /// Grading of a tensor from the gradings and H-data of its factors.
    pub fn maslov_tensor(&self, hds: &[HData], iotas: &[HalfInt]) -> HalfInt {
        assert_eq!(hds.len(), iotas.len(), "one grading per factor");
        let mut total: HalfInt = iotas.iter().copied().sum();
        for j in 0..hds.len() {
            let chain = self.boundary(hds[j].h);
            for hk in &hds[j + 1..] {
                total += self.m_pairing(hk.h, &chain);
            }
        }
        total
    }

    /// Sort key placing diagrams in variant-lexicographic order along the pair ordering.
    pub fn basis_key(&self, d: &Diagram, ord: &PairOrdering) -> Vec<u8> {
        ord.order().iter().map(|&p| d.variant(p).code()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pair() -> Algebra {
        Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]))
    }

    #[test]
    fn half_int_display() {
        assert_eq!(HalfInt::from_doubled(-1).to_string(), "-1/2");
        assert_eq!(HalfInt::from_int(-1).to_string(), "-1");
        assert_eq!(HalfInt::ZERO.to_string(), "0");
    }

    #[test]
    fn non_viable_multiplicities_are_rejected() {
        assert_eq!(
            HData::from_multiplicities(&[0, 2, 1], 0, 0),
            Err(StrandError::NonViable {
                step: 1,
                multiplicity: 2
            })
        );
    }

    #[test]
    fn enumeration_counts() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P"]));
        assert_eq!(alg.enumerate_diagrams(&HData::new(0b1111, 1, 1)).len(), 3);
        assert_eq!(alg.enumerate_diagrams(&HData::new(0b0011, 1, 1)).len(), 2);
        assert_eq!(alg.enumerate_diagrams(&HData::new(0b1001, 0, 0)).len(), 0);
        let two = two_pair();
        assert_eq!(two.enumerate_diagrams(&HData::new(0b0011_1111, 3, 3)).len(), 6);
        assert_eq!(alg.all_diagrams().len(), 22);
        assert_eq!(two.all_diagrams().len(), 22 * 22);
    }

    #[test]
    fn pairing_examples() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]));
        let z = alg.arc_diagram();
        let p = z.place_by_name("p").unwrap();
        let q = z.place_by_name("q").unwrap();
        assert_eq!(alg.m_pairing(0, &[(p, 1)]), HalfInt::ZERO);
        assert_eq!(alg.m_pairing(0b10, &[(p, 1)]), HalfInt::from_doubled(1));
        assert_eq!(alg.m_pairing(0b11, &[(p, 1), (q, -1)]), HalfInt::from_int(1));
    }

    #[test]
    fn local_gradings() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]));
        let w = alg.diagram(HData::new(0b11, 1, 1), &[(PairId(0), Variant::W)]).unwrap();
        assert_eq!(alg.maslov(&w), HalfInt::from_int(-1));
        let c = alg.diagram(HData::new(0b1111, 1, 1), &[(PairId(0), Variant::CPair)]).unwrap();
        assert_eq!(alg.maslov(&c), HalfInt::ZERO);
        // post-half at both pairs
        let d = alg.diagram(HData::new(0b10_0010, 3, 0), &[]).unwrap();
        assert_eq!(alg.maslov(&d), HalfInt::from_int(-1));
    }

    #[test]
    fn element_addition_cancels() {
        let alg = two_pair();
        let a = alg.idempotent(1);
        let b = alg.idempotent(2);
        let x = Element::from_terms([a, b]);
        let y = Element::from_terms([b]);
        assert_eq!(&x + &y, Element::from_diagram(a));
        assert!((&x + &x).is_zero());
        assert!(Element::from_terms([a, a]).is_zero());
    }
}
