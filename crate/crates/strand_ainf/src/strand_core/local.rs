//! The one-pair picture: local H-data, its classification, and the hard-coded
//! product, differential and grading rules on the 22 local diagrams.

use std::fmt;
use std::sync::OnceLock;

use crate::arc_diagram::Slot;

use super::HalfInt;

/// Coverage of the four local steps plus idempotent membership.
///
/// Bit `2k` is the step below the place in slot `k`, bit `2k + 1` the step above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalHData {
    pub bits: u8,
    pub s: bool,
    pub t: bool,
}

pub(crate) const fn below_bit(slot: Slot) -> u8 {
    match slot {
        Slot::First => 0b0001,
        Slot::Second => 0b0100,
    }
}

pub(crate) const fn above_bit(slot: Slot) -> u8 {
    match slot {
        Slot::First => 0b0010,
        Slot::Second => 0b1000,
    }
}

const fn both(slot: Slot) -> u8 {
    below_bit(slot) | above_bit(slot)
}

impl LocalHData {
    pub fn new(bits: u8, s: bool, t: bool) -> Self {
        debug_assert!(bits < 16);
        LocalHData { bits, s, t }
    }

    pub fn covers(self, bit: u8) -> bool {
        self.bits & bit != 0
    }

    pub fn class(self) -> LocalClass {
        static TABLE: OnceLock<[LocalClass; 64]> = OnceLock::new();
        let table = TABLE.get_or_init(|| {
            let mut t = [LocalClass::Unrealizable; 64];
            for h in LocalHData::all() {
                t[h.index()] = h.classify();
            }
            t
        });
        table[self.index()]
    }

    fn index(self) -> usize {
        usize::from(self.bits) | usize::from(self.s) << 4 | usize::from(self.t) << 5
    }

    fn classify(self) -> LocalClass {
        use LocalClass::*;
        use Slot::*;
        let (s, t) = (self.s, self.t);
        let at = |f: &dyn Fn(Slot) -> u8| -> Option<Slot> {
            [First, Second].into_iter().find(|&x| self.bits == f(x))
        };
        if self.bits == 0 {
            return if s == t {
                if s {
                    Unoccupied11
                } else {
                    Unoccupied00
                }
            } else {
                Unrealizable
            };
        }
        if self.bits == 0b1111 {
            return match (s, t) {
                (false, false) => Doubly00,
                (true, true) => Doubly11,
                _ => Unrealizable,
            };
        }
        if let Some(x) = at(&below_bit) {
            return if !s && t { PreOneHalf(x) } else { Unrealizable };
        }
        if let Some(x) = at(&above_bit) {
            return if s && !t { PostOneHalf(x) } else { Unrealizable };
        }
        if let Some(x) = at(&both) {
            return match (s, t) {
                (false, false) => Once00(x),
                (true, true) => Once11(x),
                _ => Unrealizable,
            };
        }
        if let Some(x) = at(&|x| below_bit(x) | above_bit(x.twin())) {
            return if s && t { Alternately11(x) } else { Unrealizable };
        }
        if let Some(x) = at(&|x| both(x) | below_bit(x.twin())) {
            return if !s && t { PreSesqui01(x) } else { Unrealizable };
        }
        if let Some(x) = at(&|x| both(x) | above_bit(x.twin())) {
            return if s && !t { PostSesqui10(x) } else { Unrealizable };
        }
        Unrealizable
    }

    /// All 64 local H-data values.
    pub fn all() -> impl Iterator<Item = LocalHData> {
        (0u8..64).map(|k| LocalHData::new(k & 15, k & 16 != 0, k & 32 != 0))
    }
}

/// Rows of the local classification. Slots name the distinguished place:
/// the end of a half or alternately occupied pair's incoming strand, or the
/// place whose two steps are covered for once and sesqui occupied pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalClass {
    Unoccupied00,
    Unoccupied11,
    PreOneHalf(Slot),
    PostOneHalf(Slot),
    Alternately11(Slot),
    Once00(Slot),
    Once11(Slot),
    PreSesqui01(Slot),
    PostSesqui10(Slot),
    Doubly00,
    Doubly11,
    Unrealizable,
}

impl LocalClass {
    pub fn variants(self) -> &'static [Variant] {
        match self {
            LocalClass::Unrealizable => &[],
            LocalClass::Once11(_) => &[Variant::W, Variant::C],
            LocalClass::Doubly11 => &[Variant::G(Slot::First), Variant::G(Slot::Second), Variant::CPair],
            _ => &[Variant::U],
        }
    }

    pub fn is_realizable(self) -> bool {
        self != LocalClass::Unrealizable
    }

    pub fn is_ambiguous(self) -> bool {
        matches!(self, LocalClass::Once11(_) | LocalClass::Doubly11)
    }

    pub fn name(self) -> &'static str {
        match self {
            LocalClass::Unoccupied00 => "unoccupied 00",
            LocalClass::Unoccupied11 => "unoccupied 11",
            LocalClass::PreOneHalf(_) => "pre-half 01",
            LocalClass::PostOneHalf(_) => "post-half 10",
            LocalClass::Alternately11(_) => "alternately 11",
            LocalClass::Once00(_) => "once 00",
            LocalClass::Once11(_) => "once 11",
            LocalClass::PreSesqui01(_) => "pre-sesqui 01",
            LocalClass::PostSesqui10(_) => "post-sesqui 10",
            LocalClass::Doubly00 => "doubly 00",
            LocalClass::Doubly11 => "doubly 11",
            LocalClass::Unrealizable => "unrealizable",
        }
    }
}

/// Which local diagram is meant when the H-data leaves a choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// The only diagram for unambiguous H-data.
    U,
    /// Twisted: the once occupied place is broken by a strand end and start.
    W,
    /// Crossed once occupied: a long strand crossing the dotted horizontal.
    C,
    /// Doubly occupied with the strand broken at the given place.
    G(Slot),
    /// Doubly occupied with both strands long and a crossing.
    CPair,
}

impl Variant {
    pub fn code(self) -> u8 {
        match self {
            Variant::U => 0,
            Variant::W => 1,
            Variant::C => 2,
            Variant::G(Slot::First) => 3,
            Variant::G(Slot::Second) => 4,
            Variant::CPair => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Variant> {
        Some(match code {
            0 => Variant::U,
            1 => Variant::W,
            2 => Variant::C,
            3 => Variant::G(Slot::First),
            4 => Variant::G(Slot::Second),
            5 => Variant::CPair,
            _ => return None,
        })
    }

    pub fn is_crossed(self) -> bool {
        matches!(self, Variant::C | Variant::CPair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalDiagram {
    pub hd: LocalHData,
    pub var: Variant,
}

impl LocalDiagram {
    /// The 22 local diagrams, ordered by H-data then variant.
    pub fn all() -> Vec<LocalDiagram> {
        LocalHData::all()
            .flat_map(|hd| hd.class().variants().iter().map(move |&var| LocalDiagram { hd, var }))
            .collect()
    }

    pub fn class(self) -> LocalClass {
        self.hd.class()
    }

    /// Doubled local Maslov grading.
    pub fn maslov2(self) -> i32 {
        match (self.class(), self.var) {
            (_, Variant::W) | (_, Variant::G(_)) => -2,
            (LocalClass::PostOneHalf(_), _)
            | (LocalClass::Alternately11(_), _)
            | (LocalClass::PostSesqui10(_), _) => -1,
            _ => 0,
        }
    }

    pub fn maslov(self) -> HalfInt {
        HalfInt::from_doubled(self.maslov2())
    }

    /// The place in the initial idempotent that a strand leaves from, when
    /// the picture pins it down.
    pub fn source_place(self) -> Option<Slot> {
        match (self.class(), self.var) {
            (LocalClass::PostOneHalf(x), _) => Some(x),
            (LocalClass::Alternately11(x), _) => Some(x.twin()),
            (LocalClass::PostSesqui10(x), _) => Some(x.twin()),
            (LocalClass::Once11(x), Variant::W) => Some(x),
            (_, Variant::G(x)) => Some(x),
            _ => None,
        }
    }

    /// The place in the final idempotent that a strand arrives at, when the
    /// picture pins it down.
    pub fn target_place(self) -> Option<Slot> {
        match (self.class(), self.var) {
            (LocalClass::PreOneHalf(x), _) => Some(x),
            (LocalClass::Alternately11(x), _) => Some(x),
            (LocalClass::PreSesqui01(x), _) => Some(x.twin()),
            (LocalClass::Once11(x), Variant::W) => Some(x),
            (_, Variant::G(x)) => Some(x),
            _ => None,
        }
    }

    pub fn product(self, other: LocalDiagram) -> Option<LocalDiagram> {
        local_product(self, other)
    }

    pub fn differential(self) -> Vec<LocalDiagram> {
        let with = |var| LocalDiagram { hd: self.hd, var };
        match self.var {
            Variant::C => vec![with(Variant::W)],
            Variant::CPair => vec![with(Variant::G(Slot::First)), with(Variant::G(Slot::Second))],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for LocalDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps = ["x-", "x+", "y-", "y+"];
        let covered: Vec<&str> = (0..4).filter(|k| self.hd.bits >> k & 1 == 1).map(|k| steps[k]).collect();
        write!(
            f,
            "{}{} {} {:?}",
            u8::from(self.hd.s),
            u8::from(self.hd.t),
            if covered.is_empty() { ".".to_string() } else { covered.join(",") },
            self.var
        )
    }
}

/// `m(h_b, ∂h_a)` doubled: each place contributes the jump of `a` across it
/// times the sum of `b` on its two sides.
pub fn local_pairing2(a_bits: u8, b_bits: u8) -> i32 {
    [Slot::First, Slot::Second]
        .into_iter()
        .map(|x| {
            let jump = i32::from(a_bits & below_bit(x) != 0) - i32::from(a_bits & above_bit(x) != 0);
            let sum = i32::from(b_bits & below_bit(x) != 0) + i32::from(b_bits & above_bit(x) != 0);
            jump * sum
        })
        .sum()
}

/// Product of local diagrams. Idempotents must match, coverage must be
/// disjoint and realizable, and the grading must be additive up to the
/// pairing term; this singles out at most one diagram, except for doubly
/// occupied results at grading −1 where the broken place is inherited from
/// whichever factor pins it.
fn local_product(a: LocalDiagram, b: LocalDiagram) -> Option<LocalDiagram> {
    if a.hd.t != b.hd.s || a.hd.bits & b.hd.bits != 0 {
        return None;
    }
    let hd = LocalHData::new(a.hd.bits | b.hd.bits, a.hd.s, b.hd.t);
    let class = hd.class();
    let target = a.maslov2() + b.maslov2() + local_pairing2(a.hd.bits, b.hd.bits);
    let mut matches = class
        .variants()
        .iter()
        .map(|&var| LocalDiagram { hd, var })
        .filter(|d| d.maslov2() == target);
    let first = matches.next()?;
    if matches.next().is_none() {
        return Some(first);
    }
    let slot = a.source_place().or_else(|| b.target_place())?;
    Some(LocalDiagram {
        hd,
        var: Variant::G(slot),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ld(bits: u8, s: bool, t: bool, var: Variant) -> LocalDiagram {
        LocalDiagram {
            hd: LocalHData::new(bits, s, t),
            var,
        }
    }

    #[test]
    fn twenty_two_local_diagrams() {
        assert_eq!(LocalDiagram::all().len(), 22);
        let realizable = LocalHData::all().filter(|h| h.class().is_realizable()).count();
        assert_eq!(realizable, 18);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(LocalHData::new(0b1111, true, true).class(), LocalClass::Doubly11);
        assert_eq!(LocalHData::new(0, false, false).class(), LocalClass::Unoccupied00);
        // first place's lower step and second place's upper step, all-off
        assert_eq!(LocalHData::new(0b1001, false, false).class(), LocalClass::Unrealizable);
        assert_eq!(
            LocalHData::new(0b1001, true, true).class(),
            LocalClass::Alternately11(Slot::First)
        );
    }

    #[test]
    fn alternating_factors_multiply_to_broken_strand() {
        let a = ld(0b1001, true, true, Variant::U);
        let b = ld(0b0110, true, true, Variant::U);
        assert_eq!(a.product(b), Some(ld(0b1111, true, true, Variant::G(Slot::Second))));
    }

    #[test]
    fn half_factors_multiply_to_twisted() {
        // post-half then pre-half at the same place
        let a = ld(above_bit(Slot::Second), true, false, Variant::U);
        let b = ld(below_bit(Slot::Second), false, true, Variant::U);
        assert_eq!(a.product(b), Some(ld(0b1100, true, true, Variant::W)));
        // the other order joins into one long strand
        let c = ld(below_bit(Slot::Second), false, true, Variant::U);
        let d = ld(above_bit(Slot::Second), true, false, Variant::U);
        assert_eq!(c.product(d), Some(ld(0b1100, false, false, Variant::U)));
        // two strands flying off the top
        assert_eq!(d.product(ld(above_bit(Slot::First), true, false, Variant::U)), None);
    }

    #[test]
    fn differential_squares_to_zero() {
        for d in LocalDiagram::all() {
            for e in d.differential() {
                assert!(e.differential().is_empty());
                assert_eq!(e.maslov2(), d.maslov2() - 2);
            }
        }
    }
}
