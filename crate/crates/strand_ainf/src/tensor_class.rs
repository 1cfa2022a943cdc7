//! Tightness of tensor products of diagrams and of homology classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::arc_diagram::{PairId, Slot};
use crate::homology::{classify_hdata, HDataTightness};
use crate::strand_core::local::local_pairing2;
use crate::strand_core::{Algebra, Diagram, HData, HalfInt, LocalClass, LocalDiagram, LocalHData, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("tensor is not viable")]
    NonViable,
    #[error("empty tensor")]
    Empty,
    #[error("range {0}..={1} is out of bounds")]
    Range(usize, usize),
    #[error("the product over the range is zero")]
    ZeroProduct,
    #[error("the H-data over the range is not tight")]
    NotTight,
    #[error("inserted idempotent does not match its neighbours")]
    IdempotentMismatch,
}

/// Tightness of a tensor, ordered from least to most degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TensorTightness {
    Tight,
    Sublime,
    Twisted,
    Crossed,
    Critical,
    Singular,
}

impl TensorTightness {
    pub const ALL: [TensorTightness; 6] = [
        TensorTightness::Tight,
        TensorTightness::Sublime,
        TensorTightness::Twisted,
        TensorTightness::Crossed,
        TensorTightness::Critical,
        TensorTightness::Singular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TensorTightness::Tight => "tight",
            TensorTightness::Sublime => "sublime",
            TensorTightness::Twisted => "twisted",
            TensorTightness::Crossed => "crossed",
            TensorTightness::Critical => "critical",
            TensorTightness::Singular => "singular",
        }
    }

    pub fn is_twisted_or_critical(self) -> bool {
        matches!(self, TensorTightness::Twisted | TensorTightness::Critical)
    }
}

impl fmt::Display for TensorTightness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn diagram_is_tight(alg: &Algebra, d: &Diagram) -> bool {
    d.is_crossingless() && classify_hdata(alg, &d.hd) == HDataTightness::Tight
}

pub fn tensor_hdata(ds: &[Diagram]) -> Option<HData> {
    HData::compose_all(ds.iter().map(|d| &d.hd))
}

pub fn product_all(alg: &Algebra, ds: &[Diagram]) -> Option<Diagram> {
    let (first, rest) = ds.split_first()?;
    rest.iter().try_fold(*first, |acc, d| alg.multiply(&acc, d))
}

pub fn classify_tensor(alg: &Algebra, ds: &[Diagram]) -> Result<TensorTightness, TensorError> {
    let hd = tensor_hdata(ds).ok_or(TensorError::NonViable)?;
    Ok(match product_all(alg, ds) {
        None => {
            if alg.is_realizable(&hd) {
                TensorTightness::Critical
            } else {
                TensorTightness::Singular
            }
        }
        Some(p) if !p.is_crossingless() => TensorTightness::Crossed,
        Some(p) => match classify_hdata(alg, &p.hd) {
            HDataTightness::Twisted => TensorTightness::Twisted,
            _ if ds.iter().all(|d| diagram_is_tight(alg, d)) => TensorTightness::Tight,
            _ => TensorTightness::Sublime,
        },
    })
}

fn local_is_tight(d: &LocalDiagram) -> bool {
    matches!(d.var, Variant::U | Variant::G(_))
}

/// The tight local diagrams with the given local H-data.
pub fn local_tight_class(hd: LocalHData) -> Vec<LocalDiagram> {
    hd.class()
        .variants()
        .iter()
        .map(|&var| LocalDiagram { hd, var })
        .filter(local_is_tight)
        .collect()
}

/// Tightness of a tensor of local diagrams on the one-pair fragment.
pub fn classify_local(ds: &[LocalDiagram]) -> Result<TensorTightness, TensorError> {
    let (first, rest) = ds.split_first().ok_or(TensorError::Empty)?;
    let mut hd = first.hd;
    for d in rest {
        if hd.t != d.hd.s || hd.bits & d.hd.bits != 0 {
            return Err(TensorError::NonViable);
        }
        hd = LocalHData::new(hd.bits | d.hd.bits, hd.s, d.hd.t);
    }
    let product = rest.iter().try_fold(*first, |acc, d| acc.product(*d));
    Ok(match product {
        None if hd.class().is_realizable() => TensorTightness::Critical,
        None => TensorTightness::Singular,
        Some(p) => match p.var {
            Variant::C | Variant::CPair => TensorTightness::Crossed,
            Variant::W => TensorTightness::Twisted,
            _ if ds.iter().all(local_is_tight) => TensorTightness::Tight,
            _ => TensorTightness::Sublime,
        },
    })
}

pub fn classify_tensor_local(alg: &Algebra, ds: &[Diagram], pair: PairId) -> Result<TensorTightness, TensorError> {
    tensor_hdata(ds).ok_or(TensorError::NonViable)?;
    let locals: Vec<LocalDiagram> = ds.iter().map(|d| alg.local(d, pair)).collect();
    classify_local(&locals)
}

/// Doubled Maslov grading of a local tensor.
pub fn local_tensor_maslov2(ds: &[LocalDiagram]) -> i32 {
    let mut m: i32 = ds.iter().map(|d| d.maslov2()).sum();
    for j in 0..ds.len() {
        for k in j + 1..ds.len() {
            m += local_pairing2(ds[j].hd.bits, ds[k].hd.bits);
        }
    }
    m
}

pub fn tensor_maslov(alg: &Algebra, ds: &[Diagram]) -> HalfInt {
    let hds: Vec<HData> = ds.iter().map(|d| d.hd).collect();
    let iotas: Vec<HalfInt> = ds.iter().map(|d| alg.maslov(d)).collect();
    alg.maslov_tensor(&hds, &iotas)
}

/// Representative for a tight class: broken at `choice(pair)` at each doubly
/// occupied pair.
pub fn representative(alg: &Algebra, hd: &HData, choice: impl Fn(PairId) -> Slot) -> Diagram {
    let variants: Vec<(PairId, Variant)> = alg
        .pairs()
        .filter(|&p| alg.local_class(hd, p) == LocalClass::Doubly11)
        .map(|p| (p, Variant::G(choice(p))))
        .collect();
    alg.diagram(*hd, &variants).expect("tight H-data is realizable")
}

/// Tightness of a tensor of nonzero homology classes, given by their tight H-data.
pub fn classify_class_tensor(alg: &Algebra, hds: &[HData]) -> Result<TensorTightness, TensorError> {
    let reps: Vec<Diagram> = hds.iter().map(|h| representative(alg, h, |_| Slot::First)).collect();
    classify_tensor(alg, &reps)
}

/// Same as [`classify_class_tensor`] but with representatives broken at the
/// given slot in every factor, for checking independence of the choice.
pub fn classify_class_tensor_with(
    alg: &Algebra,
    hds: &[HData],
    choice: impl Fn(usize, PairId) -> Slot,
) -> Result<TensorTightness, TensorError> {
    let reps: Vec<Diagram> = hds
        .iter()
        .enumerate()
        .map(|(i, h)| representative(alg, h, |p| choice(i, p)))
        .collect();
    classify_tensor(alg, &reps)
}

pub fn classify_class_tensor_local(alg: &Algebra, hds: &[HData], pair: PairId) -> Result<TensorTightness, TensorError> {
    let reps: Vec<Diagram> = hds.iter().map(|h| representative(alg, h, |_| Slot::First)).collect();
    classify_tensor_local(alg, &reps, pair)
}

/// Inserts `idem` before position `i`; it must be the idempotent between its neighbours.
pub fn extend(alg: &Algebra, ds: &[Diagram], i: usize, idem: &Diagram) -> Result<Vec<Diagram>, TensorError> {
    if i > ds.len() {
        return Err(TensorError::Range(i, i));
    }
    if !idem.hd.is_idempotent() {
        return Err(TensorError::IdempotentMismatch);
    }
    let s = idem.hd.s;
    let fits_left = i == 0 || ds[i - 1].hd.t == s;
    let fits_right = i == ds.len() || ds[i].hd.s == s;
    if !fits_left || !fits_right {
        return Err(TensorError::IdempotentMismatch);
    }
    let _ = alg;
    let mut out = ds.to_vec();
    out.insert(i, *idem);
    Ok(out)
}

/// Replaces factors `i..=j` by their product.
pub fn contract(alg: &Algebra, ds: &[Diagram], i: usize, j: usize) -> Result<Vec<Diagram>, TensorError> {
    if i > j || j >= ds.len() {
        return Err(TensorError::Range(i, j));
    }
    let p = product_all(alg, &ds[i..=j]).ok_or(TensorError::ZeroProduct)?;
    let mut out = ds[..i].to_vec();
    out.push(p);
    out.extend_from_slice(&ds[j + 1..]);
    Ok(out)
}

/// Replaces classes `i..=j` by the class of their combined H-data, which must be tight.
pub fn h_contract(alg: &Algebra, hds: &[HData], i: usize, j: usize) -> Result<Vec<HData>, TensorError> {
    if i > j || j >= hds.len() {
        return Err(TensorError::Range(i, j));
    }
    let hd = HData::compose_all(&hds[i..=j]).ok_or(TensorError::NonViable)?;
    if classify_hdata(alg, &hd) != HDataTightness::Tight {
        return Err(TensorError::NotTight);
    }
    let mut out = hds[..i].to_vec();
    out.push(hd);
    out.extend_from_slice(&hds[j + 1..]);
    Ok(out)
}

/// Row label of the local tensor classification: the local class, ignoring
/// which place is distinguished, with alternately occupied all-off H-data as
/// the one unrealizable row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Table2Row {
    Unoccupied00,
    Unoccupied11,
    PreOneHalf01,
    PostOneHalf10,
    Alternately00,
    Alternately11,
    Once00,
    Once11,
    PreSesqui01,
    PostSesqui10,
    Doubly00,
    Doubly11,
    OtherUnrealizable,
}

impl Table2Row {
    pub fn of(hd: LocalHData) -> Table2Row {
        match hd.class() {
            LocalClass::Unoccupied00 => Table2Row::Unoccupied00,
            LocalClass::Unoccupied11 => Table2Row::Unoccupied11,
            LocalClass::PreOneHalf(_) => Table2Row::PreOneHalf01,
            LocalClass::PostOneHalf(_) => Table2Row::PostOneHalf10,
            LocalClass::Alternately11(_) => Table2Row::Alternately11,
            LocalClass::Once00(_) => Table2Row::Once00,
            LocalClass::Once11(_) => Table2Row::Once11,
            LocalClass::PreSesqui01(_) => Table2Row::PreSesqui01,
            LocalClass::PostSesqui10(_) => Table2Row::PostSesqui10,
            LocalClass::Doubly00 => Table2Row::Doubly00,
            LocalClass::Doubly11 => Table2Row::Doubly11,
            LocalClass::Unrealizable => {
                let alt = LocalHData::new(hd.bits, true, true).class();
                if !hd.s && !hd.t && matches!(alt, LocalClass::Alternately11(_)) {
                    Table2Row::Alternately00
                } else {
                    Table2Row::OtherUnrealizable
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Table2Row::Unoccupied00 => "unoccupied 00",
            Table2Row::Unoccupied11 => "unoccupied 11",
            Table2Row::PreOneHalf01 => "pre-half 01",
            Table2Row::PostOneHalf10 => "post-half 10",
            Table2Row::Alternately00 => "alternately 00",
            Table2Row::Alternately11 => "alternately 11",
            Table2Row::Once00 => "once 00",
            Table2Row::Once11 => "once 11",
            Table2Row::PreSesqui01 => "pre-sesqui 01",
            Table2Row::PostSesqui10 => "post-sesqui 10",
            Table2Row::Doubly00 => "doubly 00",
            Table2Row::Doubly11 => "doubly 11",
            Table2Row::OtherUnrealizable => "other unrealizable",
        }
    }
}

/// Doubled Maslov gradings occurring in each (row, tightness) cell.
pub type Table2 = BTreeMap<(Table2Row, TensorTightness), BTreeSet<i32>>;

/// Every viable local tensor whose factors all cover at least one step.
pub fn local_tensors(max_len: usize) -> Vec<Vec<LocalDiagram>> {
    let factors: Vec<LocalDiagram> = LocalDiagram::all().into_iter().filter(|d| d.hd.bits != 0).collect();
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<LocalDiagram>, u8)> = factors.iter().map(|d| (vec![*d], d.hd.bits)).collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (t, bits) in frontier {
            let last = *t.last().expect("nonempty");
            for f in &factors {
                if f.hd.s == last.hd.t && f.hd.bits & bits == 0 {
                    let mut u = t.clone();
                    u.push(*f);
                    next.push((u, bits | f.hd.bits));
                }
            }
            out.push(t);
        }
        frontier = next;
    }
    out
}

fn tensor_local_hdata(ds: &[LocalDiagram]) -> LocalHData {
    let bits = ds.iter().fold(0, |b, d| b | d.hd.bits);
    LocalHData::new(bits, ds[0].hd.s, ds[ds.len() - 1].hd.t)
}

pub fn table2_oracle() -> Table2 {
    let mut table = Table2::new();
    for t in local_tensors(4) {
        let tag = classify_local(&t).expect("enumerated tensors are viable");
        let row = Table2Row::of(tensor_local_hdata(&t));
        table.entry((row, tag)).or_default().insert(local_tensor_maslov2(&t));
    }
    // idempotent-only tensors are extensions of a single idempotent
    for d in LocalDiagram::all().into_iter().filter(|d| d.hd.bits == 0) {
        table
            .entry((Table2Row::of(d.hd), TensorTightness::Tight))
            .or_default()
            .insert(d.maslov2());
    }
    table
}

/// The published local tensor classification, doubled Maslov values per cell.
pub fn table2_reference() -> Table2 {
    use TensorTightness::*;
    let rows: [(Table2Row, [&[i32]; 6]); 12] = [
        (Table2Row::Unoccupied00, [&[0], &[], &[], &[], &[], &[]]),
        (Table2Row::Unoccupied11, [&[0], &[], &[], &[], &[], &[]]),
        (Table2Row::PreOneHalf01, [&[0], &[], &[], &[], &[], &[]]),
        (Table2Row::PostOneHalf10, [&[-1], &[], &[], &[], &[], &[]]),
        (Table2Row::Alternately00, [&[], &[], &[], &[], &[], &[-1]]),
        (Table2Row::Alternately11, [&[-1], &[], &[], &[], &[], &[]]),
        (Table2Row::Once00, [&[0], &[], &[], &[], &[], &[]]),
        (Table2Row::Once11, [&[], &[], &[-2], &[0], &[], &[]]),
        (Table2Row::PreSesqui01, [&[0], &[0], &[], &[], &[-2], &[]]),
        (Table2Row::PostSesqui10, [&[-1], &[-1], &[], &[], &[-3], &[]]),
        (Table2Row::Doubly00, [&[0], &[0], &[], &[], &[-2], &[]]),
        (Table2Row::Doubly11, [&[-2], &[-2], &[], &[0], &[-4], &[]]),
    ];
    let tags = [Tight, Sublime, Twisted, Crossed, Critical, Singular];
    let mut table = Table2::new();
    for (row, cells) in rows {
        for (tag, vals) in tags.iter().zip(cells) {
            if !vals.is_empty() {
                table.insert((row, *tag), vals.iter().copied().collect());
            }
        }
    }
    table
}

/// Allowed (whole, sub-range) tightness pairs for local diagram tensors.
pub fn table3_reference() -> BTreeSet<(TensorTightness, TensorTightness)> {
    use TensorTightness::*;
    [
        (Tight, Tight),
        (Sublime, Tight),
        (Sublime, Sublime),
        (Sublime, Twisted),
        (Sublime, Crossed),
        (Twisted, Tight),
        (Twisted, Twisted),
        (Crossed, Tight),
        (Crossed, Crossed),
        (Critical, Tight),
        (Critical, Twisted),
        (Critical, Critical),
        (Critical, Singular),
        (Singular, Tight),
        (Singular, Singular),
    ]
    .into_iter()
    .collect()
}

/// Allowed (whole, sub-range) tightness pairs for local class tensors.
pub fn table4_reference() -> BTreeSet<(TensorTightness, TensorTightness)> {
    use TensorTightness::*;
    [
        (Tight, Tight),
        (Twisted, Tight),
        (Twisted, Twisted),
        (Critical, Tight),
        (Critical, Twisted),
        (Critical, Critical),
        (Critical, Singular),
        (Singular, Tight),
        (Singular, Singular),
    ]
    .into_iter()
    .collect()
}

/// (whole, sub-range) pairs seen over every enumerated local diagram tensor.
pub fn table3_oracle() -> BTreeSet<(TensorTightness, TensorTightness)> {
    let mut seen = BTreeSet::new();
    for t in local_tensors(4) {
        let whole = classify_local(&t).expect("viable");
        for i in 0..t.len() {
            for j in i..t.len() {
                seen.insert((whole, classify_local(&t[i..=j]).expect("viable")));
            }
        }
    }
    seen
}

/// Local tight classes that are not idempotents, as their crossingless
/// representatives (one list per class).
fn local_tight_classes() -> Vec<Vec<LocalDiagram>> {
    let mut by_hd: BTreeMap<LocalHData, Vec<LocalDiagram>> = BTreeMap::new();
    for d in LocalDiagram::all() {
        if d.hd.bits != 0 && local_is_tight(&d) && !matches!(d.class(), LocalClass::Once11(_)) {
            by_hd.entry(d.hd).or_default().push(d);
        }
    }
    by_hd.into_values().collect()
}

/// Tightness of a local class tensor, checked to be the same for every
/// choice of representatives; `None` if two choices disagree.
pub fn classify_local_class_tensor(classes: &[Vec<LocalDiagram>]) -> Option<TensorTightness> {
    let mut choices: Vec<Vec<LocalDiagram>> = vec![Vec::new()];
    for reps in classes {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                reps.iter().map(move |r| {
                    let mut c = c.clone();
                    c.push(*r);
                    c
                })
            })
            .collect();
    }
    let mut tags = choices.iter().map(|c| classify_local(c).expect("viable"));
    let first = tags.next()?;
    tags.all(|t| t == first).then_some(first)
}

/// Every viable local class tensor (at most four factors), with tightness.
pub fn local_class_tensors() -> Vec<(Vec<Vec<LocalDiagram>>, Option<TensorTightness>)> {
    let classes = local_tight_classes();
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<Vec<LocalDiagram>>, u8)> = classes.iter().map(|c| (vec![c.clone()], c[0].hd.bits)).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (t, bits) in frontier {
            let last = t.last().expect("nonempty")[0];
            for c in &classes {
                if c[0].hd.s == last.hd.t && c[0].hd.bits & bits == 0 {
                    let mut u = t.clone();
                    u.push(c.clone());
                    next.push((u, bits | c[0].hd.bits));
                }
            }
            let tag = classify_local_class_tensor(&t);
            out.push((t, tag));
        }
        frontier = next;
    }
    out
}

pub fn table4_oracle() -> BTreeSet<(TensorTightness, TensorTightness)> {
    let mut seen = BTreeSet::new();
    for (t, whole) in local_class_tensors() {
        let whole = whole.expect("class tightness is independent of representatives");
        for i in 0..t.len() {
            for j in i..t.len() {
                let sub = classify_local_class_tensor(&t[i..=j]).expect("independent of representatives");
                seen.insert((whole, sub));
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table2_matches_reference() {
        assert_eq!(table2_oracle(), table2_reference());
    }

    #[test]
    fn sub_tensor_tables_match() {
        assert!(table3_oracle().is_subset(&table3_reference()));
        assert!(table4_oracle().is_subset(&table4_reference()));
    }

    #[test]
    fn critical_needs_three_factors() {
        for (t, tag) in local_class_tensors() {
            if tag == Some(TensorTightness::Critical) {
                assert!(t.len() >= 3);
            }
        }
    }

    #[test]
    fn singular_structure() {
        for t in local_tensors(4) {
            if classify_local(&t).unwrap() == TensorTightness::Singular {
                assert_eq!(t.len(), 2);
                assert!(matches!(t[0].class(), LocalClass::PreOneHalf(_)));
                assert!(matches!(t[1].class(), LocalClass::PostOneHalf(_)));
            }
        }
    }

    #[test]
    fn sublime_contains_crossed_once_occupied() {
        for t in local_tensors(4) {
            if classify_local(&t).unwrap() == TensorTightness::Sublime {
                assert!(t.iter().any(|d| d.var == Variant::C));
            }
        }
    }
}
