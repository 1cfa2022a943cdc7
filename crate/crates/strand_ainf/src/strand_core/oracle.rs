//! Brute-force strand pictures on the one-pair fragment.
//!
//! The fragment has two intervals with three points each: bottom end, place,
//! top end. A picture is a partial map `φ` on those six points, increasing
//! along each interval, with `φ(x) ≥ x`. A symmetrised local diagram is the set
//! of all pictures sharing the same non-horizontal strands and idempotents.
//! Products, differentials and gradings are computed picture by picture and
//! then regrouped, independently of the rules in [`super::local`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::arc_diagram::Slot;

use super::local::{LocalDiagram, LocalHData, Variant};

const POINTS: usize = 6;
const PLACES: [usize; 2] = [1, 4];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("pictures with equal strands disagree on grading")]
    InconsistentGrading,
    #[error("result is not a sum of symmetrised diagrams")]
    NotSymmetrised,
    #[error("no local diagram corresponds to picture strands {0:?}")]
    Unclassified(Vec<(u8, u8)>),
}

/// One strand picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Picture {
    phi: [Option<u8>; POINTS],
}

impl Picture {
    fn sources(&self) -> u8 {
        (0..POINTS).filter(|&i| self.phi[i].is_some()).fold(0, |m, i| m | 1 << i)
    }

    fn targets(&self) -> u8 {
        self.phi.iter().flatten().fold(0, |m, &j| m | 1 << j)
    }

    pub fn inversions(&self) -> u32 {
        let mut inv = 0;
        for a in 0..POINTS {
            for b in a + 1..POINTS {
                if a / 3 != b / 3 {
                    continue;
                }
                if let (Some(x), Some(y)) = (self.phi[a], self.phi[b]) {
                    if x > y {
                        inv += 1;
                    }
                }
            }
        }
        inv
    }

    /// Bits of the four local steps covered by moving strands.
    pub fn coverage(&self) -> u8 {
        let mut bits = 0u8;
        for (a, img) in self.phi.iter().enumerate() {
            let Some(b) = img else { continue };
            for j in 0..2 {
                let lo = 3 * (a / 3) + j;
                if a <= lo && lo + 1 <= *b as usize {
                    bits |= 1 << (2 * (a / 3) + j);
                }
            }
        }
        bits
    }

    /// Doubled grading: twice the inversions, minus for each place in the
    /// source set the sum of the coverage on its two sides.
    pub fn maslov2(&self) -> i32 {
        let cov = self.coverage();
        let sources = self.sources();
        let mut m = 2 * self.inversions() as i32;
        for (k, &p) in PLACES.iter().enumerate() {
            if sources >> p & 1 == 1 {
                m -= i32::from(cov >> (2 * k) & 1) + i32::from(cov >> (2 * k + 1) & 1);
            }
        }
        m
    }

    fn place_count(mask: u8) -> usize {
        PLACES.iter().filter(|&&p| mask >> p & 1 == 1).count()
    }

    fn strands(&self) -> Vec<(u8, u8)> {
        (0..POINTS)
            .filter_map(|a| self.phi[a].map(|b| (a as u8, b)))
            .filter(|(a, b)| a != b)
            .collect()
    }

    fn compose(&self, next: &Picture) -> Option<Picture> {
        if self.targets() != next.sources() {
            return None;
        }
        let mut phi = [None; POINTS];
        for a in 0..POINTS {
            if let Some(b) = self.phi[a] {
                phi[a] = next.phi[b as usize];
            }
        }
        let out = Picture { phi };
        (out.inversions() == self.inversions() + next.inversions()).then_some(out)
    }

    fn resolutions(&self) -> Vec<Picture> {
        let inv = self.inversions();
        let mut out = Vec::new();
        for a in 0..POINTS {
            for b in a + 1..POINTS {
                if a / 3 != b / 3 {
                    continue;
                }
                if let (Some(x), Some(y)) = (self.phi[a], self.phi[b]) {
                    if x > y {
                        let mut phi = self.phi;
                        phi.swap(a, b);
                        let p = Picture { phi };
                        if p.inversions() + 1 == inv {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Non-horizontal strands together with idempotent membership.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymKey {
    strands: Vec<(u8, u8)>,
    s: bool,
    t: bool,
}

/// A symmetrised local diagram: every picture sharing a [`SymKey`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymDiagram {
    pub key: SymKey,
    pub pictures: BTreeSet<Picture>,
}

/// Every picture on the fragment, grouped into symmetrised diagrams.
pub fn symmetrised_diagrams() -> Vec<SymDiagram> {
    let per_interval = |i: u8| -> Vec<Vec<(u8, u8)>> {
        let (lo, mid, hi) = (3 * i, 3 * i + 1, 3 * i + 2);
        vec![vec![], vec![(lo, mid)], vec![(lo, hi)], vec![(mid, hi)], vec![(lo, mid), (mid, hi)]]
    };
    let mut groups: BTreeMap<SymKey, BTreeSet<Picture>> = BTreeMap::new();
    for first in per_interval(0) {
        for second in per_interval(1) {
            let mut base = [None; POINTS];
            for &(a, b) in first.iter().chain(second.iter()) {
                base[a as usize] = Some(b);
            }
            let base = Picture { phi: base };
            let used = base.sources() | base.targets();
            let free: Vec<usize> = (0..POINTS).filter(|&i| used >> i & 1 == 0).collect();
            for mask in 0u32..(1 << free.len()) {
                let mut pic = base;
                for (k, &i) in free.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        pic.phi[i] = Some(i as u8);
                    }
                }
                let s = Picture::place_count(pic.sources());
                let t = Picture::place_count(pic.targets());
                if s > 1 || t > 1 {
                    continue;
                }
                let key = SymKey {
                    strands: pic.strands(),
                    s: s == 1,
                    t: t == 1,
                };
                groups.entry(key).or_default().insert(pic);
            }
        }
    }
    groups
        .into_iter()
        .map(|(key, pictures)| SymDiagram { key, pictures })
        .collect()
}

fn regroup(
    counts: BTreeMap<Picture, u32>,
    s: bool,
    t: bool,
    catalogue: &BTreeMap<SymKey, BTreeSet<Picture>>,
) -> Result<Vec<SymKey>, OracleError> {
    let mut odd: BTreeMap<SymKey, BTreeSet<Picture>> = BTreeMap::new();
    for (pic, n) in counts {
        if n % 2 == 1 {
            let key = SymKey {
                strands: pic.strands(),
                s,
                t,
            };
            odd.entry(key).or_default().insert(pic);
        }
    }
    let mut out = Vec::new();
    for (key, pics) in odd {
        if catalogue.get(&key) != Some(&pics) {
            return Err(OracleError::NotSymmetrised);
        }
        out.push(key);
    }
    Ok(out)
}

/// Product of symmetrised diagrams as a sum of symmetrised diagrams.
pub fn oracle_multiply(
    a: &SymDiagram,
    b: &SymDiagram,
    catalogue: &BTreeMap<SymKey, BTreeSet<Picture>>,
) -> Result<Vec<SymKey>, OracleError> {
    let mut counts: BTreeMap<Picture, u32> = BTreeMap::new();
    for x in &a.pictures {
        for y in &b.pictures {
            if let Some(z) = x.compose(y) {
                *counts.entry(z).or_default() += 1;
            }
        }
    }
    regroup(counts, a.key.s, b.key.t, catalogue)
}

pub fn oracle_differential(
    a: &SymDiagram,
    catalogue: &BTreeMap<SymKey, BTreeSet<Picture>>,
) -> Result<Vec<SymKey>, OracleError> {
    let mut counts: BTreeMap<Picture, u32> = BTreeMap::new();
    for x in &a.pictures {
        for y in x.resolutions() {
            *counts.entry(y).or_default() += 1;
        }
    }
    regroup(counts, a.key.s, a.key.t, catalogue)
}

/// Reads off the local diagram a symmetrised picture set represents.
pub fn identify(d: &SymDiagram) -> Result<LocalDiagram, OracleError> {
    let pic = d.pictures.iter().next().expect("symmetrised diagrams are nonempty");
    let hd = LocalHData::new(pic.coverage(), d.key.s, d.key.t);
    let strands = &d.key.strands;
    let broken_at = |slot: Slot| {
        let p = PLACES[slot.index()] as u8;
        strands.iter().any(|&(_, b)| b == p) && strands.iter().any(|&(a, _)| a == p)
    };
    let class = hd.class();
    let var = match class {
        super::LocalClass::Once11(x) => {
            if broken_at(x) {
                Variant::W
            } else {
                Variant::C
            }
        }
        super::LocalClass::Doubly11 => {
            if broken_at(Slot::First) {
                Variant::G(Slot::First)
            } else if broken_at(Slot::Second) {
                Variant::G(Slot::Second)
            } else {
                Variant::CPair
            }
        }
        c if c.is_realizable() => Variant::U,
        _ => return Err(OracleError::Unclassified(strands.clone())),
    };
    Ok(LocalDiagram { hd, var })
}

/// Local tables regenerated from pictures alone.
#[derive(Debug, Clone)]
pub struct LocalTables {
    /// Each local diagram with its grading and picture count.
    pub diagrams: Vec<(LocalDiagram, i32, usize)>,
    pub products: BTreeMap<(LocalDiagram, LocalDiagram), Vec<LocalDiagram>>,
    pub differentials: BTreeMap<LocalDiagram, Vec<LocalDiagram>>,
}

pub fn derive_local_tables() -> Result<LocalTables, OracleError> {
    let syms = symmetrised_diagrams();
    let catalogue: BTreeMap<SymKey, BTreeSet<Picture>> =
        syms.iter().map(|d| (d.key.clone(), d.pictures.clone())).collect();
    let mut ids: BTreeMap<SymKey, LocalDiagram> = BTreeMap::new();
    let mut diagrams = Vec::new();
    for d in &syms {
        let local = identify(d)?;
        let mut grades = d.pictures.iter().map(Picture::maslov2);
        let g = grades.next().expect("nonempty");
        if grades.any(|x| x != g) {
            return Err(OracleError::InconsistentGrading);
        }
        ids.insert(d.key.clone(), local);
        diagrams.push((local, g, d.pictures.len()));
    }
    diagrams.sort();
    let lookup = |keys: Vec<SymKey>| -> Vec<LocalDiagram> {
        let mut v: Vec<LocalDiagram> = keys.iter().map(|k| ids[k]).collect();
        v.sort();
        v
    };
    let mut products = BTreeMap::new();
    for a in &syms {
        for b in &syms {
            let out = lookup(oracle_multiply(a, b, &catalogue)?);
            products.insert((ids[&a.key], ids[&b.key]), out);
        }
    }
    let mut differentials = BTreeMap::new();
    for a in &syms {
        differentials.insert(ids[&a.key], lookup(oracle_differential(a, &catalogue)?));
    }
    Ok(LocalTables {
        diagrams,
        products,
        differentials,
    })
}

/// Describes every disagreement between the regenerated tables and the
/// hard-coded local rules. An empty list means they agree exactly.
pub fn compare_with_rules(tables: &LocalTables) -> Vec<String> {
    let mut issues = Vec::new();
    let rules = LocalDiagram::all();
    let derived: Vec<LocalDiagram> = tables.diagrams.iter().map(|d| d.0).collect();
    let mut sorted_rules = rules.clone();
    sorted_rules.sort();
    if derived != sorted_rules {
        issues.push(format!(
            "diagram lists differ: {} derived, {} hard-coded",
            derived.len(),
            rules.len()
        ));
    }
    for &(d, g, _) in &tables.diagrams {
        if d.maslov2() != g {
            issues.push(format!("grading of {d}: derived {g}, hard-coded {}", d.maslov2()));
        }
    }
    for (&(a, b), out) in &tables.products {
        let rule: Vec<LocalDiagram> = a.product(b).into_iter().collect();
        if &rule != out {
            issues.push(format!("{a} * {b}: derived {out:?}, hard-coded {rule:?}"));
        }
    }
    for (&a, out) in &tables.differentials {
        let mut rule = a.differential();
        rule.sort();
        if &rule != out {
            issues.push(format!("d({a}): derived {out:?}, hard-coded {rule:?}"));
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picture_counts_per_hdata() {
        let tables = derive_local_tables().unwrap();
        let mut per_hdata: BTreeMap<LocalHData, usize> = BTreeMap::new();
        for (d, _, _) in &tables.diagrams {
            *per_hdata.entry(d.hd).or_default() += 1;
        }
        assert!(per_hdata.values().all(|&n| (1..=3).contains(&n)));
        assert_eq!(per_hdata.values().filter(|&&n| n == 2).count(), 2);
        assert_eq!(per_hdata.values().filter(|&&n| n == 3).count(), 1);
    }

    #[test]
    fn twisted_sits_one_below_crossed() {
        let tables = derive_local_tables().unwrap();
        for &(d, g, _) in &tables.diagrams {
            if d.var == Variant::W {
                let c = tables
                    .diagrams
                    .iter()
                    .find(|(e, _, _)| e.hd == d.hd && e.var == Variant::C)
                    .unwrap();
                assert_eq!(c.1 - g, 2);
            }
        }
    }

    #[test]
    fn hard_coded_rules_match_pictures() {
        let tables = derive_local_tables().unwrap();
        let issues = compare_with_rules(&tables);
        assert!(issues.is_empty(), "{issues:#?}");
    }

    #[test]
    fn idempotent_pictures_compose_to_themselves() {
        let syms = symmetrised_diagrams();
        let catalogue: BTreeMap<SymKey, BTreeSet<Picture>> =
            syms.iter().map(|d| (d.key.clone(), d.pictures.clone())).collect();
        for d in syms.iter().filter(|d| d.key.strands.is_empty() && d.key.s == d.key.t) {
            assert_eq!(oracle_multiply(d, d, &catalogue).unwrap(), vec![d.key.clone()]);
        }
    }
}
