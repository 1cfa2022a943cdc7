use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::arc_diagram::PairId;
use crate::strand_core::{Algebra, HData, LocalDiagram, LocalHData};
use crate::tensor_class::{classify_local, classify_local_class_tensor, local_tight_class, TensorTightness};

use super::{check_class_tensor, OperationTree, Shape, TreeError, Vertex};

/// Local tightness of every contiguous sub-tensor `lo..hi` at every pair.
#[derive(Clone, Debug)]
pub struct LabelTable {
    n: usize,
    pairs: usize,
    tags: Vec<TensorTightness>,
}

impl LabelTable {
    pub fn new(alg: &Algebra, m: &[HData]) -> Result<Self, TreeError> {
        check_class_tensor(alg, m)?;
        let n = m.len();
        let pairs = alg.pair_count();
        let mut tags = vec![TensorTightness::Tight; n * n * pairs];
        for p in alg.pairs() {
            let reps: Vec<LocalDiagram> = m.iter().map(|h| tight_rep(alg.local_hdata(h, p))).collect();
            for lo in 0..n {
                for hi in lo + 1..=n {
                    let tag = classify_local(&reps[lo..hi]).expect("sub-tensors of a viable tensor are viable");
                    tags[Self::index(n, pairs, lo, hi, p)] = tag;
                }
            }
        }
        Ok(LabelTable { n, pairs, tags })
    }

    fn index(n: usize, pairs: usize, lo: usize, hi: usize, p: PairId) -> usize {
        (lo * n + hi - 1) * pairs + p.0
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn at(&self, lo: usize, hi: usize, p: PairId) -> TensorTightness {
        self.tags[Self::index(self.n, self.pairs, lo, hi, p)]
    }

    pub fn tags(&self, lo: usize, hi: usize) -> Vec<TensorTightness> {
        (0..self.pairs).map(|k| self.at(lo, hi, PairId(k))).collect()
    }

    pub fn is_singular(&self, lo: usize, hi: usize) -> bool {
        (0..self.pairs).any(|k| self.at(lo, hi, PairId(k)) == TensorTightness::Singular)
    }

    /// Number of pairs at which the label is twisted or critical.
    pub fn non_tight(&self, lo: usize, hi: usize) -> usize {
        (0..self.pairs)
            .filter(|&k| self.at(lo, hi, PairId(k)).is_twisted_or_critical())
            .count()
    }
}

fn tight_rep(hd: LocalHData) -> LocalDiagram {
    LocalDiagram {
        hd,
        var: hd.class().variants()[0],
    }
}

/// Validity and distributivity flags from vertex ranges alone.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Flags {
    pub valid: bool,
    pub distributive: bool,
    pub strict_f: bool,
    pub strict_x: bool,
}

pub(crate) fn flags(table: &LabelTable, ranges: impl Iterator<Item = (usize, usize)> + Clone) -> Flags {
    let n = table.len();
    let valid = ranges.clone().all(|(lo, hi)| !table.is_singular(lo, hi));
    if !valid {
        return Flags::default();
    }
    let mut distributive = true;
    let mut strict_f = true;
    let mut strict_x = true;
    for (lo, hi) in ranges {
        let k = hi - lo;
        let c = table.non_tight(lo, hi);
        distributive &= c + 2 >= k;
        strict_f &= c + 1 == k;
        strict_x &= if (lo, hi) == (0, n) { c + 2 == n } else { c + 1 == k };
    }
    Flags {
        valid,
        distributive,
        strict_f,
        strict_x,
    }
}

/// The reduced local tree at one pair: the shape on the factors active at the
/// pair, with the local tightness of each of its vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedLocalTree {
    pub pair: PairId,
    /// Positions in the base tensor of the active factors.
    pub factors: Vec<usize>,
    pub shape: Option<Shape>,
    /// Preorder, matching `shape.vertices()`.
    pub tags: Vec<TensorTightness>,
}

impl ReducedLocalTree {
    pub fn is_valid(&self) -> bool {
        self.tags.iter().all(|&t| t != TensorTightness::Singular)
    }

    pub fn twisted_labels(&self) -> usize {
        self.tags.iter().filter(|&&t| t == TensorTightness::Twisted).count()
    }
}

fn local_classes(alg: &Algebra, m: &[HData], p: PairId) -> Vec<Vec<LocalDiagram>> {
    m.iter().map(|h| local_tight_class(alg.local_hdata(h, p))).collect()
}

pub(super) fn class_tag(classes: &[Vec<LocalDiagram>]) -> TensorTightness {
    classify_local_class_tensor(classes).expect("local tightness does not depend on representatives")
}

pub fn reduced_local_tree(alg: &Algebra, tree: &OperationTree, pair: PairId) -> ReducedLocalTree {
    let m = tree.tensor();
    let active: Vec<bool> = m.iter().map(|h| alg.local_hdata(h, pair).bits != 0).collect();
    let factors: Vec<usize> = (0..m.len()).filter(|&i| active[i]).collect();
    let shape = tree.shape().retain_leaves(&active);
    let classes: Vec<Vec<LocalDiagram>> = local_classes(alg, m, pair).into_iter().zip(&active).filter(|(_, &a)| a).map(|(c, _)| c).collect();
    let tags = shape
        .as_ref()
        .map(|s| s.vertices().iter().map(|v| class_tag(&classes[v.lo..v.hi])).collect())
        .unwrap_or_default();
    ReducedLocalTree {
        pair,
        factors,
        shape,
        tags,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeVerdict {
    pub vertices: Vec<Vertex>,
    /// `tags[v][pair]`: tightness of the label of vertex `v` at each pair.
    pub tags: Vec<Vec<TensorTightness>>,
    pub valid: bool,
    pub strongly_valid: bool,
    pub distributive: bool,
    pub strictly_f_distributive: bool,
    pub strictly_x_distributive: bool,
    /// The four characterisations of strong validity, each evaluated on its own.
    pub strong_validity_forms: [bool; 4],
    /// Each pair where the root label is not tight, sent to the lowest vertex
    /// whose label is twisted there. Present when strongly valid.
    pub v_t: Option<BTreeMap<PairId, usize>>,
    pub reduced: Vec<ReducedLocalTree>,
}

impl TreeVerdict {
    /// Tab-separated flags followed by the `V_T` assignments.
    pub fn report(&self, alg: &Algebra) -> String {
        let z = alg.arc_diagram();
        let flag = |b: bool| if b { "yes" } else { "no" };
        let mut out = format!(
            "valid={}\tstrongly_valid={}\tdistributive={}\tstrictly_f={}\tstrictly_x={}",
            flag(self.valid),
            flag(self.strongly_valid),
            flag(self.distributive),
            flag(self.strictly_f_distributive),
            flag(self.strictly_x_distributive),
        );
        if let Some(v_t) = &self.v_t {
            for (p, &v) in v_t {
                let _ = write!(out, "\tV({})={}", z.pair(*p).name, self.vertices[v].path);
            }
        }
        out
    }
}

/// Unique lowest member of `set` in the descendant order, if there is one.
fn unique_lowest(vertices: &[Vertex], set: &[usize]) -> Option<usize> {
    let mut lowest = set
        .iter()
        .copied()
        .filter(|&v| !set.iter().any(|&u| vertices[v].is_above(&vertices[u])));
    let first = lowest.next()?;
    lowest.next().is_none().then_some(first)
}

pub fn classify_tree(alg: &Algebra, tree: &OperationTree) -> Result<TreeVerdict, TreeError> {
    let m = tree.tensor();
    let table = LabelTable::new(alg, m)?;
    let vertices = tree.shape().vertices();
    let f = flags(&table, vertices.iter().map(|v| (v.lo, v.hi)));
    let tags: Vec<Vec<TensorTightness>> = vertices.iter().map(|v| table.tags(v.lo, v.hi)).collect();
    let n = m.len();
    let non_tight: Vec<PairId> = alg.pairs().filter(|&p| table.at(0, n, p) != TensorTightness::Tight).collect();
    let reduced: Vec<ReducedLocalTree> = alg.pairs().map(|p| reduced_local_tree(alg, tree, p)).collect();

    let with_tag = |p: PairId, pred: &dyn Fn(TensorTightness) -> bool| -> Vec<usize> {
        (0..vertices.len()).filter(|&v| pred(tags[v][p.0])).collect()
    };
    let twisted = |t: TensorTightness| t == TensorTightness::Twisted;
    let form_lowest_twisted = non_tight
        .iter()
        .all(|&p| unique_lowest(&vertices, &with_tag(p, &twisted)).is_some());
    let form_lowest_non_tight = f.valid
        && non_tight
            .iter()
            .all(|&p| unique_lowest(&vertices, &with_tag(p, &|t| t != TensorTightness::Tight)).is_some());
    let form_local_tree = non_tight.iter().all(|&p| {
        let classes = local_classes(alg, m, p);
        let local_twisted: Vec<usize> = (0..vertices.len())
            .filter(|&v| class_tag(&classes[vertices[v].lo..vertices[v].hi]) == TensorTightness::Twisted)
            .collect();
        unique_lowest(&vertices, &local_twisted).is_some()
    });
    let form_reduced = non_tight.iter().all(|&p| reduced[p.0].twisted_labels() == 1);
    let forms = [form_lowest_twisted, form_lowest_non_tight, form_local_tree, form_reduced];
    let strongly_valid = forms[0];

    let v_t = strongly_valid.then(|| {
        non_tight
            .iter()
            .map(|&p| (p, unique_lowest(&vertices, &with_tag(p, &twisted)).expect("strongly valid")))
            .collect()
    });
    Ok(TreeVerdict {
        vertices,
        tags,
        valid: f.valid,
        strongly_valid,
        distributive: f.distributive,
        strictly_f_distributive: f.strict_f,
        strictly_x_distributive: f.strict_x,
        strong_validity_forms: forms,
        v_t,
        reduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::ArcDiagram;
    use crate::shorthand::parse_tensor;

    fn verdicts(alg: &Algebra, text: &str) -> Vec<(String, TreeVerdict)> {
        let m = parse_tensor(alg, text).unwrap();
        Shape::enumerate(m.len())
            .into_iter()
            .map(|s| {
                let t = OperationTree::new(alg, s, m.clone()).unwrap();
                (t.to_string(), classify_tree(alg, &t).unwrap())
            })
            .collect()
    }

    #[test]
    fn tight_tensor_trees_are_valid_with_empty_v() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]));
        for (_, v) in verdicts(&alg, "P: * p+ o . o . o; Q: * . * . * . *") {
            assert!(v.valid && v.strongly_valid);
            assert_eq!(v.v_t, Some(BTreeMap::new()));
        }
    }

    #[test]
    fn sesqui_critical_has_one_valid_tree() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P"]));
        let vs = verdicts(&alg, "P: o p- * p'+ o p'- *");
        let valid: Vec<&str> = vs.iter().filter(|(_, v)| v.valid).map(|(s, _)| s.as_str()).collect();
        assert_eq!(valid.len(), 1);
        for (_, v) in &vs {
            assert_eq!(v.strong_validity_forms, [v.valid; 4]);
        }
    }

    #[test]
    fn reduced_tree_drops_idle_factors() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]));
        let m = parse_tensor(&alg, "P: * p'+ o . o p'- *; Q: * . * q+ o . o").unwrap();
        let t = OperationTree::new(&alg, Shape::parse("((1 2) 3)").unwrap(), m).unwrap();
        let r = reduced_local_tree(&alg, &t, PairId(0));
        assert_eq!(r.factors, vec![0, 2]);
        assert_eq!(r.shape.as_ref().map(|s| s.to_string()).as_deref(), Some("(1 2)"));
        assert_eq!(r.tags, vec![TensorTightness::Twisted, TensorTightness::Tight, TensorTightness::Tight]);
        let q = reduced_local_tree(&alg, &t, PairId(1));
        assert_eq!(q.shape, Some(Shape::Leaf));
    }
}
