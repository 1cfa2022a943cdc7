use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use crate::ainf_engine::{par_check_many, AinfEngine, Mode, Report, TightIndex};
use crate::arc_diagram::PairId;
use crate::homology::HomologyClass;
use crate::strand_core::{Algebra, Diagram, Element, HData, LocalClass, LocalHData, Variant};
use crate::tensor_class::{local_class_tensors, TensorTightness};

use super::classify::{class_tag, flags, LabelTable};
use super::{classify_tree, OperationTree, Shape, TreeError, TreeVerdict};

/// What the tree criteria say about `X_n(M)` and `f̄_n(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prediction {
    /// No valid distributive tree: both operations vanish.
    MustBeZero,
    /// `f̄_n(M)` is this single diagram.
    NonzeroF(Diagram),
    /// `X_n(M)` is the class of the tight diagram with this H-data.
    NonzeroX(HData),
    Undetermined,
}

impl Prediction {
    pub fn name(&self) -> &'static str {
        match self {
            Prediction::MustBeZero => "must-be-zero",
            Prediction::NonzeroF(_) => "nonzero-f",
            Prediction::NonzeroX(_) => "nonzero-X",
            Prediction::Undetermined => "undetermined",
        }
    }
}

const CATALOG_MAX: usize = 8;

/// Vertex ranges of every shape with `n` leaves, for `n <= CATALOG_MAX`.
fn catalog() -> &'static [Vec<Vec<(usize, usize)>>] {
    static CATALOG: OnceLock<Vec<Vec<Vec<(usize, usize)>>>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        (0..=CATALOG_MAX)
            .map(|n| Shape::enumerate(n).iter().map(ranges_of).collect())
            .collect()
    })
}

fn ranges_of(s: &Shape) -> Vec<(usize, usize)> {
    s.vertices().iter().map(|v| (v.lo, v.hi)).collect()
}

fn for_each_shape(n: usize, mut visit: impl FnMut(&[(usize, usize)])) {
    if n <= CATALOG_MAX {
        catalog()[n].iter().for_each(|r| visit(r));
    } else {
        Shape::enumerate(n).iter().for_each(|s| visit(&ranges_of(s)));
    }
}

pub fn predict(alg: &Algebra, m: &[HData]) -> Result<Prediction, TreeError> {
    let table = LabelTable::new(alg, m)?;
    let composite = HData::compose_all(m).expect("checked viable");
    let n = m.len();
    let (mut any, mut all_f, mut all_x) = (false, true, true);
    for_each_shape(n, |ranges| {
        let f = flags(&table, ranges.iter().copied());
        if f.valid && f.distributive {
            any = true;
            all_f &= f.strict_f;
            all_x &= f.strict_x;
        }
    });
    if !any {
        return Ok(Prediction::MustBeZero);
    }
    let doubly_on = alg.pairs().any(|p| alg.local_class(&composite, p) == LocalClass::Doubly11);
    if doubly_on {
        return Ok(Prediction::Undetermined);
    }
    let twisted: Vec<(PairId, Variant)> = alg
        .pairs()
        .filter(|&p| table.at(0, n, p) == TensorTightness::Twisted)
        .map(|p| (p, Variant::C))
        .collect();
    if all_f {
        let d = alg
            .diagram(composite, &twisted)
            .expect("twisted pairs of a viable non-singular tensor are once occupied");
        return Ok(Prediction::NonzeroF(d));
    }
    if all_x && twisted.is_empty() {
        return Ok(Prediction::NonzeroX(composite));
    }
    Ok(Prediction::Undetermined)
}

/// All valid distributive shapes for `m`.
pub fn valid_distributive_trees(alg: &Algebra, m: &[HData]) -> Result<Vec<Shape>, TreeError> {
    let mut out = Vec::new();
    for shape in Shape::enumerate(m.len()) {
        let tree = OperationTree::new(alg, shape, m.to_vec())?;
        let v = classify_tree(alg, &tree)?;
        if v.valid && v.distributive {
            out.push(tree.shape().clone());
        }
    }
    Ok(out)
}

/// Compares predictions with values computed by a quotient-mode engine on
/// every viable class tensor of length `1..=n_max`.
pub fn verify_predictions(engine: &AinfEngine, index: &TightIndex, n_max: usize) -> Vec<Report> {
    assert_eq!(engine.config().mode, Mode::Quotient, "predictions concern values modulo F");
    let alg = engine.algebra();
    let names = ["tree predictions", "nonzero implies trees"];
    let mut totals: Vec<Report> = names.iter().map(|n| Report::new(*n)).collect();
    for n in 1..=n_max {
        let per_n = par_check_many(index, n, &names, |m, reports| {
            let outcome = (|| -> Result<(Option<bool>, Option<bool>), String> {
                let x = engine.x(m).map_err(|e| e.to_string())?;
                let f = engine.f(m).map_err(|e| e.to_string())?;
                let prediction = predict(alg, m).map_err(|e| e.to_string())?;
                let agrees = match &prediction {
                    Prediction::MustBeZero => Some(x.is_zero() && f.is_zero()),
                    Prediction::NonzeroF(d) => Some(f == Element::from_diagram(*d)),
                    Prediction::NonzeroX(h) => Some(x == HomologyClass::Nonzero(*h)),
                    Prediction::Undetermined => None,
                };
                let has_tree = if x.is_zero() && f.is_zero() {
                    None
                } else {
                    Some(!valid_distributive_trees(alg, m).map_err(|e| e.to_string())?.is_empty())
                };
                Ok((agrees, has_tree))
            })();
            match outcome {
                Ok((agrees, has_tree)) => {
                    if let Some(ok) = agrees {
                        reports[0].record(ok, || format!("{m:?}"));
                    }
                    if let Some(ok) = has_tree {
                        reports[1].record(ok, || format!("{m:?}"));
                    }
                }
                Err(e) => reports[0].record(false, || format!("{m:?}: {e}")),
            }
        });
        for (t, r) in totals.iter_mut().zip(per_n) {
            t.merge(r);
        }
    }
    totals
}

/// The structural lemmas about trees, checked on every shape over every
/// viable class tensor of length `1..=n_max`.
pub fn verify_tree_lemmas(alg: &Algebra, index: &TightIndex, n_max: usize) -> Vec<Report> {
    let names = [
        "strong validity forms agree",
        "local validity",
        "valid iff twisted local vertex",
        "subtrees inherit",
        "V_T bijection",
        "disjoint subtrees",
        "valid but not strongly valid",
    ];
    let mut totals: Vec<Report> = names.iter().map(|n| Report::new(*n)).collect();
    for n in 1..=n_max {
        let shapes = Shape::enumerate(n);
        let per_n = par_check_many(index, n, &names, |m, reports| {
            for shape in &shapes {
                let tree = OperationTree::new(alg, shape.clone(), m.to_vec()).expect("index yields viable tensors");
                let v = classify_tree(alg, &tree).expect("viable");
                let witness = || format!("{tree} on {m:?}");
                let forms = v.strong_validity_forms;
                reports[0].record(forms.iter().all(|&f| f == forms[0]) && (!v.strongly_valid || v.valid), witness);
                reports[1].record(v.valid == v.reduced.iter().all(|r| r.is_valid()), witness);
                let non_tight = |p: usize| v.tags[0][p] != TensorTightness::Tight;
                let twisted_everywhere = v
                    .reduced
                    .iter()
                    .all(|r| !non_tight(r.pair.0) || r.tags.contains(&TensorTightness::Twisted));
                reports[2].record(v.valid == twisted_everywhere, witness);
                reports[3].record(subtrees_inherit(alg, &tree, &v), witness);
                reports[4].record(v_bijection(&v), witness);
                reports[5].record(disjoint_subtrees(&v), witness);
                if v.valid && !v.strongly_valid {
                    let composite = HData::compose_all(m).expect("viable");
                    let culprit = alg.pairs().any(|p| {
                        alg.local_class(&composite, p) == LocalClass::Doubly11 && v.tags[0][p.0] == TensorTightness::Critical
                    });
                    reports[6].record(culprit, witness);
                }
            }
        });
        for (t, r) in totals.iter_mut().zip(per_n) {
            t.merge(r);
        }
    }
    totals
}

fn subtrees_inherit(alg: &Algebra, tree: &OperationTree, v: &TreeVerdict) -> bool {
    let strict = v.strictly_f_distributive || v.strictly_x_distributive;
    v.vertices.iter().skip(1).all(|vertex| {
        let sub = tree.subtree(&vertex.path).expect("vertex exists");
        let sv = classify_tree(alg, &sub).expect("sub-tensors are viable");
        let restricts = match (&v.v_t, &sv.v_t) {
            (Some(big), Some(small)) => small.iter().all(|(p, &w)| {
                let mut path = vertex.path.clone();
                path.0.extend_from_slice(&sv.vertices[w].path.0);
                big.get(p).map(|&u| &v.vertices[u].path) == Some(&path)
            }),
            _ => true,
        };
        (!v.valid || sv.valid)
            && (!v.strongly_valid || (sv.strongly_valid && restricts))
            && (!strict || sv.strictly_f_distributive)
    })
}

fn v_bijection(v: &TreeVerdict) -> bool {
    let Some(v_t) = &v.v_t else {
        return true;
    };
    let image: BTreeSet<usize> = v_t.values().copied().collect();
    let injective = image.len() == v_t.len();
    let internal = |root_too: bool| -> BTreeSet<usize> {
        (0..v.vertices.len())
            .filter(|&i| !v.vertices[i].is_leaf() && (root_too || i != 0))
            .collect()
    };
    (!v.strictly_f_distributive || (injective && image == internal(true)))
        && (!v.strictly_x_distributive || (injective && image == internal(false)))
}

fn disjoint_subtrees(v: &TreeVerdict) -> bool {
    if !v.strongly_valid {
        return true;
    }
    let vs = &v.vertices;
    (0..vs.len()).all(|a| {
        (a + 1..vs.len()).all(|b| {
            let related = vs[a].is_above(&vs[b]) || vs[b].is_above(&vs[a]);
            related
                || v.tags[a]
                    .iter()
                    .zip(&v.tags[b])
                    .all(|(&x, &y)| x == TensorTightness::Tight || y == TensorTightness::Tight)
        })
    })
}

/// Valid tree counts on local critical tensors without idle factors, grouped
/// by how the pair is occupied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalValidityRow {
    pub class: LocalClass,
    pub factors: usize,
    pub tensors: usize,
    pub shapes: usize,
    /// The distinct numbers of valid shapes seen across these tensors.
    pub valid: BTreeSet<usize>,
}

pub fn local_validity_counts() -> Vec<LocalValidityRow> {
    let mut rows: BTreeMap<(LocalClass, usize), LocalValidityRow> = BTreeMap::new();
    for (classes, tag) in local_class_tensors() {
        if tag != Some(TensorTightness::Critical) {
            continue;
        }
        let hds: Vec<LocalHData> = classes.iter().map(|c| c[0].hd).collect();
        let composite = hds[1..].iter().fold(hds[0], |acc, h| LocalHData::new(acc.bits | h.bits, acc.s, h.t));
        let k = classes.len();
        let mut valid = 0;
        for_each_shape(k, |ranges| {
            if ranges.iter().all(|&(lo, hi)| class_tag(&classes[lo..hi]) != TensorTightness::Singular) {
                valid += 1;
            }
        });
        let row = rows.entry((composite.class(), k)).or_insert_with(|| LocalValidityRow {
            class: composite.class(),
            factors: k,
            tensors: 0,
            shapes: Shape::enumerate(k).len(),
            valid: BTreeSet::new(),
        });
        row.tensors += 1;
        row.valid.insert(valid);
    }
    rows.into_values().collect()
}

/// Factor count, shape count and valid shape count for a critical pair of
/// each occupancy class.
pub fn expected_local_validity(class: LocalClass) -> Option<(usize, usize, usize)> {
    match class {
        LocalClass::PreSesqui01(_) | LocalClass::PostSesqui10(_) => Some((3, 2, 1)),
        LocalClass::Doubly00 => Some((4, 5, 2)),
        LocalClass::Doubly11 => Some((4, 5, 3)),
        _ => None,
    }
}

/// Rows of [`local_validity_counts`] that disagree with
/// [`expected_local_validity`].
pub fn local_validity_mismatches() -> Vec<String> {
    let rows = local_validity_counts();
    if rows.is_empty() {
        return vec!["no critical local tensors found".to_string()];
    }
    rows.iter()
        .filter(|row| {
            expected_local_validity(row.class)
                .map(|(k, shapes, valid)| (row.factors, row.shapes, &row.valid) != (k, shapes, &BTreeSet::from([valid])))
                .unwrap_or(true)
        })
        .map(|row| format!("{row:?}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::{ArcDiagram, PairOrdering};
    use crate::ainf_engine::EngineConfig;
    use crate::shorthand::parse_tensor;
    use std::sync::Arc;

    #[test]
    fn critical_local_tensors_have_the_expected_valid_counts() {
        assert_eq!(local_validity_mismatches(), Vec::<String>::new());
    }

    #[test]
    fn tight_tensors_of_three_or_more_must_vanish() {
        let alg = Algebra::new(ArcDiagram::disjoint_fragments(&["P", "Q"]));
        let m = parse_tensor(&alg, "P: * p+ o . o . o; Q: * . * q+ o . o").unwrap();
        assert_eq!(predict(&alg, &m).unwrap(), Prediction::MustBeZero);
    }

    #[test]
    fn f2_of_a_twisted_pair_is_predicted() {
        let alg = Arc::new(Algebra::new(ArcDiagram::disjoint_fragments(&["P"])));
        let m = parse_tensor(&alg, "P: * p'+ o p'- *").unwrap();
        let Prediction::NonzeroF(d) = predict(&alg, &m).unwrap() else {
            panic!("expected a nonzero f");
        };
        let engine = AinfEngine::new(alg.clone(), PairOrdering::default_for(alg.arc_diagram()), EngineConfig::default());
        assert_eq!(engine.f(&m).unwrap(), Element::from_diagram(d));
    }
}
