//! Operation trees: rooted plane binary trees recording the order in which
//! the factors of a class tensor are combined.
//!
//! A vertex is identified by the contiguous range of leaves below it, so
//! labels are always slices of the base tensor and never materialised.

mod classify;
mod predict;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ainf_engine::{AinfEngine, ClassTensor, EngineError};
use crate::homology::{classify_hdata, HDataTightness, HomologyClass};
use crate::strand_core::{Algebra, HData};

pub use classify::{classify_tree, reduced_local_tree, LabelTable, ReducedLocalTree, TreeVerdict};
pub use predict::{
    expected_local_validity, local_validity_counts, local_validity_mismatches, predict, valid_distributive_trees,
    verify_predictions, verify_tree_lemmas, LocalValidityRow,
    Prediction,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("cannot parse tree `{0}`")]
    Parse(String),
    #[error("tree has {found} leaves but the tensor has {expected} factors")]
    LeafCount { expected: usize, found: usize },
    #[error("the tensor is empty or not viable")]
    NotViable,
    #[error("factor {0} is not a nonzero homology class")]
    NotTight(usize),
    #[error("graft position {0} is out of range")]
    GraftPosition(usize),
    #[error("grafted tensor does not have the H-data of factor {0}")]
    GraftHData(usize),
    #[error("X of the grafted tensor is not factor {0}")]
    GraftX(usize),
    #[error("cannot transplant at the root")]
    TransplantRoot,
    #[error("no vertex at `{0}`")]
    NoVertex(Path),
    #[error("transplanted tree is not a tree for the label at `{0}`")]
    TransplantLabel(Path),
    #[error("branch shift needs an internal left child at the root")]
    BranchShift,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// The underlying rooted plane binary tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

/// A vertex address: the word of left and right moves from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<Side>);

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for side in &self.0 {
            f.write_str(match side {
                Side::L => "L",
                Side::R => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for Path {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, TreeError> {
        if s == "root" {
            return Ok(Path::default());
        }
        s.chars()
            .map(|c| match c {
                'L' => Ok(Side::L),
                'R' => Ok(Side::R),
                _ => Err(TreeError::Parse(s.to_string())),
            })
            .collect::<Result<_, _>>()
            .map(Path)
    }
}

/// A vertex of a shape, listed in preorder. Its label covers the factors
/// `lo..hi` of the base tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub path: Path,
    pub lo: usize,
    pub hi: usize,
    pub children: Option<(usize, usize)>,
    pub parent: Option<usize>,
}

impl Vertex {
    pub fn leaves(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    /// Whether `other` lies strictly below this vertex.
    pub fn is_above(&self, other: &Vertex) -> bool {
        self.lo <= other.lo && other.hi <= self.hi && (self.lo, self.hi) != (other.lo, other.hi)
    }
}

impl Shape {
    pub fn node(left: Shape, right: Shape) -> Shape {
        Shape::Node(Box::new(left), Box::new(right))
    }

    pub fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Every shape with `n` leaves, in a fixed order: left subtrees grow first.
    pub fn enumerate(n: usize) -> Vec<Shape> {
        let mut table: Vec<Vec<Shape>> = vec![Vec::new(), vec![Shape::Leaf]];
        for k in 2..=n {
            let mut here = Vec::new();
            for left in 1..k {
                for l in &table[left] {
                    for r in &table[k - left] {
                        here.push(Shape::node(l.clone(), r.clone()));
                    }
                }
            }
            table.push(here);
        }
        table.into_iter().nth(n).unwrap_or_default()
    }

    /// Parses the parenthesised form, e.g. `((1 (2 3)) (4 5))`. Leaves must
    /// be numbered `1..=n` from left to right.
    pub fn parse(text: &str) -> Result<Shape, TreeError> {
        let err = || TreeError::Parse(text.to_string());
        let spaced = text.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;
        let mut next_leaf = 1;
        let shape = parse_shape(&tokens, &mut pos, &mut next_leaf).ok_or_else(err)?;
        if pos != tokens.len() {
            return Err(err());
        }
        Ok(shape)
    }

    pub fn subtree(&self, path: &Path) -> Option<&Shape> {
        path.0.iter().try_fold(self, |s, side| match (s, side) {
            (Shape::Node(l, _), Side::L) => Some(&**l),
            (Shape::Node(_, r), Side::R) => Some(&**r),
            (Shape::Leaf, _) => None,
        })
    }

    fn replaced(&self, path: &[Side], new: &Shape) -> Option<Shape> {
        match (self, path.split_first()) {
            (_, None) => Some(new.clone()),
            (Shape::Node(l, r), Some((Side::L, rest))) => Some(Shape::node(l.replaced(rest, new)?, (**r).clone())),
            (Shape::Node(l, r), Some((Side::R, rest))) => Some(Shape::node((**l).clone(), r.replaced(rest, new)?)),
            (Shape::Leaf, Some(_)) => None,
        }
    }

    /// Preorder vertex list; index 0 is the root.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = Vec::new();
        self.push_vertices(Path::default(), 0, None, &mut out);
        out
    }

    fn push_vertices(&self, path: Path, lo: usize, parent: Option<usize>, out: &mut Vec<Vertex>) -> usize {
        let me = out.len();
        out.push(Vertex {
            path: path.clone(),
            lo,
            hi: lo + self.leaves(),
            children: None,
            parent,
        });
        if let Shape::Node(l, r) = self {
            let mut lp = path.clone();
            lp.0.push(Side::L);
            let li = l.push_vertices(lp, lo, Some(me), out);
            let mut rp = path;
            rp.0.push(Side::R);
            let ri = r.push_vertices(rp, lo + l.leaves(), Some(me), out);
            out[me].children = Some((li, ri));
        }
        me
    }

    /// Deletes the leaves not marked in `keep` and smooths the vertices left
    /// with one child. `None` when nothing is kept.
    pub fn retain_leaves(&self, keep: &[bool]) -> Option<Shape> {
        match self {
            Shape::Leaf => keep[0].then_some(Shape::Leaf),
            Shape::Node(l, r) => {
                let (kl, kr) = keep.split_at(l.leaves());
                match (l.retain_leaves(kl), r.retain_leaves(kr)) {
                    (Some(a), Some(b)) => Some(Shape::node(a, b)),
                    (a, b) => a.or(b),
                }
            }
        }
    }

    fn write_numbered(&self, f: &mut fmt::Formatter<'_>, next: &mut usize) -> fmt::Result {
        match self {
            Shape::Leaf => {
                *next += 1;
                write!(f, "{}", *next)
            }
            Shape::Node(l, r) => {
                f.write_str("(")?;
                l.write_numbered(f, next)?;
                f.write_str(" ")?;
                r.write_numbered(f, next)?;
                f.write_str(")")
            }
        }
    }
}

fn parse_shape(tokens: &[&str], pos: &mut usize, next_leaf: &mut usize) -> Option<Shape> {
    let tok = *tokens.get(*pos)?;
    *pos += 1;
    if tok == "(" {
        let left = parse_shape(tokens, pos, next_leaf)?;
        let right = parse_shape(tokens, pos, next_leaf)?;
        (tokens.get(*pos) == Some(&")")).then(|| {
            *pos += 1;
            Shape::node(left, right)
        })
    } else {
        let leaf: usize = tok.parse().ok()?;
        (leaf == *next_leaf).then(|| {
            *next_leaf += 1;
            Shape::Leaf
        })
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_numbered(f, &mut 0)
    }
}

impl FromStr for Shape {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, TreeError> {
        Shape::parse(s)
    }
}

/// A shape together with the class tensor labelling its leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationTree {
    shape: Shape,
    tensor: ClassTensor,
}

impl OperationTree {
    /// Checks that every factor is a nonzero class and the tensor is viable.
    pub fn new(alg: &Algebra, shape: Shape, tensor: ClassTensor) -> Result<Self, TreeError> {
        if shape.leaves() != tensor.len() {
            return Err(TreeError::LeafCount {
                expected: tensor.len(),
                found: shape.leaves(),
            });
        }
        check_class_tensor(alg, &tensor)?;
        Ok(OperationTree { shape, tensor })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn tensor(&self) -> &[HData] {
        &self.tensor
    }

    pub fn label(&self, v: &Vertex) -> &[HData] {
        &self.tensor[v.lo..v.hi]
    }

    /// The operation subtree below the vertex at `path`.
    pub fn subtree(&self, path: &Path) -> Result<OperationTree, TreeError> {
        let v = self
            .shape
            .vertices()
            .into_iter()
            .find(|v| &v.path == path)
            .ok_or_else(|| TreeError::NoVertex(path.clone()))?;
        Ok(OperationTree {
            shape: self.shape.subtree(path).expect("vertex exists").clone(),
            tensor: self.label(&v).to_vec(),
        })
    }

    /// Places `left` and `right` below a new root.
    pub fn join(alg: &Algebra, left: &OperationTree, right: &OperationTree) -> Result<OperationTree, TreeError> {
        let mut tensor = left.tensor.clone();
        tensor.extend_from_slice(&right.tensor);
        OperationTree::new(alg, Shape::node(left.shape.clone(), right.shape.clone()), tensor)
    }

    /// Identifies leaf `k` (counted from 1) with the root of `other`, whose
    /// tensor must have the H-data of the replaced factor.
    pub fn graft(&self, other: &OperationTree, k: usize) -> Result<OperationTree, TreeError> {
        if k == 0 || k > self.tensor.len() {
            return Err(TreeError::GraftPosition(k));
        }
        if HData::compose_all(&other.tensor) != Some(self.tensor[k - 1]) {
            return Err(TreeError::GraftHData(k));
        }
        let leaf_path = self.shape.vertices().into_iter().filter(|v| v.is_leaf()).nth(k - 1).expect("k in range").path;
        let shape = self.shape.replaced(&leaf_path.0, &other.shape).expect("leaf path exists");
        let mut tensor = self.tensor[..k - 1].to_vec();
        tensor.extend_from_slice(&other.tensor);
        tensor.extend_from_slice(&self.tensor[k..]);
        Ok(OperationTree { shape, tensor })
    }

    /// [`OperationTree::graft`] under the stronger requirement that `X_j` of the
    /// grafted tensor is the replaced factor.
    pub fn graft_on_x(&self, engine: &AinfEngine, other: &OperationTree, k: usize) -> Result<OperationTree, TreeError> {
        if k == 0 || k > self.tensor.len() {
            return Err(TreeError::GraftPosition(k));
        }
        if engine.x(&other.tensor)? != HomologyClass::Nonzero(self.tensor[k - 1]) {
            return Err(TreeError::GraftX(k));
        }
        self.graft(other, k)
    }

    /// Replaces the subtree below the non-root vertex at `path` by `other`,
    /// which must be a tree for the same label.
    pub fn transplant(&self, path: &Path, other: &OperationTree) -> Result<OperationTree, TreeError> {
        if path.0.is_empty() {
            return Err(TreeError::TransplantRoot);
        }
        let current = self.subtree(path)?;
        if current.tensor != other.tensor {
            return Err(TreeError::TransplantLabel(path.clone()));
        }
        Ok(OperationTree {
            shape: self.shape.replaced(&path.0, &other.shape).expect("vertex exists"),
            tensor: self.tensor.clone(),
        })
    }

    /// `((A B) C)` becomes `(A (B C))`.
    pub fn branch_shift(&self) -> Result<OperationTree, TreeError> {
        let Shape::Node(l, c) = &self.shape else {
            return Err(TreeError::BranchShift);
        };
        let Shape::Node(a, b) = &**l else {
            return Err(TreeError::BranchShift);
        };
        Ok(OperationTree {
            shape: Shape::node((**a).clone(), Shape::node((**b).clone(), (**c).clone())),
            tensor: self.tensor.clone(),
        })
    }
}

impl fmt::Display for OperationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.shape.fmt(f)
    }
}

pub(crate) fn check_class_tensor(alg: &Algebra, m: &[HData]) -> Result<HData, TreeError> {
    let composite = HData::compose_all(m).ok_or(TreeError::NotViable)?;
    if let Some(i) = m.iter().position(|h| classify_hdata(alg, h) != HDataTightness::Tight) {
        return Err(TreeError::NotTight(i + 1));
    }
    Ok(composite)
}
