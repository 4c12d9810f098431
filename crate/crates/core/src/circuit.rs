//! Circuit IR: an arena of sum, product, leaf and constant nodes.
//!
//! Children always have a smaller index than their parent, so the arena order
//! is a topological order and every pass is a single forward sweep.

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use num::{BigRational, One, Zero};
use thiserror::Error;

/// Index of a declared variable.
pub type VarIndex = usize;

/// Set of variable indices, one bit per declared variable.
pub type VarSet = FixedBitSet;

/// Handle to a node in a circuit's arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Continuous,
    /// Finite discrete variable over `{0, .., k-1}`.
    Categorical {
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub index: VarIndex,
    pub kind: VarKind,
}

impl VarDecl {
    pub fn binary(index: VarIndex) -> Self {
        VarDecl { index, kind: VarKind::Binary }
    }

    pub fn continuous(index: VarIndex) -> Self {
        VarDecl { index, kind: VarKind::Continuous }
    }

    pub fn categorical(index: VarIndex, k: usize) -> Self {
        VarDecl { index, kind: VarKind::Categorical { k } }
    }
}

/// Which semantics a circuit is meant to carry. Metadata only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SemanticsTag {
    Pmf,
    Cdf,
    Pgf,
}

impl SemanticsTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SemanticsTag::Pmf => "pmf",
            SemanticsTag::Cdf => "cdf",
            SemanticsTag::Pgf => "pgf",
        }
    }
}

/// Whether a continuous leaf computes its density or its distribution function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LeafMode {
    Pdf,
    Cdf,
}

/// Univariate continuous families with closed-form density and distribution function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContinuousFamily {
    Gaussian { mean: f64, std_dev: f64 },
    Uniform { lo: f64, hi: f64 },
    Exponential { rate: f64 },
    Logistic { loc: f64, scale: f64 },
}

impl ContinuousFamily {
    pub fn validate(&self) -> Result<(), String> {
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite"))
            }
        };
        match *self {
            ContinuousFamily::Gaussian { mean, std_dev } => {
                finite(mean, "mean")?;
                finite(std_dev, "std_dev")?;
                if std_dev <= 0.0 {
                    return Err("gaussian std_dev must be > 0".into());
                }
            }
            ContinuousFamily::Uniform { lo, hi } => {
                finite(lo, "lo")?;
                finite(hi, "hi")?;
                if hi <= lo {
                    return Err("uniform requires hi > lo".into());
                }
            }
            ContinuousFamily::Exponential { rate } => {
                finite(rate, "rate")?;
                if rate <= 0.0 {
                    return Err("exponential rate must be > 0".into());
                }
            }
            ContinuousFamily::Logistic { loc, scale } => {
                finite(loc, "loc")?;
                finite(scale, "scale")?;
                if scale <= 0.0 {
                    return Err("logistic scale must be > 0".into());
                }
            }
        }
        Ok(())
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousFamily::Gaussian { mean, std_dev } => {
                let z = (x - mean) / std_dev;
                (-0.5 * z * z).exp() / (std_dev * (2.0 * std::f64::consts::PI).sqrt())
            }
            ContinuousFamily::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            ContinuousFamily::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            ContinuousFamily::Logistic { loc, scale } => {
                let e = (-((x - loc) / scale).abs()).exp();
                e / (scale * (1.0 + e) * (1.0 + e))
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousFamily::Gaussian { mean, std_dev } => {
                let z = (x - mean) / std_dev;
                0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
            }
            ContinuousFamily::Uniform { lo, hi } => {
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            ContinuousFamily::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            ContinuousFamily::Logistic { loc, scale } => {
                let z = (x - loc) / scale;
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
        }
    }

    /// Points where the density is not smooth, or where most of its mass sits.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            ContinuousFamily::Gaussian { mean, .. } => vec![mean],
            ContinuousFamily::Uniform { lo, hi } => vec![lo, hi],
            ContinuousFamily::Exponential { .. } => vec![0.0],
            ContinuousFamily::Logistic { loc, .. } => vec![loc],
        }
    }
}

/// Function labelling a leaf.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LeafFn {
    /// `b`
    Ind,
    /// `1 - b`
    NegInd,
    /// `a + b * x`
    Affine {
        a: f64,
        b: f64,
    },
    /// `[X = value]` on a categorical variable.
    Eq(usize),
    Continuous {
        family: ContinuousFamily,
        mode: LeafMode,
    },
}

impl LeafFn {
    /// Affine coefficients `(a, b)` for the binary leaf kinds.
    pub fn affine_coeffs(&self) -> Option<(f64, f64)> {
        match *self {
            LeafFn::Ind => Some((0.0, 1.0)),
            LeafFn::NegInd => Some((1.0, -1.0)),
            LeafFn::Affine { a, b } => Some((a, b)),
            _ => None,
        }
    }

    /// Canonical leaf for `a + b * x`: indicators where possible.
    pub fn from_affine(a: f64, b: f64) -> LeafFn {
        if a == 0.0 && b == 1.0 {
            LeafFn::Ind
        } else if a == 1.0 && b == -1.0 {
            LeafFn::NegInd
        } else {
            LeafFn::Affine { a, b }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            LeafFn::Ind => x,
            LeafFn::NegInd => 1.0 - x,
            LeafFn::Affine { a, b } => a + b * x,
            LeafFn::Eq(v) => {
                if x == v as f64 {
                    1.0
                } else {
                    0.0
                }
            }
            LeafFn::Continuous { family, mode: LeafMode::Pdf } => family.pdf(x),
            LeafFn::Continuous { family, mode: LeafMode::Cdf } => family.cdf(x),
        }
    }

    fn accepts(&self, kind: VarKind) -> bool {
        match (self, kind) {
            (LeafFn::Ind | LeafFn::NegInd | LeafFn::Affine { .. }, VarKind::Binary) => true,
            (LeafFn::Continuous { .. }, VarKind::Continuous) => true,
            (LeafFn::Eq(v), VarKind::Categorical { k }) => *v < k,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Sum {
        children: Vec<NodeId>,
        weights: Vec<f64>,
    },
    Product {
        children: Vec<NodeId>,
    },
    Leaf {
        var: VarIndex,
        func: LeafFn,
    },
    /// Constant with empty scope.
    Const(f64),
}

impl Node {
    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::Sum { children, .. } | Node::Product { children } => children,
            Node::Leaf { .. } | Node::Const(_) => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("circuit has no nodes")]
    EmptyCircuit,
    #[error("node {node} refers to child {child}, which is not declared before it")]
    DanglingChild { node: usize, child: usize },
    #[error("root {0} is not a node of the circuit")]
    DanglingRoot(usize),
    #[error("sum node {node} has {children} children but {weights} weights")]
    WeightArityMismatch { node: usize, children: usize, weights: usize },
    #[error("node {0} has no children")]
    NoChildren(usize),
    #[error("node {node} uses undeclared variable {var}")]
    UndeclaredVariable { node: usize, var: VarIndex },
    #[error("node {node}: leaf function {func} cannot label variable {var} of kind {kind:?}")]
    LeafKindMismatch { node: usize, var: VarIndex, kind: VarKind, func: String },
    #[error("node {node}: {reason}")]
    InvalidParameter { node: usize, reason: String },
    #[error("variables must be declared exactly once with indices 0..n; found {0}")]
    BadVariableIndex(VarIndex),
    #[error("categorical variable {0} must have k >= 1")]
    EmptyDomain(VarIndex),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("assignment covers {got} variables, circuit declares {expected}")]
    IncompleteAssignment { expected: usize, got: usize },
    #[error("variable {0} is missing from the assignment")]
    MissingVariable(VarIndex),
    #[error("exact evaluation is not available for continuous leaves (node {0})")]
    NotExact(usize),
    #[error("non-finite value at node {0}")]
    NonFiniteValue(usize),
}

pub(crate) fn exact_at(v: f64, node: usize) -> Result<BigRational, EvalError> {
    BigRational::from_float(v).ok_or(EvalError::NonFiniteValue(node))
}

/// A (possibly partial) map from variables to real values.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assignment(pub BTreeMap<VarIndex, f64>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, var: VarIndex, value: f64) -> &mut Self {
        self.0.insert(var, value);
        self
    }

    /// Dense vector over `n` variables; fails unless every variable is set.
    pub fn to_dense(&self, n: usize) -> Result<Vec<f64>, EvalError> {
        (0..n).map(|i| self.0.get(&i).copied().ok_or(EvalError::MissingVariable(i))).collect()
    }
}

impl FromIterator<(VarIndex, f64)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (VarIndex, f64)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// Immutable, validated circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    vars: Vec<VarKind>,
    nodes: Vec<Node>,
    root: NodeId,
    tag: Option<SemanticsTag>,
}

impl Circuit {
    /// Validates a node list given in declaration-before-use order.
    pub fn build(vars: Vec<VarDecl>, nodes: Vec<Node>, root: NodeId) -> Result<Circuit, BuildError> {
        let vars = dense_vars(vars)?;
        if nodes.is_empty() {
            return Err(BuildError::EmptyCircuit);
        }
        for (i, node) in nodes.iter().enumerate() {
            validate_node(&vars, i, node)?;
        }
        if root.index() >= nodes.len() {
            return Err(BuildError::DanglingRoot(root.index()));
        }
        Ok(Circuit { vars, nodes, root, tag: None })
    }

    pub(crate) fn from_parts_unchecked(
        vars: Vec<VarKind>,
        nodes: Vec<Node>,
        root: NodeId,
        tag: Option<SemanticsTag>,
    ) -> Circuit {
        debug_assert!(nodes.iter().enumerate().all(|(i, n)| n.children().iter().all(|c| c.index() < i)));
        Circuit { vars, nodes, root, tag }
    }

    pub fn with_tag(mut self, tag: Option<SemanticsTag>) -> Self {
        self.tag = tag;
        self
    }

    pub fn tag(&self) -> Option<SemanticsTag> {
        self.tag
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_kinds(&self) -> &[VarKind] {
        &self.vars
    }

    pub fn var_decls(&self) -> Vec<VarDecl> {
        self.vars.iter().enumerate().map(|(index, &kind)| VarDecl { index, kind }).collect()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of edges. Repeated children count once per occurrence.
    pub fn size(&self) -> usize {
        self.nodes.iter().map(|n| n.children().len()).sum()
    }

    pub fn is_binary(&self) -> bool {
        self.vars.iter().all(|k| *k == VarKind::Binary)
    }

    /// Scopes of all nodes, indexed by node.
    pub fn scopes(&self) -> Vec<VarSet> {
        let n = self.num_vars();
        let mut scopes: Vec<VarSet> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut s = VarSet::with_capacity(n);
            match node {
                Node::Leaf { var, .. } => s.insert(*var),
                Node::Const(_) => {}
                Node::Sum { children, .. } | Node::Product { children } => {
                    for c in children {
                        s.union_with(&scopes[c.index()]);
                    }
                }
            }
            scopes.push(s);
        }
        scopes
    }

    pub fn scope(&self, v: NodeId) -> VarSet {
        self.scopes().swap_remove(v.index())
    }

    /// Flags for nodes reachable from the root.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[self.root.index()] = true;
        for i in (0..self.nodes.len()).rev() {
            if seen[i] {
                for c in self.nodes[i].children() {
                    seen[c.index()] = true;
                }
            }
        }
        seen
    }

    pub fn unreachable_nodes(&self) -> Vec<NodeId> {
        self.reachable().into_iter().enumerate().filter(|(_, r)| !r).map(|(i, _)| NodeId::new(i)).collect()
    }

    /// Drops nodes not reachable from the root, keeping relative order.
    pub fn compact(self) -> Circuit {
        let reach = self.reachable();
        if reach.iter().all(|&r| r) {
            return self;
        }
        let mut remap = vec![u32::MAX; self.nodes.len()];
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.into_iter().enumerate() {
            if !reach[i] {
                continue;
            }
            remap[i] = nodes.len() as u32;
            let node = match node {
                Node::Sum { children, weights } => {
                    Node::Sum { children: children.iter().map(|c| NodeId(remap[c.index()])).collect(), weights }
                }
                Node::Product { children } => {
                    Node::Product { children: children.iter().map(|c| NodeId(remap[c.index()])).collect() }
                }
                other => other,
            };
            nodes.push(node);
        }
        let root = NodeId(remap[self.root.index()]);
        Circuit { vars: self.vars, nodes, root, tag: self.tag }
    }

    /// Bottom-up evaluation with a caller-supplied leaf semantics.
    pub fn evaluate_with<F>(&self, mut leaf: F) -> f64
    where
        F: FnMut(VarIndex, &LeafFn) -> f64,
    {
        let mut vals = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Sum { children, weights } => children.iter().zip(weights).map(|(c, w)| w * vals[c.index()]).sum(),
                Node::Product { children } => children.iter().map(|c| vals[c.index()]).product(),
                Node::Leaf { var, func } => leaf(*var, func),
                Node::Const(v) => *v,
            };
            vals.push(v);
        }
        vals[self.root.index()]
    }

    /// Value of the circuit at a point; `x[i]` is the value of variable `i`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, EvalError> {
        if x.len() != self.num_vars() {
            return Err(EvalError::IncompleteAssignment { expected: self.num_vars(), got: x.len() });
        }
        Ok(self.evaluate_with(|var, f| f.eval(x[var])))
    }

    pub fn evaluate_assignment(&self, a: &Assignment) -> Result<f64, EvalError> {
        self.evaluate(&a.to_dense(self.num_vars())?)
    }

    /// Evaluation over exact rationals. Weights are taken at their exact binary value.
    pub fn evaluate_exact(&self, x: &[BigRational]) -> Result<BigRational, EvalError> {
        if x.len() != self.num_vars() {
            return Err(EvalError::IncompleteAssignment { expected: self.num_vars(), got: x.len() });
        }
        let exact = |v: f64| BigRational::from_float(v).expect("weights are finite");
        self.evaluate_exact_with(|node, var, func| {
            let xv = &x[var];
            Ok(match *func {
                LeafFn::Ind => xv.clone(),
                LeafFn::NegInd => BigRational::one() - xv,
                LeafFn::Affine { a, b } => exact(a) + exact(b) * xv,
                LeafFn::Eq(val) => {
                    if *xv == BigRational::from_integer(val.into()) {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }
                LeafFn::Continuous { .. } => return Err(EvalError::NotExact(node)),
            })
        })
    }

    /// Exact sums and products over caller-supplied leaf values. The closure
    /// receives the leaf's node index, its variable and its function.
    pub fn evaluate_exact_with<F>(&self, mut leaf: F) -> Result<BigRational, EvalError>
    where
        F: FnMut(usize, VarIndex, &LeafFn) -> Result<BigRational, EvalError>,
    {
        let mut vals: Vec<BigRational> = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            let v = match node {
                Node::Sum { children, weights } => {
                    let mut acc = BigRational::zero();
                    for (c, w) in children.iter().zip(weights) {
                        acc += exact_at(*w, i)? * &vals[c.index()];
                    }
                    acc
                }
                Node::Product { children } => {
                    let mut acc = BigRational::one();
                    for c in children {
                        acc *= &vals[c.index()];
                    }
                    acc
                }
                Node::Const(v) => exact_at(*v, i)?,
                Node::Leaf { var, func } => leaf(i, *var, func)?,
            };
            vals.push(v);
        }
        Ok(vals.swap_remove(self.root.index()))
    }

    /// Rebuilds the circuit with every leaf function passed through `f`.
    /// The DAG is untouched, so the size is unchanged.
    pub fn map_leaves<F>(&self, mut f: F) -> Circuit
    where
        F: FnMut(VarIndex, &LeafFn) -> LeafFn,
    {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Leaf { var, func } => Node::Leaf { var: *var, func: f(*var, func) },
                other => other.clone(),
            })
            .collect();
        Circuit { vars: self.vars.clone(), nodes, root: self.root, tag: self.tag }
    }
}

fn dense_vars(mut decls: Vec<VarDecl>) -> Result<Vec<VarKind>, BuildError> {
    decls.sort_by_key(|d| d.index);
    let mut out = Vec::with_capacity(decls.len());
    for (i, d) in decls.into_iter().enumerate() {
        if d.index != i {
            return Err(BuildError::BadVariableIndex(d.index));
        }
        if let VarKind::Categorical { k: 0 } = d.kind {
            return Err(BuildError::EmptyDomain(i));
        }
        out.push(d.kind);
    }
    Ok(out)
}

fn validate_node(vars: &[VarKind], i: usize, node: &Node) -> Result<(), BuildError> {
    for c in node.children() {
        if c.index() >= i {
            return Err(BuildError::DanglingChild { node: i, child: c.index() });
        }
    }
    match node {
        Node::Sum { children, weights } => {
            if children.len() != weights.len() {
                return Err(BuildError::WeightArityMismatch {
                    node: i,
                    children: children.len(),
                    weights: weights.len(),
                });
            }
            if children.is_empty() {
                return Err(BuildError::NoChildren(i));
            }
            if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
                return Err(BuildError::InvalidParameter { node: i, reason: format!("weight {w} is not finite") });
            }
        }
        Node::Product { children } => {
            if children.is_empty() {
                return Err(BuildError::NoChildren(i));
            }
        }
        Node::Const(v) => {
            if !v.is_finite() {
                return Err(BuildError::InvalidParameter { node: i, reason: format!("constant {v} is not finite") });
            }
        }
        Node::Leaf { var, func } => {
            let kind = *vars.get(*var).ok_or(BuildError::UndeclaredVariable { node: i, var: *var })?;
            if !func.accepts(kind) {
                return Err(BuildError::LeafKindMismatch { node: i, var: *var, kind, func: format!("{func:?}") });
            }
            match func {
                LeafFn::Affine { a, b } if !(a.is_finite() && b.is_finite()) => {
                    return Err(BuildError::InvalidParameter {
                        node: i,
                        reason: "affine coefficients must be finite".into(),
                    });
                }
                LeafFn::Continuous { family, .. } => {
                    family.validate().map_err(|reason| BuildError::InvalidParameter { node: i, reason })?;
                }
                _ => {}
            }
        }
    }
    Ok(())
}

/// Incremental construction; validation happens in [`CircuitBuilder::finish`].
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    vars: Vec<VarDecl>,
    nodes: Vec<Node>,
}

impl CircuitBuilder {
    pub fn new(vars: Vec<VarDecl>) -> Self {
        CircuitBuilder { vars, nodes: Vec::new() }
    }

    pub fn binary(n: usize) -> Self {
        Self::new((0..n).map(VarDecl::binary).collect())
    }

    pub fn continuous(n: usize) -> Self {
        Self::new((0..n).map(VarDecl::continuous).collect())
    }

    pub fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        NodeId::new(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, var: VarIndex, func: LeafFn) -> NodeId {
        self.push(Node::Leaf { var, func })
    }

    pub fn ind(&mut self, var: VarIndex) -> NodeId {
        self.leaf(var, LeafFn::Ind)
    }

    pub fn neg_ind(&mut self, var: VarIndex) -> NodeId {
        self.leaf(var, LeafFn::NegInd)
    }

    pub fn continuous_leaf(&mut self, var: VarIndex, family: ContinuousFamily, mode: LeafMode) -> NodeId {
        self.leaf(var, LeafFn::Continuous { family, mode })
    }

    pub fn constant(&mut self, v: f64) -> NodeId {
        self.push(Node::Const(v))
    }

    pub fn sum(&mut self, terms: &[(f64, NodeId)]) -> NodeId {
        let (weights, children) = terms.iter().copied().unzip();
        self.push(Node::Sum { children, weights })
    }

    pub fn product(&mut self, children: &[NodeId]) -> NodeId {
        self.push(Node::Product { children: children.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn finish(self, root: NodeId) -> Result<Circuit, BuildError> {
        Circuit::build(self.vars, self.nodes, root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// PMF polynomial -.2x1x2 + .1x1 + .3x2 + .1 written in network form.
    fn fig1_pmf() -> Circuit {
        let mut b = CircuitBuilder::binary(2);
        let (x0, nx0, x1, nx1) = (b.ind(0), b.neg_ind(0), b.ind(1), b.neg_ind(1));
        let p00 = b.product(&[nx0, nx1]);
        let p10 = b.product(&[x0, nx1]);
        let p01 = b.product(&[nx0, x1]);
        let p11 = b.product(&[x0, x1]);
        let root = b.sum(&[(0.1, p00), (0.2, p10), (0.4, p01), (0.3, p11)]);
        b.finish(root).unwrap()
    }

    #[test]
    fn single_leaf_has_size_zero() {
        let mut b = CircuitBuilder::binary(1);
        let l = b.ind(0);
        let c = b.finish(l).unwrap();
        assert_eq!(c.size(), 0);
        assert_eq!(c.evaluate(&[1.0]).unwrap(), 1.0);
        assert_eq!(c.evaluate(&[0.25]).unwrap(), 0.25);
    }

    #[test]
    fn weight_arity_is_checked() {
        let vars = vec![VarDecl::binary(0)];
        let nodes = vec![
            Node::Leaf { var: 0, func: LeafFn::Ind },
            Node::Leaf { var: 0, func: LeafFn::NegInd },
            Node::Sum { children: vec![NodeId::new(0), NodeId::new(1)], weights: vec![1.0] },
        ];
        let err = Circuit::build(vars, nodes, NodeId::new(2)).unwrap_err();
        assert!(matches!(err, BuildError::WeightArityMismatch { node: 2, children: 2, weights: 1 }));
    }

    #[test]
    fn build_errors() {
        let vars = || vec![VarDecl::binary(0)];
        assert_eq!(Circuit::build(vars(), vec![], NodeId::new(0)), Err(BuildError::EmptyCircuit));
        let fwd = vec![Node::Product { children: vec![NodeId::new(0)] }];
        assert!(matches!(
            Circuit::build(vars(), fwd, NodeId::new(0)),
            Err(BuildError::DanglingChild { node: 0, child: 0 })
        ));
        let undeclared = vec![Node::Leaf { var: 3, func: LeafFn::Ind }];
        assert!(matches!(
            Circuit::build(vars(), undeclared, NodeId::new(0)),
            Err(BuildError::UndeclaredVariable { node: 0, var: 3 })
        ));
        let cont_on_binary = vec![Node::Leaf {
            var: 0,
            func: LeafFn::Continuous {
                family: ContinuousFamily::Gaussian { mean: 0.0, std_dev: 1.0 },
                mode: LeafMode::Pdf,
            },
        }];
        assert!(matches!(
            Circuit::build(vars(), cont_on_binary, NodeId::new(0)),
            Err(BuildError::LeafKindMismatch { .. })
        ));
        let bad_sigma = vec![Node::Leaf {
            var: 0,
            func: LeafFn::Continuous {
                family: ContinuousFamily::Gaussian { mean: 0.0, std_dev: 0.0 },
                mode: LeafMode::Pdf,
            },
        }];
        assert!(matches!(
            Circuit::build(vec![VarDecl::continuous(0)], bad_sigma, NodeId::new(0)),
            Err(BuildError::InvalidParameter { .. })
        ));
        assert!(matches!(
            Circuit::build(vec![VarDecl::binary(1)], vec![Node::Const(1.0)], NodeId::new(0)),
            Err(BuildError::BadVariableIndex(1))
        ));
    }

    #[test]
    fn sizes() {
        let mut b = CircuitBuilder::binary(3);
        let l: Vec<_> = (0..3).map(|i| b.ind(i)).collect();
        let s = b.sum(&[(1.0, l[0]), (1.0, l[1]), (1.0, l[2])]);
        assert_eq!(b.finish(s).unwrap().size(), 3);

        let mut b = CircuitBuilder::binary(4);
        let l: Vec<_> = (0..4).map(|i| b.ind(i)).collect();
        let p1 = b.product(&[l[0], l[1]]);
        let p2 = b.product(&[l[2], l[3]]);
        let s = b.sum(&[(0.5, p1), (0.5, p2)]);
        assert_eq!(b.finish(s).unwrap().size(), 6);
    }

    #[test]
    fn duplicate_children_count_twice() {
        let mut b = CircuitBuilder::binary(1);
        let l = b.ind(0);
        let s = b.sum(&[(0.5, l), (0.5, l)]);
        assert_eq!(b.finish(s).unwrap().size(), 2);
    }

    #[test]
    fn scopes() {
        let mut b = CircuitBuilder::binary(3);
        let x0 = b.ind(0);
        let x1 = b.ind(1);
        let x2 = b.ind(2);
        let p = b.product(&[x0, x1]);
        let s = b.sum(&[(1.0, p), (1.0, x0)]);
        let c = b.finish(s).unwrap();
        assert_eq!(c.scope(x2).ones().collect::<Vec<_>>(), vec![2]);
        assert_eq!(c.scope(p).ones().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(c.scope(s).ones().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(c.unreachable_nodes(), vec![x2]);
        let compacted = c.clone().compact();
        assert_eq!(compacted.num_nodes(), c.num_nodes() - 1);
        assert_eq!(compacted.evaluate(&[1.0, 1.0, 0.0]), c.evaluate(&[1.0, 1.0, 0.0]));
    }

    #[test]
    fn fig1_pmf_values() {
        let c = fig1_pmf();
        let table = [(0.0, 0.0, 0.1), (0.0, 1.0, 0.4), (1.0, 0.0, 0.2), (1.0, 1.0, 0.3)];
        for (x1, x2, f) in table {
            assert!((c.evaluate(&[x1, x2]).unwrap() - f).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_cdf_at_mean_is_half() {
        let mut b = CircuitBuilder::continuous(1);
        let g = ContinuousFamily::Gaussian { mean: 0.0, std_dev: 1.0 };
        let l = b.continuous_leaf(0, g, LeafMode::Cdf);
        let c = b.finish(l).unwrap();
        assert_eq!(c.evaluate(&[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn incomplete_assignment() {
        let c = fig1_pmf();
        assert_eq!(c.evaluate(&[1.0]), Err(EvalError::IncompleteAssignment { expected: 2, got: 1 }));
        let a: Assignment = [(0, 1.0)].into_iter().collect();
        assert_eq!(c.evaluate_assignment(&a), Err(EvalError::MissingVariable(1)));
    }

    #[test]
    fn exact_evaluation_matches_float_on_dyadic_weights() {
        let mut b = CircuitBuilder::binary(2);
        let (x0, nx1) = (b.ind(0), b.neg_ind(1));
        let p = b.product(&[x0, nx1]);
        let k = b.constant(0.25);
        let s = b.sum(&[(0.5, p), (2.0, k)]);
        let c = b.finish(s).unwrap();
        let point = [BigRational::new(3.into(), 1.into()), BigRational::new((-1).into(), 2.into())];
        let exact = c.evaluate_exact(&point).unwrap();
        assert_eq!(exact, BigRational::new(11.into(), 4.into()));
        assert_eq!(c.evaluate(&[3.0, -0.5]).unwrap(), 2.75);
    }

    #[test]
    fn family_sanity() {
        let fams = [
            ContinuousFamily::Gaussian { mean: 0.3, std_dev: 1.7 },
            ContinuousFamily::Uniform { lo: -1.0, hi: 2.0 },
            ContinuousFamily::Exponential { rate: 0.7 },
            ContinuousFamily::Logistic { loc: -0.2, scale: 0.4 },
        ];
        for f in fams {
            assert!(f.cdf(-1e9) < 1e-12);
            assert!((f.cdf(1e9) - 1.0).abs() < 1e-12);
            let mut prev = 0.0;
            for i in -50..=50 {
                let x = i as f64 * 0.1;
                let c = f.cdf(x);
                assert!(c >= prev);
                prev = c;
                assert!(f.pdf(x) >= 0.0);
            }
            // derivative of the cdf away from kinks
            for x in [-0.37, 0.41, 1.13] {
                let h = 1e-6;
                let fd = (f.cdf(x + h) - f.cdf(x - h)) / (2.0 * h);
                assert!((fd - f.pdf(x)).abs() < 1e-6, "{f:?} at {x}");
            }
        }
    }
}
