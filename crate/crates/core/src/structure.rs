//! Syntactic smoothness and decomposability, and a smoothing pass for binary circuits.

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, LeafFn, Node, NodeId, VarIndex, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// A sum child's scope differs from the sum's scope.
    NotSmooth,
    /// Two product children share a variable.
    NotDecomposable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub node: usize,
    pub kind: Violation,
    /// For `NotSmooth`: the sum's scope, then the offending child's scope.
    /// For `NotDecomposable`: the two overlapping children's scopes.
    pub scopes: Vec<Vec<VarIndex>>,
}

/// Outcome of the structural checks. A flag is `None` when it was not checked.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub smooth: Option<bool>,
    pub decomposable: Option<bool>,
    pub witnesses: Vec<Witness>,
}

impl StructureReport {
    pub fn is_smooth(&self) -> bool {
        self.smooth == Some(true)
    }

    pub fn is_decomposable(&self) -> bool {
        self.decomposable == Some(true)
    }
}

fn vars_of(s: &VarSet) -> Vec<VarIndex> {
    s.ones().collect()
}

fn smooth_witnesses(c: &Circuit, scopes: &[VarSet]) -> Vec<Witness> {
    let mut out = Vec::new();
    for (i, node) in c.nodes().iter().enumerate() {
        if let Node::Sum { children, .. } = node {
            if let Some(bad) = children.iter().find(|ch| scopes[ch.index()] != scopes[i]) {
                out.push(Witness {
                    node: i,
                    kind: Violation::NotSmooth,
                    scopes: vec![vars_of(&scopes[i]), vars_of(&scopes[bad.index()])],
                });
            }
        }
    }
    out
}

fn decomposable_witnesses(c: &Circuit, scopes: &[VarSet]) -> Vec<Witness> {
    let mut out = Vec::new();
    let mut seen = VarSet::with_capacity(c.num_vars());
    for (i, node) in c.nodes().iter().enumerate() {
        let Node::Product { children } = node else { continue };
        seen.clear();
        for (j, ch) in children.iter().enumerate() {
            let s = &scopes[ch.index()];
            if !seen.is_disjoint(s) {
                // find the earlier child it collides with
                let other = children[..j]
                    .iter()
                    .find(|o| !scopes[o.index()].is_disjoint(s))
                    .expect("overlap comes from an earlier child");
                out.push(Witness {
                    node: i,
                    kind: Violation::NotDecomposable,
                    scopes: vec![vars_of(&scopes[other.index()]), vars_of(s)],
                });
                break;
            }
            seen.union_with(s);
        }
    }
    out
}

pub fn check_smooth(c: &Circuit) -> StructureReport {
    let witnesses = smooth_witnesses(c, &c.scopes());
    StructureReport { smooth: Some(witnesses.is_empty()), decomposable: None, witnesses }
}

pub fn check_decomposable(c: &Circuit) -> StructureReport {
    let witnesses = decomposable_witnesses(c, &c.scopes());
    StructureReport { smooth: None, decomposable: Some(witnesses.is_empty()), witnesses }
}

/// Both checks over one scope computation.
pub fn check_structure(c: &Circuit) -> StructureReport {
    let scopes = c.scopes();
    let mut witnesses = smooth_witnesses(c, &scopes);
    let smooth = witnesses.is_empty();
    let dec = decomposable_witnesses(c, &scopes);
    let decomposable = dec.is_empty();
    witnesses.extend(dec);
    StructureReport { smooth: Some(smooth), decomposable: Some(decomposable), witnesses }
}

/// Reasons a binary circuit is not usable as a network polynomial.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkFormError {
    #[error("circuit has non-binary variables")]
    NotBinary,
    #[error("node {0} is not smooth")]
    NotSmooth(usize),
    #[error("node {0} is not decomposable")]
    NotDecomposable(usize),
    #[error("root scope does not cover variable {0}")]
    MissingRootVariable(VarIndex),
    #[error("leaf {0} is not an indicator")]
    NonIndicatorLeaf(usize),
}

/// Checks that `c` is a smooth, decomposable binary circuit whose root covers every
/// variable. When `indicators_only` is set, leaves must be `Ind`/`NegInd`; otherwise
/// affine leaves are accepted too. Constant nodes are allowed under products.
pub fn check_network_form(c: &Circuit, indicators_only: bool) -> Result<(), NetworkFormError> {
    if !c.is_binary() {
        return Err(NetworkFormError::NotBinary);
    }
    let scopes = c.scopes();
    if let Some(w) = smooth_witnesses(c, &scopes).first() {
        return Err(NetworkFormError::NotSmooth(w.node));
    }
    if let Some(w) = decomposable_witnesses(c, &scopes).first() {
        return Err(NetworkFormError::NotDecomposable(w.node));
    }
    let root = &scopes[c.root().index()];
    if let Some(v) = (0..c.num_vars()).find(|&v| !root.contains(v)) {
        return Err(NetworkFormError::MissingRootVariable(v));
    }
    if indicators_only {
        for (i, node) in c.nodes().iter().enumerate() {
            if let Node::Leaf { func, .. } = node {
                if !matches!(func, LeafFn::Ind | LeafFn::NegInd) {
                    return Err(NetworkFormError::NonIndicatorLeaf(i));
                }
            }
        }
    }
    Ok(())
}

/// Smooth, decomposable, root covers all variables, and every leaf is an indicator.
pub fn is_pair_indicator_form(c: &Circuit) -> bool {
    check_network_form(c, true).is_ok()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SmoothError {
    #[error("smoothing needs a binary circuit")]
    NotBinary,
    #[error("node {0} is not decomposable")]
    NotDecomposable(usize),
}

/// Smooths a decomposable binary circuit.
///
/// Every sum child missing variables of its parent is multiplied by the gadgets
/// `(x_i + x̄_i)` for the missing `i`; one gadget node is shared per variable. A
/// constant child is folded into the edge weight and replaced by the gadget
/// product. The root is padded the same way so that it covers every variable.
/// The result agrees with the input wherever `x̄ = 1 - x`, and a circuit that is
/// already smooth with full root scope is returned unchanged.
pub fn smooth_transform(c: &Circuit) -> Result<Circuit, SmoothError> {
    if !c.is_binary() {
        return Err(SmoothError::NotBinary);
    }
    let scopes = c.scopes();
    if let Some(w) = decomposable_witnesses(c, &scopes).first() {
        return Err(SmoothError::NotDecomposable(w.node));
    }
    let n = c.num_vars();
    let full: VarSet = {
        let mut s = VarSet::with_capacity(n);
        s.insert_range(..);
        s
    };
    let root_full = scopes[c.root().index()] == full;
    if root_full && smooth_witnesses(c, &scopes).is_empty() {
        return Ok(c.clone());
    }

    let mut out: Vec<Node> = Vec::with_capacity(c.num_nodes() + 2 * n);
    let mut gadgets: Vec<Option<NodeId>> = vec![None; n];
    let mut gadget = |out: &mut Vec<Node>, v: VarIndex| -> NodeId {
        if let Some(g) = gadgets[v] {
            return g;
        }
        out.push(Node::Leaf { var: v, func: LeafFn::Ind });
        let x = NodeId::new(out.len() - 1);
        out.push(Node::Leaf { var: v, func: LeafFn::NegInd });
        let nx = NodeId::new(out.len() - 1);
        out.push(Node::Sum { children: vec![x, nx], weights: vec![1.0, 1.0] });
        let g = NodeId::new(out.len() - 1);
        gadgets[v] = Some(g);
        g
    };
    // pads `child` (old-id `old`) with gadgets for `target \ scope(old)`; returns the
    // new child id and a weight factor
    let mut pad = |out: &mut Vec<Node>, remap: &[NodeId], old: NodeId, target: &VarSet| -> (NodeId, f64) {
        let missing: Vec<VarIndex> = target.difference(&scopes[old.index()]).collect();
        if missing.is_empty() {
            return (remap[old.index()], 1.0);
        }
        let mut factors = Vec::with_capacity(missing.len() + 1);
        let mut scale = 1.0;
        match c.node(old) {
            Node::Const(v) => scale = *v,
            _ => factors.push(remap[old.index()]),
        }
        for v in missing {
            factors.push(gadget(out, v));
        }
        if factors.len() == 1 {
            return (factors[0], scale);
        }
        out.push(Node::Product { children: factors });
        (NodeId::new(out.len() - 1), scale)
    };

    let mut remap: Vec<NodeId> = Vec::with_capacity(c.num_nodes());
    for (i, node) in c.nodes().iter().enumerate() {
        let new = match node {
            Node::Sum { children, weights } => {
                let mut nc = Vec::with_capacity(children.len());
                let mut nw = Vec::with_capacity(children.len());
                for (ch, w) in children.iter().zip(weights) {
                    let (id, scale) = pad(&mut out, &remap, *ch, &scopes[i]);
                    nc.push(id);
                    nw.push(w * scale);
                }
                Node::Sum { children: nc, weights: nw }
            }
            Node::Product { children } => {
                Node::Product { children: children.iter().map(|ch| remap[ch.index()]).collect() }
            }
            other => other.clone(),
        };
        out.push(new);
        remap.push(NodeId::new(out.len() - 1));
    }
    let root = if root_full {
        remap[c.root().index()]
    } else {
        let (id, scale) = pad(&mut out, &remap, c.root(), &full);
        if scale == 1.0 {
            id
        } else {
            out.push(Node::Sum { children: vec![id], weights: vec![scale] });
            NodeId::new(out.len() - 1)
        }
    };
    let smoothed = Circuit::from_parts_unchecked(c.var_kinds().to_vec(), out, root, c.tag());
    Ok(smoothed.compact())
}
