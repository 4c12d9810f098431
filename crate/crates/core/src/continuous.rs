//! PDF ↔ CDF transforms for continuous circuits.
//!
//! On a smooth, decomposable circuit, integrating up to `x` commutes with sums
//! and factors over products, so flipping every leaf to its distribution
//! function yields the joint CDF. In the other direction only decomposability
//! is needed: the mixed partial over a product's scope splits into one partial
//! per child, and a sum child missing some variable of the sum's scope has a
//! zero mixed partial and is dropped.

use thiserror::Error;

use crate::circuit::{Circuit, EvalError, LeafFn, LeafMode, Node, NodeId, SemanticsTag};
use crate::structure::check_structure;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuousError {
    #[error("node {0} is not smooth")]
    NotSmooth(usize),
    #[error("node {0} is not decomposable")]
    NotDecomposable(usize),
    #[error("leaf {node} is in the wrong mode; expected {expected:?}")]
    WrongLeafMode { node: usize, expected: LeafMode },
    #[error("leaf {0} is not a continuous leaf")]
    NotContinuous(usize),
    #[error("{n} variables exceeds the limit of {max} for this method")]
    ScaleExceeded { n: usize, max: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn check_leaves(c: &Circuit, mode: LeafMode) -> Result<(), ContinuousError> {
    for (i, node) in c.nodes().iter().enumerate() {
        match node {
            Node::Leaf { func: LeafFn::Continuous { mode: m, .. }, .. } if *m != mode => {
                return Err(ContinuousError::WrongLeafMode { node: i, expected: mode });
            }
            Node::Leaf { func: LeafFn::Continuous { .. }, .. } => {}
            Node::Leaf { .. } => return Err(ContinuousError::NotContinuous(i)),
            _ => {}
        }
    }
    Ok(())
}

fn flip(c: &Circuit, to: LeafMode) -> Circuit {
    c.map_leaves(|_, f| match *f {
        LeafFn::Continuous { family, .. } => LeafFn::Continuous { family, mode: to },
        other => other,
    })
}

/// Density circuit to distribution-function circuit: same DAG, every leaf flipped
/// to its CDF.
pub fn pdf_to_cdf(c: &Circuit) -> Result<Circuit, ContinuousError> {
    check_leaves(c, LeafMode::Pdf)?;
    let report = check_structure(c);
    if let Some(w) = report.witnesses.first() {
        return Err(match w.kind {
            crate::structure::Violation::NotSmooth => ContinuousError::NotSmooth(w.node),
            crate::structure::Violation::NotDecomposable => ContinuousError::NotDecomposable(w.node),
        });
    }
    Ok(flip(c, LeafMode::Cdf).with_tag(Some(SemanticsTag::Cdf)))
}

/// Distribution-function circuit to density circuit by derivative routing.
///
/// Each node is replaced by its mixed partial over its own scope. Products
/// route each variable's derivative to the unique child holding it; sums keep
/// the children whose scope equals their own. A node whose mixed partial is
/// identically zero is removed, and the result never has more edges than the
/// input.
pub fn cdf_to_pdf(c: &Circuit) -> Result<Circuit, ContinuousError> {
    check_leaves(c, LeafMode::Cdf)?;
    let scopes = c.scopes();
    if let Some(w) = crate::structure::check_decomposable(c).witnesses.first() {
        return Err(ContinuousError::NotDecomposable(w.node));
    }
    let mut out: Vec<Node> = Vec::with_capacity(c.num_nodes());
    // new id of each node's derivative, `None` when it is identically zero
    let mut deriv: Vec<Option<NodeId>> = Vec::with_capacity(c.num_nodes());
    let mut dropped = false;
    for (i, node) in c.nodes().iter().enumerate() {
        let new = match node {
            Node::Leaf { var, func: LeafFn::Continuous { family, .. } } => {
                Some(Node::Leaf { var: *var, func: LeafFn::Continuous { family: *family, mode: LeafMode::Pdf } })
            }
            Node::Leaf { .. } => unreachable!("leaves checked"),
            Node::Const(v) => Some(Node::Const(*v)),
            Node::Sum { children, weights } => {
                let mut nc = Vec::with_capacity(children.len());
                let mut nw = Vec::with_capacity(children.len());
                for (ch, w) in children.iter().zip(weights) {
                    match deriv[ch.index()] {
                        Some(d) if scopes[ch.index()] == scopes[i] => {
                            nc.push(d);
                            nw.push(*w);
                        }
                        _ => dropped = true,
                    }
                }
                (!nc.is_empty()).then_some(Node::Sum { children: nc, weights: nw })
            }
            Node::Product { children } => children
                .iter()
                .map(|ch| deriv[ch.index()])
                .collect::<Option<Vec<NodeId>>>()
                .map(|nc| Node::Product { children: nc }),
        };
        match new {
            Some(n) => {
                out.push(n);
                deriv.push(Some(NodeId::new(out.len() - 1)));
            }
            None => {
                dropped = true;
                deriv.push(None);
            }
        }
    }
    let root = match deriv[c.root().index()] {
        Some(r) => r,
        None => {
            out.push(Node::Const(0.0));
            NodeId::new(out.len() - 1)
        }
    };
    let pdf = Circuit::from_parts_unchecked(c.var_kinds().to_vec(), out, root, None);
    Ok(if dropped { pdf.compact() } else { pdf })
}

/// Density at `x`; every leaf must be in density mode.
pub fn eval_density(c: &Circuit, x: &[f64]) -> Result<f64, ContinuousError> {
    check_leaves(c, LeafMode::Pdf)?;
    Ok(c.evaluate(x)?)
}

/// Distribution function at `x`; every leaf must be in CDF mode.
pub fn eval_cdf(c: &Circuit, x: &[f64]) -> Result<f64, ContinuousError> {
    check_leaves(c, LeafMode::Cdf)?;
    Ok(c.evaluate(x)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, ContinuousFamily};

    const STD: ContinuousFamily = ContinuousFamily::Gaussian { mean: 0.0, std_dev: 1.0 };
    const UNIT: ContinuousFamily = ContinuousFamily::Uniform { lo: 0.0, hi: 1.0 };

    fn normal(mean: f64) -> ContinuousFamily {
        ContinuousFamily::Gaussian { mean, std_dev: 1.0 }
    }

    fn product_pdf() -> Circuit {
        let mut b = CircuitBuilder::continuous(2);
        let g = b.continuous_leaf(0, STD, LeafMode::Pdf);
        let u = b.continuous_leaf(1, UNIT, LeafMode::Pdf);
        let p = b.product(&[g, u]);
        b.finish(p).unwrap()
    }

    #[test]
    fn product_cdf() {
        let c = pdf_to_cdf(&product_pdf()).unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(eval_cdf(&c, &[0.0, 0.5]).unwrap(), 0.25);
    }

    #[test]
    fn symmetric_mixture_cdf() {
        let mut b = CircuitBuilder::continuous(1);
        let l = b.continuous_leaf(0, normal(-1.0), LeafMode::Pdf);
        let r = b.continuous_leaf(0, normal(1.0), LeafMode::Pdf);
        let s = b.sum(&[(0.5, l), (0.5, r)]);
        let pdf = b.finish(s).unwrap();
        let cdf = pdf_to_cdf(&pdf).unwrap();
        assert!((cdf.evaluate(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
        // .5 φ(1) + .5 φ(-1) = φ(1)
        assert!((eval_density(&pdf, &[0.0]).unwrap() - 0.24197072451914337).abs() < 1e-15);
    }

    #[test]
    fn box_mixture_cdf() {
        let mut b = CircuitBuilder::continuous(2);
        let u01 = ContinuousFamily::Uniform { lo: 0.0, hi: 1.0 };
        let u02 = ContinuousFamily::Uniform { lo: 0.0, hi: 2.0 };
        let a0 = b.continuous_leaf(0, u01, LeafMode::Pdf);
        let a1 = b.continuous_leaf(1, u01, LeafMode::Pdf);
        let b0 = b.continuous_leaf(0, u02, LeafMode::Pdf);
        let b1 = b.continuous_leaf(1, u02, LeafMode::Pdf);
        let pa = b.product(&[a0, a1]);
        let pb = b.product(&[b0, b1]);
        let s = b.sum(&[(0.3, pa), (0.7, pb)]);
        let cdf = pdf_to_cdf(&b.finish(s).unwrap()).unwrap();
        assert!((cdf.evaluate(&[1.0, 1.0]).unwrap() - 0.475).abs() < 1e-15);
    }

    #[test]
    fn pdf_to_cdf_preconditions() {
        let mut b = CircuitBuilder::continuous(2);
        let g0 = b.continuous_leaf(0, STD, LeafMode::Pdf);
        let g1 = b.continuous_leaf(1, STD, LeafMode::Pdf);
        let s = b.sum(&[(0.5, g0), (0.5, g1)]);
        assert_eq!(pdf_to_cdf(&b.finish(s).unwrap()), Err(ContinuousError::NotSmooth(2)));

        let mut b = CircuitBuilder::continuous(1);
        let g0 = b.continuous_leaf(0, STD, LeafMode::Pdf);
        let p = b.product(&[g0, g0]);
        assert_eq!(pdf_to_cdf(&b.finish(p).unwrap()), Err(ContinuousError::NotDecomposable(1)));

        let cdf = pdf_to_cdf(&product_pdf()).unwrap();
        assert!(matches!(pdf_to_cdf(&cdf), Err(ContinuousError::WrongLeafMode { .. })));
        assert!(matches!(eval_density(&cdf, &[0.0, 0.0]), Err(ContinuousError::WrongLeafMode { .. })));
    }

    #[test]
    fn product_density() {
        let cdf = pdf_to_cdf(&product_pdf()).unwrap();
        let pdf = cdf_to_pdf(&cdf).unwrap();
        assert_eq!(pdf.nodes(), product_pdf().nodes());
        assert!((pdf.evaluate(&[0.0, 0.5]).unwrap() - 0.3989422804014327).abs() < 1e-15);
    }

    #[test]
    fn uniform_density_and_far_cdf() {
        assert_eq!(UNIT.pdf(0.5), 1.0);
        let mut b = CircuitBuilder::continuous(1);
        let g = b.continuous_leaf(0, STD, LeafMode::Cdf);
        let c = b.finish(g).unwrap();
        assert!((eval_cdf(&c, &[1e9]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_smooth_sum_drops_child() {
        // Sum(F1(x1), F12(x1) F2(x2))
        let mut b = CircuitBuilder::continuous(2);
        let f1 = b.continuous_leaf(0, normal(0.0), LeafMode::Cdf);
        let f12 = b.continuous_leaf(0, normal(0.5), LeafMode::Cdf);
        let f2 = b.continuous_leaf(1, UNIT, LeafMode::Cdf);
        let p = b.product(&[f12, f2]);
        let s = b.sum(&[(0.4, f1), (0.6, p)]);
        let c = b.finish(s).unwrap();
        let pdf = cdf_to_pdf(&c).unwrap();
        assert!(pdf.size() < c.size());
        let x = [0.2, 0.3];
        let want = 0.6 * normal(0.5).pdf(0.2) * UNIT.pdf(0.3);
        assert!((pdf.evaluate(&x).unwrap() - want).abs() < 1e-15);
        assert_eq!(pdf.num_nodes(), 4);
    }

    #[test]
    fn fully_dropped_sum_is_zero() {
        let mut b = CircuitBuilder::continuous(2);
        let f1 = b.continuous_leaf(0, STD, LeafMode::Cdf);
        let f2 = b.continuous_leaf(1, STD, LeafMode::Cdf);
        let s = b.sum(&[(0.5, f1), (0.5, f2)]);
        let pdf = cdf_to_pdf(&b.finish(s).unwrap()).unwrap();
        assert_eq!(pdf.nodes(), &[Node::Const(0.0)]);
        assert_eq!(pdf.size(), 0);
    }

    #[test]
    fn binary_leaves_are_rejected() {
        let mut b = CircuitBuilder::binary(1);
        let x = b.ind(0);
        let c = b.finish(x).unwrap();
        assert_eq!(pdf_to_cdf(&c), Err(ContinuousError::NotContinuous(0)));
        assert_eq!(cdf_to_pdf(&c), Err(ContinuousError::NotContinuous(0)));
    }
}
