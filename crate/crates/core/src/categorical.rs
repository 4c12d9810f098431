//! Less-Than encoding of finite discrete variables.
//!
//! `lt(x, k)` is `x` ones followed by `k - x` zeros, so `x ≤ y` exactly when the
//! codes are ordered elementwise. Lifting a categorical distribution through this
//! code preserves both its mass function and its distribution function.
//!
//! Variable `i` with cardinality `k` occupies binary variables `i*k .. i*k + k`.

use std::fmt;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder, LeafFn, Node, NodeId, VarKind};
use crate::oracle::{check_scale, OracleError, PmfTable, MAX_TABLE_VARS};
use crate::structure::check_decomposable;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodingError {
    #[error("value {value} is outside the domain 0..{k}")]
    OutOfDomain { value: usize, k: usize },
    #[error("bits are not of the form 1..10..0")]
    NotACodeword,
    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("categorical circuit is not decomposable (node {0})")]
    NotDecomposable(usize),
    #[error("variable {0} is not categorical with the common cardinality")]
    NotCategorical(usize),
    #[error("domain values must be finite and distinct")]
    BadDomain,
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A codeword of the Less-Than encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LtCode(Vec<bool>);

impl LtCode {
    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Elementwise `self ≤ other`.
    pub fn le(&self, other: &LtCode) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| !a || *b)
    }
}

impl fmt::Display for LtCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn lt_encode(x: usize, k: usize) -> Result<LtCode, EncodingError> {
    if x >= k {
        return Err(EncodingError::OutOfDomain { value: x, k });
    }
    Ok(LtCode((0..k).map(|j| j < x).collect()))
}

pub fn lt_decode(bits: &[bool], k: usize) -> Result<usize, EncodingError> {
    if bits.len() != k {
        return Err(EncodingError::LengthMismatch { expected: k, got: bits.len() });
    }
    let ones = bits.iter().take_while(|&&b| b).count();
    if bits[ones..].iter().any(|&b| b) || ones == k && k > 0 {
        // the all-ones word encodes nothing: values stop at k - 1
        return Err(EncodingError::NotACodeword);
    }
    Ok(ones)
}

/// Order-preserving bijection between a finite set of reals and `0..k`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdinalDomain {
    values: Vec<f64>,
}

impl OrdinalDomain {
    pub fn new(mut values: Vec<f64>) -> Result<Self, EncodingError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(EncodingError::BadDomain);
        }
        values.sort_by(f64::total_cmp);
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(EncodingError::BadDomain);
        }
        Ok(OrdinalDomain { values })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn index_of(&self, v: f64) -> Option<usize> {
        self.values.iter().position(|&u| u == v)
    }

    pub fn value(&self, i: usize) -> Option<f64> {
        self.values.get(i).copied()
    }
}

/// Mass function over `{0..k-1}^n`; cell index is `Σ_i x_i k^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalTable {
    n: usize,
    k: usize,
    mass: Vec<f64>,
}

impl CategoricalTable {
    pub fn new(n: usize, k: usize, mass: Vec<f64>) -> Result<Self, EncodingError> {
        if k == 0 {
            return Err(EncodingError::OutOfDomain { value: 0, k });
        }
        let cells = k.checked_pow(n as u32).ok_or(OracleError::ScaleExceeded { n: n * k, max: MAX_TABLE_VARS })?;
        if mass.len() != cells {
            return Err(EncodingError::LengthMismatch { expected: cells, got: mass.len() });
        }
        Ok(CategoricalTable { n, k, mass })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn index(&self, x: &[usize]) -> usize {
        x.iter().rev().fold(0, |acc, &v| acc * self.k + v)
    }

    pub fn point(&self, mut index: usize) -> Vec<usize> {
        (0..self.n)
            .map(|_| {
                let v = index % self.k;
                index /= self.k;
                v
            })
            .collect()
    }

    pub fn pmf(&self, x: &[usize]) -> f64 {
        self.mass[self.index(x)]
    }

    /// Brute-force `Σ_{y ≤ x} P(y)`.
    pub fn cdf(&self, x: &[usize]) -> f64 {
        (0..self.mass.len()).filter(|&i| self.point(i).iter().zip(x).all(|(a, b)| a <= b)).map(|i| self.mass[i]).sum()
    }
}

/// Binary assignment mask for a categorical point under the variable-major layout.
pub fn encode_point(x: &[usize], k: usize) -> Result<usize, EncodingError> {
    let mut mask = 0usize;
    for (i, &v) in x.iter().enumerate() {
        let code = lt_encode(v, k)?;
        for (j, &bit) in code.bits().iter().enumerate() {
            if bit {
                mask |= 1 << (i * k + j);
            }
        }
    }
    Ok(mask)
}

/// Real-valued binary assignment for a categorical point.
pub fn encode_assignment(x: &[usize], k: usize) -> Result<Vec<f64>, EncodingError> {
    let mut out = Vec::with_capacity(x.len() * k);
    for &v in x {
        out.extend(lt_encode(v, k)?.bits().iter().map(|&b| if b { 1.0 } else { 0.0 }));
    }
    Ok(out)
}

/// `P'(φ(x)) = P(x)` on codewords, zero elsewhere.
pub fn lift_pmf_table(t: &CategoricalTable) -> Result<PmfTable, EncodingError> {
    let bits = t.n * t.k;
    check_scale(bits, MAX_TABLE_VARS)?;
    let mut lifted = vec![0.0; 1 << bits];
    for (i, &m) in t.mass.iter().enumerate() {
        lifted[encode_point(&t.point(i), t.k)?] = m;
    }
    Ok(PmfTable::new(bits, lifted)?)
}

/// Replaces each categorical leaf `[X_i = v]` with the product of binary
/// indicators spelling `lt(v, k)`: `b_{ik+j}` for `j < v`, `b̄_{ik+j}` otherwise.
/// Every categorical variable must have the same cardinality `k`.
pub fn lift_categorical_circuit(c: &Circuit) -> Result<Circuit, EncodingError> {
    let k = match c.var_kinds().first() {
        Some(VarKind::Categorical { k }) => *k,
        Some(_) => return Err(EncodingError::NotCategorical(0)),
        None => 0,
    };
    if let Some(i) = c.var_kinds().iter().position(|kind| *kind != VarKind::Categorical { k }) {
        return Err(EncodingError::NotCategorical(i));
    }
    if let Some(w) = check_decomposable(c).witnesses.first() {
        return Err(EncodingError::NotDecomposable(w.node));
    }
    let mut b = CircuitBuilder::binary(c.num_vars() * k);
    let mut literals: Vec<[Option<NodeId>; 2]> = vec![[None, None]; c.num_vars() * k];
    let mut remap: Vec<NodeId> = Vec::with_capacity(c.num_nodes());
    for node in c.nodes() {
        let id = match node {
            Node::Leaf { var, func: LeafFn::Eq(v) } => {
                let mut factors = Vec::with_capacity(k);
                for j in 0..k {
                    let bit = var * k + j;
                    let slot = usize::from(j >= *v);
                    let lit =
                        *literals[bit][slot].get_or_insert_with(|| if slot == 0 { b.ind(bit) } else { b.neg_ind(bit) });
                    factors.push(lit);
                }
                if factors.len() == 1 {
                    factors[0]
                } else {
                    b.product(&factors)
                }
            }
            Node::Leaf { var, .. } => return Err(EncodingError::NotCategorical(*var)),
            Node::Sum { children, weights } => {
                let terms: Vec<(f64, NodeId)> =
                    weights.iter().zip(children).map(|(w, ch)| (*w, remap[ch.index()])).collect();
                b.sum(&terms)
            }
            Node::Product { children } => {
                let kids: Vec<NodeId> = children.iter().map(|ch| remap[ch.index()]).collect();
                b.product(&kids)
            }
            Node::Const(v) => b.constant(*v),
        };
        remap.push(id);
    }
    let out = b.finish(remap[c.root().index()]).expect("lifting preserves validity");
    Ok(out.with_tag(c.tag()))
}

/// Categorical CDF at `x` from a binary CDF circuit over the lifted variables.
pub fn categorical_cdf_query(bin_cdf: &Circuit, x: &[usize], k: usize) -> Result<f64, EncodingError> {
    let a = encode_assignment(x, k)?;
    if a.len() != bin_cdf.num_vars() {
        return Err(EncodingError::LengthMismatch { expected: bin_cdf.num_vars(), got: a.len() });
    }
    Ok(bin_cdf.evaluate(&a).expect("length checked"))
}
