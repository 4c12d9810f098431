use std::collections::BTreeMap;

use num::{BigInt, BigRational, ToPrimitive, Zero};

use super::{
    check_scale, mobius_transform, zeta_transform, OracleError, MAX_NETWORK_VARS, MAX_POLY_VARS, MAX_TABLE_VARS,
};
use crate::circuit::{Circuit, CircuitBuilder, LeafFn, Node, NodeId};

/// Multilinear polynomial as a map from monomial bitmask to coefficient.
/// Absent monomials have coefficient zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePoly {
    n: usize,
    coeffs: BTreeMap<u32, f64>,
}

impl DensePoly {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_POLY_VARS);
        DensePoly { n, coeffs: BTreeMap::new() }
    }

    pub fn constant(n: usize, v: f64) -> Self {
        Self::from_pairs(n, [(0, v)])
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, f64)>>(n: usize, pairs: I) -> Self {
        let mut p = Self::zero(n);
        for (m, v) in pairs {
            debug_assert!(n == 32 || m >> n == 0);
            p.add_term(m, v);
        }
        p
    }

    /// Coefficient vector indexed by monomial mask.
    pub fn from_coefficients(n: usize, coeffs: &[f64]) -> Result<Self, OracleError> {
        check_scale(n, MAX_TABLE_VARS)?;
        if coeffs.len() != 1 << n {
            return Err(OracleError::LengthMismatch { expected: 1 << n, got: coeffs.len() });
        }
        Ok(Self::from_pairs(n, coeffs.iter().enumerate().map(|(m, &v)| (m as u32, v))))
    }

    /// The multilinear polynomial taking `values[mask]` at each cube point.
    pub fn interpolate(n: usize, values: &[f64]) -> Result<Self, OracleError> {
        check_scale(n, MAX_TABLE_VARS)?;
        if values.len() != 1 << n {
            return Err(OracleError::LengthMismatch { expected: 1 << n, got: values.len() });
        }
        let mut c = values.to_vec();
        mobius_transform(&mut c);
        Self::from_coefficients(n, &c)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, mask: u32) -> f64 {
        self.coeffs.get(&mask).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.coeffs.iter().map(|(&m, &v)| (m, v))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, mask: u32, v: f64) {
        if v == 0.0 {
            return;
        }
        let e = self.coeffs.entry(mask).or_insert(0.0);
        *e += v;
        if *e == 0.0 {
            self.coeffs.remove(&mask);
        }
    }

    pub fn add_scaled(&mut self, other: &DensePoly, w: f64) {
        debug_assert_eq!(self.n, other.n);
        for (m, v) in other.iter() {
            self.add_term(m, w * v);
        }
    }

    /// Product; `None` if some pair of monomials shares a variable.
    pub fn checked_mul(&self, other: &DensePoly) -> Option<DensePoly> {
        debug_assert_eq!(self.n, other.n);
        let mut out = DensePoly::zero(self.n);
        for (a, va) in self.iter() {
            for (b, vb) in other.iter() {
                if a & b != 0 {
                    return None;
                }
                out.add_term(a | b, va * vb);
            }
        }
        Some(out)
    }

    /// Value at `x` computed exactly from the stored coefficients and rounded
    /// once. At large integer points the terms are many orders of magnitude
    /// above the result, and a floating-point sum loses the low digits.
    pub fn eval_exact(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        if x.iter().all(|v| v.fract() == 0.0 && v.abs() <= 1024.0) {
            return self.eval_exact_integer(x);
        }
        self.eval_exact_rational(x)
    }

    // Integer points: every term is an integer times a power of two, so the
    // sum is a big integer scaled by the smallest exponent.
    fn eval_exact_integer(&self, x: &[f64]) -> f64 {
        let terms: Vec<(i128, i16)> = self
            .iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|(m, v)| {
                let (mant, exp, sign) = num::Float::integer_decode(v);
                let mut p = i128::from(sign) * mant as i128;
                let mut bits = m;
                while bits != 0 {
                    // many large factors can overflow; the rational path handles those
                    p = p.checked_mul(x[bits.trailing_zeros() as usize] as i128).unwrap_or(i128::MAX);
                    bits &= bits - 1;
                }
                (p, exp)
            })
            .collect();
        if terms.iter().any(|&(p, _)| p == i128::MAX) {
            return self.eval_exact_rational(x);
        }
        let Some(min_exp) = terms.iter().map(|t| t.1).min() else { return 0.0 };
        let mut acc = BigInt::zero();
        for (p, e) in terms {
            acc += BigInt::from(p) << ((e - min_exp) as usize);
        }
        let value = if min_exp >= 0 {
            BigRational::from_integer(acc << (min_exp as usize))
        } else {
            BigRational::new(acc, BigInt::from(1) << ((-min_exp) as usize))
        };
        value.to_f64().unwrap_or(f64::NAN)
    }

    fn eval_exact_rational(&self, x: &[f64]) -> f64 {
        let xs: Vec<BigRational> = x.iter().map(|&v| BigRational::from_float(v).expect("finite point")).collect();
        let mut acc = BigRational::zero();
        for (m, v) in self.iter() {
            let mut t = BigRational::from_float(v).expect("finite coefficient");
            let mut bits = m;
            while bits != 0 {
                t *= &xs[bits.trailing_zeros() as usize];
                bits &= bits - 1;
            }
            acc += t;
        }
        acc.to_f64().unwrap_or(f64::NAN)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        self.iter()
            .map(|(m, v)| {
                let mut t = v;
                let mut bits = m;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    t *= x[i];
                    bits &= bits - 1;
                }
                t
            })
            .sum()
    }

    /// Values at every cube point, indexed like [`super::PmfTable`].
    pub fn cube_values(&self) -> Vec<f64> {
        assert!(self.n <= MAX_TABLE_VARS);
        let mut v = vec![0.0; 1 << self.n];
        for (m, c) in self.iter() {
            v[m as usize] = c;
        }
        zeta_transform(&mut v);
        v
    }

    pub fn max_abs_diff(&self, other: &DensePoly) -> f64 {
        let mut d: f64 = 0.0;
        for (m, v) in self.iter() {
            d = d.max((v - other.coeff(m)).abs());
        }
        for (m, v) in other.iter() {
            if !self.coeffs.contains_key(&m) {
                d = d.max(v.abs());
            }
        }
        d
    }

    /// For a polynomial over pair variables `(x_0..x_{n-1}, x̄_0..x̄_{n-1})`,
    /// substitutes `x̄_i = 1 - x_i` and returns the polynomial over `x`.
    pub fn substitute_complement(&self) -> Result<DensePoly, OracleError> {
        if !self.n.is_multiple_of(2) {
            return Err(OracleError::VariableCountMismatch { expected: self.n + 1, got: self.n });
        }
        let n = self.n / 2;
        let low = (1u32 << n) - 1;
        let mut out = DensePoly::zero(n);
        for (m, v) in self.iter() {
            let pos = m & low;
            let neg = m >> n;
            if pos & neg != 0 {
                return Err(OracleError::NotSetMultilinear(m));
            }
            // Π_{i∈neg}(1 - x_i) = Σ_{U⊆neg} (-1)^{|U|} x^U
            let mut u = neg;
            loop {
                let sign = if u.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                out.add_term(pos | u, sign * v);
                if u == 0 {
                    break;
                }
                u = (u - 1) & neg;
            }
        }
        Ok(out)
    }
}

/// How leaves are read when expanding a circuit symbolically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenseMode {
    /// Polynomial in `x_0..x_{n-1}`; `x̄_i` is read as `1 - x_i`.
    Single,
    /// Polynomial in the `2n` formal leaves: `x_i` is variable `i`, `x̄_i` is `n + i`.
    /// An affine leaf `a + b x_i` is read as its network form `a x̄_i + (a + b) x_i`.
    Pair,
}

/// Exact coefficient expansion of a binary circuit by bottom-up polynomial arithmetic.
pub fn circuit_to_dense(c: &Circuit, mode: DenseMode) -> Result<DensePoly, OracleError> {
    let n = c.num_vars();
    let width = match mode {
        DenseMode::Single => {
            check_scale(n, MAX_NETWORK_VARS)?;
            n
        }
        DenseMode::Pair => {
            check_scale(n, MAX_NETWORK_VARS)?;
            2 * n
        }
    };
    let reach = c.reachable();
    let mut polys: Vec<Option<DensePoly>> = vec![None; c.num_nodes()];
    for (i, node) in c.nodes().iter().enumerate() {
        if !reach[i] {
            continue;
        }
        let get = |id: &NodeId| polys[id.index()].as_ref().expect("children precede parents");
        let p = match node {
            Node::Const(v) => DensePoly::constant(width, *v),
            Node::Sum { children, weights } => {
                let mut acc = DensePoly::zero(width);
                for (ch, w) in children.iter().zip(weights) {
                    acc.add_scaled(get(ch), *w);
                }
                acc
            }
            Node::Product { children } => {
                let mut acc = DensePoly::constant(width, 1.0);
                for ch in children {
                    acc = acc.checked_mul(get(ch)).ok_or(OracleError::NonMultilinearProduct(i))?;
                }
                acc
            }
            Node::Leaf { var, func } => {
                let (a, b) = func.affine_coeffs().ok_or(OracleError::UnsupportedLeaf(i))?;
                let x = 1u32 << var;
                match mode {
                    DenseMode::Single => DensePoly::from_pairs(width, [(0, a), (x, b)]),
                    DenseMode::Pair => {
                        let nx = 1u32 << (n + var);
                        DensePoly::from_pairs(width, [(nx, a), (x, a + b)])
                    }
                }
            }
        };
        polys[i] = Some(p);
    }
    Ok(polys.swap_remove(c.root().index()).expect("root is reachable"))
}

/// Naive circuit for a polynomial over binary variables: a weighted sum of
/// indicator products, one per monomial.
pub fn compile_dense(p: &DensePoly) -> Circuit {
    let n = p.num_vars();
    let mut b = CircuitBuilder::binary(n);
    let leaves: Vec<NodeId> = (0..n).map(|i| b.leaf(i, LeafFn::Ind)).collect();
    let mut terms = Vec::new();
    for (m, v) in p.iter() {
        let factors: Vec<NodeId> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| leaves[i]).collect();
        let term = match factors.len() {
            0 => b.constant(1.0),
            1 => factors[0],
            _ => b.product(&factors),
        };
        terms.push((v, term));
    }
    let root = if terms.is_empty() { b.constant(0.0) } else { b.sum(&terms) };
    b.finish(root).expect("compiled circuit is well formed").compact()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_mode_keeps_both_literals() {
        let mut b = CircuitBuilder::binary(1);
        let (x, nx) = (b.ind(0), b.neg_ind(0));
        let p = b.product(&[x, nx]);
        let c = b.finish(p).unwrap();
        let d = circuit_to_dense(&c, DenseMode::Pair).unwrap();
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![(0b11, 1.0)]);
        assert_eq!(circuit_to_dense(&c, DenseMode::Single), Err(OracleError::NonMultilinearProduct(2)));
    }

    #[test]
    fn squared_variable_is_rejected() {
        let mut b = CircuitBuilder::binary(1);
        let x = b.ind(0);
        let p = b.product(&[x, x]);
        let c = b.finish(p).unwrap();
        assert_eq!(circuit_to_dense(&c, DenseMode::Single), Err(OracleError::NonMultilinearProduct(1)));
    }

    #[test]
    fn compile_round_trip() {
        let p = DensePoly::from_pairs(3, [(0, 0.5), (0b101, -2.0), (0b010, 1.25), (0b111, 3.0)]);
        let c = compile_dense(&p);
        assert_eq!(circuit_to_dense(&c, DenseMode::Single).unwrap(), p);
        let zero = compile_dense(&DensePoly::zero(2));
        assert!(circuit_to_dense(&zero, DenseMode::Single).unwrap().is_zero());
    }

    #[test]
    fn eval_matches_cube_values() {
        let p = DensePoly::from_pairs(2, [(0, 0.1), (1, 0.1), (2, 0.3), (3, -0.2)]);
        let cube = p.cube_values();
        for (mask, v) in cube.iter().enumerate() {
            let x = [(mask & 1) as f64, (mask >> 1 & 1) as f64];
            assert!((p.eval(&x) - v).abs() < 1e-15);
        }
    }
}
