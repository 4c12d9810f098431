//! Exponential-cost ground truth.
//!
//! Explicit tables over the Boolean cube, subset-lattice zeta/Möbius sweeps, and
//! a sparse multilinear polynomial type. Everything here is brute force and
//! capped in size; the circuit passes are checked against it.

mod dense;
mod generate;
mod identity;
mod numeric;

pub use dense::{circuit_to_dense, compile_dense, DenseMode, DensePoly};
pub use generate::{
    random_continuous_circuit, random_distribution, random_structured_circuit, random_structured_circuit_with,
    ContinuousConfig, FamilyKind, StructuredCircuit, StructuredConfig,
};
pub use identity::{equiv_random_points, Verdict, IDENTITY_GRID, IDENTITY_TOLERANCE};
pub use numeric::{
    check_cdf_to_pdf, check_pdf_to_cdf, numeric_box_probability, numeric_mixed_partial, sample_points, BoxMethod,
    Estimate, NumericMethod, NumericReport, BOX_TOLERANCE, MAX_QUADRATURE_VARS, MAX_STENCIL_VARS, STENCIL_STEP,
    STENCIL_TOLERANCE,
};

use std::ops::{AddAssign, SubAssign};

use num::{BigInt, BigRational, ToPrimitive, Zero};
use thiserror::Error;

use crate::circuit::Circuit;

/// Largest variable count for cube tables.
pub const MAX_TABLE_VARS: usize = 20;
/// Largest variable count for network forms (the output has twice as many).
pub const MAX_NETWORK_VARS: usize = 12;
/// Largest formal variable count for a [`DensePoly`].
pub const MAX_POLY_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{n} variables exceeds the oracle limit of {max}")]
    ScaleExceeded { n: usize, max: usize },
    #[error("product node {0} multiplies terms sharing a variable; the result is not multilinear")]
    NonMultilinearProduct(usize),
    #[error("node {0} has a leaf the dense expansion cannot represent")]
    UnsupportedLeaf(usize),
    #[error("monomial {0:#b} contains both x_i and its complement")]
    NotSetMultilinear(u32),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("expected a polynomial over {expected} variables, got {got}")]
    VariableCountMismatch { expected: usize, got: usize },
}

pub(crate) fn check_scale(n: usize, max: usize) -> Result<(), OracleError> {
    if n > max {
        Err(OracleError::ScaleExceeded { n, max })
    } else {
        Ok(())
    }
}

/// In-place subset sums: `xs[A] <- sum over B ⊆ A of xs[B]`.
pub fn zeta_transform<T: Clone + AddAssign>(xs: &mut [T]) {
    assert!(xs.len().is_power_of_two());
    let mut bit = 1;
    while bit < xs.len() {
        for block in xs.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h += l.clone();
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`zeta_transform`]: `xs[A] <- sum over B ⊆ A of (-1)^{|A|-|B|} xs[B]`.
pub fn mobius_transform<T: Clone + SubAssign>(xs: &mut [T]) {
    assert!(xs.len().is_power_of_two());
    let mut bit = 1;
    while bit < xs.len() {
        for block in xs.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h -= l.clone();
            }
        }
        bit <<= 1;
    }
}

/// Values on `{0,1}^n`; cell `mask` holds the value at the point whose `i`-th
/// coordinate is bit `i` of `mask`.
#[derive(Clone, Debug, PartialEq)]
pub struct PmfTable {
    n: usize,
    mass: Vec<f64>,
}

impl PmfTable {
    pub fn new(n: usize, mass: Vec<f64>) -> Result<Self, OracleError> {
        check_scale(n, MAX_TABLE_VARS)?;
        if mass.len() != 1 << n {
            return Err(OracleError::LengthMismatch { expected: 1 << n, got: mass.len() });
        }
        Ok(PmfTable { n, mass })
    }

    pub fn zeros(n: usize) -> Result<Self, OracleError> {
        check_scale(n, MAX_TABLE_VARS)?;
        Ok(PmfTable { n, mass: vec![0.0; 1 << n] })
    }

    pub fn point_mass(n: usize, mask: usize) -> Result<Self, OracleError> {
        let mut t = Self::zeros(n)?;
        t.mass[mask] = 1.0;
        Ok(t)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn cell(&self, mask: usize) -> f64 {
        self.mass[mask]
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Nonnegative and summing to one within `tol`.
    pub fn is_probability(&self, tol: f64) -> bool {
        self.mass.iter().all(|&m| m >= -tol) && (self.total() - 1.0).abs() <= tol
    }
}

/// Arbitrary real function on the subsets of `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunction {
    n: usize,
    values: Vec<f64>,
}

impl SetFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self, OracleError> {
        check_scale(n, MAX_TABLE_VARS)?;
        if values.len() != 1 << n {
            return Err(OracleError::LengthMismatch { expected: 1 << n, got: values.len() });
        }
        Ok(SetFunction { n, values })
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn zeta(&self) -> SetFunction {
        let mut values = self.values.clone();
        zeta_transform(&mut values);
        SetFunction { n: self.n, values }
    }
}

/// Generalized inclusion–exclusion: recovers `f` from `g(A) = Σ_{B⊆A} f(B)`.
pub fn mobius_invert(g: &SetFunction) -> SetFunction {
    let mut values = g.values.clone();
    mobius_transform(&mut values);
    SetFunction { n: g.n, values }
}

/// The PMF polynomial: unique multilinear interpolant of the table.
pub fn pmf_to_pmf_poly(t: &PmfTable) -> Result<DensePoly, OracleError> {
    DensePoly::interpolate(t.n, &t.mass)
}

/// `F(x) = Σ_{y ≤ x} f(y)` on the cube.
pub fn pmf_to_cdf_table(t: &PmfTable) -> PmfTable {
    let mut mass = t.mass.clone();
    zeta_transform(&mut mass);
    PmfTable { n: t.n, mass }
}

/// The CDF polynomial: downward sums, then interpolation.
pub fn pmf_to_cdf_poly(t: &PmfTable) -> Result<DensePoly, OracleError> {
    let cdf = pmf_to_cdf_table(t);
    DensePoly::interpolate(cdf.n, &cdf.mass)
}

/// The generating function `Σ_S f(v_S) Π_{i∈S} x_i`.
pub fn pmf_to_pgf(t: &PmfTable) -> Result<DensePoly, OracleError> {
    DensePoly::from_coefficients(t.n, &t.mass)
}

/// PMF polynomial from a CDF polynomial: cube values, signed subset sums, re-interpolation.
pub fn cdf_poly_to_pmf_poly(c: &DensePoly) -> Result<DensePoly, OracleError> {
    check_scale(c.num_vars(), MAX_TABLE_VARS)?;
    let mut values = c.cube_values();
    mobius_transform(&mut values);
    DensePoly::interpolate(c.num_vars(), &values)
}

/// Floats as integers over a common power of two: `values[i] = ints[i] * 2^exp`.
/// Sums and differences of such numbers stay exact without any gcd work.
fn scaled(values: &[f64]) -> (Vec<BigInt>, i32) {
    let parts: Vec<(i64, i32)> = values
        .iter()
        .map(|&v| {
            assert!(v.is_finite(), "finite table value");
            let (mant, exp, sign) = num::Float::integer_decode(v);
            (i64::from(sign) * mant as i64, i32::from(exp))
        })
        .collect();
    let exp = parts.iter().filter(|p| p.0 != 0).map(|p| p.1).min().unwrap_or(0);
    let ints = parts
        .iter()
        .map(|&(m, e)| if m == 0 { BigInt::zero() } else { BigInt::from(m) << (e - exp) as usize })
        .collect();
    (ints, exp)
}

fn rounded(n: usize, ints: &[BigInt], exp: i32) -> Result<DensePoly, OracleError> {
    let denom = if exp < 0 { BigInt::from(1) << (-exp) as usize } else { BigInt::from(1) };
    let numer_scale = if exp > 0 { BigInt::from(1) << exp as usize } else { BigInt::from(1) };
    let c: Vec<f64> =
        ints.iter().map(|v| BigRational::new(v * &numer_scale, denom.clone()).to_f64().unwrap_or(f64::NAN)).collect();
    DensePoly::from_coefficients(n, &c)
}

/// [`pmf_to_pmf_poly`] in exact arithmetic; each coefficient is rounded once.
pub fn pmf_to_pmf_poly_exact(t: &PmfTable) -> Result<DensePoly, OracleError> {
    check_scale(t.n, MAX_NETWORK_VARS)?;
    let (mut v, exp) = scaled(&t.mass);
    mobius_transform(&mut v);
    rounded(t.n, &v, exp)
}

/// [`pmf_to_cdf_poly`] in exact arithmetic; each coefficient is rounded once.
pub fn pmf_to_cdf_poly_exact(t: &PmfTable) -> Result<DensePoly, OracleError> {
    check_scale(t.n, MAX_NETWORK_VARS)?;
    let (mut v, exp) = scaled(&t.mass);
    zeta_transform(&mut v);
    mobius_transform(&mut v);
    rounded(t.n, &v, exp)
}

/// [`cdf_poly_to_pmf_poly`] in exact arithmetic; each coefficient is rounded once.
pub fn cdf_poly_to_pmf_poly_exact(c: &DensePoly) -> Result<DensePoly, OracleError> {
    let n = c.num_vars();
    check_scale(n, MAX_NETWORK_VARS)?;
    let mut dense = vec![0.0; 1 << n];
    for (m, x) in c.iter() {
        dense[m as usize] = x;
    }
    let (mut v, exp) = scaled(&dense);
    // coefficients -> cube values -> signed subset sums -> coefficients
    zeta_transform(&mut v);
    mobius_transform(&mut v);
    mobius_transform(&mut v);
    rounded(n, &v, exp)
}

/// Network form over `2n` variables: `x_i` is variable `i`, `x̄_i` is variable `n + i`.
pub fn network_form(p: &DensePoly) -> Result<DensePoly, OracleError> {
    let n = p.num_vars();
    check_scale(n, MAX_NETWORK_VARS)?;
    let values = p.cube_values();
    let full = (1u32 << n) - 1;
    let coeffs = values.iter().enumerate().map(|(s, &v)| {
        let s = s as u32;
        (s | ((!s & full) << n), v)
    });
    Ok(DensePoly::from_pairs(2 * n, coeffs))
}

/// Values of a circuit at every point of `{0,1}^n`.
pub fn cube_table(c: &Circuit) -> Result<PmfTable, OracleError> {
    let n = c.num_vars();
    check_scale(n, MAX_TABLE_VARS)?;
    let mut x = vec![0.0; n];
    let mut mass = Vec::with_capacity(1 << n);
    for mask in 0..1usize << n {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = ((mask >> i) & 1) as f64;
        }
        mass.push(c.evaluate(&x).expect("assignment is total"));
    }
    Ok(PmfTable { n, mass })
}
