//! PMF ↔ CDF transforms for binary circuits and single-pass probability queries.
//!
//! A smooth, decomposable binary circuit whose root covers every variable
//! computes a set-multilinear polynomial in the formal leaves `x_i`, `x̄_i`: its
//! own network form. The transforms are then leaf substitutions:
//!
//! * PMF → CDF: `x̄_i ← 1`, giving the generating function, which is the CDF
//!   polynomial on binary variables.
//! * CDF → PMF: `x̄_i ← 1 - 2x_i`, which applies signed subset sums over every
//!   set below the evaluation point.
//!
//! An affine leaf `a + b·x` reads as `a·x̄ + (a + b)·x` in network form, so both
//! substitutions map affine leaves to affine leaves and compose exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use crate::circuit::SemanticsTag;
use crate::circuit::{Circuit, LeafFn};
use crate::oracle::{
    cdf_poly_to_pmf_poly_exact, cube_table, equiv_random_points, pmf_to_cdf_poly_exact, pmf_to_pmf_poly_exact,
    DensePoly, OracleError, Verdict, IDENTITY_GRID, MAX_NETWORK_VARS,
};
use crate::structure::{check_network_form, NetworkFormError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("circuit is not in pair-indicator form: {0}")]
    NotPairIndicatorForm(#[from] NetworkFormError),
    #[error("{got} query marks for a circuit over {expected} variables")]
    MarksLength { expected: usize, got: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum QueryMark {
    Evidence0,
    Evidence1,
    Marginalized,
}

/// One mark per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryMarks(pub Vec<QueryMark>);

impl QueryMarks {
    pub fn all(n: usize, m: QueryMark) -> Self {
        QueryMarks(vec![m; n])
    }

    /// Full evidence for the cube point `mask`.
    pub fn from_mask(n: usize, mask: usize) -> Self {
        QueryMarks(
            (0..n).map(|i| if mask >> i & 1 == 1 { QueryMark::Evidence1 } else { QueryMark::Evidence0 }).collect(),
        )
    }
}

/// Evaluates a network-form circuit with `(x_i, x̄_i) = pairs[i]` fed to the formal leaves.
pub fn evaluate_pairs(c: &Circuit, pairs: &[(f64, f64)]) -> f64 {
    c.evaluate_with(|var, f| {
        let (y, ny) = pairs[var];
        match f.affine_coeffs() {
            Some((a, b)) => a * ny + (a + b) * y,
            None => f64::NAN,
        }
    })
}

fn substitute(
    c: &Circuit,
    tag: SemanticsTag,
    rule: impl Fn(f64, f64) -> (f64, f64),
) -> Result<Circuit, TransformError> {
    check_network_form(c, false)?;
    let out = c.map_leaves(|_, f| {
        let (a, b) = f.affine_coeffs().expect("checked binary leaves");
        let (a, b) = rule(a, b);
        LeafFn::from_affine(a, b)
    });
    Ok(out.with_tag(Some(tag)))
}

/// `x̄_i ← 1`. Input computes the network polynomial of a PMF; output computes the
/// CDF polynomial at every real point. Size is unchanged.
pub fn pmf_to_cdf_circuit(c: &Circuit) -> Result<Circuit, TransformError> {
    substitute(c, SemanticsTag::Cdf, |a, b| (a, a + b))
}

/// `x̄_i ← 1 - 2x_i`. Input computes the network polynomial of a CDF; output
/// computes the PMF polynomial at every real point. Size is unchanged.
pub fn cdf_to_pmf_circuit(c: &Circuit) -> Result<Circuit, TransformError> {
    substitute(c, SemanticsTag::Pmf, |a, b| (a, b - a))
}

fn marked(c: &Circuit, m: &QueryMarks, pair: impl Fn(QueryMark) -> (f64, f64)) -> Result<f64, TransformError> {
    if m.0.len() != c.num_vars() {
        return Err(TransformError::MarksLength { expected: c.num_vars(), got: m.0.len() });
    }
    check_network_form(c, false)?;
    let pairs: Vec<(f64, f64)> = m.0.iter().map(|&k| pair(k)).collect();
    Ok(evaluate_pairs(c, &pairs))
}

/// Probability of the evidence in `m` from a CDF network circuit, in one pass.
///
/// Leaf inputs: evidence 0 → `(0, 1)`, evidence 1 → `(1, -1)`, marginalized → `(1, 0)`.
pub fn query(c: &Circuit, m: &QueryMarks) -> Result<f64, TransformError> {
    marked(c, m, |k| match k {
        QueryMark::Evidence0 => (0.0, 1.0),
        QueryMark::Evidence1 => (1.0, -1.0),
        QueryMark::Marginalized => (1.0, 0.0),
    })
}

/// Probability of the evidence in `m` from a PMF network circuit.
///
/// Leaf inputs: evidence 0 → `(0, 1)`, evidence 1 → `(1, 0)`, marginalized → `(1, 1)`.
pub fn pmf_query(c: &Circuit, m: &QueryMarks) -> Result<f64, TransformError> {
    marked(c, m, |k| match k {
        QueryMark::Evidence0 => (0.0, 1.0),
        QueryMark::Evidence1 => (1.0, 0.0),
        QueryMark::Marginalized => (1.0, 1.0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMethod {
    /// Compared against dense polynomials at every cube point and at grid points.
    Oracle,
    /// Round trip compared against the input by randomized identity testing.
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTripReport {
    pub tag: &'static str,
    pub method: CheckMethod,
    pub points_checked: usize,
    /// Largest deviation relative to `max(1, |expected|, |actual|)`.
    pub max_deviation: f64,
    pub forward_size_delta: i64,
    pub backward_size_delta: i64,
    pub passed: bool,
}

/// Tolerance used by [`round_trip_check`].
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-9;

fn grid_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..n).map(|_| rng.gen_range(-IDENTITY_GRID..=IDENTITY_GRID) as f64).collect()).collect()
}

fn cube_points(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n).map(|m| (0..n).map(|i| (m >> i & 1) as f64).collect()).collect()
}

fn relative_deviation(expected: f64, actual: f64) -> f64 {
    (expected - actual).abs() / 1f64.max(expected.abs()).max(actual.abs())
}

/// Largest relative deviation between a circuit and a dense polynomial over
/// `points`. The polynomial side is evaluated exactly.
pub fn max_deviation(c: &Circuit, p: &DensePoly, points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .map(|x| relative_deviation(p.eval_exact(x), c.evaluate(x).expect("point covers all variables")))
        .fold(0.0, f64::max)
}

/// Applies the forward transform for `tag` and its inverse, and checks both
/// against the oracle (n ≤ 12) or the round trip against the input (larger n).
pub fn round_trip_check(c: &Circuit, tag: SemanticsTag, seed: u64) -> Result<RoundTripReport, TransformError> {
    round_trip_check_with(c, tag, seed, 100)
}

/// [`round_trip_check`] with `trials` random grid points in place of the default 100.
pub fn round_trip_check_with(
    c: &Circuit,
    tag: SemanticsTag,
    seed: u64,
    trials: usize,
) -> Result<RoundTripReport, TransformError> {
    let (forward, backward) = match tag {
        SemanticsTag::Pmf => {
            let f = pmf_to_cdf_circuit(c)?;
            let b = cdf_to_pmf_circuit(&f)?;
            (f, b)
        }
        SemanticsTag::Cdf | SemanticsTag::Pgf => {
            let f = cdf_to_pmf_circuit(c)?;
            let b = pmf_to_cdf_circuit(&f)?;
            (f, b)
        }
    };
    let size = c.size() as i64;
    let forward_size_delta = forward.size() as i64 - size;
    let backward_size_delta = backward.size() as i64 - forward.size() as i64;
    let n = c.num_vars();
    let (method, points_checked, max_dev) = if n <= MAX_NETWORK_VARS {
        let cube = cube_table(c)?;
        let original = pmf_to_pmf_poly_exact(&cube)?;
        let expected_forward = match tag {
            SemanticsTag::Pmf => pmf_to_cdf_poly_exact(&cube)?,
            SemanticsTag::Cdf | SemanticsTag::Pgf => cdf_poly_to_pmf_poly_exact(&original)?,
        };
        let cube = cube_points(n);
        let grid = grid_points(n, trials, seed);
        // on the cube every term is bounded, so plain evaluation is accurate there
        let cube_dev = |circuit: &Circuit, poly: &DensePoly| {
            cube.iter()
                .map(|x| relative_deviation(poly.eval(x), circuit.evaluate(x).expect("point covers all variables")))
                .fold(0.0, f64::max)
        };
        let dev = [(&forward, &expected_forward), (&backward, &original)]
            .iter()
            .map(|(circuit, poly)| cube_dev(circuit, poly).max(max_deviation(circuit, poly, &grid)))
            .fold(0.0, f64::max);
        (CheckMethod::Oracle, cube.len() + grid.len(), dev)
    } else {
        let points = grid_points(n, trials, seed);
        let dev = points
            .iter()
            .map(|x| relative_deviation(c.evaluate(x).unwrap(), backward.evaluate(x).unwrap()))
            .fold(0.0, f64::max);
        debug_assert_eq!(
            dev <= ROUND_TRIP_TOLERANCE,
            matches!(equiv_random_points(c, &backward, trials, seed), Verdict::Equivalent { .. })
        );
        (CheckMethod::Randomized, trials, dev)
    };
    Ok(RoundTripReport {
        tag: tag.as_str(),
        method,
        points_checked,
        max_deviation: max_dev,
        forward_size_delta,
        backward_size_delta,
        passed: max_dev <= ROUND_TRIP_TOLERANCE && forward_size_delta == 0 && backward_size_delta == 0,
    })
}
