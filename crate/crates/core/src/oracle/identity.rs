//! Randomized identity testing on a small integer grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;

/// Coordinates are drawn uniformly from `-IDENTITY_GRID..=IDENTITY_GRID`.
pub const IDENTITY_GRID: i64 = 8;
/// Largest accepted deviation, relative to `max(1, |left|, |right|)`.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Equivalent {
        trials: usize,
    },
    Counterexample {
        point: Vec<f64>,
        left: f64,
        right: f64,
    },
    /// The circuits declare different numbers of variables.
    DifferentVariables {
        left: usize,
        right: usize,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }
}

pub(crate) fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Compares two circuits at `trials` seeded grid points.
///
/// For multilinear polynomials that differ, a single point from a grid of 17
/// values per coordinate exposes the difference with probability at least
/// `1 - n/17`.
pub fn equiv_random_points(c1: &Circuit, c2: &Circuit, trials: usize, seed: u64) -> Verdict {
    let n = c1.num_vars();
    if n != c2.num_vars() {
        return Verdict::DifferentVariables { left: n, right: c2.num_vars() };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; n];
    for _ in 0..trials {
        for x in &mut point {
            *x = rng.gen_range(-IDENTITY_GRID..=IDENTITY_GRID) as f64;
        }
        let left = c1.evaluate(&point).expect("point covers all variables");
        let right = c2.evaluate(&point).expect("point covers all variables");
        if !close(left, right, IDENTITY_TOLERANCE) {
            return Verdict::Counterexample { point, left, right };
        }
    }
    Verdict::Equivalent { trials }
}
