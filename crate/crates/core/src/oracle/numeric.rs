//! Numeric oracles for continuous circuits: integrating a density over the
//! box `(-inf, x]` and taking mixed central differences of a CDF.

use num::{BigRational, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{exact_at, Circuit, ContinuousFamily, LeafFn, LeafMode, Node};
use crate::continuous::{cdf_to_pdf, eval_density, pdf_to_cdf, ContinuousError};

pub const MAX_QUADRATURE_VARS: usize = 3;
pub const MAX_STENCIL_VARS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoxMethod {
    /// Nested adaptive Gauss–Kronrod; `rel_tol` is the per-level relative target.
    Quadrature { rel_tol: f64 },
    /// Importance sampling from a half-Cauchy proposal on every axis.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for BoxMethod {
    fn default() -> Self {
        BoxMethod::Quadrature { rel_tol: 1e-8 }
    }
}

/// A numeric value with an error estimate (absolute error bound for
/// quadrature, one standard error for Monte Carlo).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

// 15-point Kronrod nodes on [-1, 1] (non-negative half) with the embedded
// 7-point Gauss rule at the odd positions.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 400;
// densities and probabilities here are O(1); below this nothing is refined
const ABS_FLOOR: f64 = 1e-13;

/// One Gauss–Kronrod panel. The integrand returns a value and an error bound
/// on that value; the bounds are integrated with the Kronrod weights.
/// Returns (integral, panel error estimate, integrated inner error).
fn gk15<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, ec) = f(c);
    let mut pairs = [(0.0, 0.0); 7];
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut inner = ec * WGK[7];
    for (j, pair) in pairs.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let (l, el) = f(c - dx);
        let (r, er) = f(c + dx);
        *pair = (l, r);
        k += WGK[j] * (l + r);
        inner += WGK[j] * (el + er);
        if j % 2 == 1 {
            g += WG[j / 2] * (l + r);
        }
    }
    // QUADPACK's scaling of |K - G|: the raw difference measures the 7-point
    // rule, which is far less accurate than the 15-point result
    let mean = 0.5 * k;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (l, r)) in pairs.iter().enumerate() {
        asc += WGK[j] * ((l - mean).abs() + (r - mean).abs());
    }
    let asc = asc * h.abs();
    let raw = ((k - g) * h).abs();
    let err = if asc != 0.0 && raw != 0.0 { asc * (200.0 * raw / asc).powf(1.5).min(1.0) } else { raw };
    (k * h, err, inner * h.abs())
}

/// Globally adaptive integration of `f` over `[a, b]`: the panel with the
/// largest error estimate is bisected until the total estimate is below
/// `rel_tol * |I|`. The returned error adds the integrated inner errors.
fn adaptive<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    let (v, e, i) = gk15(f, a, b);
    let mut parts = vec![(a, b, v, e, i)];
    let (mut total, mut err) = (v, e);
    while err > (rel_tol * total.abs()).max(ABS_FLOOR) && parts.len() < MAX_INTERVALS {
        let worst = (0..parts.len()).max_by(|&i, &j| parts[i].3.total_cmp(&parts[j].3)).expect("non-empty");
        let (lo, hi, v, e, i) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            parts.push((lo, hi, v, e, i));
            break;
        }
        let (v1, e1, i1) = gk15(f, lo, mid);
        let (v2, e2, i2) = gk15(f, mid, hi);
        parts.push((lo, mid, v1, e1, i1));
        parts.push((mid, hi, v2, e2, i2));
        total = parts.iter().map(|p| p.2).sum();
        err = parts.iter().map(|p| p.3).sum();
    }
    let inner: f64 = parts.iter().map(|p| p.4).sum();
    (total, err + inner)
}

/// `∫_{-inf}^{x} f`, split at `breaks` below `x`; the unbounded piece is
/// mapped onto `(0, 1]` by `t = b - (1 - u) / u`.
fn half_line<F: FnMut(f64) -> (f64, f64)>(f: &mut F, x: f64, breaks: &[f64], rel_tol: f64) -> (f64, f64) {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b < x).collect();
    cuts.push(x);
    let first = cuts[0];
    let mut tail = |u: f64| {
        let t = first - (1.0 - u) / u;
        let (v, e) = f(t);
        let jac = 1.0 / (u * u);
        if (v * jac).is_finite() {
            (v * jac, e * jac)
        } else {
            (0.0, 0.0)
        }
    };
    let (mut value, mut error) = adaptive(&mut tail, 0.0, 1.0, rel_tol);
    for w in cuts.windows(2) {
        let (v, e) = adaptive(f, w[0], w[1], rel_tol);
        value += v;
        error += e;
    }
    (value, error)
}

fn kinks_per_var(c: &Circuit) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(); c.num_vars()];
    for node in c.nodes() {
        if let Node::Leaf { var, func: LeafFn::Continuous { family, .. } } = node {
            out[*var].extend(kinks(family));
        }
    }
    for b in &mut out {
        b.sort_by(f64::total_cmp);
        b.dedup();
    }
    out
}

fn nested(c: &Circuit, x: &[f64], breaks: &[Vec<f64>], point: &mut Vec<f64>, rel_tol: f64) -> (f64, f64) {
    let d = point.len();
    if d == x.len() {
        return (c.evaluate(point).expect("point covers all variables"), 0.0);
    }
    let mut f = |t: f64| {
        point.push(t);
        let r = nested(c, x, breaks, point, rel_tol);
        point.pop();
        r
    };
    half_line(&mut f, x[d], &breaks[d], rel_tol)
}

/// Numeric `P(X <= x)` for a density circuit.
pub fn numeric_box_probability(c: &Circuit, x: &[f64], method: BoxMethod) -> Result<Estimate, ContinuousError> {
    // checks leaf modes and arity
    eval_density(c, x)?;
    let n = c.num_vars();
    match method {
        BoxMethod::Quadrature { rel_tol } => {
            if n > MAX_QUADRATURE_VARS {
                return Err(ContinuousError::ScaleExceeded { n, max: MAX_QUADRATURE_VARS });
            }
            let breaks = kinks_per_var(c);
            let (value, error) = nested(c, x, &breaks, &mut Vec::with_capacity(n), rel_tol);
            Ok(Estimate { value, error })
        }
        BoxMethod::MonteCarlo { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut point = vec![0.0; n];
            let (mut mean, mut m2) = (0.0f64, 0.0f64);
            for k in 1..=samples.max(1) {
                let mut q = 1.0;
                for (p, xi) in point.iter_mut().zip(x) {
                    // half-Cauchy with unit scale, reflected below x
                    let z = (std::f64::consts::FRAC_PI_2 * rng.gen::<f64>()).tan();
                    *p = xi - z;
                    q *= 2.0 / (std::f64::consts::PI * (1.0 + z * z));
                }
                let w = c.evaluate(&point)? / q;
                let delta = w - mean;
                mean += delta / k as f64;
                m2 += delta * (w - mean);
            }
            let k = samples.max(1) as f64;
            let sd = if k > 1.0 { (m2 / (k - 1.0)).sqrt() } else { f64::INFINITY };
            Ok(Estimate { value: mean, error: sd / k.sqrt() })
        }
    }
}

/// Mixed central difference `Δ_h^n F(x) / (2h)^n` of a CDF circuit.
///
/// The `2^n` stencil values are combined in exact rational arithmetic over
/// the floating-point leaf values, so the only rounding is in the leaves
/// themselves; the naive floating-point sum loses every significant digit at
/// `n = 4, h = 1e-3`.
pub fn numeric_mixed_partial(c: &Circuit, x: &[f64], h: f64) -> Result<f64, ContinuousError> {
    let n = c.num_vars();
    if n > MAX_STENCIL_VARS {
        return Err(ContinuousError::ScaleExceeded { n, max: MAX_STENCIL_VARS });
    }
    crate::continuous::eval_cdf(c, x)?;
    let mut acc = BigRational::zero();
    let mut point = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        for (i, p) in point.iter_mut().enumerate() {
            *p = if mask >> i & 1 == 1 { x[i] + h } else { x[i] - h };
        }
        let v = c.evaluate_exact_with(|node, var, func| match func {
            LeafFn::Continuous { family, mode: LeafMode::Cdf } => exact_at(family.cdf(point[var]), node),
            _ => unreachable!("leaf modes checked"),
        })?;
        if (n as u32 - mask.count_ones()).is_multiple_of(2) {
            acc += v;
        } else {
            acc -= v;
        }
    }
    let denom = exact_at((2.0 * h).powi(n as i32), 0)?;
    Ok((acc / denom).to_f64().unwrap_or(f64::NAN))
}

/// Absolute tolerance when comparing a CDF circuit with quadrature.
pub const BOX_TOLERANCE: f64 = 1e-5;
/// Relative tolerance when comparing a density circuit with central differences.
pub const STENCIL_TOLERANCE: f64 = 1e-3;
pub const STENCIL_STEP: f64 = 1e-3;

/// Interval holding most of a family's mass.
fn bulk(f: &ContinuousFamily) -> (f64, f64) {
    match *f {
        ContinuousFamily::Gaussian { mean, std_dev } => (mean - 2.5 * std_dev, mean + 2.5 * std_dev),
        ContinuousFamily::Uniform { lo, hi } => (lo - 0.25 * (hi - lo), hi + 0.25 * (hi - lo)),
        ContinuousFamily::Exponential { rate } => (-0.5 / rate, 3.0 / rate),
        ContinuousFamily::Logistic { loc, scale } => (loc - 4.0 * scale, loc + 4.0 * scale),
    }
}

/// Points where the density jumps.
fn kinks(f: &ContinuousFamily) -> Vec<f64> {
    match *f {
        ContinuousFamily::Uniform { lo, hi } => vec![lo, hi],
        ContinuousFamily::Exponential { .. } => vec![0.0],
        ContinuousFamily::Gaussian { .. } | ContinuousFamily::Logistic { .. } => Vec::new(),
    }
}

/// Draws points inside the bulk of every variable's leaves, at least `margin`
/// away from any density discontinuity.
pub fn sample_points(c: &Circuit, count: usize, margin: f64, seed: u64) -> Vec<Vec<f64>> {
    let n = c.num_vars();
    let mut range = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    let mut jumps = vec![Vec::new(); n];
    for node in c.nodes() {
        if let Node::Leaf { var, func: LeafFn::Continuous { family, .. } } = node {
            let (lo, hi) = bulk(family);
            range[*var] = (range[*var].0.min(lo), range[*var].1.max(hi));
            jumps[*var].extend(kinks(family));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n)
                .map(|i| {
                    let (lo, hi) = if range[i].0 < range[i].1 { range[i] } else { (-1.0, 1.0) };
                    loop {
                        let t = rng.gen_range(lo..hi);
                        if jumps[i].iter().all(|k| (t - k).abs() >= margin) {
                            break t;
                        }
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericMethod {
    Quadrature,
    MonteCarlo,
    CentralDifference,
}

/// Outcome of checking a continuous transform against a numeric oracle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericReport {
    pub method: NumericMethod,
    pub points_checked: usize,
    /// Absolute for quadrature, relative for central differences.
    pub max_deviation: f64,
    pub size_delta: i64,
    pub passed: bool,
}

/// Transforms a density circuit with [`pdf_to_cdf`] and compares the result
/// with numeric integration at `trials` sampled points. Up to three variables
/// use quadrature; beyond that, Monte Carlo with a five standard error allowance.
pub fn check_pdf_to_cdf(pdf: &Circuit, trials: usize, seed: u64) -> Result<NumericReport, ContinuousError> {
    let cdf = pdf_to_cdf(pdf)?;
    let size_delta = cdf.size() as i64 - pdf.size() as i64;
    let quad = pdf.num_vars() <= MAX_QUADRATURE_VARS;
    let mut max_dev = 0.0f64;
    let mut passed = size_delta == 0;
    for (i, x) in sample_points(pdf, trials, 0.0, seed).iter().enumerate() {
        let got = cdf.evaluate(x)?;
        let (want, allowance) = if quad {
            (numeric_box_probability(pdf, x, BoxMethod::default())?.value, 0.0)
        } else {
            let m = BoxMethod::MonteCarlo { samples: 200_000, seed: seed.wrapping_add(i as u64) };
            let e = numeric_box_probability(pdf, x, m)?;
            (e.value, 5.0 * e.error)
        };
        let dev = (got - want).abs();
        max_dev = max_dev.max(dev);
        passed &= dev <= BOX_TOLERANCE + allowance;
    }
    Ok(NumericReport {
        method: if quad { NumericMethod::Quadrature } else { NumericMethod::MonteCarlo },
        points_checked: trials,
        max_deviation: max_dev,
        size_delta,
        passed,
    })
}

/// Transforms a CDF circuit with [`cdf_to_pdf`] and compares the result with
/// mixed central differences of the input at `trials` sampled points.
pub fn check_cdf_to_pdf(cdf: &Circuit, trials: usize, seed: u64) -> Result<NumericReport, ContinuousError> {
    let pdf = cdf_to_pdf(cdf)?;
    let size_delta = pdf.size() as i64 - cdf.size() as i64;
    let mut max_dev = 0.0f64;
    for x in sample_points(cdf, trials, 2.0 * STENCIL_STEP, seed) {
        let got = pdf.evaluate(&x)?;
        let want = numeric_mixed_partial(cdf, &x, STENCIL_STEP)?;
        let scale = got.abs().max(want.abs());
        if scale > 0.0 {
            max_dev = max_dev.max((got - want).abs() / scale);
        }
    }
    Ok(NumericReport {
        method: NumericMethod::CentralDifference,
        points_checked: trials,
        max_deviation: max_dev,
        size_delta,
        passed: size_delta <= 0 && max_dev <= STENCIL_TOLERANCE,
    })
}
