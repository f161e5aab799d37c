//! Adaptive Gauss–Kronrod quadrature and the `a → 0⁺` limit extrapolators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::combinators::fd_step;
use crate::error::{Error, Result};
use crate::function::InvariantFunction;

pub const DEFAULT_INTEGRATE_TOL: f64 = 1e-10;
pub const DEFAULT_LIMIT_TOL: f64 = 1e-8;
/// Bisection depth after which a panel is no longer split.
pub const MAX_DEPTH: u32 = 40;
/// Upper bound on live panels.
pub const MAX_PANELS: usize = 5000;
/// Largest `k` in the sequence `a_k = 2^{-k}`.
pub const MAX_LIMIT_STEPS: usize = 48;

const ROUGH_STABLE_RUN: usize = 4;

// 15-point Kronrod nodes on [-1, 1] (nonnegative half) and weights, with the
// embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Panel with the largest remaining error estimate.
    pub worst_panel: (f64, f64),
}

/// Outcome of a limit extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitResult {
    pub value: f64,
    pub error_estimate: f64,
    pub steps: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // splittable panels first, then by error; ties broken by position so
        // the order is total and deterministic
        let sa = self.depth < MAX_DEPTH;
        let sb = other.depth < MAX_DEPTH;
        sa.cmp(&sb)
            .then(self.error.total_cmp(&other.error))
            .then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F>(phi: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = phi(c)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = phi(c - dx)?;
        let f2 = phi(c + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    err = err.max(4.0 * f64::EPSILON * resabs);
    if !value.is_finite() || !err.is_finite() {
        return Err(Error::Convergence(format!(
            "non-finite integrand values on [{a}, {b}]"
        )));
    }
    Ok((value, err))
}

/// Oriented `∫_a^b φ` for a fallible integrand. Panels start split at the
/// listed interior points, which are never sampled.
pub fn try_integrate<F>(phi: F, a: f64, b: f64, tol: f64, interior: &[f64]) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(format!("integrate: non-finite limits [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("integrate: tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
            worst_panel: (a, b),
        });
    }
    if b < a {
        let r = try_integrate(phi, b, a, tol, interior)?;
        return Ok(QuadratureResult { value: -r.value, ..r });
    }

    let mut cuts: Vec<f64> = interior.iter().copied().filter(|&p| p > a && p < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    let mut total_err = 0.0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&phi, w[0], w[1])?;
        evaluations += 15;
        total_err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e, depth: 0 });
    }

    while total_err > tol && heap.len() < MAX_PANELS {
        let Some(worst) = heap.peek().copied() else { break };
        if worst.depth >= MAX_DEPTH {
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted in floating point
            let mut w = heap.pop().expect("peeked");
            w.depth = MAX_DEPTH;
            heap.push(w);
            continue;
        }
        heap.pop();
        let (v1, e1) = gk15(&phi, worst.a, mid)?;
        let (v2, e2) = gk15(&phi, mid, worst.b)?;
        evaluations += 30;
        total_err += e1 + e2 - worst.error;
        let depth = worst.depth + 1;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1, depth });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2, depth });
    }

    // re-sum to shed drift from the running updates
    let mut value = 0.0;
    let mut err = 0.0;
    let mut worst = Panel { a, b, value: 0.0, error: -1.0, depth: 0 };
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    for p in &panels {
        value += p.value;
        err += p.error;
        if p.error > worst.error {
            worst = *p;
        }
    }
    Ok(QuadratureResult {
        value,
        error_estimate: err,
        evaluations,
        converged: err <= tol,
        worst_panel: (worst.a, worst.b),
    })
}

/// Oriented `∫_a^b φ` for an infallible integrand.
pub fn integrate<F>(phi: F, a: f64, b: f64, tol: f64, interior: &[f64]) -> QuadratureResult
where
    F: Fn(f64) -> f64,
{
    match try_integrate(|t| Ok(phi(t)), a, b, tol, interior) {
        Ok(r) => r,
        Err(_) => QuadratureResult {
            value: f64::NAN,
            error_estimate: f64::INFINITY,
            evaluations: 0,
            converged: false,
            worst_panel: (a, b),
        },
    }
}

/// Like [`try_integrate`], but non-convergence becomes an error naming the panel.
pub fn integrate_strict<F>(phi: F, a: f64, b: f64, tol: f64, interior: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let r = try_integrate(phi, a, b, tol, interior)?;
    if !r.converged {
        return Err(Error::Convergence(format!(
            "quadrature on [{a}, {b}] reached error {:.3e} > {tol:.1e}, worst panel [{}, {}]",
            r.error_estimate, r.worst_panel.0, r.worst_panel.1
        )));
    }
    Ok(r.value)
}

/// `lim_{a→0⁺} g(a)` along `a_k = 2^{-k}`.
///
/// With `smooth`, two Richardson levels (model `L + c₁a + c₂a²`) are applied
/// and iteration stops when consecutive extrapolants agree within `tol`.
/// Otherwise the last iterate is returned once four consecutive steps move
/// by less than `2·tol` and `a ≤ 2·tol`. Sample points where `g` hits a pole are skipped.
pub fn limit_at_zero<G>(g: G, smooth: bool, tol: f64) -> Result<LimitResult>
where
    G: Fn(f64) -> Result<f64>,
{
    let mut seq: Vec<f64> = Vec::new();
    let mut t1: Vec<f64> = Vec::new();
    let mut t2: Vec<f64> = Vec::new();
    let mut last = LimitResult {
        value: f64::NAN,
        error_estimate: f64::INFINITY,
        steps: 0,
        converged: false,
    };
    let mut stable = 0;
    for k in 0..=MAX_LIMIT_STEPS {
        let a = 0.5f64.powi(k as i32);
        let v = match g(a) {
            Ok(v) if v.is_finite() => v,
            Ok(_) | Err(Error::Pole(_)) => {
                // a gap breaks the ratio-2 structure
                seq.clear();
                t1.clear();
                t2.clear();
                stable = 0;
                continue;
            }
            Err(e) => return Err(e),
        };
        seq.push(v);
        last.steps = k + 1;
        if smooth {
            if seq.len() >= 2 {
                let n = seq.len();
                t1.push(2.0 * seq[n - 1] - seq[n - 2]);
            }
            if t1.len() >= 2 {
                let n = t1.len();
                t2.push((4.0 * t1[n - 1] - t1[n - 2]) / 3.0);
            }
            if t2.len() >= 2 {
                let n = t2.len();
                let diff = (t2[n - 1] - t2[n - 2]).abs();
                last.value = t2[n - 1];
                last.error_estimate = diff;
                if diff < tol {
                    last.converged = true;
                    return Ok(last);
                }
            }
        } else if seq.len() >= 2 {
            let n = seq.len();
            let diff = (seq[n - 1] - seq[n - 2]).abs();
            last.value = seq[n - 1];
            last.error_estimate = diff;
            stable = if diff < 2.0 * tol { stable + 1 } else { 0 };
            // an iterate can sit still for a few steps while still O(a) away
            if stable >= ROUGH_STABLE_RUN && a <= 2.0 * tol {
                last.converged = true;
                return Ok(last);
            }
        }
    }
    Ok(last)
}

/// `lim_{a→0⁺} a·f(x, a)`; the extrapolation mode follows `f`'s traits.
pub fn limit_scaled(f: &InvariantFunction, x: f64, tol: f64) -> Result<LimitResult> {
    let smooth = f.traits().smooth_scaled_limit;
    limit_at_zero(|a| Ok(a * f.eval(x, a)?), smooth, tol)
}

/// `∂f/∂y` at `(x, y)` and whether a finite difference was used.
pub fn y_partial(f: &InvariantFunction, x: f64, y: f64) -> Result<(f64, bool)> {
    if let Some(d) = f.dy(x, y) {
        return Ok((d?, false));
    }
    let mut h = fd_step(y);
    if y - h <= 0.0 {
        h = 0.5 * y;
    }
    let v = (f.eval(x, y + h)? - f.eval(x, y - h)?) / (2.0 * h);
    Ok((v, true))
}

/// `∂f/∂y`, analytic when available, else central differences with step
/// `cbrt(ε)·max(1, y)`.
pub fn y_partial_fd(f: &InvariantFunction, x: f64, y: f64) -> Result<f64> {
    y_partial(f, x, y).map(|(v, _)| v)
}
