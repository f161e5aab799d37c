//! Property checks. Every check returns a report; numerical trouble shows up
//! as a failing witness or a flag, never as an `Err`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::grid::GridSpec;
use super::report::{SampleOutcome, Tally, VerificationReport, Witness};
use crate::algebra::{bernoulli_kernel, convolve, zeta_kernel};
use crate::combinators::fd_step;
use crate::error::{Error, Result};
use crate::function::{InvariantFunction, Params};
use crate::quadrature::{limit_at_zero, limit_scaled, try_integrate, y_partial};
use crate::special::{bernoulli_poly, hurwitz_zeta_fourier, log_gamma_abs, sin_pi};

/// Tolerance used internally for quadrature and limits, relative to a check tolerance.
fn inner_tol(tol: f64) -> f64 {
    (tol * 1e-2).max(1e-12)
}

/// Tolerance allowed for the limit extrapolation inside a check.
fn limit_tol(tol: f64) -> f64 {
    (tol * 0.1).max(1e-12)
}

fn series_slack(f: &InvariantFunction, terms: usize) -> f64 {
    terms as f64 * f.series_tolerance()
}

fn function_flags(t: &mut Tally, f: &InvariantFunction) {
    if f.traits().series_defined {
        t.flag("truncation-dominated");
    }
}

fn run<F>(points: &[(f64, f64)], per: F) -> Tally
where
    F: Fn(f64, f64) -> SampleOutcome + Sync,
{
    let outcomes: Vec<SampleOutcome> = points.par_iter().map(|&(x, y)| per(x, y)).collect();
    let mut t = Tally::default();
    for o in outcomes {
        t.absorb(o);
    }
    t
}

/// A report for a check that could not run at all.
fn aborted(property: &str, f: &InvariantFunction, tol: f64, flag: &str) -> VerificationReport {
    let mut t = Tally::default();
    t.push(Witness::new(f64::NAN, f64::NAN, 0, f64::NAN, f64::NAN));
    t.flag(flag);
    t.finish(property, f.label(), f.params().clone(), tol)
}

/// Points from `grid`, or an aborted report.
#[allow(clippy::result_large_err)]
fn points_for(
    property: &str,
    f: &InvariantFunction,
    grid: &GridSpec,
    tol: f64,
) -> std::result::Result<Vec<(f64, f64)>, VerificationReport> {
    grid.sample(f).map_err(|_| aborted(property, f, tol, "grid-error"))
}

fn quad(
    f: &(dyn Fn(f64) -> Result<f64> + Sync),
    a: f64,
    b: f64,
    tol: f64,
    cuts: &[f64],
    o: &mut SampleOutcome,
) -> Result<f64> {
    let r = try_integrate(f, a, b, tol, cuts)?;
    if !r.converged {
        o.flag("quadrature-unconverged");
    }
    Ok(r.value)
}

fn invariance_sum(f: &InvariantFunction, x: f64, y: f64, n: usize) -> Result<f64> {
    let ny = n as f64 * y;
    (0..n).try_fold(0.0, |acc, r| Ok(acc + f.eval(x + r as f64 * y, ny)?))
}

/// `Σ_{r<n} f(x + r·y, n·y) = f(x, y)` for `n = 1..=n_max`, including exact-lattice probes.
pub fn check_invariance(f: &InvariantFunction, grid: &GridSpec, tol: f64) -> VerificationReport {
    let property = "invariance";
    let tolerance = tol + series_slack(f, grid.n_max);
    let mut points = match points_for(property, f, grid, tolerance) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let probes = grid.lattice_probes(f);
    let probed = !probes.is_empty();
    points.extend(probes);
    let mut t = run(&points, |x, y| {
        let mut o = SampleOutcome::default();
        let rhs = match f.eval(x, y) {
            Ok(v) => v,
            Err(_) => return SampleOutcome::failed(x, y, 1),
        };
        for n in 1..=grid.n_max {
            match invariance_sum(f, x, y, n) {
                Ok(lhs) => o.witnesses.push(Witness::new(x, y, n as u64, lhs, rhs)),
                Err(_) => return SampleOutcome::failed(x, y, n as u64),
            }
        }
        o
    });
    if probed {
        t.flag("lattice-probes");
    }
    function_flags(&mut t, f);
    t.finish(property, f.label(), f.params().clone(), tolerance)
}

/// `Σ_{r<n} f(x + r·m·y, n·y) = Σ_{r<m} f(x + r·n·y, m·y)`.
pub fn check_exchange(f: &InvariantFunction, m: usize, n: usize, grid: &GridSpec, tol: f64) -> VerificationReport {
    let property = format!("exchange(m={m},n={n})");
    if m == 0 || n == 0 {
        return aborted(&property, f, tol, "invalid-arguments");
    }
    let tolerance = tol + series_slack(f, m.max(n));
    let points = match points_for(&property, f, grid, tolerance) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let side = |x: f64, y: f64, step: usize, count: usize| -> Result<f64> {
        let scale = count as f64 * y;
        (0..count).try_fold(0.0, |acc, r| Ok(acc + f.eval(x + (r * step) as f64 * y, scale)?))
    };
    let mut t = run(&points, |x, y| match (side(x, y, m, n), side(x, y, n, m)) {
        (Ok(lhs), Ok(rhs)) => SampleOutcome {
            witnesses: vec![Witness::new(x, y, n as u64, lhs, rhs)],
            ..SampleOutcome::default()
        },
        _ => SampleOutcome::failed(x, y, n as u64),
    });
    function_flags(&mut t, f);
    t.finish(&property, f.label(), f.params().clone(), tolerance)
}

/// `∫_x^{x+y} f(t, y) dt = lim_{a→0⁺} a·f(x, a)`. Samples whose limit does
/// not converge are skipped and flagged.
pub fn check_integral_limit(f: &InvariantFunction, grid: &GridSpec, tol: f64) -> VerificationReport {
    let property = "integral-limit";
    let tolerance = tol + series_slack(f, 1);
    if !f.traits().integrable {
        return aborted(property, f, tolerance, "not-integrable");
    }
    let points = match points_for(property, f, grid, tolerance) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let rule = f.integrand_rule();
    let mut t = run(&points, |x, y| {
        let mut o = SampleOutcome::default();
        let lim = match limit_scaled(f, x, limit_tol(tol)) {
            Ok(l) if l.converged => l.value,
            Ok(_) => return SampleOutcome::skip("limit-skipped"),
            Err(_) => return SampleOutcome::failed(x, y, 0),
        };
        let cuts = f.singular_points(y, x, x + y);
        match quad(&|t| rule(t, y), x, x + y, inner_tol(tol), &cuts, &mut o) {
            Ok(v) => o.witnesses.push(Witness::new(x, y, 0, v, lim)),
            Err(_) => return SampleOutcome::failed(x, y, 0),
        }
        o
    });
    function_flags(&mut t, f);
    t.finish(property, f.label(), f.params().clone(), tolerance)
}

/// `f(x + y, y) − f(x, y) = lim_{a→0⁺} (f(x + a, a) − f(x, a))`. The limit
/// is extrapolated first, then taken as a plain sequence limit if that fails.
pub fn check_step_limit(f: &InvariantFunction, grid: &GridSpec, tol: f64) -> VerificationReport {
    let property = "step-limit";
    let tolerance = tol + series_slack(f, 2);
    let points = match points_for(property, f, grid, tolerance) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let mut t = run(&points, |x, y| {
        let lhs = match (f.eval(x + y, y), f.eval(x, y)) {
            (Ok(a), Ok(b)) => a - b,
            _ => return SampleOutcome::failed(x, y, 0),
        };
        let diff = |a: f64| Ok(f.eval(x + a, a)? - f.eval(x, a)?);
        let lim = match limit_at_zero(diff, true, limit_tol(tol)) {
            Ok(l) if !l.converged => limit_at_zero(diff, false, limit_tol(tol)),
            other => other,
        };
        match lim {
            Ok(l) if l.converged => SampleOutcome {
                witnesses: vec![Witness::new(x, y, 0, lhs, l.value)],
                ..SampleOutcome::default()
            },
            Ok(_) => SampleOutcome::skip("limit-skipped"),
            Err(_) => SampleOutcome::failed(x, y, 0),
        }
    });
    function_flags(&mut t, f);
    t.finish(property, f.label(), f.params().clone(), tolerance)
}

/// With `g = ∂f/∂y`: part 1 `f(x, y) = ∫_x^{x−y} g(t, y) dt`; part 2
/// `∂f/∂x = g(x − y, y) − g(x, y)`. Witness `n` is the part number.
/// Finite-difference partials widen the tolerance to at least `1e-4`.
pub fn check_y_derivative_identities(f: &InvariantFunction, grid: &GridSpec, tol: f64) -> VerificationReport {
    let property = "y-derivative";
    let fd = !f.has_dy() || !f.has_dx();
    let base = if fd { tol.max(1e-4) } else { tol };
    let tolerance = base + series_slack(f, 2);
    let points = match points_for(property, f, grid, tolerance) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let g = |t: f64, y: f64| y_partial(f, t, y).map(|(v, _)| v);
    let fx = |x: f64, y: f64| -> Result<f64> {
        match f.dx(x, y) {
            Some(d) => d,
            None => {
                let h = fd_step(x);
                Ok((f.eval(x + h, y)? - f.eval(x - h, y)?) / (2.0 * h))
            }
        }
    };
    let mut t = run(&points, |x, y| {
        let mut o = SampleOutcome::default();
        let cuts = f.singular_points(y, x - y, x);
        let part1 = f.eval(x, y).and_then(|lhs| {
            let rhs = quad(&|t| g(t, y), x, x - y, inner_tol(base), &cuts, &mut o)?;
            Ok((lhs, rhs))
        });
        let part2 = fx(x, y).and_then(|lhs| Ok((lhs, g(x - y, y)? - g(x, y)?)));
        match (part1, part2) {
            (Ok((a, b)), Ok((c, d))) => {
                o.witnesses.push(Witness::new(x, y, 1, a, b));
                o.witnesses.push(Witness::new(x, y, 2, c, d));
                o
            }
            _ => SampleOutcome::failed(x, y, 0),
        }
    });
    if fd {
        t.flag("fd-fallback");
    }
    function_flags(&mut t, f);
    t.finish(property, f.label(), f.params().clone(), tolerance)
}

/// Assumed parity of `∂f/∂y` in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::invalid(format!("parity must be 'even' or 'odd', got '{s}'"))),
        }
    }
}

/// Part 1: `f(y − x, y) = ±f(x, y)`. Part 2, even: `∫_0^{y/2} f = ½·lim a·f(0, a)`;
/// odd: `∫_0^y f = 0`.
pub fn check_parity(f: &InvariantFunction, parity: Parity, grid: &GridSpec, tol: f64) -> VerificationReport {
    let property = format!("parity-{parity}");
    let tolerance = tol + series_slack(f, 2);
    if !f.traits().integrable {
        return aborted(&property, f, tolerance, "not-integrable");
    }
    let points = match points_for(&property, f, grid, tolerance) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    let limit = match parity {
        Parity::Even => limit_scaled(f, 0.0, limit_tol(tol)).ok().filter(|l| l.converged).map(|l| l.value),
        Parity::Odd => Some(0.0),
    };
    let rule = f.integrand_rule();
    let mut t = run(&points, |x, y| {
        let mut o = SampleOutcome::default();
        match (f.eval(y - x, y), f.eval(x, y)) {
            (Ok(a), Ok(b)) => o.witnesses.push(Witness::new(x, y, 1, a, sign * b)),
            _ => return SampleOutcome::failed(x, y, 1),
        }
        let Some(lim) = limit else {
            o.flag("limit-skipped");
            return o;
        };
        let (hi, rhs) = match parity {
            Parity::Even => (0.5 * y, 0.5 * lim),
            Parity::Odd => (y, 0.0),
        };
        let cuts = f.singular_points(y, 0.0, hi);
        match quad(&|t| rule(t, y), 0.0, hi, inner_tol(tol), &cuts, &mut o) {
            Ok(v) => o.witnesses.push(Witness::new(x, y, 2, v, rhs)),
            Err(_) => return SampleOutcome::failed(x, y, 2),
        }
        o
    });
    function_flags(&mut t, f);
    t.finish(&property, f.label(), f.params().clone(), tolerance)
}

fn period_integral(f: &InvariantFunction, y: f64, tol: f64, o: &mut SampleOutcome) -> Result<f64> {
    let rule = f.integrand_rule();
    quad(&|t| rule(t, y), 0.0, y, tol, &f.singular_points(y, 0.0, y), o)
}

fn pair_label(g: &InvariantFunction, h: &InvariantFunction) -> String {
    format!("{}*{}", g.label(), h.label())
}

fn pair_params(g: &InvariantFunction, h: &InvariantFunction) -> Params {
    let mut p = Params::new();
    for (k, v) in g.params() {
        p.insert(format!("g.{k}"), *v);
    }
    for (k, v) in h.params() {
        p.insert(format!("h.{k}"), *v);
    }
    p
}

/// `∫_0^y (g∗h)(x, y) dx = ∫_0^y g · ∫_0^y h` for each `y` in `y_list`.
pub fn check_product_integral(g: &InvariantFunction, h: &InvariantFunction, y_list: &[f64], tol: f64) -> VerificationReport {
    let property = "product-integral";
    let label = pair_label(g, h);
    let conv = match convolve(g, h, inner_tol(tol) * 1e-1) {
        Ok(c) => c,
        Err(_) => {
            let mut t = Tally::default();
            t.push(Witness::new(f64::NAN, f64::NAN, 0, f64::NAN, f64::NAN));
            t.flag("precondition");
            return t.finish(property, label, pair_params(g, h), tol);
        }
    };
    let tolerance = tol + series_slack(&conv, 1);
    let points: Vec<(f64, f64)> = y_list.iter().map(|&y| (0.0, y)).collect();
    let mut t = run(&points, |_, y| {
        if !(y > 0.0) {
            return SampleOutcome::failed(0.0, y, 0);
        }
        let mut o = SampleOutcome::default();
        let itol = inner_tol(tol);
        let sides = (|| -> Result<(f64, f64)> {
            let lhs = period_integral(&conv, y, itol, &mut o)?;
            let rhs = period_integral(g, y, itol, &mut o)? * period_integral(h, y, itol, &mut o)?;
            Ok((lhs, rhs))
        })();
        match sides {
            Ok((lhs, rhs)) => {
                o.witnesses.push(Witness::new(0.0, y, 0, lhs, rhs));
                o
            }
            Err(_) => SampleOutcome::failed(0.0, y, 0),
        }
    });
    t.flag("nested-quadrature");
    t.finish(property, label, pair_params(g, h), tolerance)
}

/// `f(x, y) = reference(x, y)` over the grid, under a caller-chosen property id.
pub fn check_pointwise(
    property: &str,
    f: &InvariantFunction,
    reference: &InvariantFunction,
    grid: &GridSpec,
    tol: f64,
) -> VerificationReport {
    let tolerance = tol + series_slack(f, 1) + series_slack(reference, 1);
    let points = match points_for(property, f, grid, tolerance) {
        Ok(p) => p,
        Err(r) => return r,
    };
    let mut t = run(&points, |x, y| match (f.eval(x, y), reference.eval(x, y)) {
        (Ok(a), Ok(b)) => SampleOutcome {
            witnesses: vec![Witness::new(x, y, 0, a, b)],
            ..SampleOutcome::default()
        },
        _ => SampleOutcome::failed(x, y, 0),
    });
    function_flags(&mut t, f);
    t.finish(property, format!("{} vs {}", f.label(), reference.label()), f.params().clone(), tolerance)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Compares `conv` with `target` at `x = u·y`; returns the tally, the
/// composed tolerance and whether both sides could be built.
fn kernel_product(
    conv: Result<InvariantFunction>,
    target: Result<InvariantFunction>,
    y_list: &[f64],
    xs: &[f64],
    tol: f64,
) -> (Tally, f64, bool) {
    let (conv, target) = match (conv, target) {
        (Ok(c), Ok(t)) => (c, t),
        _ => {
            let mut t = Tally::default();
            t.push(Witness::new(f64::NAN, f64::NAN, 0, f64::NAN, f64::NAN));
            t.flag("precondition");
            return (t, tol, false);
        }
    };
    let tolerance = tol + series_slack(&conv, 1) + series_slack(&target, 1);
    let points: Vec<(f64, f64)> = y_list.iter().flat_map(|&y| xs.iter().map(move |&u| (u * y, y))).collect();
    let t = run(&points, |x, y| match (conv.eval(x, y), target.eval(x, y)) {
        (Ok(a), Ok(b)) => SampleOutcome {
            witnesses: vec![Witness::new(x, y, 1, a, b)],
            ..SampleOutcome::default()
        },
        _ => SampleOutcome::failed(x, y, 1),
    });
    (t, tolerance, true)
}

/// Part 1: `K_m ∗ K_n = K_{m+n}` with `K_m = −y^{m−1}B_m(x/y)/m!`, at
/// `x = u·y` for `u` in `x_samples` and `y` in `y_list`. Part 2 (witness
/// `n = 2`): at `y = 1`,
/// `B_{m+n}(x) = −C(m+n, m)·(∫_0^1 B_m(x−t)B_n(t)dt + m∫_x^1 (x−t)^{m−1}B_n(t)dt)`.
pub fn check_bernoulli_convolution(m: usize, n: usize, y_list: &[f64], x_samples: &[f64], tol: f64) -> VerificationReport {
    let property = format!("bernoulli-convolution(m={m},n={n})");
    let label = format!("K{m}*K{n}");
    let mut params = Params::new();
    params.insert("m".into(), m as f64);
    params.insert("n".into(), n as f64);
    let ctol = inner_tol(tol) * 1e-1;
    let conv = bernoulli_kernel(m).and_then(|a| bernoulli_kernel(n).and_then(|b| convolve(&a, &b, ctol)));
    let (mut t, tolerance, built) = kernel_product(conv, bernoulli_kernel(m + n), y_list, x_samples, tol);
    if built {
        let itol = inner_tol(tol);
        let outcomes: Vec<SampleOutcome> = x_samples
            .par_iter()
            .map(|&x| {
                let mut o = SampleOutcome::default();
                let bm = |t: f64| bernoulli_poly(m, t);
                let bn = |t: f64| bernoulli_poly(n, t);
                let first = quad(&|t| Ok(bm(x - t)? * bn(t)?), 0.0, 1.0, itol, &[x], &mut o);
                let second = quad(
                    &|t| Ok((x - t).powi(m as i32 - 1) * bn(t)?),
                    x,
                    1.0,
                    itol,
                    &[],
                    &mut o,
                );
                match (first, second, bernoulli_poly(m + n, x)) {
                    (Ok(a), Ok(b), Ok(target)) => {
                        let lhs = -binomial(m + n, m) * (a + m as f64 * b);
                        o.witnesses.push(Witness::new(x, 1.0, 2, lhs, target));
                        o
                    }
                    _ => SampleOutcome::failed(x, 1.0, 2),
                }
            })
            .collect();
        for o in outcomes {
            t.absorb(o);
        }
    }
    t.finish(&property, label, params, tolerance)
}

/// `F_α ∗ F_β = F_{α+β}` with `F_α = y^{α−1}ζ(1−α, x/y)/Γ(α)`, at `x = u·y`
/// for `u` in `x_samples`. Always flagged `conjecture`.
pub fn check_zeta_convolution(alpha: f64, beta: f64, y: f64, x_samples: &[f64], tol: f64) -> VerificationReport {
    let property = "zeta-convolution";
    let label = format!("F{alpha}*F{beta}");
    let mut params = Params::new();
    params.insert("alpha".into(), alpha);
    params.insert("beta".into(), beta);
    let ctol = inner_tol(tol) * 1e-1;
    let conv = zeta_kernel(alpha).and_then(|a| zeta_kernel(beta).and_then(|b| convolve(&a, &b, ctol)));
    let (mut t, tolerance, _) = kernel_product(conv, zeta_kernel(alpha + beta), &[y], x_samples, tol);
    t.flag("conjecture");
    t.finish(property, label, params, tolerance)
}

/// `ζ(1−m, x) = −B_m(x)/m` through the Fourier form of the Hurwitz zeta
/// function, for `m ≥ 2`. Witness `n` is `m`.
pub fn check_zeta_bernoulli_bridge(ms: &[usize], x_samples: &[f64], tol: f64) -> VerificationReport {
    let property = "zeta-bernoulli-bridge";
    let points: Vec<(f64, f64)> = ms.iter().flat_map(|&m| x_samples.iter().map(move |&x| (x, m as f64))).collect();
    let t = run(&points, |x, mf| {
        let m = mf as usize;
        let lhs = if m >= 2 { hurwitz_zeta_fourier(1.0 - mf, x) } else { Err(Error::invalid("m < 2")) };
        match (lhs, bernoulli_poly(m, x)) {
            (Ok(a), Ok(b)) => SampleOutcome {
                witnesses: vec![Witness::new(x, 1.0, m as u64, a, -b / mf)],
                ..SampleOutcome::default()
            },
            _ => SampleOutcome::failed(x, 1.0, m as u64),
        }
    });
    t.finish(property, "hurwitz_zeta_fourier vs -B_m/m".into(), Params::new(), tol)
}

/// Classical log-integrals with closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum KnownIntegral {
    /// `∫_0^{π/2} ln sin t dt = −(π/2) ln 2`.
    Euler,
    /// `∫_0^π ln(1 − 2r cos t + r²) dt = 2π ln max(r, 1)`.
    Poisson { r: f64 },
    /// `∫_a^{a+1} ln Γ(t) dt = a(ln a − 1) + ln √(2π)`.
    Raabe { a: f64 },
}

/// Computed and expected value of a [`KnownIntegral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnownIntegralValue {
    pub value: f64,
    pub expected: f64,
    pub error: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

impl KnownIntegral {
    /// From a CLI-style name and parameter map (`r` for poisson, `a` for raabe).
    pub fn from_name(name: &str, params: &Params) -> Result<Self> {
        let take = |key: &str| -> Result<f64> {
            if let Some(bad) = params.keys().find(|k| k.as_str() != key) {
                return Err(Error::invalid(format!("{name}: unknown parameter '{bad}'")));
            }
            params.get(key).copied().ok_or_else(|| Error::invalid(format!("{name}: missing parameter '{key}'")))
        };
        let k = match name.to_ascii_lowercase().as_str() {
            "euler" => {
                if let Some(bad) = params.keys().next() {
                    return Err(Error::invalid(format!("euler: unknown parameter '{bad}'")));
                }
                KnownIntegral::Euler
            }
            "poisson" => KnownIntegral::Poisson { r: take("r")? },
            "raabe" => KnownIntegral::Raabe { a: take("a")? },
            _ => return Err(Error::invalid(format!("unknown integral '{name}' (euler, poisson, raabe)"))),
        };
        k.validate()?;
        Ok(k)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            KnownIntegral::Euler => Ok(()),
            KnownIntegral::Poisson { r } if r > 0.0 && r.is_finite() => Ok(()),
            KnownIntegral::Poisson { r } => Err(Error::invalid(format!("poisson: r must be positive, got {r}"))),
            KnownIntegral::Raabe { a } if a >= 0.0 && a.is_finite() => Ok(()),
            KnownIntegral::Raabe { a } => Err(Error::invalid(format!("raabe: a must be non-negative, got {a}"))),
        }
    }

    pub fn expected(&self) -> f64 {
        match *self {
            KnownIntegral::Euler => -FRAC_PI_2 * LN_2,
            KnownIntegral::Poisson { r } => TAU * r.max(1.0).ln(),
            KnownIntegral::Raabe { a } => {
                let head = if a == 0.0 { 0.0 } else { a * (a.ln() - 1.0) };
                head + 0.5 * TAU.ln()
            }
        }
    }

    fn label(&self) -> String {
        match *self {
            KnownIntegral::Euler => "euler".into(),
            KnownIntegral::Poisson { r } => format!("poisson(r={r})"),
            KnownIntegral::Raabe { a } => format!("raabe(a={a})"),
        }
    }

    /// Evaluates the integral by adaptive quadrature at tolerance `tol`.
    pub fn compute(&self, tol: f64) -> Result<KnownIntegralValue> {
        self.validate()?;
        let r = match *self {
            KnownIntegral::Euler => try_integrate(|t| Ok(sin_pi(t / PI).ln()), 0.0, FRAC_PI_2, tol, &[])?,
            KnownIntegral::Poisson { r } => {
                let c = (1.0 - r) * (1.0 - r);
                try_integrate(
                    |t| {
                        let s = (0.5 * t).sin();
                        Ok((c + 4.0 * r * s * s).ln())
                    },
                    0.0,
                    PI,
                    tol,
                    &[],
                )?
            }
            KnownIntegral::Raabe { a } => {
                let cuts: Vec<f64> = (1..=(a + 1.0).floor() as usize).map(|k| k as f64).filter(|&k| k > a && k < a + 1.0).collect();
                try_integrate(log_gamma_abs, a, a + 1.0, tol, &cuts)?
            }
        };
        let expected = self.expected();
        Ok(KnownIntegralValue {
            value: r.value,
            expected,
            error: (r.value - expected).abs(),
            error_estimate: r.error_estimate,
            converged: r.converged,
        })
    }
}

/// Euler's integral, Poisson's integral at `r ∈ {2, 1/2}` and Raabe's
/// integral at `a ∈ {1, 2, 1/2}`. Witness `x` is the parameter, `n` the case index.
pub fn check_known_integrals(tol: f64) -> VerificationReport {
    let cases = [
        KnownIntegral::Euler,
        KnownIntegral::Poisson { r: 2.0 },
        KnownIntegral::Poisson { r: 0.5 },
        KnownIntegral::Raabe { a: 1.0 },
        KnownIntegral::Raabe { a: 2.0 },
        KnownIntegral::Raabe { a: 0.5 },
    ];
    let qtol = inner_tol(tol).max(1e-11);
    let outcomes: Vec<SampleOutcome> = cases
        .par_iter()
        .enumerate()
        .map(|(i, k)| {
            let x = match *k {
                KnownIntegral::Euler => 0.0,
                KnownIntegral::Poisson { r } => r,
                KnownIntegral::Raabe { a } => a,
            };
            match k.compute(qtol) {
                Ok(v) => {
                    let mut o = SampleOutcome {
                        witnesses: vec![Witness::new(x, 1.0, i as u64, v.value, v.expected)],
                        ..SampleOutcome::default()
                    };
                    if !v.converged {
                        o.flag("quadrature-unconverged");
                    }
                    o
                }
                Err(_) => SampleOutcome::failed(x, 1.0, i as u64),
            }
        })
        .collect();
    let mut t = Tally::default();
    for o in outcomes {
        t.absorb(o);
    }
    let names: Vec<String> = cases.iter().map(KnownIntegral::label).collect();
    t.finish("known-integrals", names.join(","), Params::new(), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make, CatalogId};

    fn entry(id: CatalogId, kv: &[(&str, f64)]) -> InvariantFunction {
        let p: Params = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        make(id, &p).unwrap()
    }

    fn small() -> GridSpec {
        GridSpec::default().with_samples(12).with_n_max(5)
    }

    #[test]
    fn hermite_single_probe() {
        let f = entry(CatalogId::E3a, &[]);
        let g = GridSpec::default().with_points(vec![(1.0, 0.7)]).with_n_max(3);
        let r = check_invariance(&f, &g, 1e-12);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.samples, 1);
        assert_eq!(r.max_abs_error, 0.0);
    }

    #[test]
    fn constant_entry_is_exact() {
        let r = check_invariance(&entry(CatalogId::E1, &[]), &GridSpec::default(), 1e-15);
        assert!(r.pass && r.max_abs_error <= 1e-15, "{r:?}");
    }

    #[test]
    fn broken_identity_fails() {
        let f = InvariantFunction::new("square", |x, y| Ok(x * x / y));
        let r = check_invariance(&f, &small(), 1e-8);
        assert!(!r.pass);
        assert!(r.worst_witness.n > 1);
    }

    #[test]
    fn exchange_examples() {
        let f = entry(CatalogId::E3a, &[]);
        let g = GridSpec::default().with_points(vec![(0.4, 0.5)]);
        let r = check_exchange(&f, 2, 3, &g, 1e-12);
        assert!(r.pass);
        assert_eq!((r.worst_witness.lhs, r.worst_witness.rhs), (1.0, 1.0));
        let r = check_exchange(&entry(CatalogId::E5, &[("a", 2.0)]), 2, 3, &small(), 1e-9);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn integral_limit_examples() {
        let f = entry(CatalogId::E3a, &[]);
        let g = GridSpec::default().with_points(vec![(0.7, 1.0)]);
        let r = check_integral_limit(&f, &g, 1e-6);
        assert!(r.pass, "{r:?}");
        assert!((r.worst_witness.lhs - 0.7).abs() < 1e-9);
        let f = entry(CatalogId::E2, &[("m", 2.0)]);
        let g = GridSpec::default().with_points(vec![(0.5, 1.0)]);
        let r = check_integral_limit(&f, &g, 1e-6);
        assert!(r.pass && (r.worst_witness.rhs - 0.25).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn step_limit_floor() {
        let f = entry(CatalogId::E3a, &[]);
        let g = GridSpec::default().with_points(vec![(0.3, 1.0)]);
        let r = check_step_limit(&f, &g, 1e-8);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.worst_witness.lhs, 1.0);
    }

    #[test]
    fn y_derivative_examples() {
        let f = entry(CatalogId::E2, &[("m", 2.0)]);
        let g = GridSpec::default().with_points(vec![(1.0, 2.0)]);
        let r = check_y_derivative_identities(&f, &g, 1e-9);
        assert!(r.pass, "{r:?}");
        assert!(!r.has_flag("fd-fallback"));
        let fd = InvariantFunction::new("E1-fd", |_, y| Ok(1.0 / y));
        let r = check_y_derivative_identities(&fd, &small(), 1e-6);
        assert!(r.pass && r.has_flag("fd-fallback") && r.tolerance >= 1e-4, "{r:?}");
    }

    #[test]
    fn parity_examples() {
        let r = check_parity(&entry(CatalogId::E9, &[("r", 0.5)]), Parity::Even, &small(), 1e-8);
        assert!(r.pass, "{r:?}");
        let r = check_parity(&entry(CatalogId::E2, &[("m", 1.0)]), Parity::Odd, &small(), 1e-8);
        assert!(r.pass, "{r:?}");
        let r = check_parity(&entry(CatalogId::E2, &[("m", 1.0)]), Parity::Even, &small(), 1e-8);
        assert!(!r.pass);
    }

    #[test]
    fn product_integral_pair() {
        let g = entry(CatalogId::E5, &[("a", 2.0)]);
        let h = entry(CatalogId::E1, &[]);
        let r = check_product_integral(&g, &h, &[1.0], 1e-7);
        assert!(r.pass, "{r:?}");
        assert!((r.worst_witness.rhs - 1.0 / LN_2).abs() < 1e-9);
    }

    #[test]
    fn bernoulli_pair() {
        let xs: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let r = check_bernoulli_convolution(1, 2, &[1.0, 0.7], &xs, 1e-8);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.samples, 33);
    }

    #[test]
    fn bridge_and_integrals() {
        let xs: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        assert!(check_zeta_bernoulli_bridge(&[2, 4], &xs, 1e-6).pass);
        let r = check_known_integrals(1e-8);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.samples, 6);
    }

    #[test]
    fn known_integral_names() {
        let mut p = Params::new();
        p.insert("a".into(), 1.0);
        let v = KnownIntegral::from_name("raabe", &p).unwrap().compute(1e-11).unwrap();
        assert!((v.value - (-0.0810615)).abs() < 1e-7);
        assert!(KnownIntegral::from_name("poisson", &p).is_err());
        assert!(KnownIntegral::from_name("gauss", &Params::new()).is_err());
    }
}
