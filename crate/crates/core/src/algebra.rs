//! Convolution product, antiderivative and geometric convolution.
//!
//! All three are evaluated literally with oriented adaptive quadrature, for
//! every real `x`. Panels are split at the operands' singular points mapped
//! through the integration variable.

use std::sync::Arc;

use crate::catalog::{make, CatalogId};
use crate::combinators::linear_combination;
use crate::error::{Error, Result};
use crate::function::{InvariantFunction, LatticeKind, Params, Traits};
use crate::quadrature::integrate_strict;
use crate::special::gamma;

fn require_integrable(f: &InvariantFunction, op: &str) -> Result<()> {
    if !f.traits().integrable {
        return Err(Error::invalid(format!(
            "{op}: operand {} is not integrable over a period",
            f.label()
        )));
    }
    Ok(())
}

/// Singular points of `t ↦ f(c + σt, y)` inside `(lo, hi)`.
fn mapped_singularities(f: &InvariantFunction, y: f64, c: f64, sigma: f64, lo: f64, hi: f64) -> Vec<f64> {
    // c + σt ranges over the image of (lo, hi)
    let (p, q) = if sigma > 0.0 { (c + lo, c + hi) } else { (c - hi, c - lo) };
    f.singular_points(y, p, q).into_iter().map(|s| (s - c) * sigma).collect()
}

fn merged(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    a.extend(b);
    a.sort_by(f64::total_cmp);
    a.dedup();
    a
}

fn combined_traits(g: &InvariantFunction, h: &InvariantFunction) -> Traits {
    let (a, b) = (g.traits(), h.traits());
    Traits {
        smooth_scaled_limit: a.smooth_scaled_limit && b.smooth_scaled_limit,
        integrable: true,
        series_defined: true,
        finite_difference: a.finite_difference || b.finite_difference,
    }
}

fn branch_lattices(fs: &[&InvariantFunction]) -> Vec<crate::function::Lattice> {
    let mut out = Vec::new();
    for f in fs {
        for l in f.lattices() {
            let l = crate::function::Lattice { kind: LatticeKind::Branch, ..*l };
            if !out.contains(&l) {
                out.push(l);
            }
        }
    }
    out
}

/// `g∗h(x,y) = ∫_0^x g(t,y)h(x−t,y)dt + ∫_x^y g(t,y)h(x+y−t,y)dt`.
pub fn convolve(g: &InvariantFunction, h: &InvariantFunction, tol: f64) -> Result<InvariantFunction> {
    require_integrable(g, "convolve")?;
    require_integrable(h, "convolve")?;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("convolve: tolerance must be positive, got {tol}")));
    }
    let (gg, hh) = (g.clone(), h.clone());
    let part_tol = 0.5 * tol;
    let value = move |x: f64, y: f64| -> Result<f64> {
        let gv = Arc::clone(gg.integrand_rule());
        let hv = Arc::clone(hh.integrand_rule());
        let (lo1, hi1) = (x.min(0.0), x.max(0.0));
        let cuts1 = merged(
            gg.singular_points(y, lo1, hi1),
            mapped_singularities(&hh, y, x, -1.0, lo1, hi1),
        );
        let first = integrate_strict(|t| Ok(gv(t, y)? * hv(x - t, y)?), 0.0, x, part_tol, &cuts1)?;

        let (lo2, hi2) = (x.min(y), x.max(y));
        let cuts2 = merged(
            gg.singular_points(y, lo2, hi2),
            mapped_singularities(&hh, y, x + y, -1.0, lo2, hi2),
        );
        let second = integrate_strict(|t| Ok(gv(t, y)? * hv(x + y - t, y)?), x, y, part_tol, &cuts2)?;
        Ok(first + second)
    };
    Ok(InvariantFunction::new(format!("conv[{},{}]", g.label(), h.label()), value)
        .with_lattices(branch_lattices(&[g, h]))
        .with_series_tolerance(tol + g.series_tolerance() + h.series_tolerance())
        .with_traits(combined_traits(g, h)))
}

/// `F(x,y) = ∫_y^x f(t,y)dt + (1/y)∫_0^y t·f(t,y)dt`, with `∂F/∂x = f`.
pub fn antiderivative(f: &InvariantFunction, tol: f64) -> Result<InvariantFunction> {
    require_integrable(f, "antiderivative")?;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("antiderivative: tolerance must be positive, got {tol}")));
    }
    let ff = f.clone();
    let part_tol = 0.5 * tol;
    let value = move |x: f64, y: f64| -> Result<f64> {
        let v = Arc::clone(ff.integrand_rule());
        let cuts = ff.singular_points(y, x.min(y), x.max(y));
        let span = integrate_strict(|t| v(t, y), y, x, part_tol, &cuts)?;
        let cuts = ff.singular_points(y, 0.0, y);
        let moment = integrate_strict(|t| Ok(t * v(t, y)?), 0.0, y, part_tol * y, &cuts)?;
        Ok(span + moment / y)
    };
    let dx = Arc::clone(f.value_rule());
    Ok(InvariantFunction::new(format!("antider[{}]", f.label()), value)
        .with_dx(move |x, y| dx(x, y))
        .with_lattices(branch_lattices(&[f]))
        .with_series_tolerance(tol + f.series_tolerance())
        .with_traits(Traits {
            series_defined: true,
            ..f.traits()
        }))
}

/// `f(x,y) = a^x/(a^y−1)·∫_0^y a^{−t}g(t,y)dt + a^x·∫_x^y a^{−t}g(t,y)dt`,
/// the convolution of `a^x/(a^y−1)` with `g`.
pub fn geometric_convolve(g: &InvariantFunction, a: f64, tol: f64) -> Result<InvariantFunction> {
    if !(a > 0.0) || a == 1.0 || !a.is_finite() {
        return Err(Error::invalid(format!(
            "geometric_convolve: a must be positive and different from 1, got {a}"
        )));
    }
    require_integrable(g, "geometric_convolve")?;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("geometric_convolve: tolerance must be positive, got {tol}")));
    }
    let gg = g.clone();
    let l = a.ln();
    let part_tol = 0.5 * tol;
    let value = move |x: f64, y: f64| -> Result<f64> {
        let gv = Arc::clone(gg.integrand_rule());
        let w = |t: f64| Ok((-t * l).exp() * gv(t, y)?);
        let full = integrate_strict(w, 0.0, y, part_tol, &gg.singular_points(y, 0.0, y))?;
        let tail = integrate_strict(w, x, y, part_tol, &gg.singular_points(y, x.min(y), x.max(y)))?;
        let ax = (x * l).exp();
        Ok(ax / (y * l).exp_m1() * full + ax * tail)
    };
    let mut params = Params::new();
    params.insert("a".into(), a);
    Ok(InvariantFunction::new(format!("geoconv[{}]", g.label()), value)
        .with_params(params)
        .with_lattices(branch_lattices(&[g]))
        .with_series_tolerance(tol + g.series_tolerance())
        .with_traits(Traits {
            series_defined: true,
            ..g.traits()
        }))
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// `−y^{m−1}B_m(x/y)/m!`, the kernel family closed under convolution.
pub fn bernoulli_kernel(m: usize) -> Result<InvariantFunction> {
    let mut p = Params::new();
    p.insert("m".into(), m as f64);
    let e2 = make(CatalogId::E2, &p)?;
    linear_combination(&[(-1.0 / factorial(m), e2)])
}

/// `F_α = y^{α−1}ζ(1−α, x/y)/Γ(α)` for `α > 1`.
pub fn zeta_kernel(alpha: f64) -> Result<InvariantFunction> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("zeta_kernel: alpha must exceed 1, got {alpha}")));
    }
    let mut p = Params::new();
    p.insert("s".into(), 1.0 - alpha);
    let e13 = make(CatalogId::E13, &p)?;
    linear_combination(&[(1.0 / gamma(alpha)?, e13)])
}
