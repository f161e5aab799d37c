//! Constructions that map invariant functions to invariant functions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{InvariantFunction, Lattice, LatticeKind, LatticeSide, Params, Rule, Traits};

/// Step used by the central-difference fallbacks, before scaling.
pub fn fd_step(at: f64) -> f64 {
    f64::EPSILON.cbrt() * at.abs().max(1.0)
}

/// `F(x, y) = a·f(b + c·x, c·y)` with `c > 0`.
pub fn affine_transform(f: &InvariantFunction, a: f64, b: f64, c: f64) -> Result<InvariantFunction> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid(format!("affine_transform: c must be positive, got {c}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("affine_transform: non-finite coefficient"));
    }
    let v = Arc::clone(f.value_rule());
    let dx = f.dx_rule().cloned().map(|d| -> Rule {
        Arc::new(move |x, y| Ok(a * c * d(b + c * x, c * y)?))
    });
    let dy = f.dy_rule().cloned().map(|d| -> Rule {
        Arc::new(move |x, y| Ok(a * c * d(b + c * x, c * y)?))
    });
    let generic = f.generic_rule().cloned().map(|g| -> Rule {
        Arc::new(move |x, y| Ok(a * g(b + c * x, c * y)?))
    });
    let lattices = f.lattices().iter().map(|l| l.affine(b, c)).collect();
    let mut params = Params::new();
    params.insert("a".into(), a);
    params.insert("b".into(), b);
    params.insert("c".into(), c);
    Ok(InvariantFunction::new(format!("affine[{}]", f.label()), move |x, y| {
        Ok(a * v(b + c * x, c * y)?)
    })
    .with_params(params)
    .with_generic_rule(generic)
    .with_dx_rule(dx)
    .with_dy_rule(dy)
    .with_lattices(lattices)
    .with_series_tolerance(a.abs() * f.series_tolerance())
    .with_traits(f.traits()))
}

/// `∂f/∂x`, analytic when `f` carries a rule; central differences otherwise
/// (recorded in [`Traits::finite_difference`]).
pub fn x_derivative(f: &InvariantFunction) -> InvariantFunction {
    let name = format!("d/dx[{}]", f.label());
    let mut traits = f.traits();
    let rule: Rule = match f.dx_rule() {
        Some(d) => Arc::clone(d),
        None => {
            traits.finite_difference = true;
            let v = Arc::clone(f.value_rule());
            Arc::new(move |x, y| {
                let h = fd_step(x);
                Ok((v(x + h, y)? - v(x - h, y)?) / (2.0 * h))
            })
        }
    };
    InvariantFunction::from_rule(name, rule)
        .with_lattices(f.lattices().to_vec())
        .with_series_tolerance(f.series_tolerance())
        .with_traits(traits)
}

/// `F(x, y) = f(y - x, y)`.
pub fn reflect(f: &InvariantFunction) -> InvariantFunction {
    let v = Arc::clone(f.value_rule());
    let dx = f.dx_rule().cloned().map(|d| -> Rule { Arc::new(move |x, y| Ok(-d(y - x, y)?)) });
    let dy = match (f.dx_rule().cloned(), f.dy_rule().cloned()) {
        (Some(dx), Some(dy)) => Some(Arc::new(move |x: f64, y: f64| Ok(dx(y - x, y)? + dy(y - x, y)?)) as Rule),
        _ => None,
    };
    let generic = f.generic_rule().cloned().map(|g| -> Rule { Arc::new(move |x, y| g(y - x, y)) });
    InvariantFunction::new(format!("reflect[{}]", f.label()), move |x, y| v(y - x, y))
        .with_generic_rule(generic)
        .with_dx_rule(dx)
        .with_dy_rule(dy)
        .with_lattices(f.lattices().iter().map(Lattice::reflected).collect())
        .with_series_tolerance(f.series_tolerance())
        .with_traits(f.traits())
}

/// Sign choice for [`frac_compose`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracSign {
    Plus,
    Minus,
}

fn frac(v: f64) -> f64 {
    v - v.floor()
}

/// `f₁(x,y) = f(y·{(t+x)/y}, y)` for [`FracSign::Plus`], `f₂(x,y) = f(y·{(t-x)/y}, y)`
/// for [`FracSign::Minus`].
pub fn frac_compose(f: &InvariantFunction, t: f64, sign: FracSign) -> InvariantFunction {
    let s = match sign {
        FracSign::Plus => 1.0,
        FracSign::Minus => -1.0,
    };
    let v = Arc::clone(f.value_rule());
    let arg = move |x: f64, y: f64| y * frac((t + s * x) / y);
    let dx = f.dx_rule().cloned().map(|d| -> Rule {
        Arc::new(move |x, y| Ok(s * d(arg(x, y), y)?))
    });
    let dy = match (f.dx_rule().cloned(), f.dy_rule().cloned()) {
        (Some(dx), Some(dy)) => Some(Arc::new(move |x: f64, y: f64| {
            let w = (t + s * x) / y;
            let a = arg(x, y);
            Ok(-w.floor() * dx(a, y)? + dy(a, y)?)
        }) as Rule),
        _ => None,
    };

    // jumps where (t ± x)/y crosses an integer, plus the image of f's own set
    let mut lattices = vec![Lattice::integers(LatticeKind::Branch).with_offset(-s * t)];
    for l in f.lattices() {
        lattices.push(Lattice {
            offset: s * (l.offset - t),
            phase: s * l.phase,
            kind: l.kind,
            side: LatticeSide::All,
        });
    }
    let generic = f.generic_rule().cloned().map(|g| -> Rule { Arc::new(move |x, y| g(arg(x, y), y)) });
    let tag = match sign {
        FracSign::Plus => "+",
        FracSign::Minus => "-",
    };
    let mut params = Params::new();
    params.insert("t".into(), t);
    InvariantFunction::new(format!("frac{tag}[{}]", f.label()), move |x, y| v(arg(x, y), y))
        .with_params(params)
        .with_generic_rule(generic)
        .with_dx_rule(dx)
        .with_dy_rule(dy)
        .with_lattices(lattices)
        .with_series_tolerance(f.series_tolerance())
        .with_traits(f.traits())
        .rough()
}

/// Pointwise `Σ cᵢ·fᵢ`.
pub fn linear_combination(terms: &[(f64, InvariantFunction)]) -> Result<InvariantFunction> {
    if terms.is_empty() {
        return Err(Error::invalid("linear_combination: empty term list"));
    }
    let label = terms
        .iter()
        .map(|(c, f)| format!("{c}*{}", f.label()))
        .collect::<Vec<_>>()
        .join(" + ");
    let rules: Vec<(f64, Rule)> = terms.iter().map(|(c, f)| (*c, Arc::clone(f.value_rule()))).collect();
    let collect_partials = |pick: fn(&InvariantFunction) -> Option<&Rule>| -> Option<Rule> {
        let parts: Option<Vec<(f64, Rule)>> = terms
            .iter()
            .map(|(c, f)| pick(f).map(|d| (*c, Arc::clone(d))))
            .collect();
        parts.map(|p| -> Rule {
            Arc::new(move |x, y| p.iter().try_fold(0.0, |acc, (c, d)| Ok(acc + c * d(x, y)?)))
        })
    };
    let generic = if terms.iter().any(|(_, f)| f.generic_rule().is_some()) {
        let parts: Vec<(f64, Rule)> = terms.iter().map(|(c, f)| (*c, Arc::clone(f.integrand_rule()))).collect();
        Some(Arc::new(move |x: f64, y: f64| parts.iter().try_fold(0.0, |acc, (c, g)| Ok(acc + c * g(x, y)?))) as Rule)
    } else {
        None
    };
    let dx = collect_partials(InvariantFunction::dx_rule);
    let dy = collect_partials(InvariantFunction::dy_rule);

    let mut lattices: Vec<Lattice> = Vec::new();
    for (_, f) in terms {
        for l in f.lattices() {
            if !lattices.contains(l) {
                lattices.push(*l);
            }
        }
    }
    let traits = terms.iter().fold(Traits::default(), |acc, (_, f)| {
        let t = f.traits();
        Traits {
            smooth_scaled_limit: acc.smooth_scaled_limit && t.smooth_scaled_limit,
            integrable: acc.integrable && t.integrable,
            series_defined: acc.series_defined || t.series_defined,
            finite_difference: acc.finite_difference || t.finite_difference,
        }
    });
    let series_tol = terms.iter().map(|(c, f)| c.abs() * f.series_tolerance()).sum();

    Ok(InvariantFunction::new(label, move |x, y| {
        rules.iter().try_fold(0.0, |acc, (c, r)| Ok(acc + c * r(x, y)?))
    })
    .with_generic_rule(generic)
    .with_dx_rule(dx)
    .with_dy_rule(dy)
    .with_lattices(lattices)
    .with_series_tolerance(series_tol)
    .with_traits(traits))
}

/// `Δf(x, y) = f(x + y, y) - f(x, y)`.
pub fn step_difference(f: &InvariantFunction) -> Rule {
    let v = Arc::clone(f.value_rule());
    Arc::new(move |x, y| Ok(v(x + y, y)? - v(x, y)?))
}
