//! The concrete invariant-function families.
//!
//! Entry names and parameter keys double as the command-line vocabulary:
//! `E5` with `a=2`, `E13` with `s=2`, `E6c` with `r=3,theta=0`.

use std::f64::consts::{E, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{snap_to_integer, InvariantFunction, Lattice, LatticeKind, LatticeSide, Params, Traits};
use crate::special::{bernoulli_poly, cos_pi, hurwitz_zeta, log_gamma_abs, sin_pi, BERNOULLI_CAPACITY};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CatalogId {
    E1,
    E2,
    E3a,
    E3b,
    E4,
    E5,
    E6c,
    E6s,
    E7,
    E8,
    E9,
    E10,
    E11,
    E12,
    E13,
    E14,
}

impl CatalogId {
    pub const ALL: [CatalogId; 16] = [
        CatalogId::E1,
        CatalogId::E2,
        CatalogId::E3a,
        CatalogId::E3b,
        CatalogId::E4,
        CatalogId::E5,
        CatalogId::E6c,
        CatalogId::E6s,
        CatalogId::E7,
        CatalogId::E8,
        CatalogId::E9,
        CatalogId::E10,
        CatalogId::E11,
        CatalogId::E12,
        CatalogId::E13,
        CatalogId::E14,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogId::E1 => "E1",
            CatalogId::E2 => "E2",
            CatalogId::E3a => "E3a",
            CatalogId::E3b => "E3b",
            CatalogId::E4 => "E4",
            CatalogId::E5 => "E5",
            CatalogId::E6c => "E6c",
            CatalogId::E6s => "E6s",
            CatalogId::E7 => "E7",
            CatalogId::E8 => "E8",
            CatalogId::E9 => "E9",
            CatalogId::E10 => "E10",
            CatalogId::E11 => "E11",
            CatalogId::E12 => "E12",
            CatalogId::E13 => "E13",
            CatalogId::E14 => "E14",
        }
    }

    /// Required and optional parameter keys, with the default for optional ones.
    pub fn parameters(self) -> &'static [(&'static str, Option<f64>)] {
        match self {
            CatalogId::E2 => &[("m", None)],
            CatalogId::E4 | CatalogId::E5 => &[("a", None)],
            CatalogId::E6c | CatalogId::E6s => &[("r", None), ("theta", Some(0.0))],
            CatalogId::E7 | CatalogId::E8 | CatalogId::E9 => &[("r", None)],
            CatalogId::E13 => &[("s", None)],
            _ => &[],
        }
    }

    /// One-line description used by `--help` style listings.
    pub fn summary(self) -> &'static str {
        match self {
            CatalogId::E1 => "1/y",
            CatalogId::E2 => "y^(m-1) B_m(x/y)",
            CatalogId::E3a => "floor(x/y)",
            CatalogId::E3b => "{x/y} - 1/2",
            CatalogId::E4 => "indicator of (a-x)/y in Z",
            CatalogId::E5 => "a^x / (a^y - 1)",
            CatalogId::E6c => "Re (r e^{i theta})^x / ((r e^{i theta})^y - 1)",
            CatalogId::E6s => "Im (r e^{i theta})^x / ((r e^{i theta})^y - 1)",
            CatalogId::E7 => "log(1 - 2 r^(1/y) cos(2 pi x/y) + r^(2/y))",
            CatalogId::E8 => "r^(1/y) sin(2 pi x/y) / (y D)",
            CatalogId::E9 => "(1 - r^(2/y)) / (y D), 0 < r < 1",
            CatalogId::E10 => "log|2 sin(pi x/y)|, -log y on the lattice",
            CatalogId::E11 => "cot(pi x/y) / y, 0 on the lattice",
            CatalogId::E12 => "log|y^(x/y) Gamma(x/y) / sqrt(2 pi y)|",
            CatalogId::E13 => "y^(-s) zeta(s, x/y)",
            CatalogId::E14 => "sign(1/2 - {x/y})",
        }
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CatalogId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CatalogId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown catalog entry '{s}'")))
    }
}

/// Parses a parameter value: a decimal, `p/q`, `e` or `pi`.
pub fn parse_value(text: &str) -> Result<f64> {
    let t = text.trim();
    match t {
        "e" => return Ok(E),
        "pi" => return Ok(PI),
        _ => {}
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| Error::invalid(format!("bad number '{t}'")))?;
        let q: f64 = q.trim().parse().map_err(|_| Error::invalid(format!("bad number '{t}'")))?;
        if q == 0.0 {
            return Err(Error::invalid(format!("zero denominator in '{t}'")));
        }
        return Ok(p / q);
    }
    let v: f64 = t.parse().map_err(|_| Error::invalid(format!("bad number '{t}'")))?;
    if !v.is_finite() {
        return Err(Error::invalid(format!("non-finite parameter '{t}'")));
    }
    Ok(v)
}

/// Parses `k=v,k=v`. An empty string gives no parameters.
pub fn parse_params(text: &str) -> Result<Params> {
    let mut out = Params::new();
    let mut pos = 0;
    for item in text.split(',') {
        let here = pos;
        pos += item.len() + 1;
        if item.trim().is_empty() {
            if text.trim().is_empty() {
                continue;
            }
            return Err(Error::Parse {
                position: here,
                message: "empty parameter".into(),
            });
        }
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse {
            position: here,
            message: format!("expected key=value, got '{item}'"),
        })?;
        let value = parse_value(v).map_err(|e| Error::Parse {
            position: here + k.len() + 1,
            message: e.to_string(),
        })?;
        if out.insert(k.trim().to_string(), value).is_some() {
            return Err(Error::Parse {
                position: here,
                message: format!("duplicate parameter '{}'", k.trim()),
            });
        }
    }
    Ok(out)
}

/// Parses `E2:m=1` (or a bare `E1`) into an id and parameters.
pub fn parse_spec(text: &str) -> Result<(CatalogId, Params)> {
    let (id, rest) = match text.split_once(':') {
        Some((id, rest)) => (id, rest),
        None => (text, ""),
    };
    Ok((id.parse()?, parse_params(rest)?))
}

/// Builds the entry named by `E2:m=1`-style text.
pub fn make_from_spec(text: &str) -> Result<InvariantFunction> {
    let (id, params) = parse_spec(text)?;
    make(id, &params)
}

fn resolve(id: CatalogId, given: &Params) -> Result<Params> {
    let spec = id.parameters();
    for key in given.keys() {
        if !spec.iter().any(|(k, _)| k == key) {
            return Err(Error::invalid(format!("{id}: unknown parameter '{key}'")));
        }
    }
    let mut out = Params::new();
    for &(key, default) in spec {
        let v = match (given.get(key), default) {
            (Some(&v), _) => v,
            (None, Some(d)) => d,
            (None, None) => return Err(Error::invalid(format!("{id}: missing parameter '{key}'"))),
        };
        if !v.is_finite() {
            return Err(Error::invalid(format!("{id}: parameter {key}={v} is not finite")));
        }
        out.insert(key.to_string(), v);
    }
    Ok(out)
}

fn check_r(id: CatalogId, r: f64) -> Result<()> {
    if !(r > 0.0) || r == 1.0 {
        return Err(Error::invalid(format!("{id}: r must be positive and different from 1, got {r}")));
    }
    Ok(())
}

/// Quantities shared by the `r^{1/y}` entries with `D = 1 - 2ρcos φ + ρ²`.
struct Poisson {
    rho: f64,
    phi_cos: f64,
    phi_sin: f64,
    d: f64,
    // partials
    rho_y: f64,
    phi_x: f64,
    phi_y: f64,
    d_x: f64,
    d_y: f64,
}

impl Poisson {
    fn new(l: f64, x: f64, y: f64) -> Self {
        let u = x / y;
        let rho = (l / y).exp();
        let gap = (l / y).exp_m1();
        let s = sin_pi(u);
        let d = gap * gap + 4.0 * rho * s * s;
        let (phi_sin, phi_cos) = (sin_pi(2.0 * u), cos_pi(2.0 * u));
        let rho_y = -rho * l / (y * y);
        let phi_x = TAU / y;
        let phi_y = -TAU * u / y;
        let d_rho = 2.0 * (rho - phi_cos);
        let d_phi = 2.0 * rho * phi_sin;
        Poisson {
            rho,
            phi_cos,
            phi_sin,
            d,
            rho_y,
            phi_x,
            phi_y,
            d_x: d_phi * phi_x,
            d_y: d_rho * rho_y + d_phi * phi_y,
        }
    }
}

const E13_MAX_SHIFT: f64 = 1e6;

/// Builds a catalog entry, validating its parameters.
pub fn make(id: CatalogId, params: &Params) -> Result<InvariantFunction> {
    let p = resolve(id, params)?;
    let name = id.as_str();
    let integer_lattice = Lattice::integers(LatticeKind::Branch);
    let f = match id {
        CatalogId::E1 => InvariantFunction::new(name, |_, y| Ok(1.0 / y))
            .with_dx(|_, _| Ok(0.0))
            .with_dy(|_, y| Ok(-1.0 / (y * y))),

        CatalogId::E2 => {
            let m = p["m"];
            if m < 1.0 || m != m.round() {
                return Err(Error::invalid(format!("E2: m must be a positive integer, got {m}")));
            }
            if m as usize > BERNOULLI_CAPACITY {
                return Err(Error::Capacity {
                    requested: m as u64,
                    limit: BERNOULLI_CAPACITY as u64,
                });
            }
            let m = m as usize;
            let mf = m as f64;
            InvariantFunction::new(name, move |x, y| Ok(y.powi(m as i32 - 1) * bernoulli_poly(m, x / y)?))
                .with_dx(move |x, y| Ok(mf * y.powi(m as i32 - 2) * bernoulli_poly(m - 1, x / y)?))
                .with_dy(move |x, y| {
                    let u = x / y;
                    let inner = (mf - 1.0) * bernoulli_poly(m, u)? - mf * u * bernoulli_poly(m - 1, u)?;
                    Ok(y.powi(m as i32 - 2) * inner)
                })
        }

        CatalogId::E3a => InvariantFunction::new(name, |x, y| {
            let u = x / y;
            Ok(snap_to_integer(u).unwrap_or_else(|| u.floor()))
        })
        .with_generic(|x, y| Ok((x / y).floor()))
        .with_lattice(integer_lattice)
        .rough(),

        CatalogId::E3b => InvariantFunction::new(name, |x, y| {
            let u = x / y;
            Ok(match snap_to_integer(u) {
                Some(_) => -0.5,
                None => u - u.floor() - 0.5,
            })
        })
        .with_generic(|x, y| {
            let u = x / y;
            Ok(u - u.floor() - 0.5)
        })
        .with_lattice(integer_lattice)
        .rough(),

        CatalogId::E4 => {
            let a = p["a"];
            InvariantFunction::new(name, move |x, y| {
                Ok(if snap_to_integer((a - x) / y).is_some() { 1.0 } else { 0.0 })
            })
            .with_generic(|_, _| Ok(0.0))
            .with_lattice(integer_lattice.with_offset(a))
            .rough()
        }

        CatalogId::E5 => {
            let a = p["a"];
            if !(a > 0.0) || a == 1.0 {
                return Err(Error::invalid(format!("E5: a must be positive and different from 1, got {a}")));
            }
            let l = a.ln();
            InvariantFunction::new(name, move |x, y| Ok((x * l).exp() / (y * l).exp_m1()))
                .with_dx(move |x, y| Ok(l * (x * l).exp() / (y * l).exp_m1()))
                .with_dy(move |x, y| {
                    let g = (y * l).exp_m1();
                    Ok(-l * (x * l).exp() * (1.0 + g) / (g * g))
                })
        }

        CatalogId::E6c | CatalogId::E6s => {
            let (r, theta) = (p["r"], p["theta"]);
            check_r(id, r)?;
            let l = r.ln();
            let cos_part = id == CatalogId::E6c;
            // (f + i g)(x, y) for z = r e^{iθ}: z^x / (z^y − 1)
            let parts = move |x: f64, y: f64| -> (f64, f64) {
                let gap = (y * l).exp_m1();
                let rho = gap + 1.0;
                let half = (0.5 * y * theta).sin();
                let d = gap * gap + 4.0 * rho * half * half;
                let rx = (x * l).exp();
                let c = ((x - y) * theta).cos();
                let s = ((x - y) * theta).sin();
                let mid = 0.5 * (2.0 * x - y) * theta;
                let re = rx * (gap * c + 2.0 * mid.sin() * half) / d;
                let im = rx * (gap * s - 2.0 * mid.cos() * half) / d;
                (re, im)
            };
            let pick = move |(re, im): (f64, f64)| if cos_part { re } else { im };
            InvariantFunction::new(name, move |x, y| Ok(pick(parts(x, y))))
                .with_dx(move |x, y| {
                    let (f, g) = parts(x, y);
                    Ok(pick((l * f - theta * g, theta * f + l * g)))
                })
                .with_dy(move |x, y| {
                    // −(L + iθ)(f + ig)(1 + w), w = (f + ig)(0, y)
                    let (f, g) = parts(x, y);
                    let (w_re, w_im) = parts(0.0, y);
                    let (p_re, p_im) = (l * f - theta * g, theta * f + l * g);
                    let (q_re, q_im) = (1.0 + w_re, w_im);
                    Ok(pick((-(p_re * q_re - p_im * q_im), -(p_re * q_im + p_im * q_re))))
                })
        }

        CatalogId::E7 => {
            let r = p["r"];
            check_r(id, r)?;
            let l = r.ln();
            InvariantFunction::new(name, move |x, y| Ok(Poisson::new(l, x, y).d.ln()))
                .with_dx(move |x, y| {
                    let q = Poisson::new(l, x, y);
                    Ok(q.d_x / q.d)
                })
                .with_dy(move |x, y| {
                    let q = Poisson::new(l, x, y);
                    Ok(q.d_y / q.d)
                })
        }

        CatalogId::E8 => {
            let r = p["r"];
            check_r(id, r)?;
            let l = r.ln();
            InvariantFunction::new(name, move |x, y| {
                let q = Poisson::new(l, x, y);
                Ok(q.rho * q.phi_sin / (y * q.d))
            })
            .with_dx(move |x, y| {
                let q = Poisson::new(l, x, y);
                let n = q.rho * q.phi_sin;
                let n_x = q.rho * q.phi_cos * q.phi_x;
                Ok((n_x * q.d - n * q.d_x) / (y * q.d * q.d))
            })
            .with_dy(move |x, y| {
                let q = Poisson::new(l, x, y);
                let n = q.rho * q.phi_sin;
                let n_y = q.rho_y * q.phi_sin + q.rho * q.phi_cos * q.phi_y;
                let den = y * q.d;
                Ok((n_y * den - n * (q.d + y * q.d_y)) / (den * den))
            })
        }

        CatalogId::E9 => {
            let r = p["r"];
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::invalid(format!("E9: r must lie in (0, 1), got {r}")));
            }
            let l = r.ln();
            let numer = move |y: f64| -(2.0 * l / y).exp_m1();
            InvariantFunction::new(name, move |x, y| Ok(numer(y) / (y * Poisson::new(l, x, y).d)))
                .with_dx(move |x, y| {
                    let q = Poisson::new(l, x, y);
                    Ok(-numer(y) * q.d_x / (y * q.d * q.d))
                })
                .with_dy(move |x, y| {
                    let q = Poisson::new(l, x, y);
                    let m = numer(y);
                    let m_y = -2.0 * q.rho * q.rho_y;
                    let den = y * q.d;
                    Ok((m_y * den - m * (q.d + y * q.d_y)) / (den * den))
                })
        }

        CatalogId::E10 => InvariantFunction::new(name, |x, y| {
            let u = x / y;
            Ok(match snap_to_integer(u) {
                Some(_) => -y.ln(),
                None => (2.0 * sin_pi(u)).abs().ln(),
            })
        })
        .with_generic(|x, y| Ok((2.0 * sin_pi(x / y)).abs().ln()))
        .with_lattice(integer_lattice)
        .rough(),

        CatalogId::E11 => InvariantFunction::new(name, |x, y| {
            let u = x / y;
            Ok(match snap_to_integer(u) {
                Some(_) => 0.0,
                None => cos_pi(u) / (sin_pi(u) * y),
            })
        })
        .with_generic(|x, y| Ok(cos_pi(x / y) / (sin_pi(x / y) * y)))
        .with_lattice(integer_lattice)
        .with_traits(Traits {
            smooth_scaled_limit: false,
            integrable: false,
            ..Traits::default()
        }),

        CatalogId::E12 => InvariantFunction::new(name, |x, y| {
            let u = x / y;
            let ly = y.ln();
            let half_log = 0.5 * (TAU * y).ln();
            match snap_to_integer(u).filter(|&k| k <= 0.0) {
                Some(k) => Ok(k * ly + half_log - log_gamma_abs(1.0 - k)?),
                None => Ok(u * ly + log_gamma_abs(u)? - half_log),
            }
        })
        .with_generic(|x, y| {
            let u = x / y;
            Ok(u * y.ln() + log_gamma_abs(u)? - 0.5 * (TAU * y).ln())
        })
        .with_lattice(integer_lattice.with_side(LatticeSide::NonPositive))
        .rough(),

        CatalogId::E13 => {
            let s = p["s"];
            if (0.0..=1.0).contains(&s) {
                return Err(Error::invalid(format!("E13: s must satisfy s > 1 or s < 0, got {s}")));
            }
            if s > 1.0 {
                let integral_s = s == s.round();
                InvariantFunction::new(name, move |x, y| {
                    let u = x / y;
                    if snap_to_integer(u).is_some_and(|k| k <= 0.0) {
                        return Err(Error::Pole(x));
                    }
                    let z = if u > 0.0 {
                        hurwitz_zeta(s, u)?
                    } else if integral_s {
                        let shift = (1.0 - u).ceil();
                        if shift > E13_MAX_SHIFT {
                            return Err(Error::Unsupported(format!(
                                "E13: x/y={u} needs more than {E13_MAX_SHIFT} shift terms"
                            )));
                        }
                        let head: f64 = (0..shift as usize).map(|n| (n as f64 + u).powi(-(s as i32))).sum();
                        head + hurwitz_zeta(s, u + shift)?
                    } else {
                        return Err(Error::invalid(format!(
                            "E13: x/y={u} < 0 with non-integer s={s} has no real value"
                        )));
                    };
                    Ok(y.powf(-s) * z)
                })
                .with_lattice(Lattice::integers(LatticeKind::Pole).with_side(LatticeSide::NonPositive))
                .with_traits(Traits {
                    integrable: false,
                    ..Traits::default()
                })
            } else {
                InvariantFunction::new(name, move |x, y| Ok(y.powf(-s) * hurwitz_zeta(s, x / y)?))
                    .with_lattice(integer_lattice)
                    .with_series_tolerance(1e-12)
                    .with_traits(Traits {
                        smooth_scaled_limit: false,
                        series_defined: true,
                        ..Traits::default()
                    })
            }
        }

        CatalogId::E14 => InvariantFunction::new(name, |x, y| {
            let u = x / y;
            if snap_to_integer(u).is_some() {
                return Ok(1.0);
            }
            if snap_to_integer(u - 0.5).is_some() {
                return Ok(0.0);
            }
            Ok(if u - u.floor() < 0.5 { 1.0 } else { -1.0 })
        })
        .with_generic(|x, y| {
            let u = x / y;
            Ok(if u - u.floor() < 0.5 { 1.0 } else { -1.0 })
        })
        .with_lattice(integer_lattice)
        .with_lattice(integer_lattice.with_phase(0.5))
        .rough(),
    };
    Ok(f.with_params(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn entry(id: CatalogId, kv: &[(&str, f64)]) -> InvariantFunction {
        let p: Params = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        make(id, &p).unwrap()
    }

    fn sum_n(f: &InvariantFunction, x: f64, y: f64, n: usize) -> f64 {
        (0..n).map(|r| f.eval(x + r as f64 * y, n as f64 * y).unwrap()).sum()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(entry(CatalogId::E1, &[]).eval(1.0, 2.0).unwrap(), 0.5);
        assert_eq!(entry(CatalogId::E10, &[]).eval(2.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(entry(CatalogId::E11, &[]).eval(0.5, 1.0).unwrap(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn e5_two_way_split() {
        let f = entry(CatalogId::E5, &[("a", 2.0)]);
        assert_abs_diff_eq!(f.eval(1.0, 2.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.eval(2.0, 2.0).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.eval(1.0, 1.0).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn e6_reduces_to_e5() {
        let f = entry(CatalogId::E6c, &[("r", 3.0), ("theta", 0.0)]);
        let g = entry(CatalogId::E5, &[("a", 3.0)]);
        assert_abs_diff_eq!(f.eval(0.7, 1.1).unwrap(), g.eval(0.7, 1.1).unwrap(), epsilon = 1e-12);
        let s = entry(CatalogId::E6s, &[("r", 3.0)]);
        assert_eq!(s.eval(0.7, 1.1).unwrap(), 0.0);
    }

    #[test]
    fn e6_matches_printed_quotient() {
        let (r, th) = (0.5f64, 1.0f64);
        let f = entry(CatalogId::E6c, &[("r", r), ("theta", th)]);
        let g = entry(CatalogId::E6s, &[("r", r), ("theta", th)]);
        for &(x, y) in &[(0.3, 1.0), (-1.7, 2.2), (2.5, 0.4)] {
            let den = 1.0 - 2.0 * r.powf(y) * (y * th).cos() + r.powf(2.0 * y);
            let nf = r.powf(x + y) * ((x - y) * th).cos() - r.powf(x) * (x * th).cos();
            let ng = r.powf(x + y) * ((x - y) * th).sin() - r.powf(x) * (x * th).sin();
            assert_abs_diff_eq!(f.eval(x, y).unwrap(), nf / den, epsilon = 1e-12);
            assert_abs_diff_eq!(g.eval(x, y).unwrap(), ng / den, epsilon = 1e-12);
        }
    }

    #[test]
    fn e2_raabe_half() {
        let f = entry(CatalogId::E2, &[("m", 2.0)]);
        // B_2(0) + B_2(1/2) = 1/12, scaled by y^{m-1} = 2
        assert_abs_diff_eq!(f.eval(0.0, 2.0).unwrap() + f.eval(1.0, 2.0).unwrap(), f.eval(0.0, 1.0).unwrap(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            bernoulli_poly(2, 0.0).unwrap() + bernoulli_poly(2, 0.5).unwrap(),
            0.5 * bernoulli_poly(2, 0.0).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn lattice_branches() {
        let e10 = entry(CatalogId::E10, &[]);
        assert_abs_diff_eq!(e10.eval(0.0, 2.0).unwrap(), -(2f64.ln()), epsilon = 1e-15);
        assert_abs_diff_eq!(e10.eval(1.0, 2.0).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(sum_n(&e10, 0.0, 1.0, 2), e10.eval(0.0, 1.0).unwrap(), epsilon = 1e-15);

        let e12 = entry(CatalogId::E12, &[]);
        let expect = 0.5 * TAU.ln();
        assert_abs_diff_eq!(e12.eval(0.0, 1.0).unwrap(), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(e12.eval(0.0, 2.0).unwrap(), 0.5 * (4.0 * PI).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(e12.eval(1.0, 2.0).unwrap(), -0.5 * 2f64.ln(), epsilon = 1e-14);
        for n in 1..=8 {
            assert_abs_diff_eq!(sum_n(&e12, 0.0, 1.0, n), expect, epsilon = 1e-12);
            assert_abs_diff_eq!(sum_n(&e12, -2.0, 0.5, n), e12.eval(-2.0, 0.5).unwrap(), epsilon = 1e-12);
        }

        let e14 = entry(CatalogId::E14, &[]);
        assert_eq!(e14.eval(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(e14.eval(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(e14.eval(0.75, 1.0).unwrap(), -1.0);
        for n in 1..=8 {
            assert_eq!(sum_n(&e14, 0.5, 1.0, n), 0.0);
            assert_eq!(sum_n(&e14, 0.0, 1.0, n), 1.0);
        }

        let e4 = entry(CatalogId::E4, &[("a", 0.5)]);
        assert_eq!(e4.eval(0.5, 1.0).unwrap(), 1.0);
        assert_eq!(e4.eval(-1.5, 1.0).unwrap(), 1.0);
        assert_eq!(e4.eval(0.25, 1.0).unwrap(), 0.0);
        for n in 1..=8 {
            assert_eq!(sum_n(&e4, -1.5, 1.0, n), 1.0);
        }
    }

    #[test]
    fn floor_and_frac() {
        let fl = entry(CatalogId::E3a, &[]);
        assert_eq!(sum_n(&fl, 1.0, 0.7, 3), fl.eval(1.0, 0.7).unwrap());
        assert_eq!(fl.eval(3.0, 1.0).unwrap(), 3.0);
        let fr = entry(CatalogId::E3b, &[]);
        let b1 = entry(CatalogId::E2, &[("m", 1.0)]);
        for &(x, y) in &[(0.3, 1.0), (-2.2, 0.6), (4.0, 2.0)] {
            assert_abs_diff_eq!(
                fl.eval(x, y).unwrap() + fr.eval(x, y).unwrap(),
                b1.eval(x, y).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn zeta_entry_matches_bernoulli() {
        // y^{-s} ζ(s, x/y) with s = 1 - m equals -(1/m) y^{m-1} B_m(x/y) on 0 < x < y
        for m in 2..=4usize {
            let z = entry(CatalogId::E13, &[("s", 1.0 - m as f64)]);
            let b = entry(CatalogId::E2, &[("m", m as f64)]);
            for &(x, y) in &[(0.3, 1.0), (0.2, 0.7), (1.1, 2.5)] {
                assert_abs_diff_eq!(z.eval(x, y).unwrap(), -b.eval(x, y).unwrap() / m as f64, epsilon = 1e-12);
            }
        }
        let z2 = entry(CatalogId::E13, &[("s", 2.0)]);
        assert_abs_diff_eq!(z2.eval(1.0, 1.0).unwrap(), PI * PI / 6.0, epsilon = 1e-13);
        // negative side via the shift: ζ(2, -0.5) = 4 + ζ(2, 0.5)
        assert_abs_diff_eq!(
            z2.eval(-0.5, 1.0).unwrap(),
            4.0 + hurwitz_zeta(2.0, 0.5).unwrap(),
            epsilon = 1e-12
        );
        assert!(matches!(z2.eval(-2.0, 1.0), Err(Error::Pole(_))));
        for n in 1..=6 {
            assert_abs_diff_eq!(sum_n(&z2, -1.3, 0.8, n), z2.eval(-1.3, 0.8).unwrap(), epsilon = 1e-10);
        }
        let frac = entry(CatalogId::E13, &[("s", 2.5)]);
        assert!(frac.eval(-0.5, 1.0).is_err());
    }

    #[test]
    fn analytic_partials_match_differences() {
        let cases = [
            entry(CatalogId::E1, &[]),
            entry(CatalogId::E2, &[("m", 3.0)]),
            entry(CatalogId::E5, &[("a", 0.5)]),
            entry(CatalogId::E6c, &[("r", 2.0), ("theta", 1.0)]),
            entry(CatalogId::E6s, &[("r", 0.5), ("theta", 1.0)]),
            entry(CatalogId::E7, &[("r", 2.0)]),
            entry(CatalogId::E8, &[("r", 0.5)]),
            entry(CatalogId::E9, &[("r", 0.5)]),
        ];
        let h = 1e-6;
        for f in &cases {
            for &(x, y) in &[(0.3, 1.0), (-1.1, 1.7), (2.2, 0.6)] {
                let fdx = (f.eval(x + h, y).unwrap() - f.eval(x - h, y).unwrap()) / (2.0 * h);
                let fdy = (f.eval(x, y + h).unwrap() - f.eval(x, y - h).unwrap()) / (2.0 * h);
                let dx = f.dx(x, y).unwrap().unwrap();
                let dy = f.dy(x, y).unwrap().unwrap();
                let scale = 1.0 + dx.abs().max(dy.abs());
                assert!((dx - fdx).abs() < 1e-6 * scale, "{} dx at ({x},{y}): {dx} vs {fdx}", f.label());
                assert!((dy - fdy).abs() < 1e-6 * scale, "{} dy at ({x},{y}): {dy} vs {fdy}", f.label());
            }
        }
    }

    #[test]
    fn e9_symmetric() {
        let f = entry(CatalogId::E9, &[("r", 0.5)]);
        for &(x, y) in &[(0.3, 1.0), (-1.1, 1.7), (2.2, 0.6)] {
            assert_abs_diff_eq!(f.eval(y - x, y).unwrap(), f.eval(x, y).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn parameter_validation() {
        let bad: &[(CatalogId, &[(&str, f64)])] = &[
            (CatalogId::E5, &[("a", 1.0)]),
            (CatalogId::E5, &[("a", -2.0)]),
            (CatalogId::E7, &[("r", 1.0)]),
            (CatalogId::E6c, &[("r", 1.0)]),
            (CatalogId::E2, &[("m", 0.0)]),
            (CatalogId::E2, &[("m", 1.5)]),
            (CatalogId::E9, &[("r", 2.0)]),
            (CatalogId::E13, &[("s", 1.0)]),
            (CatalogId::E13, &[("s", 0.5)]),
            (CatalogId::E5, &[]),
            (CatalogId::E1, &[("a", 2.0)]),
        ];
        for (id, kv) in bad {
            let p: Params = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
            assert!(matches!(make(*id, &p), Err(Error::InvalidInput(_))), "{id} {kv:?}");
        }
    }

    #[test]
    fn spec_parsing() {
        let (id, p) = parse_spec("E2:m=1").unwrap();
        assert_eq!(id, CatalogId::E2);
        assert_eq!(p["m"], 1.0);
        let (id, p) = parse_spec("e6s:r=1/2,theta=pi").unwrap();
        assert_eq!(id, CatalogId::E6s);
        assert_eq!(p["r"], 0.5);
        assert_eq!(p["theta"], PI);
        assert_eq!(parse_params("a=e").unwrap()["a"], E);
        assert!(parse_params("").unwrap().is_empty());
        assert!(matches!(parse_params("a=2,,b=1"), Err(Error::Parse { position: 4, .. })));
        assert!(matches!(parse_params("a=2,b"), Err(Error::Parse { position: 4, .. })));
        assert!(parse_params("a=2,a=3").is_err());
        assert!("E15".parse::<CatalogId>().is_err());
        assert_eq!(make_from_spec("E5:a=2").unwrap().label(), "E5(a=2)");
    }
}
