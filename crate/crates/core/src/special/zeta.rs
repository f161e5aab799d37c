//! Hurwitz zeta `ζ(s, x)` on the real branches `s > 1` and `s < 0`.
//!
//! Both branches share an Euler–Maclaurin evaluator. For `s < 0` the argument
//! is first reduced to `(0, 1]`, so the value returned is the 1-periodic
//! extension given by Hurwitz's Fourier series; [`hurwitz_zeta_fourier`]
//! sums that series directly and serves as the second route for the same
//! quantity.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_traits::ToPrimitive;

use super::bernoulli;
use super::gamma::log_gamma_abs;
use crate::error::{Error, Result};

/// The Fourier branch stops once the term magnitude bound drops below this.
pub const FOURIER_TERM_BOUND: f64 = 1e-12;
/// Hard cap on Fourier terms.
pub const FOURIER_MAX_TERMS: usize = 1 << 24;

const EM_MAX_CORRECTIONS: usize = 30;

/// `B_{2j} / (2j)!` for j = 1..=30.
fn em_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut fact = num_bigint::BigInt::from(1);
        let mut out = Vec::with_capacity(EM_MAX_CORRECTIONS);
        for j in 1..=EM_MAX_CORRECTIONS {
            fact *= (2 * j - 1) * (2 * j);
            let b = bernoulli::table().number(2 * j).expect("table capacity");
            let c = b / num_rational::BigRational::from_integer(fact.clone());
            out.push(c.to_f64().unwrap_or(0.0));
        }
        out
    })
}

/// Euler–Maclaurin for `s ≠ 1`, `x > 0`. Valid for negative `s` as the
/// analytic continuation.
fn euler_maclaurin(s: f64, x: f64) -> f64 {
    // For s < 0 the head sum cancels against the integral term, so the shift
    // is kept small; at negative integers the correction series terminates.
    let terminating = s < 0.0 && s == s.round();
    let start = if terminating {
        0.0
    } else if s < 0.0 {
        (5.0 - (-s / 3.0).floor()).max(3.0)
    } else {
        15.0
    };
    let shift = if x >= start { 0 } else { (start - x).ceil() as usize };
    let mut head = 0.0;
    for n in 0..shift {
        head += (n as f64 + x).powf(-s);
    }
    let a = shift as f64 + x;
    let a_pow = a.powf(-s);
    let mut total = head + a * a_pow / (s - 1.0) + 0.5 * a_pow;

    // Σ_j B_{2j}/(2j)! · s(s+1)…(s+2j-2) · a^{-s-2j+1}
    let inv2 = 1.0 / (a * a);
    let mut poch = s;
    let mut pow = a_pow / a;
    let mut last = f64::INFINITY;
    for (j, &c) in em_coefficients().iter().enumerate() {
        let term = c * poch * pow;
        if term == 0.0 {
            break;
        }
        if term.abs() > last && !terminating {
            break;
        }
        total += term;
        if term.abs() < 1e-17 * total.abs() {
            break;
        }
        last = term.abs();
        let k = (2 * j + 1) as f64;
        poch *= (s + k) * (s + k + 1.0);
        pow *= inv2;
    }
    total
}

fn check_region(s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::invalid(format!("hurwitz_zeta: non-finite s={s}")));
    }
    if (0.0..=1.0).contains(&s) {
        return Err(Error::Unsupported(format!(
            "hurwitz_zeta: s={s} lies in [0, 1]"
        )));
    }
    Ok(())
}

/// Reduces `x` to `(0, 1]`.
pub fn reduce_unit_interval(x: f64) -> f64 {
    let r = x - x.floor();
    if r == 0.0 {
        1.0
    } else {
        r
    }
}

/// Hurwitz zeta for `s > 1` (requires `x > 0`) or `s < 0`.
///
/// For `s < 0` the result is the periodized value `ζ(s, x')` with
/// `x' ∈ (0, 1]`, `x' ≡ x (mod 1)`.
pub fn hurwitz_zeta(s: f64, x: f64) -> Result<f64> {
    check_region(s)?;
    if !x.is_finite() {
        return Err(Error::invalid(format!("hurwitz_zeta: non-finite x={x}")));
    }
    if s > 1.0 {
        if x <= 0.0 {
            return Err(Error::invalid(format!(
                "hurwitz_zeta: x={x} must be positive for s={s} > 1"
            )));
        }
        return Ok(euler_maclaurin(s, x));
    }
    Ok(euler_maclaurin(s, reduce_unit_interval(x)))
}

/// Number of Fourier terms needed so that `coef · k^{s-1} < FOURIER_TERM_BOUND`.
fn fourier_terms(s: f64, coef: f64) -> Result<usize> {
    let k = (coef / FOURIER_TERM_BOUND).powf(1.0 / (1.0 - s)).ceil();
    if !(k.is_finite()) || k > FOURIER_MAX_TERMS as f64 {
        return Err(Error::Convergence(format!(
            "Fourier series for s={s} needs more than {FOURIER_MAX_TERMS} terms"
        )));
    }
    Ok((k as usize).max(1))
}

/// Hurwitz's Fourier series for `s < 0`:
///
/// `ζ(s,x) = 2Γ(1-s)/(2π)^{1-s} · ( sin(sπ/2) Σ k^{s-1} cos 2πkx + cos(sπ/2) Σ k^{s-1} sin 2πkx )`,
///
/// truncated once the term magnitude bound falls below [`FOURIER_TERM_BOUND`].
pub fn hurwitz_zeta_fourier(s: f64, x: f64) -> Result<f64> {
    if !(s < 0.0) {
        return Err(Error::Unsupported(format!(
            "Fourier form requires s < 0, got s={s}"
        )));
    }
    let x = reduce_unit_interval(x);
    let prefactor = 2.0 * (log_gamma_abs(1.0 - s)? - (1.0 - s) * TAU.ln()).exp();
    let (sa, ca) = (0.5 * s * PI).sin_cos();
    let weight = prefactor * (sa.abs() + ca.abs());
    let terms = fourier_terms(s, weight)?;

    // e^{2πikx} by rotation, re-anchored periodically to bound drift.
    let (step_im, step_re) = (TAU * x).sin_cos();
    let mut cos_sum = 0.0;
    let mut sin_sum = 0.0;
    let (mut re, mut im) = (1.0, 0.0);
    for k in 1..=terms {
        if k % 512 == 0 {
            let frac = (k as f64 * x).fract();
            let (si, co) = (TAU * frac).sin_cos();
            re = co;
            im = si;
        } else {
            let nre = re * step_re - im * step_im;
            im = re * step_im + im * step_re;
            re = nre;
        }
        let w = (k as f64).powf(s - 1.0);
        cos_sum += w * re;
        sin_sum += w * im;
    }
    Ok(prefactor * (sa * cos_sum + ca * sin_sum))
}
