//! `log |Γ(t)|` for real `t`.
//!
//! Large arguments use the Stirling series with Bernoulli coefficients; small
//! positive arguments are shifted up with `Γ(t+1) = tΓ(t)`; negative arguments
//! go through the reflection `|Γ(t)| = π / (|sin πt| Γ(1-t))`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_traits::ToPrimitive;

use super::bernoulli;
use super::sin_pi;
use crate::error::{Error, Result};

const STIRLING_THRESHOLD: f64 = 10.0;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2j} / (2j (2j-1))` for j = 1..=20.
fn stirling_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        (1..=20usize)
            .map(|j| {
                let b = bernoulli::table().number(2 * j).expect("table capacity");
                let d = (2 * j * (2 * j - 1)) as f64;
                b.to_f64().unwrap_or(f64::NAN) / d
            })
            .collect()
    })
}

fn stirling(t: f64) -> f64 {
    debug_assert!(t >= STIRLING_THRESHOLD);
    let base = (t - 0.5) * t.ln() - t + LN_SQRT_2PI;
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut corr = 0.0;
    let mut last = f64::INFINITY;
    for &c in stirling_coefficients() {
        let term = c * pow;
        if term.abs() >= last {
            break;
        }
        corr += term;
        if term.abs() < 1e-17 * base.abs().max(1.0) {
            break;
        }
        last = term.abs();
        pow *= inv2;
    }
    base + corr
}

/// Natural log of `|Γ(t)|`. Nonpositive integers are poles.
pub fn log_gamma_abs(t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("log_gamma_abs: non-finite argument {t}")));
    }
    if t <= 0.0 && t == t.round() {
        return Err(Error::Pole(t));
    }
    if t < 0.0 {
        let s = sin_pi(t).abs();
        return Ok(PI.ln() - s.ln() - log_gamma_abs(1.0 - t)?);
    }
    if t >= STIRLING_THRESHOLD {
        return Ok(stirling(t));
    }
    let shift = (STIRLING_THRESHOLD - t).ceil() as usize;
    let mut prod = 1.0;
    for k in 0..shift {
        prod *= t + k as f64;
    }
    Ok(stirling(t + shift as f64) - prod.ln())
}

/// `Γ(t)` for real `t`, sign included.
pub fn gamma(t: f64) -> Result<f64> {
    let mag = log_gamma_abs(t)?.exp();
    if t > 0.0 {
        return Ok(mag);
    }
    // sign of Γ on (-k-1, -k) is (-1)^{k+1}
    let k = (-t).floor() as i64;
    Ok(if k % 2 == 0 { -mag } else { mag })
}
