//! Invariant functions defined by infinite series.
//!
//! Both constructors need a computable tail. The coefficient magnitudes are
//! watched as the sum proceeds: a non-increasing ratio below one gives a
//! geometric bound; otherwise a fitted power law `c·t^{-p}` with `p > 1`
//! gives an integral bound (Fourier form) or a Hurwitz-zeta tail estimate
//! (shifted-sum form).

use std::f64::consts::TAU;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function::{InvariantFunction, ScalarFn, Traits};
use crate::special::hurwitz_zeta;

/// Term cap for both series constructors.
pub const SERIES_MAX_TERMS: usize = 1_000_000;

const WARMUP: usize = 8;
const RATIO_SLACK: f64 = 1e-9;
/// Fitted power-law exponents must exceed `1 + POWER_MARGIN`.
const POWER_MARGIN: f64 = 1e-2;

/// Trigonometric kernel for [`from_fourier`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierMode {
    Cos,
    Sin,
}

/// Running tail estimator for a series whose terms decay eventually monotonically.
#[derive(Debug, Default)]
struct TailWatch {
    prev: Option<f64>,
    prev_ratio: Option<f64>,
    zero_run: usize,
}

enum Tail {
    Unknown,
    Geometric(f64),
    Power(f64),
}

impl TailWatch {
    /// Feeds the magnitude of term `k` (1-based position `t` for power fits).
    fn push(&mut self, a: f64, t: f64, t_prev: f64) -> Tail {
        let out = match self.prev {
            _ if a == 0.0 => {
                self.zero_run += 1;
                if self.zero_run >= WARMUP {
                    Tail::Geometric(0.0)
                } else {
                    Tail::Unknown
                }
            }
            Some(p) if p > 0.0 && a <= p => {
                self.zero_run = 0;
                let q = a / p;
                let geometric = q < 1.0
                    && self.prev_ratio.is_some_and(|pq| q <= pq * (1.0 + RATIO_SLACK));
                self.prev_ratio = Some(q);
                if geometric {
                    Tail::Geometric(a * q / (1.0 - q))
                } else if t_prev > 0.0 && t > t_prev {
                    let expo = (p / a).ln() / (t / t_prev).ln();
                    if expo > 1.0 + POWER_MARGIN {
                        Tail::Power(expo)
                    } else {
                        Tail::Unknown
                    }
                } else {
                    Tail::Unknown
                }
            }
            _ => {
                self.zero_run = 0;
                self.prev_ratio = None;
                Tail::Unknown
            }
        };
        self.prev = Some(a);
        out
    }
}

fn fourier_value(h: &ScalarFn, mode: FourierMode, tol: f64, x: f64, y: f64) -> Result<f64> {
    let u = x / y;
    let mut sum = 0.0;
    let mut watch = TailWatch::default();
    for k in 1..=SERIES_MAX_TERMS {
        let kf = k as f64;
        let hk = h(kf / y);
        if !hk.is_finite() {
            return Err(Error::Convergence(format!("Fourier coefficient h({}) is not finite", kf / y)));
        }
        let phase = TAU * (kf * u).fract();
        sum += hk
            * match mode {
                FourierMode::Cos => phase.cos(),
                FourierMode::Sin => phase.sin(),
            };
        let a = hk.abs();
        let tail = match watch.push(a, kf, kf - 1.0) {
            Tail::Geometric(b) => Some(b),
            Tail::Power(p) => Some(a * kf / (p - 1.0)),
            Tail::Unknown => None,
        };
        if k >= WARMUP {
            if let Some(b) = tail {
                if b / y < tol {
                    return Ok(sum / y);
                }
            }
        }
    }
    Err(Error::Convergence(format!(
        "Fourier series tail bound not below {tol} within {SERIES_MAX_TERMS} terms at y={y}"
    )))
}

/// `(1/y)·Σ_{k≥1} h(k/y)·cos(2πkx/y)` (or `sin`), truncated when the tail
/// bound drops below `tol`.
pub fn from_fourier(h: ScalarFn, mode: FourierMode, tol: f64) -> Result<InvariantFunction> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("from_fourier: tolerance must be positive, got {tol}")));
    }
    fourier_value(&h, mode, tol, 0.0, 1.0)?;
    let name = match mode {
        FourierMode::Cos => "fourier_cos",
        FourierMode::Sin => "fourier_sin",
    };
    Ok(InvariantFunction::new(name, move |x, y| fourier_value(&h, mode, tol, x, y))
        .with_series_tolerance(tol)
        .with_traits(Traits {
            smooth_scaled_limit: false,
            series_defined: true,
            ..Traits::default()
        }))
}

fn tail_sum_value(h: &ScalarFn, tol: f64, x: f64, y: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut watch = TailWatch::default();
    let mut last_power: Option<f64> = None;
    for k in 0..SERIES_MAX_TERMS {
        let t = x + k as f64 * y;
        let v = h(t);
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("tail series term h({t}) is not finite")));
        }
        sum += v;
        let a = v.abs();
        let t_prev = t - y;
        let tail = watch.push(a, t, t_prev);
        if k < WARMUP || t <= 0.0 {
            continue;
        }
        match tail {
            Tail::Geometric(b) => {
                if b < tol {
                    return Ok(sum);
                }
                last_power = None;
            }
            Tail::Power(p) => {
                // Σ_{j≥1} a·(t/(t + j y))^p = a·(t/y)^p·ζ(p, t/y + 1)
                let est = |p: f64| -> Result<f64> {
                    let z = t / y;
                    Ok(a * z.powf(p) * hurwitz_zeta(p, z + 1.0)?)
                };
                let cur = est(p)?;
                if let Some(q) = last_power {
                    let spread = (cur - est(q)?).abs();
                    if spread < tol && cur.is_finite() {
                        return Ok(sum + cur.copysign(v));
                    }
                }
                last_power = Some(p);
            }
            Tail::Unknown => last_power = None,
        }
    }
    Err(Error::Convergence(format!(
        "shifted-sum tail not below {tol} within {SERIES_MAX_TERMS} terms at (x={x}, y={y})"
    )))
}

/// `Σ_{k≥0} h(x + k·y)`, truncated (with a fitted tail for power-law decay)
/// once the estimated remaining error drops below `tol`. `|h|` must be
/// eventually monotone decreasing.
pub fn from_tail_series(h: ScalarFn, tol: f64) -> Result<InvariantFunction> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("from_tail_series: tolerance must be positive, got {tol}")));
    }
    tail_sum_value(&h, tol, 1.0, 1.0)?;
    Ok(InvariantFunction::new("tail_series", move |x, y| tail_sum_value(&h, tol, x, y))
        .with_series_tolerance(tol)
        .with_traits(Traits {
            series_defined: true,
            ..Traits::default()
        }))
}

/// Wraps a plain closure as a [`ScalarFn`].
pub fn scalar<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> ScalarFn {
    Arc::new(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make, CatalogId};
    use crate::function::Params;
    use approx::assert_abs_diff_eq;

    #[test]
    fn geometric_cosine_series() {
        let f = from_fourier(scalar(|t| 0.5f64.powf(t)), FourierMode::Cos, 1e-10).unwrap();
        assert_abs_diff_eq!(f.eval(0.0, 1.0).unwrap(), 1.0, epsilon = 1e-10);
        assert!(f.traits().series_defined);
        assert_eq!(f.series_tolerance(), 1e-10);
    }

    #[test]
    fn geometric_sine_series_matches_poisson_entry() {
        let f = from_fourier(scalar(|t| 0.5f64.powf(t)), FourierMode::Sin, 1e-10).unwrap();
        let mut p = Params::new();
        p.insert("r".into(), 0.5);
        let e8 = make(CatalogId::E8, &p).unwrap();
        assert_abs_diff_eq!(f.eval(0.2, 1.0).unwrap(), e8.eval(0.2, 1.0).unwrap(), epsilon = 1e-9);
        assert_abs_diff_eq!(f.eval(-1.3, 2.5).unwrap(), e8.eval(-1.3, 2.5).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn zero_coefficients() {
        let f = from_fourier(scalar(|_| 0.0), FourierMode::Cos, 1e-10).unwrap();
        assert_eq!(f.eval(0.3, 1.7).unwrap(), 0.0);
        let g = from_tail_series(scalar(|_| 0.0), 1e-10).unwrap();
        assert_eq!(g.eval(-4.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn divergent_fourier_rejected() {
        // h(t) = 1/t: p = 1, no integral bound
        let r = from_fourier(scalar(|t| 1.0 / t), FourierMode::Cos, 1e-10);
        assert!(matches!(r, Err(Error::Convergence(_))));
    }

    #[test]
    fn exponential_tail() {
        let f = from_tail_series(scalar(|t| (-t).exp()), 1e-12).unwrap();
        let e = (-1f64).exp();
        assert_abs_diff_eq!(f.eval(1.0, 1.0).unwrap(), e / (1.0 - e), epsilon = 1e-11);
        assert_abs_diff_eq!(f.eval(1.0, 1.0).unwrap(), 0.5819767068693265, epsilon = 1e-11);
    }

    #[test]
    fn inverse_square_tail_is_hurwitz() {
        let f = from_tail_series(scalar(|t| t.powi(-2)), 1e-11).unwrap();
        let z = hurwitz_zeta(2.0, 0.5).unwrap();
        assert_abs_diff_eq!(f.eval(0.5, 1.0).unwrap(), z, epsilon = 1e-9);
        // Σ (x + k y)^{-2} = y^{-2} ζ(2, x/y)
        assert_abs_diff_eq!(
            f.eval(0.7, 2.0).unwrap(),
            hurwitz_zeta(2.0, 0.35).unwrap() / 4.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn slowly_converging_tail_fails() {
        // h(t) = 1/t diverges
        let r = from_tail_series(scalar(|t| 1.0 / t), 1e-10);
        assert!(matches!(r, Err(Error::Convergence(_))));
    }
}
