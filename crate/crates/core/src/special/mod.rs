//! Scalar special functions: Bernoulli numbers and polynomials, Hurwitz zeta, log-Gamma.

mod bernoulli;
mod gamma;
mod zeta;

pub use bernoulli::{
    bernoulli_number, bernoulli_number_f64, bernoulli_poly, bernoulli_poly_exact, table,
    BernoulliTable, BERNOULLI_CAPACITY,
};
pub use gamma::{gamma, log_gamma_abs};
pub use zeta::{
    hurwitz_zeta, hurwitz_zeta_fourier, reduce_unit_interval, FOURIER_MAX_TERMS,
    FOURIER_TERM_BOUND,
};

use std::f64::consts::PI;

/// `sin(πt)` with the argument reduced before scaling by π.
pub fn sin_pi(t: f64) -> f64 {
    let r = t - 2.0 * (0.5 * t).round();
    // r ∈ [-1, 1]
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        (PI * (-1.0 - r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// `cos(πt)` with the argument reduced before scaling by π.
pub fn cos_pi(t: f64) -> f64 {
    sin_pi(t + 0.5)
}

/// Signed distance from `u` to the nearest integer, in `[-1/2, 1/2]`.
pub fn lattice_offset(u: f64) -> f64 {
    u - u.round()
}
