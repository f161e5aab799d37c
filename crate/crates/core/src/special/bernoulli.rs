//! Bernoulli numbers as exact rationals, and Bernoulli polynomials.
//!
//! The table is built once from the recurrence
//! `B_0 = 1`, `Σ_{k=0}^{n-1} C(n,k) B_k = 0` (n ≥ 2) and is read-only afterwards.
//! Floating-point coefficient lists for every `B_m(t)` up to the table size are
//! derived from the exact values at the same time, so polynomial evaluation in
//! hot loops never touches big integers.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest index held by the shared table.
pub const BERNOULLI_CAPACITY: usize = 128;

/// Exact Bernoulli numbers `B_0..=B_N`.
#[derive(Debug, Clone)]
pub struct BernoulliTable {
    numbers: Vec<BigRational>,
    /// `poly_coeffs[m][j]` is the coefficient of `t^j` in `B_m(t)`.
    poly_coeffs: Vec<Vec<f64>>,
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

impl BernoulliTable {
    /// Builds `B_0..=B_n` from the defining recurrence.
    pub fn new(n: usize) -> Self {
        let mut numbers: Vec<BigRational> = Vec::with_capacity(n + 1);
        numbers.push(BigRational::one());
        for m in 1..=n {
            // Σ_{k=0}^{m} C(m+1,k) B_k = 0  ⇒  B_m = -(1/(m+1)) Σ_{k<m} C(m+1,k) B_k
            let row = binomial_row(m + 1);
            let mut acc = BigRational::zero();
            for (k, b) in numbers.iter().enumerate() {
                if !b.is_zero() {
                    acc += BigRational::from_integer(row[k].clone()) * b;
                }
            }
            numbers.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
        }

        let poly_coeffs = (0..=n)
            .map(|m| {
                let row = binomial_row(m);
                // B_m(t) = Σ_k C(m,k) B_k t^{m-k}: coefficient of t^j uses k = m-j.
                (0..=m)
                    .map(|j| {
                        let k = m - j;
                        let c = BigRational::from_integer(row[k].clone()) * &numbers[k];
                        c.to_f64().unwrap_or(f64::NAN)
                    })
                    .collect()
            })
            .collect();

        BernoulliTable { numbers, poly_coeffs }
    }

    pub fn capacity(&self) -> usize {
        self.numbers.len() - 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.capacity() {
            Err(Error::Capacity {
                requested: n as u64,
                limit: self.capacity() as u64,
            })
        } else {
            Ok(())
        }
    }

    pub fn number(&self, n: usize) -> Result<&BigRational> {
        self.check(n)?;
        Ok(&self.numbers[n])
    }

    /// Coefficients of `B_m(t)` in increasing powers of `t`.
    pub fn poly_coefficients(&self, m: usize) -> Result<&[f64]> {
        self.check(m)?;
        Ok(&self.poly_coeffs[m])
    }

    /// `B_m(t)` by compensated Horner on the converted coefficients.
    pub fn poly(&self, m: usize, t: f64) -> Result<f64> {
        Ok(compensated_horner(self.poly_coefficients(m)?, t))
    }

    /// `B_m(t)` evaluated exactly in rationals.
    pub fn poly_exact(&self, m: usize, t: &BigRational) -> Result<BigRational> {
        self.check(m)?;
        let row = binomial_row(m);
        let mut acc = BigRational::zero();
        for (c, b) in row.iter().zip(&self.numbers[..=m]) {
            acc = acc * t + BigRational::from_integer(c.clone()) * b;
        }
        Ok(acc)
    }
}

/// Horner's rule with error-free transformations (accurate to about one ulp
/// of the result unless the polynomial is ill-conditioned at `t`).
fn compensated_horner(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0f64;
    let mut err = 0.0f64;
    for &a in coeffs.iter().rev() {
        let p = acc * t;
        let p_err = acc.mul_add(t, -p);
        let s = p + a;
        let z = s - p;
        let s_err = (p - (s - z)) + (a - z);
        acc = s;
        err = err.mul_add(t, p_err + s_err);
    }
    acc + err
}

/// The process-wide table, built on first use.
pub fn table() -> &'static BernoulliTable {
    static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
    TABLE.get_or_init(|| BernoulliTable::new(BERNOULLI_CAPACITY))
}

/// Exact `B_n`.
pub fn bernoulli_number(n: usize) -> Result<BigRational> {
    table().number(n).cloned()
}

/// `B_n` rounded to the nearest `f64`.
pub fn bernoulli_number_f64(n: usize) -> Result<f64> {
    Ok(table().number(n)?.to_f64().unwrap_or(f64::NAN))
}

/// `B_m(t)` in floating point.
pub fn bernoulli_poly(m: usize, t: f64) -> Result<f64> {
    table().poly(m, t)
}

/// `B_m(t)` in exact rational arithmetic.
pub fn bernoulli_poly_exact(m: usize, t: &BigRational) -> Result<BigRational> {
    table().poly_exact(m, t)
}
