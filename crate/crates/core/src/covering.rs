//! Disjoint covering systems `{a_i (mod n_i)}` and the identity
//! `Σ_s f(x + a_s·y, n_s·y) = f(x, y)` they induce on invariant functions.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::InvariantFunction;
use crate::verify::report::{SampleOutcome, Tally, Witness};
use crate::verify::{GridSpec, VerificationReport};

/// Largest modulus `lcm(n_i)` the residue scan accepts.
pub const MAX_LCM: u64 = 1_000_000_000;

const CHUNK: u64 = 1 << 16;

/// The residue class `a (mod n)` with `0 ≤ a < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidueClass {
    pub a: u64,
    pub n: u64,
}

impl ResidueClass {
    pub fn new(a: i64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("residue class modulus must be positive"));
        }
        let a = i128::from(a).rem_euclid(i128::from(n)) as u64;
        Ok(ResidueClass { a, n })
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.n)
    }
}

/// A non-empty list of residue classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringSystem {
    classes: Vec<ResidueClass>,
}

impl CoveringSystem {
    pub fn new(classes: Vec<ResidueClass>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::invalid("covering system needs at least one class"));
        }
        Ok(CoveringSystem { classes })
    }

    pub fn classes(&self) -> &[ResidueClass] {
        &self.classes
    }

    pub fn lcm(&self) -> BigUint {
        self.classes.iter().fold(BigUint::one(), |acc, c| acc.lcm(&BigUint::from(c.n)))
    }

    /// `Σ 1/n_i`, exactly.
    pub fn density(&self) -> BigRational {
        self.classes
            .iter()
            .fold(BigRational::zero(), |acc, c| acc + BigRational::new(1.into(), c.n.into()))
    }
}

impl fmt::Display for CoveringSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.classes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for CoveringSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_system(s)
    }
}

/// Parses `a/n[,a/n]*` (spaces around items allowed); `a` is reduced mod `n`.
pub fn parse_system(text: &str) -> Result<CoveringSystem> {
    let mut classes = Vec::new();
    let mut offset = 0;
    for item in text.split(',') {
        let lead = item.len() - item.trim_start().len();
        let pos = offset + lead;
        let body = item.trim();
        offset += item.len() + 1;
        let err = |position: usize, message: String| Error::Parse { position, message };
        if body.is_empty() {
            return Err(err(pos, "empty residue class".into()));
        }
        let (a, n) = body
            .split_once('/')
            .ok_or_else(|| err(pos, format!("expected 'a/n', got '{body}'")))?;
        let a: i64 = a
            .trim()
            .parse()
            .map_err(|_| err(pos, format!("residue '{}' is not an integer", a.trim())))?;
        let npos = pos + body.find('/').unwrap_or(0) + 1;
        let n_text = n.trim();
        let n: i64 = n_text
            .parse()
            .map_err(|_| err(npos, format!("modulus '{n_text}' is not an integer")))?;
        if n <= 0 {
            return Err(err(npos, format!("modulus must be positive, got {n}")));
        }
        classes.push(ResidueClass::new(a, n as u64)?);
    }
    CoveringSystem::new(classes)
}

/// Why a system was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Uncovered,
    DoublyCovered,
}

/// Outcome of [`is_disjoint_covering`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringDecision {
    pub accepted: bool,
    pub lcm: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_kind: Option<WitnessKind>,
    /// `Σ 1/n_i` as `p/q`.
    pub density: String,
    pub density_is_one: bool,
}

impl CoveringDecision {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("decision serialization is infallible")
    }
}

/// First uncovered and first doubly covered residue in `[lo, hi)`.
fn scan(classes: &[ResidueClass], lo: u64, hi: u64) -> (Option<u64>, Option<u64>) {
    let mut uncovered = None;
    let mut double = None;
    for r in lo..hi {
        let hits = classes.iter().filter(|c| r % c.n == c.a).take(2).count();
        match hits {
            0 if uncovered.is_none() => uncovered = Some(r),
            2 if double.is_none() => double = Some(r),
            _ => {}
        }
        if uncovered.is_some() {
            break;
        }
    }
    (uncovered, double)
}

/// Decides whether every residue mod `L = lcm(n_i)` lies in exactly one class.
/// The witness is the smallest uncovered residue, else the smallest doubly
/// covered one. `L > MAX_LCM` is a capacity error.
pub fn is_disjoint_covering(sys: &CoveringSystem) -> Result<CoveringDecision> {
    let big = sys.lcm();
    let lcm = match big.to_u64() {
        Some(l) if l <= MAX_LCM => l,
        _ => {
            return Err(Error::Capacity {
                requested: big.to_u64().unwrap_or(u64::MAX),
                limit: MAX_LCM,
            })
        }
    };
    let chunks: Vec<(u64, u64)> = (0..lcm.div_ceil(CHUNK))
        .map(|i| (i * CHUNK, ((i + 1) * CHUNK).min(lcm)))
        .collect();
    let parts: Vec<(Option<u64>, Option<u64>)> =
        chunks.par_iter().map(|&(lo, hi)| scan(sys.classes(), lo, hi)).collect();
    let uncovered = parts.iter().find_map(|p| p.0);
    let double = parts.iter().find_map(|p| p.1);
    let (witness, witness_kind) = match (uncovered, double) {
        (Some(r), _) => (Some(r), Some(WitnessKind::Uncovered)),
        (None, Some(r)) => (Some(r), Some(WitnessKind::DoublyCovered)),
        (None, None) => (None, None),
    };
    let density = sys.density();
    Ok(CoveringDecision {
        accepted: witness.is_none(),
        lcm,
        witness,
        witness_kind,
        density: format!("{}/{}", density.numer(), density.denom()),
        density_is_one: density.is_one(),
    })
}

fn require_accepted(sys: &CoveringSystem) -> Result<()> {
    let d = is_disjoint_covering(sys)?;
    if !d.accepted {
        return Err(Error::Precondition(format!(
            "{sys} is not a disjoint covering system (residue {} {})",
            d.witness.unwrap_or(0),
            match d.witness_kind {
                Some(WitnessKind::DoublyCovered) => "is covered twice",
                _ => "is uncovered",
            }
        )));
    }
    Ok(())
}

fn covering_sum(sys: &CoveringSystem, f: &InvariantFunction, x: f64, y: f64) -> Result<f64> {
    sys.classes()
        .iter()
        .try_fold(0.0, |acc, c| Ok(acc + f.eval(x + c.a as f64 * y, c.n as f64 * y)?))
}

fn certify(sys: &CoveringSystem, f: &InvariantFunction, points: &[(f64, f64)], tol: f64) -> VerificationReport {
    let k = sys.classes().len() as u64;
    let tolerance = tol + k as f64 * f.series_tolerance();
    let outcomes: Vec<SampleOutcome> = points
        .par_iter()
        .map(|&(x, y)| match (covering_sum(sys, f, x, y), f.eval(x, y)) {
            (Ok(lhs), Ok(rhs)) => SampleOutcome {
                witnesses: vec![Witness::new(x, y, k, lhs, rhs)],
                ..SampleOutcome::default()
            },
            _ => SampleOutcome::failed(x, y, k),
        })
        .collect();
    let mut t = Tally::default();
    for o in outcomes {
        t.absorb(o);
    }
    if f.traits().series_defined {
        t.flag("truncation-dominated");
    }
    t.finish(&format!("covering[{sys}]"), f.label(), f.params().clone(), tolerance)
}

/// `|Σ_s f(x + a_s·y, n_s·y) − f(x, y)| ≤ tol` at one point. Witness `n` is
/// the number of classes.
pub fn covering_identity_check(
    sys: &CoveringSystem,
    f: &InvariantFunction,
    x: f64,
    y: f64,
    tol: f64,
) -> Result<VerificationReport> {
    require_accepted(sys)?;
    if !(y > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("covering check needs finite x and y > 0, got ({x}, {y})")));
    }
    Ok(certify(sys, f, &[(x, y)], tol))
}

/// The covering identity over a sample grid.
pub fn check_covering_certificate(
    sys: &CoveringSystem,
    f: &InvariantFunction,
    grid: &GridSpec,
    tol: f64,
) -> Result<VerificationReport> {
    require_accepted(sys)?;
    let points = grid.sample(f)?;
    Ok(certify(sys, f, &points, tol))
}
