//! The invariant-function descriptor.
//!
//! An [`InvariantFunction`] is an immutable bundle of an evaluation rule
//! `(x, y) ↦ f(x, y)` for `y > 0`, optional analytic partial derivatives, and
//! a description of the set where the function is non-smooth or defined by a
//! special branch. The defining property is the replication identity
//! `Σ_{r=0}^{n-1} f(x + r·y, n·y) = f(x, y)` for every positive integer `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Evaluation rule over `(x, y)`.
pub type Rule = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// A real function of one real variable, used by the series constructors.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Named real parameters of a descriptor. Integer parameters are stored as
/// integral `f64` values.
pub type Params = BTreeMap<String, f64>;

/// Relative tolerance used to decide that `x/y` sits on the integer lattice.
pub const LATTICE_REL_TOL: f64 = 1e-9;

/// Returns the integer `k` when `u` is within the lattice tolerance of it.
pub fn snap_to_integer(u: f64) -> Option<f64> {
    let k = u.round();
    if (u - k).abs() <= LATTICE_REL_TOL * u.abs().max(1.0) {
        Some(k)
    } else {
        None
    }
}

/// A point of evaluation with strictly positive `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalPoint {
    x: f64,
    y: f64,
}

impl EvalPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(format!("non-finite point ({x}, {y})")));
        }
        if y <= 0.0 {
            return Err(Error::invalid(format!("y must be positive, got {y}")));
        }
        Ok(EvalPoint { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Whether lattice points carry a finite branch value or are excluded poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    Branch,
    Pole,
}

/// Which lattice indices are present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeSide {
    All,
    NonPositive,
    NonNegative,
}

impl LatticeSide {
    fn admits(self, k: f64) -> bool {
        match self {
            LatticeSide::All => true,
            LatticeSide::NonPositive => k <= 0.0,
            LatticeSide::NonNegative => k >= 0.0,
        }
    }

    fn flipped(self) -> Self {
        match self {
            LatticeSide::All => LatticeSide::All,
            LatticeSide::NonPositive => LatticeSide::NonNegative,
            LatticeSide::NonNegative => LatticeSide::NonPositive,
        }
    }
}

/// The point set `{ offset + (phase + k)·y : k ∈ ℤ, k admitted by side }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub offset: f64,
    pub phase: f64,
    pub kind: LatticeKind,
    pub side: LatticeSide,
}

impl Lattice {
    /// `x/y ∈ ℤ`.
    pub const fn integers(kind: LatticeKind) -> Self {
        Lattice {
            offset: 0.0,
            phase: 0.0,
            kind,
            side: LatticeSide::All,
        }
    }

    pub const fn with_side(mut self, side: LatticeSide) -> Self {
        self.side = side;
        self
    }

    pub const fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub const fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    /// Continuous lattice index `u`; lattice points have `u ∈ ℤ`.
    pub fn index(&self, x: f64, y: f64) -> f64 {
        (x - self.offset) / y - self.phase
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        snap_to_integer(self.index(x, y)).is_some_and(|k| self.side.admits(k))
    }

    /// Distance, in units of `y`, from `x` to the nearest admitted lattice point.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let u = self.index(x, y);
        let k = u.round();
        match self.side {
            LatticeSide::All => (u - k).abs(),
            LatticeSide::NonPositive => (u - k.min(0.0)).abs(),
            LatticeSide::NonNegative => (u - k.max(0.0)).abs(),
        }
    }

    /// Lattice points strictly inside `(lo, hi)`, at most `cap` of them.
    pub fn points_in(&self, y: f64, lo: f64, hi: f64, cap: usize) -> Vec<f64> {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let k0 = self.index(lo, y).floor();
        let k1 = self.index(hi, y).ceil();
        let mut out = Vec::new();
        let mut k = k0;
        while k <= k1 && out.len() < cap {
            if self.side.admits(k) {
                let p = self.offset + (self.phase + k) * y;
                if p > lo && p < hi {
                    out.push(p);
                }
            }
            k += 1.0;
        }
        out
    }

    /// Lattice of `x ↦ f(b + c·x, c·y)`.
    pub fn affine(&self, b: f64, c: f64) -> Self {
        Lattice {
            offset: (self.offset - b) / c,
            ..*self
        }
    }

    /// Lattice of `x ↦ f(y - x, y)`.
    pub fn reflected(&self) -> Self {
        Lattice {
            offset: -self.offset,
            phase: 1.0 - self.phase,
            kind: self.kind,
            side: self.side.flipped(),
        }
    }
}

/// Behavioral properties that steer the numerical engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traits {
    /// `a ↦ a·f(x, a)` is smooth near `0⁺`, so Richardson extrapolation applies.
    pub smooth_scaled_limit: bool,
    /// Absolutely integrable in `x` over a period.
    pub integrable: bool,
    /// Value defined through a truncated series.
    pub series_defined: bool,
    /// Built by a finite-difference fallback somewhere in its construction.
    pub finite_difference: bool,
}

impl Default for Traits {
    fn default() -> Self {
        Traits {
            smooth_scaled_limit: true,
            integrable: true,
            series_defined: false,
            finite_difference: false,
        }
    }
}

/// Immutable descriptor of an invariant function.
#[derive(Clone)]
pub struct InvariantFunction {
    name: String,
    params: Params,
    value: Rule,
    generic: Option<Rule>,
    dx: Option<Rule>,
    dy: Option<Rule>,
    lattices: Vec<Lattice>,
    series_tolerance: f64,
    traits: Traits,
}

impl fmt::Debug for InvariantFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvariantFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("has_generic", &self.generic.is_some())
            .field("has_dx", &self.dx.is_some())
            .field("has_dy", &self.dy.is_some())
            .field("lattices", &self.lattices)
            .field("series_tolerance", &self.series_tolerance)
            .field("traits", &self.traits)
            .finish()
    }
}

impl InvariantFunction {
    pub fn new<F>(name: impl Into<String>, value: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        InvariantFunction {
            name: name.into(),
            params: Params::new(),
            value: Arc::new(value),
            generic: None,
            dx: None,
            dy: None,
            lattices: Vec::new(),
            series_tolerance: 0.0,
            traits: Traits::default(),
        }
    }

    pub(crate) fn from_rule(name: impl Into<String>, value: Rule) -> Self {
        InvariantFunction {
            name: name.into(),
            params: Params::new(),
            value,
            generic: None,
            dx: None,
            dy: None,
            lattices: Vec::new(),
            series_tolerance: 0.0,
            traits: Traits::default(),
        }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    /// Off-lattice formula continued up to the singular set. Quadrature
    /// uses it so that branch values on the lattice never leak into
    /// integrals through the snapping window.
    pub fn with_generic<F>(mut self, generic: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        self.generic = Some(Arc::new(generic));
        self
    }

    pub(crate) fn with_generic_rule(mut self, generic: Option<Rule>) -> Self {
        self.generic = generic;
        self
    }

    pub fn with_dx<F>(mut self, dx: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        self.dx = Some(Arc::new(dx));
        self
    }

    pub fn with_dy<F>(mut self, dy: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        self.dy = Some(Arc::new(dy));
        self
    }

    pub(crate) fn with_dx_rule(mut self, dx: Option<Rule>) -> Self {
        self.dx = dx;
        self
    }

    pub(crate) fn with_dy_rule(mut self, dy: Option<Rule>) -> Self {
        self.dy = dy;
        self
    }

    pub fn with_lattice(mut self, lattice: Lattice) -> Self {
        self.lattices.push(lattice);
        self
    }

    pub(crate) fn with_lattices(mut self, lattices: Vec<Lattice>) -> Self {
        self.lattices = lattices;
        self
    }

    pub fn with_series_tolerance(mut self, tol: f64) -> Self {
        self.series_tolerance = tol;
        self
    }

    pub fn with_traits(mut self, traits: Traits) -> Self {
        self.traits = traits;
        self
    }

    /// Marks `a·f(x,a)` as non-smooth in `a` (step-like or oscillating entries).
    pub fn rough(mut self) -> Self {
        self.traits.smooth_scaled_limit = false;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// `name(k=v,...)`, or the bare name when there are no parameters.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let body: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            format!("{}({})", self.name, body.join(","))
        }
    }

    pub fn lattices(&self) -> &[Lattice] {
        &self.lattices
    }

    pub fn series_tolerance(&self) -> f64 {
        self.series_tolerance
    }

    pub fn traits(&self) -> Traits {
        self.traits
    }

    pub fn has_dx(&self) -> bool {
        self.dx.is_some()
    }

    pub fn has_dy(&self) -> bool {
        self.dy.is_some()
    }

    pub(crate) fn value_rule(&self) -> &Rule {
        &self.value
    }

    pub(crate) fn generic_rule(&self) -> Option<&Rule> {
        self.generic.as_ref()
    }

    /// Rule used inside integrals: the generic formula when present.
    pub(crate) fn integrand_rule(&self) -> &Rule {
        self.generic.as_ref().unwrap_or(&self.value)
    }

    pub(crate) fn dx_rule(&self) -> Option<&Rule> {
        self.dx.as_ref()
    }

    pub(crate) fn dy_rule(&self) -> Option<&Rule> {
        self.dy.as_ref()
    }

    /// Evaluates at `(x, y)`, rejecting non-positive `y`.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(format!(
                "{}: invalid point ({x}, {y})",
                self.label()
            )));
        }
        (self.value)(x, y)
    }

    pub fn evaluate(&self, p: EvalPoint) -> Result<f64> {
        (self.value)(p.x, p.y)
    }

    /// Analytic `∂f/∂x`, if the descriptor carries one.
    pub fn dx(&self, x: f64, y: f64) -> Option<Result<f64>> {
        self.dx.as_ref().map(|d| d(x, y))
    }

    /// Analytic `∂f/∂y`, if the descriptor carries one.
    pub fn dy(&self, x: f64, y: f64) -> Option<Result<f64>> {
        self.dy.as_ref().map(|d| d(x, y))
    }

    pub fn singular_in_x(&self, x: f64, y: f64) -> bool {
        self.lattices.iter().any(|l| l.contains(x, y))
    }

    /// Smallest lattice distance (in units of `y`), or `∞` with no singular set.
    pub fn singular_distance(&self, x: f64, y: f64) -> f64 {
        self.lattices
            .iter()
            .map(|l| l.distance(x, y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Sorted singular points in `(lo, hi)` at scale `y`.
    pub fn singular_points(&self, y: f64, lo: f64, hi: f64) -> Vec<f64> {
        const CAP: usize = 4096;
        let mut pts: Vec<f64> = self
            .lattices
            .iter()
            .flat_map(|l| l.points_in(y, lo, hi, CAP))
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_point_rejects_nonpositive_y() {
        assert!(EvalPoint::new(1.0, 0.0).is_err());
        assert!(EvalPoint::new(1.0, -2.0).is_err());
        assert!(EvalPoint::new(f64::NAN, 1.0).is_err());
        let p = EvalPoint::new(1.0, 2.0).unwrap();
        assert_eq!((p.x(), p.y()), (1.0, 2.0));
    }

    #[test]
    fn lattice_detection_rule() {
        assert_eq!(snap_to_integer(3.0), Some(3.0));
        assert_eq!(snap_to_integer(3.0 + 1e-12), Some(3.0));
        assert_eq!(snap_to_integer(3.0 + 1e-6), None);
        assert_eq!(snap_to_integer(1e10 + 1.0), Some(1e10 + 1.0));
    }

    #[test]
    fn lattice_points_and_transforms() {
        let l = Lattice::integers(LatticeKind::Branch);
        assert_eq!(l.points_in(0.5, -1.0, 1.0, 100), vec![-0.5, 0.0, 0.5]);
        let half = l.with_side(LatticeSide::NonPositive);
        assert_eq!(half.points_in(1.0, -2.5, 2.5, 100), vec![-2.0, -1.0, 0.0]);
        assert!(half.contains(-3.0, 1.0));
        assert!(!half.contains(3.0, 1.0));
        assert_eq!(half.distance(2.3, 1.0), 2.3);

        // f(y - x, y) is singular where y - x is: x = y - p.
        let shifted = l.with_offset(0.3);
        let r = shifted.reflected();
        for &p in &shifted.points_in(1.0, -3.0, 3.0, 10) {
            assert!(r.contains(1.0 - p, 1.0));
        }
        let hr = half.reflected();
        assert!(hr.contains(3.0, 1.0));
        assert!(!hr.contains(-1.0, 1.0));

        let a = shifted.affine(0.5, 2.0);
        // f(0.5 + 2x, 2y) singular where 0.5 + 2x = 0.3 + 2k
        assert!(a.contains(-0.1, 0.5));
    }

    #[test]
    fn label_formatting() {
        let mut p = Params::new();
        p.insert("a".into(), 2.0);
        let f = InvariantFunction::new("E5", |_, _| Ok(0.0)).with_params(p);
        assert_eq!(f.label(), "E5(a=2)");
        assert!(f.eval(0.0, 0.0).is_err());
    }
}
