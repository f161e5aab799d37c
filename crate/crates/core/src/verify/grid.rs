//! Seeded sample grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{InvariantFunction, LatticeKind};

const MAX_DRAWS_PER_SAMPLE: usize = 1000;

/// Deterministic sampling specification. `x_range` is in units of `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub seed: u64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub samples: usize,
    pub n_max: usize,
    pub eps_sing: f64,
    /// Explicit `(x, y)` points; when set, no random draws and no lattice probes.
    pub points: Option<Vec<(f64, f64)>>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            seed: 42,
            x_range: (-3.0, 3.0),
            y_range: (0.25, 4.0),
            samples: 64,
            n_max: 10,
            eps_sing: 1e-6,
            points: None,
        }
    }
}

impl GridSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_points(mut self, points: Vec<(f64, f64)>) -> Self {
        self.points = Some(points);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok_range = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if self.samples == 0 {
            return Err(Error::invalid("grid: samples must be at least 1"));
        }
        if self.n_max == 0 {
            return Err(Error::invalid("grid: n_max must be at least 1"));
        }
        if !ok_range(self.x_range) {
            return Err(Error::invalid(format!("grid: degenerate x range {:?}", self.x_range)));
        }
        if !ok_range(self.y_range) || self.y_range.0 <= 0.0 {
            return Err(Error::invalid(format!("grid: y range {:?} must be positive and non-degenerate", self.y_range)));
        }
        if !(self.eps_sing >= 0.0) {
            return Err(Error::invalid(format!("grid: negative singularity margin {}", self.eps_sing)));
        }
        if let Some(pts) = &self.points {
            if pts.is_empty() {
                return Err(Error::invalid("grid: explicit point list is empty"));
            }
            if let Some(&(x, y)) = pts.iter().find(|(x, y)| !x.is_finite() || !(*y > 0.0)) {
                return Err(Error::invalid(format!("grid: invalid point ({x}, {y})")));
            }
        }
        Ok(())
    }

    /// Draws sample points for `f`, rejecting those within `eps_sing·y` of
    /// its singular set and those where `f` itself is undefined.
    pub fn sample(&self, f: &InvariantFunction) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        if let Some(pts) = &self.points {
            return Ok(pts.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.samples);
        let budget = self.samples * MAX_DRAWS_PER_SAMPLE;
        let mut draws = 0;
        while out.len() < self.samples {
            if draws >= budget {
                return Err(Error::Precondition(format!(
                    "grid: only {} of {} admissible points for {} after {budget} draws",
                    out.len(),
                    self.samples,
                    f.label()
                )));
            }
            draws += 1;
            let y = rng.random_range(self.y_range.0..self.y_range.1);
            let x = y * rng.random_range(self.x_range.0..self.x_range.1);
            if f.singular_distance(x, y) < self.eps_sing {
                continue;
            }
            if f.eval(x, y).is_err() {
                continue;
            }
            out.push((x, y));
        }
        Ok(out)
    }

    /// Binary-exact points on `f`'s branch lattices (poles excluded).
    pub fn lattice_probes(&self, f: &InvariantFunction) -> Vec<(f64, f64)> {
        if self.points.is_some() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for l in f.lattices().iter().filter(|l| l.kind == LatticeKind::Branch) {
            for &y in &[0.5, 1.0, 2.0] {
                for k in -2..=2 {
                    let x = l.offset + (l.phase + k as f64) * y;
                    if l.contains(x, y) && f.eval(x, y).is_ok() && !out.contains(&(x, y)) {
                        out.push((x, y));
                    }
                }
            }
        }
        out
    }
}
