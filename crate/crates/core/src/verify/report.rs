//! Verification reports and their deterministic aggregation.

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

use crate::function::Params;

/// JSON has no non-finite numbers; they are written as `±f64::MAX`
/// (NaN as `+f64::MAX`) and the report gains a `non-finite` flag.
fn finite<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    let w = if v.is_finite() {
        *v
    } else if *v == f64::NEG_INFINITY {
        -f64::MAX
    } else {
        f64::MAX
    };
    s.serialize_f64(w)
}

/// One `(x, y, n)` probe with both sides of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "finite")]
    pub x: f64,
    #[serde(serialize_with = "finite")]
    pub y: f64,
    pub n: u64,
    #[serde(serialize_with = "finite")]
    pub lhs: f64,
    #[serde(serialize_with = "finite")]
    pub rhs: f64,
}

impl Witness {
    pub fn new(x: f64, y: f64, n: u64, lhs: f64, rhs: f64) -> Self {
        Witness { x, y, n, lhs, rhs }
    }

    /// `|lhs − rhs|`, with NaN mapped to `+∞` so failures dominate.
    pub fn error(&self) -> f64 {
        let e = (self.lhs - self.rhs).abs();
        if e.is_nan() {
            f64::INFINITY
        } else {
            e
        }
    }
}

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub property: String,
    pub function: String,
    pub params: Params,
    pub samples: usize,
    #[serde(serialize_with = "finite")]
    pub max_abs_error: f64,
    #[serde(serialize_with = "finite")]
    pub tolerance: f64,
    pub pass: bool,
    pub worst_witness: Witness,
    pub flags: Vec<String>,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization is infallible")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}

/// Result of checking one sample point.
#[derive(Debug, Clone, Default)]
pub(crate) struct SampleOutcome {
    pub witnesses: Vec<Witness>,
    pub flags: Vec<&'static str>,
    /// The sample was excluded (e.g. an unconverged limit); it still counts as drawn.
    pub skipped: bool,
}

impl SampleOutcome {
    pub fn flag(&mut self, f: &'static str) {
        if !self.flags.contains(&f) {
            self.flags.push(f);
        }
    }

    pub fn skip(flag: &'static str) -> Self {
        SampleOutcome { witnesses: Vec::new(), flags: vec![flag], skipped: true }
    }

    pub fn failed(x: f64, y: f64, n: u64) -> Self {
        SampleOutcome {
            witnesses: vec![Witness::new(x, y, n, f64::NAN, f64::NAN)],
            flags: vec!["evaluation-error"],
            skipped: false,
        }
    }
}

/// Ordered reduction: the first witness attaining the maximum error wins,
/// so the result only depends on sample order.
#[derive(Debug, Default)]
pub(crate) struct Tally {
    samples: usize,
    skipped: usize,
    worst: Option<Witness>,
    max_err: f64,
    flags: BTreeSet<String>,
}

impl Tally {
    pub fn absorb(&mut self, o: SampleOutcome) {
        self.samples += 1;
        if o.skipped {
            self.skipped += 1;
        }
        for f in o.flags {
            self.flags.insert(f.to_string());
        }
        for w in o.witnesses {
            self.push(w);
        }
    }

    pub fn push(&mut self, w: Witness) {
        let e = w.error();
        if self.worst.is_none() || e > self.max_err {
            self.max_err = e;
            self.worst = Some(w);
        }
    }

    pub fn flag(&mut self, f: &str) {
        self.flags.insert(f.to_string());
    }

    pub fn finish(
        mut self,
        property: &str,
        function: String,
        params: Params,
        tolerance: f64,
    ) -> VerificationReport {
        if self.worst.is_none() {
            self.flag("no-witnesses");
        }
        let worst = self.worst.unwrap_or(Witness::new(0.0, 0.0, 0, 0.0, 0.0));
        let non_finite = [worst.x, worst.y, worst.lhs, worst.rhs, self.max_err]
            .iter()
            .any(|v| !v.is_finite());
        if non_finite {
            self.flag("non-finite");
        }
        VerificationReport {
            property: property.to_string(),
            function,
            params,
            samples: self.samples,
            max_abs_error: self.max_err,
            tolerance,
            pass: self.max_err <= tolerance,
            worst_witness: worst,
            flags: self.flags.into_iter().collect(),
        }
    }
}
