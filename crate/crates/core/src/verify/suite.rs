//! The full verification battery behind `verify --all`.

use std::f64::consts::E;

use rayon::prelude::*;

use super::checks::*;
use super::grid::GridSpec;
use super::report::VerificationReport;
use crate::algebra::{antiderivative, convolve};
use crate::catalog::{make, CatalogId};
use crate::covering::{check_covering_certificate, parse_system};
use crate::error::Result;
use crate::function::{InvariantFunction, Params};
use crate::series::{from_fourier, from_tail_series, scalar, FourierMode};

/// Pass threshold for closed-form entries.
pub const CLOSED_FORM_TOL: f64 = 1e-8;
/// Pass threshold for series-defined entries.
pub const SERIES_TOL: f64 = 1e-6;

fn entry(id: CatalogId, kv: &[(&str, f64)]) -> InvariantFunction {
    let p: Params = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    make(id, &p).expect("suite parameters are valid")
}

/// Every catalog entry at the suite's parameter values, followed by one
/// Fourier-series and one shifted-sum construction.
pub fn catalog_entries() -> Vec<InvariantFunction> {
    use CatalogId::*;
    let mut out = vec![entry(E1, &[])];
    for m in [1.0, 2.0, 3.0, 6.0] {
        out.push(entry(E2, &[("m", m)]));
    }
    out.push(entry(E3a, &[]));
    out.push(entry(E3b, &[]));
    for a in [2.0, 0.5, E] {
        out.push(entry(E4, &[("a", a)]));
    }
    for a in [2.0, 0.5, E] {
        out.push(entry(E5, &[("a", a)]));
    }
    for id in [E6c, E6s] {
        for r in [0.5, 2.0] {
            for theta in [0.0, 1.0] {
                out.push(entry(id, &[("r", r), ("theta", theta)]));
            }
        }
    }
    for id in [E7, E8] {
        for r in [0.5, 2.0] {
            out.push(entry(id, &[("r", r)]));
        }
    }
    out.push(entry(E9, &[("r", 0.5)]));
    out.push(entry(E10, &[]));
    out.push(entry(E11, &[]));
    out.push(entry(E12, &[]));
    for s in [2.0, 3.0, -1.0, -2.0] {
        out.push(entry(E13, &[("s", s)]));
    }
    out.push(entry(E14, &[]));
    out.push(from_fourier(scalar(|t| (-t).exp()), FourierMode::Cos, 1e-10).expect("geometric coefficients"));
    out.push(from_tail_series(scalar(|t| (-t * t).exp()), 1e-12).expect("gaussian terms"));
    out
}

fn default_tol(f: &InvariantFunction) -> f64 {
    if f.traits().series_defined {
        SERIES_TOL
    } else {
        CLOSED_FORM_TOL
    }
}

type Task = Box<dyn Fn() -> Vec<VerificationReport> + Send + Sync>;

fn task<F: Fn() -> Vec<VerificationReport> + Send + Sync + 'static>(f: F) -> Task {
    Box::new(f)
}

fn tasks(grid: &GridSpec) -> Vec<Task> {
    use CatalogId::*;
    let mut out: Vec<Task> = Vec::new();

    for f in catalog_entries() {
        let g = grid.clone();
        let step = !(f.name() == "E13" && f.params().get("s").is_some_and(|&s| s > 1.0));
        out.push(task(move || {
            let tol = default_tol(&f);
            let mut v = vec![check_invariance(&f, &g, tol), check_exchange(&f, 2, 3, &g, tol)];
            if step {
                v.push(check_step_limit(&f, &g.clone().with_samples(16), tol));
            }
            v
        }));
    }

    let probes = grid.clone().with_samples(9);
    let limit_set = vec![
        entry(E1, &[]),
        entry(E2, &[("m", 1.0)]),
        entry(E2, &[("m", 2.0)]),
        entry(E2, &[("m", 3.0)]),
        entry(E3a, &[]),
        entry(E5, &[("a", 2.0)]),
        entry(E9, &[("r", 0.5)]),
        entry(E10, &[]),
        entry(E14, &[]),
    ];
    for f in limit_set {
        let g = probes.clone();
        out.push(task(move || vec![check_integral_limit(&f, &g, 1e-6)]));
    }

    let smooth = vec![
        entry(E1, &[]),
        entry(E2, &[("m", 1.0)]),
        entry(E2, &[("m", 2.0)]),
        entry(E2, &[("m", 3.0)]),
        entry(E5, &[("a", 2.0)]),
        entry(E5, &[("a", 0.5)]),
        entry(E6c, &[("r", 2.0), ("theta", 1.0)]),
        entry(E6s, &[("r", 2.0), ("theta", 1.0)]),
        entry(E7, &[("r", 0.5)]),
        entry(E8, &[("r", 0.5)]),
        entry(E9, &[("r", 0.5)]),
        entry(E13, &[("s", -2.0)]),
    ];
    let small = grid.clone().with_samples(16);
    for f in smooth {
        let g = small.clone();
        out.push(task(move || vec![check_y_derivative_identities(&f, &g, 1e-6)]));
    }

    let parity = vec![
        (entry(E2, &[("m", 1.0)]), Parity::Odd),
        (entry(E2, &[("m", 2.0)]), Parity::Even),
        (entry(E3b, &[]), Parity::Odd),
        (entry(E8, &[("r", 0.5)]), Parity::Odd),
        (entry(E9, &[("r", 0.5)]), Parity::Even),
        (entry(E10, &[]), Parity::Even),
    ];
    for (f, p) in parity {
        let g = small.clone();
        out.push(task(move || vec![check_parity(&f, p, &g, 1e-8)]));
    }

    let pairs = vec![
        (entry(E1, &[]), entry(E1, &[])),
        (entry(E5, &[("a", 2.0)]), entry(E1, &[])),
        (entry(E2, &[("m", 1.0)]), entry(E2, &[("m", 1.0)])),
        (entry(E2, &[("m", 1.0)]), entry(E9, &[("r", 0.5)])),
        (entry(E5, &[("a", 2.0)]), entry(E9, &[("r", 0.5)])),
    ];
    for (a, b) in pairs {
        let g = grid.clone().with_n_max(grid.n_max.min(6));
        out.push(task(move || {
            let mut v = vec![check_product_integral(&a, &b, &[1.0, 0.7, 2.5], 1e-7)];
            if let Ok(c) = convolve(&a, &b, 1e-11) {
                v.push(check_invariance(&c, &g, CLOSED_FORM_TOL));
            }
            v
        }));
    }

    let twenty = grid.clone().with_samples(20);
    out.push(task(move || {
        let mut v = Vec::new();
        if let Ok(a) = antiderivative(&entry(E1, &[]), 1e-12) {
            v.push(check_pointwise("antiderivative", &a, &entry(E2, &[("m", 1.0)]), &twenty, 1e-9));
        }
        if let Ok(a) = antiderivative(&entry(E2, &[("m", 1.0)]), 1e-12) {
            let half = crate::combinators::linear_combination(&[(0.5, entry(E2, &[("m", 2.0)]))])
                .expect("single term");
            v.push(check_pointwise("antiderivative", &a, &half, &twenty, 1e-8));
        }
        v
    }));

    let unit: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    for m in 1..=3 {
        for n in 1..=3 {
            let xs = unit.clone();
            out.push(task(move || vec![check_bernoulli_convolution(m, n, &[1.0, 0.7], &xs, 1e-8)]));
        }
    }

    let interior: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    {
        let xs = interior.clone();
        out.push(task(move || vec![check_zeta_bernoulli_bridge(&[2, 4], &xs, 1e-6)]));
    }
    let odd: Vec<f64> = vec![0.1, 0.3, 0.5, 0.7, 0.9];
    for (a, b, tol) in [(2.0, 2.0, 1e-8), (2.0, 3.0, 1e-8), (1.5, 2.5, 1e-5)] {
        let xs = odd.clone();
        out.push(task(move || vec![check_zeta_convolution(a, b, 1.0, &xs, tol)]));
    }

    out.push(task(|| vec![check_known_integrals(1e-8)]));

    let nine = grid.clone().with_samples(9);
    out.push(task(move || {
        let sys = parse_system("0/2,1/4,3/4").expect("literal system");
        [
            entry(E5, &[("a", 2.0)]),
            entry(E2, &[("m", 2.0)]),
            entry(E10, &[]),
            entry(E11, &[]),
        ]
        .iter()
        .filter_map(|f| check_covering_certificate(&sys, f, &nine, 1e-8).ok())
        .collect()
    }));

    out
}

/// Runs the whole battery on `grid` (whose seed and sizes flow into every
/// sampled check). Reports are sorted by property id, then function label.
pub fn run_all(grid: &GridSpec) -> Result<Vec<VerificationReport>> {
    grid.validate()?;
    let mut reports: Vec<VerificationReport> = tasks(grid).par_iter().flat_map(|t| t()).collect();
    reports.sort_by(|a, b| {
        (a.property.as_str(), a.function.as_str())
            .cmp(&(b.property.as_str(), b.function.as_str()))
            .then_with(|| a.to_json().cmp(&b.to_json()))
    });
    Ok(reports)
}
