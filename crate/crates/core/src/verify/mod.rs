//! Seeded, tolerance-checked verification of the identities satisfied by
//! invariant functions.
//!
//! Sample evaluation runs as a parallel map; reduction is sequential in
//! sample order, so reports are identical for any thread count.

pub mod checks;
pub mod grid;
pub mod report;
pub mod suite;

pub use checks::{
    check_bernoulli_convolution, check_exchange, check_integral_limit, check_invariance, check_known_integrals,
    check_parity, check_pointwise, check_product_integral, check_step_limit, check_y_derivative_identities,
    check_zeta_bernoulli_bridge, check_zeta_convolution, KnownIntegral, KnownIntegralValue, Parity,
};
pub use grid::GridSpec;
pub use report::{VerificationReport, Witness};
pub use suite::{catalog_entries, run_all, CLOSED_FORM_TOL, SERIES_TOL};
