#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Replicative functions `f(x, y)` with `Σ_{r<n} f(x + r·y, n·y) = f(x, y)`:
//! a catalog of closed forms, closure combinators, a convolution algebra,
//! covering-system certificates and a seeded verification engine.

pub mod algebra;
pub mod catalog;
pub mod combinators;
pub mod covering;
pub mod error;
pub mod function;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod verify;

pub use catalog::{make, make_from_spec, parse_params, parse_spec, CatalogId};
pub use covering::{is_disjoint_covering, parse_system, CoveringSystem};
pub use error::{Error, Result};
pub use function::{EvalPoint, InvariantFunction, Lattice, LatticeKind, LatticeSide, Params, Traits};
pub use verify::{GridSpec, VerificationReport};
