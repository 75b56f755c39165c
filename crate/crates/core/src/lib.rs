//! Exact bookkeeping for bielliptic-type fibred surfaces: line bundles and
//! vector bundles on an elliptic curve, the Chow ring of a projective
//! bundle over it, complete-intersection surface invariants, relative
//! canonical algebra ledgers and an isogeny cross-check.

pub mod bundle_calc;
pub mod chow_fibration;
pub mod cli;
pub mod curve_pic;
pub mod error;
pub mod isogeny_oracle;
pub mod relcan_ledger;

pub use error::{Error, Result};

/// Exact rational numbers used for slopes and degrees.
pub type Rational = num_rational::Ratio<i64>;
