//! Exact computation of probabilistic degenerate Fubini polynomials.
//!
//! The crate is layered bottom-up:
//!
//! - [`exact`]: rationals, dense polynomials, truncated power series.
//! - [`combinatorics`]: memoized Stirling, Lah and binomial tables, degenerate
//!   Stirling numbers and partial Bell polynomials.
//! - [`degenerate`]: degenerate Bell and Fubini polynomials (including order `r`).
//! - [`probabilistic`]: random variables given by exact moment sequences and
//!   the probabilistic Stirling, Bell and Fubini families built on iid sums.
//! - [`identity`]: one exact checker per identity, plus the suite runner.

pub mod combinatorics;
pub mod degenerate;
pub mod error;
pub mod exact;
pub mod identity;
pub mod probabilistic;

pub use error::{Error, Result};
pub use exact::{Polynomial, Rational, TruncatedSeries};
