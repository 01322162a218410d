//! Exact counts and analytic estimates for integers `n ≤ x` that are a
//! product of exactly `k` primes, each in `]B, C]`.
//!
//! - [`primes`]: sieve, `π`, `li`, and the explicit bounds `Ê`.
//! - [`exact`]: brute-force `κ^k` (ordered tuples) and `π^k` (distinct products).
//! - [`hills`]: the piecewise polynomial hills `m̃^k`.
//! - [`closedform`]: normalized closed forms and the error constants.
//! - [`integral`]: the nested integral recursions `κ̃, κ̂, λ̃, λ̂, ν̃, η̃`.
//! - [`multiplicity`]: sortings, types and the non-squarefree correction.
//! - [`sturmverify`]: exact Sturm-sequence positivity checks.

pub mod closedform;
pub mod error;
pub mod exact;
pub mod hills;
pub mod integral;
pub mod multiplicity;
pub mod poly;
pub mod primes;
pub mod quad;
pub mod sturmverify;

pub use error::{Error, Result};
pub use exact::GrainParams;
pub use primes::ErrorBoundMode;
