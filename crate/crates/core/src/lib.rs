//! Exact computations with radius-of-convergence profiles of p-adic
//! differential modules.
//!
//! All log-scale quantities are measured in units of `log p` and carried
//! exactly as elements of ℚ(√2) ([`LogValue`]). A radius `R` at the Gauss
//! point of radius `ρ` is recorded as `f̂ = −log_p R` against `r̂ = −log_p ρ`,
//! so the classical constants `p^{−1/(p−1)}` and `p^{−p/(p−1)}` become the
//! rationals `1/(p−1)` and `p/(p−1)`.

pub mod berkovich;
pub mod diffmod;
pub mod dwork;
mod error;
pub mod newton;
pub mod plfun;
pub mod scalars;
pub mod valuation;

pub use error::{Error, Result};
pub use plfun::{Interval, PLFun};
pub use scalars::{q, qi, GaloisField, HahnElement, LogValue, Rational};
