//! Exact value carriers.

mod gf;
mod hahn;
mod logvalue;

pub use gf::{is_prime, GaloisField, MAX_FIELD_ORDER};
pub use hahn::HahnElement;
pub use logvalue::LogValue;

use num_bigint::BigInt;

pub type Rational = num_rational::BigRational;

/// `num/den` as an exact rational. Panics if `den == 0`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
