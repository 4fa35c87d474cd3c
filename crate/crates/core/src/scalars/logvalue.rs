use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// An element `a + b·√2` of the real quadratic field ℚ(√2).
///
/// Log-radii, valuations and slopes all live here. The irrational part is
/// what realizes values outside the divisible hull of a rational value group.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LogValue {
    a: Rational,
    b: Rational,
}

impl LogValue {
    pub fn new(a: Rational, b: Rational) -> Self {
        LogValue { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        LogValue { a, b: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `num/den` as a rational log-value. Panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::rational(super::q(num, den))
    }

    pub fn sqrt2() -> Self {
        LogValue { a: Rational::zero(), b: Rational::one() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Sign of `a + b√2` under the real embedding, decided by squaring.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // opposite signs: |a| vs |b|√2, i.e. a² vs 2b²
            (sa, _) => {
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * Rational::from_integer(BigInt::from(2));
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// One value strictly positive and the other strictly negative.
    pub fn opposite_sign(&self, other: &Self) -> bool {
        matches!(
            (self.signum(), other.signum()),
            (Ordering::Less, Ordering::Greater) | (Ordering::Greater, Ordering::Less)
        )
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        LogValue { a: &self.a * c, b: &self.b * c }
    }

    /// Field norm `a² − 2b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(BigInt::from(2))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(LogValue { a: &self.a / &n, b: -&self.b / &n })
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|r| self * &r)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Midpoint `(x + y)/2`.
    pub fn midpoint(&self, other: &Self) -> Self {
        (self + other).scale(&super::q(1, 2))
    }

    /// True if the value is a rational with denominator dividing `n`.
    pub fn in_lattice(&self, n: &BigInt) -> bool {
        self.is_rational() && (&self.a * Rational::from_integer(n.clone())).is_integer()
    }

    /// Floating approximation, for plotting only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rational> for LogValue {
    fn from(a: Rational) -> Self {
        LogValue::rational(a)
    }
}

impl From<i64> for LogValue {
    fn from(n: i64) -> Self {
        LogValue::from_int(n)
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}√2", self.b)
        } else if self.b.is_negative() {
            write!(f, "{}-{}√2", self.a, -&self.b)
        } else {
            write!(f, "{}+{}√2", self.a, self.b)
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b LogValue> for &'a LogValue {
            type Output = LogValue;
            fn $m(self, rhs: &'b LogValue) -> LogValue {
                let f: fn(&LogValue, &LogValue) -> LogValue = $body;
                f(self, rhs)
            }
        }
        impl $tr<LogValue> for LogValue {
            type Output = LogValue;
            fn $m(self, rhs: LogValue) -> LogValue {
                (&self).$m(&rhs)
            }
        }
        impl<'b> $tr<&'b LogValue> for LogValue {
            type Output = LogValue;
            fn $m(self, rhs: &'b LogValue) -> LogValue {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<LogValue> for &'a LogValue {
            type Output = LogValue;
            fn $m(self, rhs: LogValue) -> LogValue {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| LogValue { a: &x.a + &y.a, b: &x.b + &y.b });
forward_binop!(Sub, sub, |x, y| LogValue { a: &x.a - &y.a, b: &x.b - &y.b });
forward_binop!(Mul, mul, |x, y| {
    let two = Rational::from_integer(BigInt::from(2));
    LogValue {
        a: &x.a * &y.a + &x.b * &y.b * two,
        b: &x.a * &y.b + &x.b * &y.a,
    }
});
forward_binop!(Div, div, |x, y| x.checked_div(y).expect("division of LogValue by zero"));

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue { a: -self.a, b: -self.b }
    }
}

impl Neg for &LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue { a: -&self.a, b: -&self.b }
    }
}

impl AddAssign<&LogValue> for LogValue {
    fn add_assign(&mut self, rhs: &LogValue) {
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl SubAssign<&LogValue> for LogValue {
    fn sub_assign(&mut self, rhs: &LogValue) {
        self.a -= &rhs.a;
        self.b -= &rhs.b;
    }
}

impl std::iter::Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> Self {
        iter.fold(LogValue::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a LogValue> for LogValue {
    fn sum<I: Iterator<Item = &'a LogValue>>(iter: I) -> Self {
        iter.fold(LogValue::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;
    use proptest::prelude::*;

    fn lv(a: (i64, i64), b: (i64, i64)) -> LogValue {
        LogValue::new(q(a.0, a.1), q(b.0, b.1))
    }

    #[test]
    fn cmp_examples() {
        // 1 < √2 since 1² < 2·1²
        assert_eq!(lv((1, 1), (0, 1)).cmp(&lv((0, 1), (1, 1))), Ordering::Less);
        // 3 > 2√2 since 9 > 8
        assert_eq!(lv((3, 1), (0, 1)).cmp(&lv((0, 1), (2, 1))), Ordering::Greater);
        let x = lv((-7, 3), (5, 11));
        assert_eq!(x.cmp(&x), Ordering::Equal);
    }

    #[test]
    fn field_ops() {
        let x = lv((1, 1), (1, 1));
        let y = x.recip().unwrap();
        assert_eq!(&x * &y, LogValue::one());
        // (1+√2)(−1+√2) = 1
        assert_eq!(y, lv((-1, 1), (1, 1)));
        assert!(LogValue::zero().recip().is_none());
        assert_eq!(LogValue::sqrt2() * LogValue::sqrt2(), LogValue::from_int(2));
    }

    #[test]
    fn display() {
        assert_eq!(lv((1, 2), (0, 1)).to_string(), "1/2");
        assert_eq!(lv((1, 1), (-3, 1)).to_string(), "1-3√2");
        assert_eq!(lv((0, 1), (2, 3)).to_string(), "2/3√2");
    }

    fn arb_lv() -> impl Strategy<Value = LogValue> {
        (-50i64..50, 1i64..12, -50i64..50, 1i64..12).prop_map(|(a, da, b, db)| lv((a, da), (b, db)))
    }

    proptest! {
        #[test]
        fn order_is_compatible_with_addition(x in arb_lv(), y in arb_lv(), z in arb_lv()) {
            if x < y {
                prop_assert!(&x + &z < &y + &z);
            }
            prop_assert_eq!(x.cmp(&y), (&x + &z).cmp(&(&y + &z)));
        }

        #[test]
        fn order_agrees_with_floats_when_far_apart(x in arb_lv(), y in arb_lv()) {
            let (fx, fy) = (x.to_f64(), y.to_f64());
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(x < y, fx < fy);
            }
            prop_assert_eq!(x == y, x.cmp(&y) == Ordering::Equal);
        }

        #[test]
        fn total_order_is_transitive(x in arb_lv(), y in arb_lv(), z in arb_lv()) {
            if x <= y && y <= z {
                prop_assert!(x <= z);
            }
        }
    }
}
