use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::gf::GaloisField;
use super::Rational;
use crate::error::{Error, Result};

/// A finite sum Σ c·t^e with c ∈ F_q and e ∈ ℚ: an element of the Hahn
/// field F_q((t^ℚ)) with finite support.
///
/// Terms are kept sorted by exponent with nonzero coefficients, so the
/// valuation is the first exponent.
#[derive(Clone)]
pub struct HahnElement {
    field: Arc<GaloisField>,
    terms: Vec<(Rational, u32)>,
}

impl HahnElement {
    pub fn zero(field: &Arc<GaloisField>) -> Self {
        HahnElement { field: field.clone(), terms: Vec::new() }
    }

    pub fn one(field: &Arc<GaloisField>) -> Self {
        Self::monomial(field, 1, Rational::zero())
    }

    /// `c·t^e`.
    pub fn monomial(field: &Arc<GaloisField>, c: u32, e: Rational) -> Self {
        let c = c % field.order();
        let terms = if c == 0 { vec![] } else { vec![(e, c)] };
        HahnElement { field: field.clone(), terms }
    }

    /// The constant `c ∈ F_q`.
    pub fn constant(field: &Arc<GaloisField>, c: u32) -> Self {
        Self::monomial(field, c, Rational::zero())
    }

    /// Build from `(coefficient, exponent)` pairs; repeated exponents are summed.
    pub fn from_terms(field: &Arc<GaloisField>, terms: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        let mut out = Self::zero(field);
        for (c, e) in terms {
            out = out.add(&Self::monomial(field, c, e));
        }
        out
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn terms(&self) -> &[(Rational, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Minimal exponent; `None` stands for +∞ (the zero element).
    pub fn val(&self) -> Option<Rational> {
        self.terms.first().map(|(e, _)| e.clone())
    }

    /// Coefficient of `t^0`.
    pub fn constant_coefficient(&self) -> u32 {
        self.terms.iter().find(|(e, _)| e.is_zero()).map_or(0, |(_, c)| *c)
    }

    fn check_field(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field,
            "Hahn elements over different residue fields"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        let f = &self.field;
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    let c = f.add(a.1, b.1);
                    if c != 0 {
                        terms.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    terms.push(a.clone());
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    terms.push(b.clone());
                    j += 1;
                }
                (Some(a), None) => {
                    terms.push(a.clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    terms.push(b.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        HahnElement { field: self.field.clone(), terms }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), self.field.neg(*c))).collect();
        HahnElement { field: self.field.clone(), terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        if c.is_multiple_of(self.field.order()) {
            return Self::zero(&self.field);
        }
        let terms = self.terms.iter().map(|(e, d)| (e.clone(), self.field.mul(c, *d))).collect();
        HahnElement { field: self.field.clone(), terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        let mut acc = Self::zero(&self.field);
        for (e, c) in &self.terms {
            let terms = other
                .terms
                .iter()
                .map(|(e2, c2)| (e + e2, self.field.mul(*c, *c2)))
                .collect();
            acc = acc.add(&HahnElement { field: self.field.clone(), terms });
        }
        acc
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(&self.field);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// The unique p-th root, computed termwise: c ↦ c^(p^(m−1)), e ↦ e/p.
    pub fn pth_root(&self) -> Self {
        let p = Rational::from_integer(BigInt::from(self.field.characteristic()));
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e / &p, self.field.pth_root(*c)))
            .collect();
        HahnElement { field: self.field.clone(), terms }
    }

    /// Iterated p-th root, `k` times.
    pub fn pth_root_iter(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.pth_root())
    }

    /// Frobenius x ↦ x^p (termwise in characteristic p).
    pub fn frobenius(&self) -> Self {
        let p = Rational::from_integer(BigInt::from(self.field.characteristic()));
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e * &p, self.field.frobenius(*c)))
            .collect();
        HahnElement { field: self.field.clone(), terms }
    }

    /// The terms with exponent strictly below `s`.
    pub fn truncate_below(&self, s: &Rational) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e < s).cloned().collect();
        HahnElement { field: self.field.clone(), terms }
    }

    /// Distinct exponents, ascending.
    pub fn exponents(&self) -> impl Iterator<Item = &Rational> {
        self.terms.iter().map(|(e, _)| e)
    }

    /// Parse from `(coefficient, exponent)` with a guard on the field.
    pub fn try_from_terms(
        field: &Arc<GaloisField>,
        terms: impl IntoIterator<Item = (i64, Rational)>,
    ) -> Result<Self> {
        let mut out = Self::zero(field);
        for (c, e) in terms {
            if c < 0 || c as u64 >= field.order() as u64 {
                return Err(Error::InvalidInput(format!(
                    "coefficient {c} is not an element code of {field:?}"
                )));
            }
            out = out.add(&Self::monomial(field, c as u32, e));
        }
        Ok(out)
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_zero() && self.terms[0].1 == 1
    }
}

impl PartialEq for HahnElement {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.terms == other.terms
    }
}

impl Eq for HahnElement {}

impl fmt::Debug for HahnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for HahnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
            } else if *c == 1 {
                write!(f, "t^{e}")?;
            } else {
                write!(f, "{c}·t^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;
    use proptest::prelude::*;

    fn f5() -> Arc<GaloisField> {
        GaloisField::prime(5).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let f = f5();
        let x = HahnElement::from_terms(&f, [(1, q(1, 2)), (1, q(2, 1))]);
        assert_eq!(x.val(), Some(q(1, 2)));
        assert_eq!(HahnElement::zero(&f).val(), None);
        let y = HahnElement::from_terms(&f, [(3, q(-1, 1)), (1, q(1, 1))]);
        assert_eq!(y.val(), Some(q(-1, 1)));
    }

    #[test]
    fn pth_root_examples() {
        let f = f5();
        let x = HahnElement::from_terms(&f, [(1, q(1, 1)), (1, q(2, 1))]);
        let r = x.pth_root();
        assert_eq!(r, HahnElement::from_terms(&f, [(1, q(1, 5)), (1, q(2, 5))]));
        let y = HahnElement::monomial(&f, 2, q(1, 2));
        let ry = y.pth_root();
        assert_eq!(ry, HahnElement::monomial(&f, 2, q(1, 10)));
        assert_eq!(ry.pow(5), y);
        assert!(HahnElement::zero(&f).pth_root().is_zero());
    }

    #[test]
    fn cancellation_and_identity() {
        let f = f5();
        let x = HahnElement::from_terms(&f, [(2, q(1, 3)), (4, q(0, 1))]);
        assert!(x.sub(&x).is_zero());
        assert_eq!(x.mul(&HahnElement::one(&f)), x);
        assert_eq!(x.pow(0), HahnElement::one(&f));
    }

    fn arb_elem(f: Arc<GaloisField>) -> impl Strategy<Value = HahnElement> {
        let q = f.order();
        prop::collection::vec((0..q, -6i64..12, 1i64..5), 0..4).prop_map(move |ts| {
            HahnElement::from_terms(&f, ts.into_iter().map(|(c, n, d)| (c, crate::scalars::q(n, d))))
        })
    }

    fn arb_field() -> impl Strategy<Value = Arc<GaloisField>> {
        prop::sample::select(vec![(2u32, 1u32), (3, 1), (5, 1), (3, 2), (2, 3)])
            .prop_map(|(p, m)| GaloisField::new(p, m).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn pth_root_inverts_frobenius((f, x) in arb_field().prop_flat_map(|f| (Just(f.clone()), arb_elem(f)))) {
            let r = x.pth_root();
            prop_assert_eq!(r.pow(f.characteristic()), x.clone());
            prop_assert_eq!(r.frobenius(), x);
        }

        #[test]
        fn val_is_a_valuation((x, y) in arb_field().prop_flat_map(|f| (arb_elem(f.clone()), arb_elem(f)))) {
            match (x.val(), y.val()) {
                (Some(vx), Some(vy)) => {
                    prop_assert_eq!(x.mul(&y).val(), Some(&vx + &vy));
                    let s = x.add(&y);
                    if let Some(vs) = s.val() {
                        prop_assert!(vs >= vx.clone().min(vy.clone()));
                    }
                    if vx != vy {
                        prop_assert_eq!(s.val(), Some(vx.min(vy)));
                    }
                }
                _ => prop_assert!(x.mul(&y).is_zero()),
            }
        }
    }
}
