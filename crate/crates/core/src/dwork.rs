//! Artin–Schreier parameters over the Hahn residue field and the `b₁`
//! profiles of their Dwork modules.
//!
//! A parameter `u = Σ u_i x^i` (finitely many integer exponents, Hahn
//! coefficients) presents the character of `y^p − y = u`. Adding `y^p − y`
//! does not change the character; [`as_prepare`] picks the canonical
//! representative with no exponent divisible by `p`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::plfun::{Interval, PLFun};
use crate::scalars::{GaloisField, HahnElement, LogValue, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct ASParameter {
    field: Arc<GaloisField>,
    coeffs: BTreeMap<i64, HahnElement>,
}

impl ASParameter {
    pub fn zero(field: &Arc<GaloisField>) -> Self {
        ASParameter { field: field.clone(), coeffs: BTreeMap::new() }
    }

    /// Sum of `(i, u_i)`; repeated exponents add up and zero terms vanish.
    pub fn new(field: &Arc<GaloisField>, terms: impl IntoIterator<Item = (i64, HahnElement)>) -> Self {
        let mut out = Self::zero(field);
        for (i, c) in terms {
            out.add_term(i, &c);
        }
        out
    }

    /// `c·x^i`.
    pub fn monomial(i: i64, c: HahnElement) -> Self {
        let field = c.field().clone();
        Self::new(&field, [(i, c)])
    }

    fn add_term(&mut self, i: i64, c: &HahnElement) {
        let sum = match self.coeffs.get(&i) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, sum);
        }
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn prime(&self) -> u32 {
        self.field.characteristic()
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, HahnElement> {
        &self.coeffs
    }

    pub fn coeff(&self, i: i64) -> Option<&HahnElement> {
        self.coeffs.get(&i)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// No exponent divisible by `p` (in particular no constant term).
    pub fn is_prepared(&self) -> bool {
        let p = self.prime() as i64;
        self.coeffs.keys().all(|i| i % p != 0)
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.coeffs.keys().next().is_some_and(|i| *i < 0)
    }

    pub fn neg(&self) -> Self {
        ASParameter {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c.neg())).collect(),
        }
    }

    /// `y^p − y`, which presents the trivial character.
    pub fn coboundary(y: &ASParameter) -> Self {
        let p = y.prime() as i64;
        let frob = y.coeffs.iter().map(|(i, c)| (i * p, c.frobenius()));
        as_combine(&Self::new(&y.field, frob), &y.neg())
    }
}

impl fmt::Debug for ASParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ASParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·x^{i}")?;
        }
        Ok(())
    }
}

/// Coefficientwise sum: characters add.
pub fn as_combine(u1: &ASParameter, u2: &ASParameter) -> ASParameter {
    let mut out = u1.clone();
    for (i, c) in &u2.coeffs {
        out.add_term(*i, c);
    }
    out
}

/// Pullback along `x ↦ x^m`, `p ∤ m`.
pub fn as_pullback_tame(u: &ASParameter, m: u32) -> Result<ASParameter> {
    let p = u.prime();
    if m == 0 || m.is_multiple_of(p) {
        return Err(Error::DivisibleByP(m as i64, p));
    }
    Ok(ASParameter::new(&u.field, u.coeffs.iter().map(|(i, c)| (i * m as i64, c.clone()))))
}

/// Canonical representative: each `u_{j·p^k}` with `p ∤ j` is moved to
/// exponent `j` as `u_{j·p^k}^{1/p^k}`. The constant term is removed and
/// returned separately.
pub fn as_prepare(u: &ASParameter) -> (ASParameter, HahnElement) {
    let p = u.prime() as i64;
    let mut out = ASParameter::zero(&u.field);
    let mut dropped = HahnElement::zero(&u.field);
    for (i, c) in &u.coeffs {
        if *i == 0 {
            dropped = c.clone();
            continue;
        }
        let (mut j, mut k) = (*i, 0u32);
        while j % p == 0 {
            j /= p;
            k += 1;
        }
        out.add_term(j, &c.pth_root_iter(k));
    }
    (out, dropped)
}

/// `u(x + h)`, expanded binomially in characteristic `p`.
pub fn as_translate(u: &ASParameter, h: &HahnElement) -> Result<ASParameter> {
    if u.has_negative_exponents() {
        return Err(Error::Precondition("translation needs nonnegative exponents".into()));
    }
    let p = u.prime();
    let mut out = ASParameter::zero(&u.field);
    for (i, c) in &u.coeffs {
        let i = *i as u64;
        let mut hpow = HahnElement::one(&u.field);
        let mut powers = Vec::with_capacity(i as usize + 1);
        for _ in 0..=i {
            powers.push(hpow.clone());
            hpow = hpow.mul(h);
        }
        for k in 0..=i {
            let b = binomial_mod_p(i, k, p);
            if b != 0 {
                out.add_term(k as i64, &c.mul(&powers[(i - k) as usize]).scale(b));
            }
        }
    }
    Ok(out)
}

// C(n, k) mod p by Lucas' theorem.
fn binomial_mod_p(mut n: u64, mut k: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (a, b) = (n % p, k % p);
        if b > a {
            return 0;
        }
        let mut c = 1u64;
        for t in 0..b {
            c = c * (a - t) / (t + 1);
        }
        acc = acc * (c % p) % p;
        n /= p;
        k /= p;
    }
    acc as u32
}

/// `s ↦ max{s, max_i(−val(u_i) + (1 − i)·s)}` for prepared `u`.
pub fn b1_profile(u: &ASParameter, domain: &Interval) -> Result<PLFun> {
    if !u.is_prepared() {
        return Err(Error::Precondition("b₁ needs a prepared parameter".into()));
    }
    let mut f = PLFun::identity(domain.clone());
    for (i, c) in &u.coeffs {
        let v = c.val().expect("zero coefficients are absent");
        f = f.max(&PLFun::affine(domain.clone(), LogValue::from_int(1 - i), LogValue::rational(-v)))?;
    }
    Ok(f)
}

/// Whether `val(u_i) + i·s > 0` for every term and every `s` in the closed
/// interval `j` (the character is trivial there).
pub fn as_is_trivial(u: &ASParameter, j: &Interval) -> Result<bool> {
    if !u.is_prepared() {
        return Err(Error::Precondition("triviality test needs a prepared parameter".into()));
    }
    Ok(u.coeffs.iter().all(|(i, c)| {
        let v = LogValue::rational(c.val().expect("nonzero"));
        [j.lo(), j.hi()].iter().all(|s| (&v + s.scale(&Rational::from_integer((*i).into()))).is_positive())
    }))
}

/// `b₁` along the path from the Gauss point toward a target point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathProfile {
    pub b1: PLFun,
    /// Radius parameter of the target; `None` for a classical point, whose
    /// path is infinite and is shown on a finite window.
    pub endpoint: Option<LogValue>,
}

impl PathProfile {
    pub fn terminal_slope(&self) -> LogValue {
        self.b1.terminal_slope()
    }
}

/// `b₁` along the path to the classical point `x = z`, over `[0, S]`.
///
/// At depth `s` the module is translated by the truncation of `z` to its
/// terms of exponent below `s`, which agrees with `z` to valuation `s`.
pub fn b1_along_path(u: &ASParameter, z: &HahnElement, window_end: &LogValue) -> Result<PathProfile> {
    if u.has_negative_exponents() {
        return Err(Error::Precondition("paths need nonnegative exponents".into()));
    }
    let window = Interval::closed(LogValue::zero(), window_end.clone())?;
    let mut cuts: Vec<LogValue> = z
        .exponents()
        .map(|e| LogValue::rational(e.clone()))
        .filter(|e| e.is_positive() && e < window_end)
        .collect();
    cuts.insert(0, LogValue::zero());
    cuts.push(window_end.clone());

    let mut knots: Vec<(LogValue, LogValue)> = Vec::new();
    for w in cuts.windows(2) {
        // on (w0, w1] the truncation keeps exponents < w1, i.e. ≤ w0
        let below = w[0].as_rational().expect("exponents are rational");
        let hbar = HahnElement::from_terms(
            z.field(),
            z.terms().iter().filter(|(e, _)| e <= below).map(|(e, c)| (*c, e.clone())),
        );
        let (prepared, _) = as_prepare(&as_translate(u, &hbar)?);
        let piece = b1_profile(&prepared, &Interval::closed(w[0].clone(), w[1].clone())?)?;
        match knots.last() {
            Some((_, y)) if *y != piece.knots()[0].1 => {
                return Err(Error::Inconsistent(format!("b₁ jumps at s = {}", w[0])));
            }
            Some(_) => knots.extend(piece.knots()[1..].iter().cloned()),
            None => knots.extend(piece.knots().iter().cloned()),
        }
    }
    Ok(PathProfile { b1: PLFun::new(window, knots)?, endpoint: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, qi};

    fn fp(p: u32) -> Arc<GaloisField> {
        GaloisField::prime(p).unwrap()
    }

    fn mono(f: &Arc<GaloisField>, c: u32, e: Rational) -> HahnElement {
        HahnElement::monomial(f, c, e)
    }

    fn v(n: i64) -> LogValue {
        LogValue::from_int(n)
    }

    #[test]
    fn prepare_examples() {
        let f = fp(3);
        let u = ASParameter::new(&f, [(3, HahnElement::one(&f)), (9, HahnElement::one(&f))]);
        let (prep, dropped) = as_prepare(&u);
        assert_eq!(prep, ASParameter::monomial(1, HahnElement::constant(&f, 2)));
        assert!(dropped.is_zero());

        let f5 = fp(5);
        let c = mono(&f5, 2, q(1, 3));
        let u = as_combine(
            &ASParameter::monomial(5, c.pow(5)),
            &ASParameter::monomial(1, c.neg()),
        );
        assert!(as_prepare(&u).0.is_zero());

        let u = ASParameter::monomial(2, HahnElement::one(&f));
        assert_eq!(as_prepare(&u).0, u);

        let u = ASParameter::new(&f, [(0, mono(&f, 1, qi(2))), (1, HahnElement::one(&f))]);
        let (prep, dropped) = as_prepare(&u);
        assert_eq!(dropped, mono(&f, 1, qi(2)));
        assert!(prep.is_prepared());
    }

    #[test]
    fn translate_examples() {
        let f = fp(3);
        let t = mono(&f, 1, qi(1));
        let x = ASParameter::monomial(1, HahnElement::one(&f));
        assert_eq!(as_translate(&x, &t).unwrap(), ASParameter::new(&f, [(1, HahnElement::one(&f)), (0, t.clone())]));

        let u = ASParameter::monomial(2, mono(&f, 1, qi(-2)));
        let expect = ASParameter::new(
            &f,
            [(2, mono(&f, 1, qi(-2))), (1, mono(&f, 2, qi(-1))), (0, HahnElement::one(&f))],
        );
        assert_eq!(as_translate(&u, &t).unwrap(), expect);
        assert!(as_translate(&ASParameter::zero(&f), &t).unwrap().is_zero());
        assert!(as_translate(&ASParameter::monomial(-1, t.clone()), &t).is_err());
    }

    #[test]
    fn lucas_binomials() {
        assert_eq!(binomial_mod_p(9, 3, 3), 0);
        assert_eq!(binomial_mod_p(4, 2, 3), 0);
        assert_eq!(binomial_mod_p(5, 2, 7), 3);
        assert_eq!(binomial_mod_p(7, 0, 2), 1);
    }

    #[test]
    fn b1_examples() {
        let f = fp(3);
        let d = Interval::closed(v(0), v(4)).unwrap();
        let u = ASParameter::monomial(1, mono(&f, 1, qi(-1)));
        let expect = PLFun::identity(d.clone()).max(&PLFun::constant(d.clone(), v(1))).unwrap();
        assert_eq!(b1_profile(&u, &d).unwrap(), expect);

        let u2 = as_combine(&u, &ASParameter::monomial(2, mono(&f, 1, qi(1))));
        assert_eq!(b1_profile(&u2, &d).unwrap(), expect);

        let u3 = ASParameter::monomial(-1, mono(&f, 1, qi(-2)));
        assert_eq!(b1_profile(&u3, &d).unwrap(), PLFun::affine(d.clone(), v(2), v(2)));
        assert!(b1_profile(&ASParameter::monomial(3, HahnElement::one(&f)), &d).is_err());
    }

    #[test]
    fn triviality_examples() {
        let f = fp(3);
        let j = Interval::closed(v(0), v(1)).unwrap();
        assert!(as_is_trivial(&ASParameter::monomial(1, mono(&f, 1, qi(1))), &j).unwrap());
        assert!(!as_is_trivial(&ASParameter::monomial(1, mono(&f, 1, qi(-1))), &j).unwrap());
        assert!(as_is_trivial(&ASParameter::zero(&f), &j).unwrap());
    }

    #[test]
    fn combine_and_pullback() {
        let f = fp(3);
        let u = ASParameter::monomial(1, mono(&f, 1, qi(-1)));
        assert!(as_combine(&u, &u.neg()).is_zero());
        let pb = as_pullback_tame(&u, 2).unwrap();
        assert_eq!(pb, ASParameter::monomial(2, mono(&f, 1, qi(-1))));
        assert!(as_pullback_tame(&u, 6).is_err());
        let x = ASParameter::monomial(1, HahnElement::one(&f));
        let x2 = ASParameter::monomial(2, HahnElement::one(&f));
        assert_eq!(as_combine(&x, &x2).coeffs().len(), 2);
    }

    #[test]
    fn path_examples() {
        let f = fp(3);
        let s = v(3);
        let t = mono(&f, 1, qi(1));
        let x = ASParameter::monomial(1, HahnElement::one(&f));
        let path = b1_along_path(&x, &t, &s).unwrap();
        assert_eq!(path.b1, PLFun::identity(Interval::closed(v(0), s.clone()).unwrap()));

        let u = ASParameter::monomial(1, mono(&f, 1, qi(-1)));
        let path = b1_along_path(&u, &HahnElement::zero(&f), &s).unwrap();
        let d = Interval::closed(v(0), s.clone()).unwrap();
        assert_eq!(path.b1, PLFun::identity(d.clone()).max(&PLFun::constant(d.clone(), v(1))).unwrap());

        let u = ASParameter::monomial(2, mono(&f, 1, qi(-2)));
        let path = b1_along_path(&u, &t, &s).unwrap();
        let expect = PLFun::identity(d.clone()).max(&PLFun::affine(d.clone(), v(-1), v(2))).unwrap();
        assert_eq!(path.b1, expect);
        assert_eq!(path.terminal_slope(), v(1));
        assert!(path.b1.is_convex());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_hahn(f: Arc<GaloisField>) -> impl Strategy<Value = HahnElement> {
            let order = f.order();
            prop::collection::vec((0..order, -6i64..6, 1i64..4), 1..3)
                .prop_map(move |ts| HahnElement::from_terms(&f, ts.into_iter().map(|(c, n, d)| (c, q(n, d)))))
        }

        fn arb_param(lo: i64) -> impl Strategy<Value = ASParameter> {
            prop_oneof![Just(2u32), Just(3), Just(5)].prop_flat_map(move |p| {
                let f = fp(p);
                prop::collection::vec((lo..12i64, arb_hahn(f.clone())), 0..4)
                    .prop_map(move |ts| ASParameter::new(&f, ts))
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(300))]

            #[test]
            fn coboundaries_vanish(u in arb_param(-4), e in -3i64..5) {
                let f = u.field().clone();
                let y = ASParameter::new(&f, [(e, HahnElement::monomial(&f, 1, q(e, 2))), (e + 1, HahnElement::one(&f))]);
                let (a, _) = as_prepare(&u);
                let (b, _) = as_prepare(&as_combine(&u, &ASParameter::coboundary(&y)));
                prop_assert_eq!(a, b);
            }

            #[test]
            fn prepare_is_idempotent_and_additive(u in arb_param(-4), w in arb_param(-4)) {
                let (a, _) = as_prepare(&u);
                prop_assert!(a.is_prepared());
                prop_assert_eq!(as_prepare(&a).0, a.clone());
                if u.prime() == w.prime() {
                    let w = ASParameter::new(u.field(), w.coeffs().clone());
                    let (b, _) = as_prepare(&w);
                    prop_assert_eq!(as_prepare(&as_combine(&u, &w)).0, as_combine(&a, &b));
                }
            }

            #[test]
            fn b1_is_convex_with_expected_terminal_slope(u in arb_param(-4)) {
                let (a, _) = as_prepare(&u);
                let d = Interval::closed(v(0), v(40)).unwrap();
                let b = b1_profile(&a, &d).unwrap();
                prop_assert!(b.is_convex());
                let lowest = a.coeffs().keys().next().copied().unwrap_or(0).min(0);
                prop_assert_eq!(b.terminal_slope(), v(1 - lowest));
            }

            #[test]
            fn path_profile_is_continuous_and_convex(u in arb_param(0), z in prop::collection::vec((1u32..2, 1i64..8, 1i64..3), 0..3)) {
                let f = u.field().clone();
                let z = HahnElement::from_terms(&f, z.into_iter().map(|(c, n, d)| (c, q(n, d))));
                let path = b1_along_path(&u, &z, &v(60)).unwrap();
                prop_assert!(path.b1.is_convex());
                prop_assert_eq!(path.terminal_slope(), v(1));
            }
        }
    }
}
