//! The Berkovich closed unit disc over the Hahn-monomial field.
//!
//! A point is the sup-norm of a closed disc `D(z, e^{−s})`, written with
//! its log-radius `s` (`s = ∞` for a classical point), or a finite prefix
//! of a strictly nested sequence of discs standing in for a type-(iv) point.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::{HahnElement, LogValue, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogRadius {
    Finite(LogValue),
    Infinite,
}

impl LogRadius {
    pub fn finite(&self) -> Option<&LogValue> {
        match self {
            LogRadius::Finite(s) => Some(s),
            LogRadius::Infinite => None,
        }
    }
}

impl From<LogValue> for LogRadius {
    fn from(s: LogValue) -> Self {
        LogRadius::Finite(s)
    }
}

impl fmt::Display for LogRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogRadius::Finite(s) => write!(f, "{s}"),
            LogRadius::Infinite => write!(f, "∞"),
        }
    }
}

/// `val(a − b)`, infinite when equal.
pub fn contact(a: &HahnElement, b: &HahnElement) -> LogRadius {
    match a.sub(b).val() {
        Some(v) => LogRadius::Finite(LogValue::rational(v)),
        None => LogRadius::Infinite,
    }
}

/// Closed disc of log-radius `s ≥ 0` about a center of valuation `≥ 0`.
/// Equality is equality of discs, not of centers.
#[derive(Clone)]
pub struct Disc {
    center: HahnElement,
    s: LogRadius,
}

impl Disc {
    pub fn new(center: HahnElement, s: LogRadius) -> Result<Self> {
        if center.val().is_some_and(|v| v < Rational::from_integer(0.into())) {
            return Err(Error::InvalidInput(format!("center {center} lies outside the unit disc")));
        }
        if s.finite().is_some_and(LogValue::is_negative) {
            return Err(Error::InvalidInput(format!("negative log-radius {s}")));
        }
        Ok(Disc { center, s })
    }

    pub fn classical(center: HahnElement) -> Result<Self> {
        Self::new(center, LogRadius::Infinite)
    }

    pub fn gauss(field: &std::sync::Arc<crate::scalars::GaloisField>) -> Self {
        Disc { center: HahnElement::zero(field), s: LogRadius::Finite(LogValue::zero()) }
    }

    pub fn center(&self) -> &HahnElement {
        &self.center
    }

    pub fn radius(&self) -> &LogRadius {
        &self.s
    }

    /// `D(z', s') ⊆ D(z, s)`.
    pub fn contains(&self, other: &Disc) -> bool {
        self.s <= other.s && contact(&self.center, &other.center) >= self.s
    }

    /// Smallest disc containing both.
    pub fn join(&self, other: &Disc) -> Disc {
        let s = [self.s.clone(), other.s.clone(), contact(&self.center, &other.center)].into_iter().min().unwrap();
        Disc { center: self.center.clone(), s }
    }
}

impl PartialEq for Disc {
    fn eq(&self, other: &Self) -> bool {
        self.s == other.s && contact(&self.center, &other.center) >= self.s
    }
}

impl Eq for Disc {}

impl fmt::Debug for Disc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D({}, {})", self.center, self.s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BerkovichPoint {
    Disc(Disc),
    /// Strictly nested discs, finite log-radii strictly increasing.
    SeqPrefix(Vec<Disc>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointType {
    Classical,
    RationalRadius,
    IrrationalRadius,
    NestedPrefix,
}

impl PointType {
    pub fn as_str(&self) -> &'static str {
        match self {
            PointType::Classical => "i",
            PointType::RationalRadius => "ii",
            PointType::IrrationalRadius => "iii",
            PointType::NestedPrefix => "iv-prefix",
        }
    }
}

impl BerkovichPoint {
    pub fn disc(center: HahnElement, s: LogRadius) -> Result<Self> {
        Ok(BerkovichPoint::Disc(Disc::new(center, s)?))
    }

    pub fn seq_prefix(discs: Vec<Disc>) -> Result<Self> {
        if discs.is_empty() {
            return Err(Error::InvalidInput("empty disc sequence".into()));
        }
        if discs.iter().any(|d| d.s == LogRadius::Infinite) {
            return Err(Error::InvalidInput("nested sequences have finite radii".into()));
        }
        for w in discs.windows(2) {
            if !(w[0].contains(&w[1]) && w[0].s < w[1].s) {
                return Err(Error::InvalidInput(format!("{:?} does not strictly contain {:?}", w[0], w[1])));
            }
        }
        Ok(BerkovichPoint::SeqPrefix(discs))
    }

    pub fn classify(&self) -> PointType {
        match self {
            BerkovichPoint::SeqPrefix(_) => PointType::NestedPrefix,
            BerkovichPoint::Disc(d) => match &d.s {
                LogRadius::Infinite => PointType::Classical,
                LogRadius::Finite(s) if s.is_rational() => PointType::RationalRadius,
                LogRadius::Finite(_) => PointType::IrrationalRadius,
            },
        }
    }

    fn last(&self) -> &Disc {
        match self {
            BerkovichPoint::Disc(d) => d,
            BerkovichPoint::SeqPrefix(ds) => ds.last().expect("nonempty"),
        }
    }
}

/// `α ≥ β`: every function's α-norm bounds its β-norm. For discs this is
/// containment. A nested prefix only pins its limit down to lying strictly
/// inside the last listed disc, so some comparisons are undecidable.
pub fn dominates(a: &BerkovichPoint, b: &BerkovichPoint) -> Result<bool> {
    use BerkovichPoint::*;
    match (a, b) {
        (Disc(x), Disc(y)) => Ok(x.contains(y)),
        (Disc(x), SeqPrefix(_)) => {
            let last = b.last();
            if x.contains(last) {
                Ok(true)
            } else if last.contains(x) {
                Err(Error::UndecidableFromPrefix)
            } else {
                Ok(false)
            }
        }
        (SeqPrefix(xs), _) => {
            if let SeqPrefix(ys) = b {
                if xs == ys {
                    return Ok(true);
                }
            }
            if a.last().contains(b.last()) {
                Err(Error::UndecidableFromPrefix)
            } else {
                Ok(false)
            }
        }
    }
}

/// The point of log-radius `s` on the path from the Gauss point to `α`.
pub fn path_point(a: &BerkovichPoint, s: &LogValue) -> Result<BerkovichPoint> {
    let s_r = LogRadius::Finite(s.clone());
    if s.is_negative() {
        return Err(Error::InvalidInput(format!("negative log-radius {s}")));
    }
    let d = match a {
        BerkovichPoint::Disc(d) => {
            if s_r > d.s {
                return Err(Error::InvalidInput(format!("{s} exceeds the radius {} of the endpoint", d.s)));
            }
            d
        }
        BerkovichPoint::SeqPrefix(ds) => {
            ds.iter().find(|d| d.s >= s_r).ok_or(Error::UndecidableFromPrefix)?
        }
    };
    Ok(BerkovichPoint::Disc(Disc { center: d.center.clone(), s: s_r }))
}

/// Least point dominating both.
pub fn meet(a: &BerkovichPoint, b: &BerkovichPoint) -> Result<BerkovichPoint> {
    let j = a.last().join(b.last());
    let a_nested = matches!(a, BerkovichPoint::SeqPrefix(_));
    let b_nested = matches!(b, BerkovichPoint::SeqPrefix(_));
    // a prefix limit can branch off anywhere below its last disc
    if (a_nested && j == *a.last()) || (b_nested && j == *b.last()) {
        if a == b {
            return Ok(a.clone());
        }
        return Err(Error::UndecidableFromPrefix);
    }
    Ok(BerkovichPoint::Disc(j))
}

/// `λ + Σ_r min(s, val(z − r))`: the valuation-form norm of
/// `P = c·Π(x − r)` at `D(z, s)`, with `λ = val(c)`.
pub fn log_norm(roots: &[HahnElement], lead_val: &LogValue, d: &Disc) -> LogRadius {
    let mut total = lead_val.clone();
    for r in roots {
        match std::cmp::min(d.s.clone(), contact(&d.center, r)) {
            LogRadius::Finite(v) => total += &v,
            LogRadius::Infinite => return LogRadius::Infinite,
        }
    }
    LogRadius::Finite(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointDiscsReport {
    /// `val(z − z₂) < s₁` for every root, and `z₁` is a root closest to `z₂`.
    /// For an irreducible `P` the second part is free (conjugate `z₁`);
    /// for arbitrary factored data it has to be checked.
    pub hypothesis: bool,
    pub val_at_z2: LogRadius,
    pub val_norm_at_disc: LogRadius,
    /// `val P(z₂) < val |P|_{z₁,s₁}`, i.e. `|P(z₂)| > |P|_{z₁,r₁}`.
    pub holds: bool,
}

pub fn check_disjoint_discs(
    roots: &[HahnElement],
    lead_val: &LogValue,
    z1_index: usize,
    s1: &LogValue,
    z2: &HahnElement,
) -> Result<DisjointDiscsReport> {
    let z1 = roots
        .get(z1_index)
        .ok_or_else(|| Error::InvalidInput(format!("no root with index {z1_index}")))?;
    let s1_r = LogRadius::Finite(s1.clone());
    let nearest = contact(z1, z2);
    let hypothesis = roots.iter().all(|r| contact(r, z2) < s1_r && contact(r, z2) <= nearest);
    let val_at_z2 = log_norm(roots, lead_val, &Disc { center: z2.clone(), s: LogRadius::Infinite });
    let val_norm_at_disc = log_norm(roots, lead_val, &Disc { center: z1.clone(), s: s1_r });
    let holds = hypothesis && val_at_z2 < val_norm_at_disc;
    Ok(DisjointDiscsReport { hypothesis, val_at_z2, val_norm_at_disc, holds })
}

/// Pairwise disjoint closed discs in the unit disc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscSet {
    pub discs: Vec<Disc>,
    pub disjoint: bool,
}

impl DiscSet {
    pub fn contains(&self, d: &Disc) -> bool {
        self.discs.iter().any(|x| x.contains(d))
    }

    pub fn is_empty(&self) -> bool {
        self.discs.is_empty()
    }
}

/// A factored constraint `val|c·Π(x − r)| ≥ bound`.
#[derive(Clone, Debug)]
pub struct RootConstraint {
    pub roots: Vec<HahnElement>,
    pub lead_val: LogValue,
    pub bound: LogValue,
}

/// The locus in the unit disc where every constraint holds, as disjoint discs.
///
/// Along the path toward a point `z` the norm is nondecreasing in `s` and
/// stops growing once no root is closer, so the largest disc about `z`
/// inside the locus contains a root; it suffices to grow a disc about each
/// integral root until the bound is reached.
pub fn union_discs(constraints: &[RootConstraint]) -> Result<DiscSet> {
    let first = constraints
        .iter()
        .flat_map(|c| c.roots.first())
        .next()
        .ok_or_else(|| Error::InvalidInput("constraints need at least one root".into()))?;
    let field = first.field().clone();
    let mut current = vec![Disc::gauss(&field)];
    for c in constraints {
        let set = single_constraint(c, &field);
        let mut next: Vec<Disc> = Vec::new();
        for a in &current {
            for b in &set {
                let meet = if a.contains(b) {
                    Some(b.clone())
                } else if b.contains(a) {
                    Some(a.clone())
                } else {
                    None
                };
                if let Some(m) = meet {
                    if !next.contains(&m) {
                        next.push(m);
                    }
                }
            }
        }
        current = next;
    }
    current.sort_by(|a, b| a.s.cmp(&b.s).then_with(|| cmp_hahn(&a.center, &b.center)));
    Ok(DiscSet { discs: current, disjoint: true })
}

fn cmp_hahn(a: &HahnElement, b: &HahnElement) -> Ordering {
    a.terms().cmp(b.terms())
}

fn single_constraint(c: &RootConstraint, field: &std::sync::Arc<crate::scalars::GaloisField>) -> Vec<Disc> {
    let integral: Vec<&HahnElement> = c.roots.iter().filter(|r| r.val().is_none_or(|v| v >= Rational::from_integer(0.into()))).collect();
    let unit = Disc::gauss(field);
    if integral.is_empty() {
        // the norm is constant on the unit disc
        return if log_norm(&c.roots, &c.lead_val, &unit) >= LogRadius::Finite(c.bound.clone()) { vec![unit] } else { vec![] };
    }
    let mut out: Vec<Disc> = Vec::new();
    for r in integral {
        let s0 = threshold(&c.roots, &c.lead_val, &c.bound, r);
        let d = Disc { center: r.clone(), s: LogRadius::Finite(s0) };
        if !out.contains(&d) {
            out.push(d);
        }
    }
    out
}

// Least s ≥ 0 with λ + Σ min(s, val(r − r')) ≥ bound.
fn threshold(roots: &[HahnElement], lead: &LogValue, bound: &LogValue, r: &HahnElement) -> LogValue {
    let contacts: Vec<LogRadius> = roots.iter().map(|x| contact(r, x)).collect();
    let phi = |s: &LogValue| -> LogValue {
        let mut total = lead.clone();
        for c in &contacts {
            match c {
                LogRadius::Finite(v) if v < s => total += v,
                _ => total += s,
            }
        }
        total
    };
    let mut knots: Vec<LogValue> = contacts
        .iter()
        .filter_map(|c| c.finite().filter(|v| v.is_positive()).cloned())
        .collect();
    knots.sort();
    knots.dedup();
    let mut prev = LogValue::zero();
    if phi(&prev) >= *bound {
        return prev;
    }
    for k in knots.into_iter().map(Some).chain(std::iter::once(None)) {
        let slope = contacts.iter().filter(|c| **c > LogRadius::Finite(prev.clone())).count() as i64;
        let value = phi(&prev);
        let hit = &prev + (bound - &value).scale(&Rational::new(1.into(), slope.into()));
        match k {
            Some(k) if phi(&k) < *bound => prev = k,
            _ => return hit,
        }
    }
    unreachable!("the last segment is unbounded")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, qi, GaloisField};
    use std::sync::Arc;

    fn fp(p: u32) -> Arc<GaloisField> {
        GaloisField::prime(p).unwrap()
    }

    fn t(f: &Arc<GaloisField>, c: u32, e: Rational) -> HahnElement {
        HahnElement::monomial(f, c, e)
    }

    fn pt(z: HahnElement, s: LogRadius) -> BerkovichPoint {
        BerkovichPoint::disc(z, s).unwrap()
    }

    fn fin(n: i64) -> LogRadius {
        LogRadius::Finite(LogValue::from_int(n))
    }

    #[test]
    fn domination_examples() {
        let f = fp(3);
        let zero = HahnElement::zero(&f);
        let a = pt(zero.clone(), fin(1));
        assert!(dominates(&a, &pt(t(&f, 1, qi(1)), fin(2))).unwrap());
        assert!(!dominates(&a, &pt(HahnElement::constant(&f, 2), fin(2))).unwrap());
        assert!(dominates(&a, &a).unwrap());
        assert!(BerkovichPoint::disc(t(&f, 1, qi(-1)), fin(0)).is_err());
    }

    #[test]
    fn classification() {
        let f = fp(3);
        let z = t(&f, 1, qi(1));
        assert_eq!(pt(HahnElement::zero(&f), LogRadius::Infinite).classify(), PointType::Classical);
        assert_eq!(pt(z.clone(), LogRadius::Finite(LogValue::frac(3, 2))).classify(), PointType::RationalRadius);
        assert_eq!(pt(z.clone(), LogRadius::Finite(LogValue::sqrt2())).classify(), PointType::IrrationalRadius);
        let seq = BerkovichPoint::seq_prefix(vec![
            Disc::new(z.clone(), fin(1)).unwrap(),
            Disc::new(z.add(&t(&f, 1, q(3, 2))), fin(2)).unwrap(),
        ])
        .unwrap();
        assert_eq!(seq.classify(), PointType::NestedPrefix);
    }

    #[test]
    fn paths_and_meets() {
        let f = fp(3);
        let zero = HahnElement::zero(&f);
        let tt = t(&f, 1, qi(1));
        let a = pt(tt.clone(), LogRadius::Infinite);
        assert_eq!(path_point(&a, &LogValue::one()).unwrap(), pt(zero.clone(), fin(1)));
        let b = pt(tt.clone(), fin(3));
        assert_eq!(path_point(&b, &LogValue::from_int(3)).unwrap(), b);
        assert_eq!(path_point(&b, &LogValue::zero()).unwrap(), BerkovichPoint::Disc(Disc::gauss(&f)));
        assert!(path_point(&b, &LogValue::from_int(4)).is_err());

        let o = pt(zero.clone(), LogRadius::Infinite);
        assert_eq!(meet(&o, &a).unwrap(), pt(zero.clone(), fin(1)));
        let g = BerkovichPoint::Disc(Disc::gauss(&f));
        assert_eq!(meet(&a, &g).unwrap(), g);
        assert_eq!(meet(&a, &a).unwrap(), a);
    }

    #[test]
    fn nested_prefix_comparisons() {
        let f = fp(2);
        let zero = HahnElement::zero(&f);
        let seq = BerkovichPoint::seq_prefix(vec![
            Disc::new(zero.clone(), fin(1)).unwrap(),
            Disc::new(t(&f, 1, q(3, 2)), fin(2)).unwrap(),
        ])
        .unwrap();
        assert!(dominates(&pt(zero.clone(), fin(1)), &seq).unwrap());
        assert!(!dominates(&pt(HahnElement::one(&f), fin(1)), &seq).unwrap());
        assert_eq!(dominates(&pt(t(&f, 1, q(3, 2)), fin(5)), &seq), Err(Error::UndecidableFromPrefix));
        assert_eq!(dominates(&seq, &pt(t(&f, 1, q(3, 2)), fin(7))), Err(Error::UndecidableFromPrefix));
        assert!(!dominates(&seq, &pt(zero.clone(), fin(7))).unwrap());
        assert!(!dominates(&seq, &pt(zero.clone(), fin(0))).unwrap());
        assert!(dominates(&seq, &seq).unwrap());
        assert!(BerkovichPoint::seq_prefix(vec![
            Disc::new(zero.clone(), fin(2)).unwrap(),
            Disc::new(zero.clone(), fin(1)).unwrap()
        ])
        .is_err());
    }

    #[test]
    fn disjoint_disc_examples() {
        let f = fp(3);
        let h = t(&f, 1, q(1, 2));
        let roots = vec![h.clone(), h.neg()];
        let rep = check_disjoint_discs(&roots, &LogValue::zero(), 0, &LogValue::one(), &HahnElement::zero(&f)).unwrap();
        assert!(rep.hypothesis && rep.holds);
        assert_eq!(rep.val_at_z2, fin(1));
        assert_eq!(rep.val_norm_at_disc, LogRadius::Finite(LogValue::frac(3, 2)));

        let rep = check_disjoint_discs(&[HahnElement::zero(&f)], &LogValue::zero(), 0, &LogValue::one(), &HahnElement::one(&f))
            .unwrap();
        assert!(rep.holds);
        assert_eq!((rep.val_at_z2, rep.val_norm_at_disc), (fin(0), fin(1)));

        let rep = check_disjoint_discs(&roots, &LogValue::zero(), 0, &LogValue::one(), &h.add(&t(&f, 1, qi(2)))).unwrap();
        assert!(!rep.hypothesis && !rep.holds);

        // z₁ = 0 is not the root nearest z₂ = 1; the inequality really fails
        let one = HahnElement::one(&f);
        let near = [one.add(&t(&f, 1, q(3, 2))), one.add(&t(&f, 2, q(3, 2)))];
        let roots = vec![HahnElement::zero(&f), near[0].clone(), near[1].clone()];
        let rep = check_disjoint_discs(&roots, &LogValue::zero(), 0, &LogValue::from_int(2), &one).unwrap();
        assert!(!rep.hypothesis);
        assert_eq!((rep.val_at_z2, rep.val_norm_at_disc), (fin(3), fin(2)));
    }

    #[test]
    fn union_examples() {
        let f = fp(3);
        let zero = HahnElement::zero(&f);
        let c = HahnElement::constant(&f, 1);
        let one = |roots: Vec<HahnElement>, b: i64| RootConstraint { roots, lead_val: LogValue::zero(), bound: LogValue::from_int(b) };
        let d = |z: &HahnElement, s: i64| Disc::new(z.clone(), fin(s)).unwrap();

        assert_eq!(union_discs(&[one(vec![zero.clone()], 1)]).unwrap().discs, vec![d(&zero, 1)]);
        assert_eq!(union_discs(&[one(vec![zero.clone(), c.clone()], 2)]).unwrap().discs, vec![d(&zero, 2), d(&c, 2)]);
        assert_eq!(union_discs(&[one(vec![zero.clone(), c.clone()], 0)]).unwrap().discs, vec![d(&zero, 0)]);
        // |x| and |x − 1| both small: empty
        assert!(union_discs(&[one(vec![zero.clone()], 1), one(vec![c.clone()], 1)]).unwrap().is_empty());
        // a root outside the unit disc gives a constant norm
        let far = t(&f, 1, qi(-1));
        assert!(union_discs(&[one(vec![far.clone()], 0)]).unwrap().is_empty());
        assert_eq!(union_discs(&[one(vec![far], -1)]).unwrap().discs, vec![Disc::gauss(&f)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_center(f: Arc<GaloisField>) -> impl Strategy<Value = HahnElement> {
            prop::collection::vec((0u32..3, 0i64..5, 1i64..3), 0..3)
                .prop_map(move |ts| HahnElement::from_terms(&f, ts.into_iter().map(|(c, n, d)| (c, q(n, d)))))
        }

        fn arb_disc() -> impl Strategy<Value = Disc> {
            let f = fp(3);
            (arb_center(f), prop::option::of(0i64..6)).prop_map(|(z, s)| {
                Disc::new(z, s.map_or(LogRadius::Infinite, |s| LogRadius::Finite(q(s, 2).into()))).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(300))]

            #[test]
            fn partial_order_and_tree(a in arb_disc(), b in arb_disc(), c in arb_disc()) {
                let (pa, pb, pc) = (BerkovichPoint::Disc(a.clone()), BerkovichPoint::Disc(b.clone()), BerkovichPoint::Disc(c.clone()));
                prop_assert!(dominates(&pa, &pa).unwrap());
                let ab = dominates(&pa, &pb).unwrap();
                let ba = dominates(&pb, &pa).unwrap();
                if ab && ba { prop_assert_eq!(&a, &b); }
                if ab { prop_assert!(a.radius() <= b.radius()); }
                if ab && dominates(&pb, &pc).unwrap() { prop_assert!(dominates(&pa, &pc).unwrap()); }
                if dominates(&pa, &pc).unwrap() && dominates(&pb, &pc).unwrap() { prop_assert!(ab || ba); }
                let m = meet(&pa, &pb).unwrap();
                prop_assert!(dominates(&m, &pa).unwrap() && dominates(&m, &pb).unwrap());
            }

            #[test]
            fn union_membership(
                roots in prop::collection::vec(arb_center(fp(3)), 1..4),
                bound in 0i64..8,
                samples in prop::collection::vec(arb_center(fp(3)), 50),
            ) {
                let bound = LogValue::frac(bound, 2);
                let cons = RootConstraint { roots: roots.clone(), lead_val: LogValue::zero(), bound: bound.clone() };
                let set = union_discs(std::slice::from_ref(&cons)).unwrap();
                for (i, a) in set.discs.iter().enumerate() {
                    for b in &set.discs[i + 1..] {
                        prop_assert!(!a.contains(b) && !b.contains(a));
                    }
                }
                for z in roots.iter().chain(&samples) {
                    let point = Disc::classical(z.clone()).unwrap();
                    let direct = log_norm(&roots, &LogValue::zero(), &point) >= LogRadius::Finite(bound.clone());
                    prop_assert_eq!(set.contains(&point), direct);
                }
            }
        }
    }
}
