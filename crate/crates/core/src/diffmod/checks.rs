//! Checkers for the structural properties of radius profiles.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::plfun::{Interval, PLFun};
use crate::scalars::{LogValue, Rational};

use super::padic::PadicPoly;
use super::profile::dwork_profile;
use super::{EntryTag, RadiiProfile, Tri};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationReport {
    /// Exact slopes lie in `(1/n!)·ℤ`.
    pub slope_denominators: bool,
    /// Every entry, exact or bounded below, is at least `r̂`.
    pub above_identity: bool,
    /// `f̂_1 + … + f̂_i` is convex for every `i`.
    pub convex_partial_sums: Tri,
    /// Partial sums are nonincreasing wherever `f̂_i > r̂` (disc case only).
    pub nonpositive_slopes: Tri,
}

impl VariationReport {
    /// No check failed outright.
    pub fn passes(&self) -> bool {
        self.slope_denominators
            && self.above_identity
            && self.convex_partial_sums != Tri::False
            && self.nonpositive_slopes != Tri::False
    }
}

pub fn check_variation(profile: &RadiiProfile, has_zero_endpoint: bool) -> VariationReport {
    let n = profile.rank();
    let pieces = profile.entries().iter().flatten();
    let slope_denominators = pieces
        .clone()
        .filter_map(|t| match t {
            EntryTag::Exact(f) => Some(f),
            _ => None,
        })
        .all(|f| f.slopes_in_factorial_lattice(n as u32));
    let above_identity = pieces.clone().all(|t| {
        let f = t.lower();
        f.add_affine(&-LogValue::one(), &LogValue::zero()).knots().iter().all(|(_, y)| !y.is_negative())
    });
    let sums: Option<Vec<PLFun>> = (1..=n).map(|i| profile.partial_sum(i)).collect();
    let convex_partial_sums = match &sums {
        Some(s) => Tri::from_bool(s.iter().all(PLFun::is_convex)),
        None => Tri::Indeterminate,
    };
    let nonpositive_slopes = match (&sums, has_zero_endpoint) {
        (_, false) => Tri::True,
        (None, true) => Tri::Indeterminate,
        (Some(s), true) => Tri::from_bool((1..=n).all(|i| {
            let f = profile.exact_entry(i).expect("exact when partial sums exist");
            nonincreasing_where_above(&s[i - 1], f)
        })),
    };
    VariationReport { slope_denominators, above_identity, convex_partial_sums, nonpositive_slopes }
}

// Slope of `sum` ≤ 0 on every cell where `f > r̂`.
fn nonincreasing_where_above(sum: &PLFun, f: &PLFun) -> bool {
    let gap = f.add_affine(&-LogValue::one(), &LogValue::zero());
    let mut cuts: BTreeSet<LogValue> = sum.knot_xs().chain(gap.knot_xs()).cloned().collect();
    cuts.extend(gap.zero_crossings());
    let cuts: Vec<LogValue> = cuts.into_iter().collect();
    cuts.windows(2).all(|w| {
        let mid = w[0].midpoint(&w[1]);
        !gap.eval_closure(&mid).is_positive()
            || !(sum.eval_closure(&w[1]) - sum.eval_closure(&w[0])).is_positive()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubharmonicityReport {
    /// `s'_{∞,i}`: left slope at `r̂ = 0` of `f̂_1 + … + f̂_i`.
    pub lhs: Vec<LogValue>,
    /// `Σ_j s'_{j,i}`: summed right slopes of the translated modules.
    pub rhs: Vec<LogValue>,
}

impl SubharmonicityReport {
    pub fn holds(&self) -> bool {
        self.lhs.iter().zip(&self.rhs).all(|(a, b)| a <= b)
    }
}

/// Subharmonicity at the Gauss point `r̂ = 0` for the Dwork module of `r`
/// and its translates `x ↦ x + z_j`, whose residues must be distinct.
pub fn check_subharmonicity(r: &PadicPoly, translates: &[Rational], p: u32) -> Result<SubharmonicityReport> {
    let mut seen = BTreeSet::new();
    for z in translates {
        if !seen.insert(PadicPoly::residue(z, p)?) {
            return Err(Error::InvalidInput(format!("translates share the residue of {z}")));
        }
    }
    let window = Interval::closed(LogValue::from_int(-1), LogValue::one())?;
    let base = RadiiProfile::from_exact(p, vec![dwork_profile(p, &r.to_valued(), &window)?])?;
    let moved = translates
        .iter()
        .map(|z| RadiiProfile::from_exact(p, vec![dwork_profile(p, &r.translate(z).to_valued(), &window)?]))
        .collect::<Result<Vec<_>>>()?;
    check_subharmonicity_profiles(&base, &moved)
}

/// The same inequality from profiles given on a neighbourhood of `r̂ = 0`.
pub fn check_subharmonicity_profiles(base: &RadiiProfile, translates: &[RadiiProfile]) -> Result<SubharmonicityReport> {
    let zero = LogValue::zero();
    let n = base.rank();
    let mut lhs = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for i in 1..=n {
        let s = base.partial_sum(i).ok_or(Error::NotExact(i))?;
        lhs.push(s.left_slope_at(&zero)?);
        let mut total = LogValue::zero();
        for t in translates {
            if t.rank() != n {
                return Err(Error::InvalidInput("translates must have the rank of the base".into()));
            }
            total += &t.partial_sum(i).ok_or(Error::NotExact(i))?.right_slope_at(&zero)?;
        }
        rhs.push(total);
    }
    Ok(SubharmonicityReport { lhs, rhs })
}

/// Whether every entry equals `r̂` on the interval.
pub fn robba_condition(profile: &RadiiProfile, interval: &Interval) -> Result<Tri> {
    let sub = profile.restrict(interval)?;
    let mut all_exact = true;
    for t in sub.entries().iter().flatten() {
        let id = PLFun::identity(t.domain().clone());
        match t {
            EntryTag::Exact(f) if *f != id => return Ok(Tri::False),
            EntryTag::Exact(_) => {}
            EntryTag::Bounded { lower, .. } => {
                if *lower != id {
                    return Ok(Tri::False);
                }
                all_exact = false;
            }
        }
    }
    Ok(if all_exact { Tri::True } else { Tri::Indeterminate })
}

/// Whether `f̂_i > f̂_{i+1}` everywhere on the interval (1-based `i`).
pub fn separated(profile: &RadiiProfile, i: usize, interval: &Interval) -> Result<Tri> {
    if i == 0 || i >= profile.rank() {
        return Err(Error::InvalidInput(format!("no entry pair ({i}, {})", i + 1)));
    }
    let sub = profile.restrict(interval)?;
    let mut verdict = Tri::True;
    for a in sub.entry(i) {
        for b in sub.entry(i + 1) {
            let Some(common) = a.domain().intersect(b.domain()) else { continue };
            let lo_gap = a.lower().restrict(&common)?.sub(&b.upper().restrict(&common)?)?;
            if lo_gap.scale(&-LogValue::one()).is_strictly_negative() {
                continue;
            }
            if a.is_exact() && b.is_exact() {
                return Ok(Tri::False);
            }
            let hi_gap = a.upper().restrict(&common)?.sub(&b.lower().restrict(&common)?)?;
            if hi_gap.knots().iter().any(|(_, y)| !y.is_positive()) {
                return Ok(Tri::False);
            }
            verdict = Tri::Indeterminate;
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::ValuedPoly;
    use crate::scalars::{q, qi};

    fn v(n: i64) -> LogValue {
        LogValue::from_int(n)
    }

    fn dom(a: i64, b: i64) -> Interval {
        Interval::open(v(a), v(b)).unwrap()
    }

    #[test]
    fn variation_examples() {
        let d = dom(0, 3);
        let id = PLFun::identity(d.clone());
        let m1 = id.max(&PLFun::constant(d.clone(), v(1))).unwrap();
        let rep = check_variation(&RadiiProfile::from_exact(2, vec![m1]).unwrap(), true);
        assert!(rep.passes());
        assert_eq!(rep.convex_partial_sums, Tri::True);
        assert_eq!(rep.nonpositive_slopes, Tri::True);

        let half = PLFun::affine(d.clone(), LogValue::frac(1, 2), v(1));
        let rep = check_variation(&RadiiProfile::from_exact(2, vec![half]).unwrap(), false);
        assert!(!rep.slope_denominators);

        let m2 = id.max(&PLFun::affine(d.clone(), v(-1), v(2))).unwrap();
        let rep = check_variation(&RadiiProfile::from_exact(2, vec![m2, id.clone()]).unwrap(), true);
        assert!(rep.passes());

        // increasing while above the identity violates the disc condition
        let bad = PLFun::affine(d.clone(), v(2), v(1));
        let rep = check_variation(&RadiiProfile::from_exact(2, vec![bad]).unwrap(), true);
        assert_eq!(rep.nonpositive_slopes, Tri::False);
    }

    #[test]
    fn subharmonicity_examples() {
        // r = x at p = 3: profile |s|
        let r = PadicPoly::new(3, vec![qi(0), qi(1)]);
        let rep = check_subharmonicity(&r, &[qi(0)], 3).unwrap();
        assert_eq!(rep.lhs, vec![v(-1)]);
        assert_eq!(rep.rhs, vec![v(1)]);
        assert!(rep.holds());
        let rep = check_subharmonicity(&r, &[qi(0), qi(1)], 3).unwrap();
        assert_eq!(rep.rhs, vec![v(2)]);
        assert!(rep.holds());
        assert!(check_subharmonicity(&r, &[qi(0), qi(3)], 3).is_err());
        assert!(check_subharmonicity(&r, &[q(1, 3)], 3).is_err());

        let w = Interval::closed(v(-1), v(1)).unwrap();
        let robba = RadiiProfile::from_exact(3, vec![PLFun::identity(w)]).unwrap();
        let rep = check_subharmonicity_profiles(&robba, &[robba.clone(), robba.clone()]).unwrap();
        assert_eq!((rep.lhs[0].clone(), rep.rhs[0].clone()), (v(1), v(2)));
    }

    #[test]
    fn robba_examples() {
        let d = dom(0, 2);
        let id = PLFun::identity(d.clone());
        assert_eq!(robba_condition(&RadiiProfile::from_exact(3, vec![id.clone()]).unwrap(), &d).unwrap(), Tri::True);
        let m1 = id.max(&PLFun::constant(d.clone(), v(1))).unwrap();
        assert_eq!(robba_condition(&RadiiProfile::from_exact(3, vec![m1]).unwrap(), &d).unwrap(), Tri::False);
        let op = super::super::CyclicOperator::new(3, vec![ValuedPoly::monomial(0, v(10)), ValuedPoly::monomial(0, v(0))])
            .unwrap();
        let b = super::super::radii_profile_with(&op, &d, super::super::ProfileOptions { cyclic_only: true }).unwrap();
        assert_eq!(robba_condition(&b, &d).unwrap(), Tri::Indeterminate);
    }

    #[test]
    fn separation() {
        let d = dom(0, 3);
        let id = PLFun::identity(d.clone());
        let m1 = id.max(&PLFun::constant(d.clone(), v(1))).unwrap();
        let p = RadiiProfile::from_exact(2, vec![m1, id]).unwrap();
        assert_eq!(separated(&p, 1, &dom(0, 1)).unwrap(), Tri::True);
        assert_eq!(separated(&p, 1, &d).unwrap(), Tri::False);
        assert!(separated(&p, 2, &d).is_err());
    }
}
