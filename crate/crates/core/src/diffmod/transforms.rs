//! Profile-level transforms: tame and Frobenius base change, descendants,
//! and direct sums.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::plfun::{Interval, PLFun};
use crate::scalars::{q, LogValue, Rational};

use super::assemble::{assemble, atoms, sample_entry, Atom, AtomTag};
use super::{pi_val, EntryTag, PointValue, RadiiProfile};

/// Profile of the pullback along `x ↦ x^m`, `p ∤ m`:
/// `g(u) = f(m·u) − m·u + u` on the domain scaled by `1/m`.
pub fn tame_transform(profile: &RadiiProfile, m: u32) -> Result<RadiiProfile> {
    let p = profile.prime();
    if m == 0 || m.is_multiple_of(p) {
        return Err(Error::DivisibleByP(m as i64, p));
    }
    let mq = Rational::from_integer((m as i64).into());
    let domain = profile.domain().affine_image(&q(1, m as i64), &LogValue::zero())?;
    let shift = LogValue::from_int(1 - m as i64);
    profile.map_functions(domain, |f| {
        Ok(f.reparam(&mq, &LogValue::zero(), &Rational::from_integer(1.into()))?
            .add_affine(&shift, &LogValue::zero()))
    })
}

/// True iff `f̂_1(r̂) < 1/(p−1) + r̂` on all of `interval`; needs `f̂_1`
/// exact there.
pub fn antecedent_exists(profile: &RadiiProfile, interval: &Interval) -> Result<bool> {
    let sub = profile.restrict(interval)?;
    let c = pi_val(profile.prime());
    let mut ok = true;
    for t in sub.entry(1) {
        let EntryTag::Exact(f) = t else { return Err(Error::NotExact(1)) };
        ok &= f.add_affine(&-LogValue::one(), &-&c).is_strictly_negative();
    }
    Ok(ok)
}

/// From the profile of `E` to that of its Frobenius antecedent `F`:
/// `g(t) = p·f(t/p)` on `p·I`.
pub fn antecedent_transform(profile: &RadiiProfile) -> Result<RadiiProfile> {
    if !antecedent_exists(profile, profile.domain())? {
        return Err(Error::NoAntecedent(profile.domain().to_string()));
    }
    let pq = Rational::from_integer((profile.prime() as i64).into());
    let domain = profile.domain().affine_image(&pq, &LogValue::zero())?;
    profile.map_functions(domain, |f| f.reparam(&pq.recip(), &LogValue::zero(), &pq))
}

/// Inverse of [`antecedent_transform`]: from the profile `g` of `F` to the
/// profile `f(s) = g(ps)/p` of its Frobenius pullback, which must satisfy the
/// antecedent condition.
pub fn antecedent_pullback(profile: &RadiiProfile) -> Result<RadiiProfile> {
    let pq = Rational::from_integer((profile.prime() as i64).into());
    let domain = profile.domain().affine_image(&pq.recip(), &LogValue::zero())?;
    let out = profile.map_functions(domain, |g| g.reparam(&pq, &LogValue::zero(), &pq.recip()))?;
    if !antecedent_exists(&out, out.domain())? {
        return Err(Error::NoAntecedent(out.domain().to_string()));
    }
    Ok(out)
}

/// Radii of the Frobenius descendant at `p·r̂` from those at `r̂`, sorted
/// descending.
pub fn descendant_multiset(ms: &[LogValue], r: &LogValue, p: u32) -> Result<Vec<LogValue>> {
    let c = pi_val(p);
    if !r.is_positive() || *r >= c {
        return Err(Error::OutOfDomain(r.to_string(), format!("(0, {c})")));
    }
    let pv = LogValue::from_int(p as i64);
    let boundary = LogValue::frac(p as i64, p as i64 - 1);
    let mut out = Vec::with_capacity(ms.len() * p as usize);
    for f in ms {
        if *f < c {
            out.push(&pv * f);
            out.extend(std::iter::repeat_n(boundary.clone(), p as usize - 1));
        } else {
            out.extend(std::iter::repeat_n(f + LogValue::one(), p as usize));
        }
    }
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

/// Checks `Σ_{j ≤ i+(p−1)n} f̂_j(out) = p·n + p·Σ_{j ≤ i} f̂_j(in)` and
/// `f̂_{i+(p−1)n}(out) = p·f̂_i(in)`, with `i` 1-based.
pub fn descendant_sum_check(ms_in: &[LogValue], ms_out: &[LogValue], i: usize, p: u32) -> Result<bool> {
    let n = ms_in.len();
    let mut fin = ms_in.to_vec();
    let mut fout = ms_out.to_vec();
    fin.sort_by(|a, b| b.cmp(a));
    fout.sort_by(|a, b| b.cmp(a));
    if i == 0 || i > n {
        return Err(Error::Precondition(format!("index {i} outside 1..={n}")));
    }
    if fout.len() != p as usize * n {
        return Err(Error::Precondition(format!("output has {} radii, expected {}", fout.len(), p as usize * n)));
    }
    if fin[i - 1] >= pi_val(p) {
        return Err(Error::Precondition(format!("f̂_{i} = {} is not below 1/(p−1)", fin[i - 1])));
    }
    let k = i + (p as usize - 1) * n;
    let pv = LogValue::from_int(p as i64);
    let lhs: LogValue = fout[..k].iter().sum();
    let rhs = LogValue::from_int((p as usize * n) as i64) + &pv * fin[..i].iter().sum::<LogValue>();
    Ok(lhs == rhs && fout[k - 1] == &pv * &fin[i - 1])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSum {
    pub profile: RadiiProfile,
    /// Some output envelope is not the envelope of a single input entry.
    pub widened: bool,
}

/// Profile of a direct sum: the pointwise merged multiset, re-sorted.
///
/// The `k`-th entry is bounded below by the `k`-th largest lower envelope
/// and above by the `k`-th largest upper envelope.
pub fn direct_sum_profile(parts: &[RadiiProfile]) -> Result<DirectSum> {
    let first = parts.first().ok_or_else(|| Error::InvalidInput("empty direct sum".into()))?;
    let (p, domain) = (first.prime(), first.domain().clone());
    if parts.iter().any(|q| q.prime() != p || *q.domain() != domain) {
        return Err(Error::InvalidInput("summands need the same prime and domain".into()));
    }
    let all: Vec<&[EntryTag]> = parts.iter().flat_map(|q| q.entries().iter().map(|e| e.as_slice())).collect();
    let funs: Vec<&PLFun> = all
        .iter()
        .flat_map(|pieces| pieces.iter())
        .flat_map(|t| [t.lower(), t.upper()])
        .collect();
    let mut cuts: BTreeSet<LogValue> = BTreeSet::new();
    for f in &funs {
        cuts.extend(f.knot_xs().cloned());
    }
    for (a, f) in funs.iter().enumerate() {
        for g in &funs[a + 1..] {
            if let Ok(d) = f.sub(g) {
                cuts.extend(d.zero_crossings());
            }
        }
    }
    let atoms = atoms(&domain, cuts);
    let n = all.len();
    let mut widened = false;
    let mut columns: Vec<Vec<AtomTag>> = vec![Vec::with_capacity(atoms.len()); n];
    for atom in &atoms {
        let tags = all.iter().map(|pieces| sample_entry(pieces, atom)).collect::<Result<Vec<_>>>()?;
        let x = atom.sample();
        let key = |t: &AtomTag, upper: bool| -> LogValue {
            match t {
                AtomTag::Point(pv) => if upper { pv.upper() } else { pv.lower() }.clone(),
                AtomTag::Open(e) => if upper { e.upper() } else { e.lower() }.eval_closure(&x),
            }
        };
        let mut by_lower: Vec<usize> = (0..n).collect();
        let mut by_upper: Vec<usize> = (0..n).collect();
        by_lower.sort_by(|&a, &b| key(&tags[b], false).cmp(&key(&tags[a], false)));
        by_upper.sort_by(|&a, &b| key(&tags[b], true).cmp(&key(&tags[a], true)));
        for k in 0..n {
            let (lo, hi) = (&tags[by_lower[k]], &tags[by_upper[k]]);
            let tag = match (atom, lo, hi) {
                (Atom::Point(_), AtomTag::Point(a), AtomTag::Point(b)) => {
                    let (l, u) = (a.lower().clone(), b.upper().clone());
                    if !tags.iter().any(|t| matches!(t, AtomTag::Point(v) if *v.lower() == l && *v.upper() == u)) {
                        widened = true;
                    }
                    AtomTag::Point(if l == u { PointValue::Exact(l) } else { PointValue::Bounded(l, u) })
                }
                (Atom::Open(..), AtomTag::Open(a), AtomTag::Open(b)) => {
                    let (l, u) = (a.lower().clone(), b.upper().clone());
                    if !tags.iter().any(|t| matches!(t, AtomTag::Open(e) if *e.lower() == l && *e.upper() == u)) {
                        widened = true;
                    }
                    AtomTag::Open(if l == u { EntryTag::Exact(l) } else { EntryTag::Bounded { lower: l, upper: u } })
                }
                _ => unreachable!("sampling preserves atom kinds"),
            };
            columns[k].push(tag);
        }
    }
    let entries = columns.into_iter().map(|c| assemble(&atoms, c)).collect::<Result<Vec<_>>>()?;
    Ok(DirectSum { profile: RadiiProfile::new(p, domain, entries)?, widened })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: i64) -> LogValue {
        LogValue::from_int(n)
    }

    fn lv(n: i64, d: i64) -> LogValue {
        LogValue::frac(n, d)
    }

    fn prof(p: u32, fs: Vec<PLFun>) -> RadiiProfile {
        RadiiProfile::from_exact(p, fs).unwrap()
    }

    fn dom(a: i64, b: i64) -> Interval {
        Interval::open(v(a), v(b)).unwrap()
    }

    #[test]
    fn tame_examples() {
        let d = Interval::open(v(0), v(4)).unwrap();
        let f = PLFun::identity(d.clone()).max(&PLFun::affine(d.clone(), v(-1), v(2))).unwrap();
        let g = tame_transform(&prof(3, vec![f]), 2).unwrap();
        let d2 = Interval::open(v(0), v(2)).unwrap();
        let expect = PLFun::identity(d2.clone()).max(&PLFun::affine(d2.clone(), v(-3), v(2))).unwrap();
        assert_eq!(g.exact_entry(1), Some(&expect));

        let id = prof(5, vec![PLFun::identity(d.clone())]);
        let g = tame_transform(&id, 3).unwrap();
        assert_eq!(g.exact_entry(1), Some(&PLFun::identity(g.domain().clone())));

        let f = PLFun::identity(d.clone()).max(&PLFun::constant(d.clone(), v(1))).unwrap();
        let g = tame_transform(&prof(2, vec![f]), 3).unwrap();
        let d3 = g.domain().clone();
        let expect = PLFun::identity(d3.clone()).max(&PLFun::affine(d3, v(-2), v(1))).unwrap();
        assert_eq!(g.exact_entry(1), Some(&expect));
        assert_eq!(tame_transform(&id, 10), Err(Error::DivisibleByP(10, 5)));
    }

    #[test]
    fn antecedent_examples() {
        let d = Interval::open(v(0), lv(1, 5)).unwrap();
        let f = PLFun::identity(d.clone()).max(&PLFun::constant(d.clone(), v(1))).unwrap();
        assert!(antecedent_exists(&prof(2, vec![f]), &d).unwrap());

        let d = Interval::open(v(0), lv(1, 2)).unwrap();
        let f = PLFun::affine(d.clone(), v(-1), v(2));
        let p = prof(2, vec![f]);
        assert!(!antecedent_exists(&p, &d).unwrap());
        assert!(matches!(antecedent_transform(&p), Err(Error::NoAntecedent(_))));

        let id = prof(3, vec![PLFun::identity(dom(0, 1))]);
        let g = antecedent_transform(&id).unwrap();
        assert_eq!(g.exact_entry(1), Some(&PLFun::identity(dom(0, 3))));
        assert_eq!(antecedent_pullback(&g).unwrap(), id);
    }

    #[test]
    fn descendant_examples() {
        assert_eq!(descendant_multiset(&[lv(3, 10)], &lv(1, 10), 2).unwrap(), vec![v(2), lv(3, 5)]);
        assert_eq!(descendant_multiset(&[lv(3, 2)], &lv(1, 10), 2).unwrap(), vec![lv(5, 2), lv(5, 2)]);
        assert_eq!(descendant_multiset(&[v(1)], &lv(1, 10), 2).unwrap(), vec![v(2), v(2)]);
        assert!(descendant_multiset(&[v(1)], &v(1), 2).is_err());

        let out = descendant_multiset(&[lv(3, 10)], &lv(1, 10), 2).unwrap();
        assert!(descendant_sum_check(&[lv(3, 10)], &out, 1, 2).unwrap());
        let out = descendant_multiset(&[lv(1, 4)], &lv(1, 8), 3).unwrap();
        assert_eq!(out, vec![lv(3, 2), lv(3, 2), lv(3, 4)]);
        assert!(descendant_sum_check(&[lv(1, 4)], &out, 1, 3).unwrap());
        let ms = [lv(3, 10), lv(1, 5)];
        let out = descendant_multiset(&ms, &lv(1, 10), 2).unwrap();
        // top i+(p−1)n = 4 radii against p·n + p·(0.3 + 0.2)
        let lhs = v(2) + v(2) + lv(3, 5) + lv(2, 5);
        assert_eq!(lhs, v(4) + v(2) * (lv(3, 10) + lv(1, 5)));
        assert!(descendant_sum_check(&ms, &out, 2, 2).unwrap());
        assert!(descendant_sum_check(&[v(3)], &[v(4), v(4)], 1, 2).is_err());
    }

    #[test]
    fn direct_sum_examples() {
        let d = dom(0, 3);
        let id = PLFun::identity(d.clone());
        let s = direct_sum_profile(&[prof(2, vec![id.clone()]), prof(2, vec![id.clone()])]).unwrap();
        assert_eq!(s.profile, prof(2, vec![id.clone(), id.clone()]));
        assert!(!s.widened);

        let m1 = id.max(&PLFun::constant(d.clone(), v(1))).unwrap();
        let s = direct_sum_profile(&[prof(2, vec![id.clone()]), prof(2, vec![m1.clone()])]).unwrap();
        assert_eq!(s.profile, prof(2, vec![m1.clone(), id.clone()]));

        let m2 = id.max(&PLFun::affine(d.clone(), v(-1), v(2))).unwrap();
        let s = direct_sum_profile(&[prof(2, vec![m2.clone()]), prof(2, vec![m1.clone()])]).unwrap();
        assert_eq!(s.profile, prof(2, vec![m2.max(&m1).unwrap(), m2.min(&m1).unwrap()]));
        assert!(!s.widened);
    }

    #[test]
    fn direct_sum_of_overlapping_envelopes_is_flagged() {
        let d = dom(0, 2);
        let id = PLFun::identity(d.clone());
        let bounded = RadiiProfile::new(
            2,
            d.clone(),
            vec![vec![EntryTag::Bounded { lower: id.clone(), upper: id.add_affine(&v(0), &v(1)) }]],
        )
        .unwrap();
        let exact = prof(2, vec![id.add_affine(&v(0), &lv(1, 2))]);
        let s = direct_sum_profile(&[bounded, exact]).unwrap();
        assert!(s.widened);
        assert!(!s.profile.entry(1)[0].is_exact());
    }
}
