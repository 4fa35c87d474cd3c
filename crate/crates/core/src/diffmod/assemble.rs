//! Stitching per-cell results into profile entries.
//!
//! A domain is cut at finitely many points into atoms: the cut points
//! themselves and the open cells between them. Rules report a tag per atom;
//! [`assemble`] fuses runs of compatible atoms into maximal pieces.

use crate::error::{Error, Result};
use crate::plfun::{Interval, PLFun};
use crate::scalars::LogValue;

use super::{EntryTag, PointValue};

#[derive(Clone, Debug)]
pub(crate) enum Atom {
    Point(LogValue),
    Open(LogValue, LogValue),
}

impl Atom {
    /// A point strictly inside the atom, or the point itself.
    pub(crate) fn sample(&self) -> LogValue {
        match self {
            Atom::Point(x) => x.clone(),
            Atom::Open(a, b) => a.midpoint(b),
        }
    }

    pub(crate) fn cell(&self) -> Option<Interval> {
        match self {
            Atom::Point(_) => None,
            Atom::Open(a, b) => Some(Interval::closed(a.clone(), b.clone()).expect("cells are nondegenerate")),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum AtomTag {
    Point(PointValue),
    /// Functions on the closed cell.
    Open(EntryTag),
}

/// Atoms of `domain` cut at `cuts` (points outside the closed domain are
/// ignored).
pub(crate) fn atoms(domain: &Interval, cuts: impl IntoIterator<Item = LogValue>) -> Vec<Atom> {
    let mut xs: Vec<LogValue> = cuts
        .into_iter()
        .filter(|x| domain.lo() < x && x < domain.hi())
        .chain([domain.lo().clone(), domain.hi().clone()])
        .collect();
    xs.sort();
    xs.dedup();
    let mut out = Vec::with_capacity(2 * xs.len());
    for (k, w) in xs.windows(2).enumerate() {
        if k > 0 || domain.lo_closed() {
            out.push(Atom::Point(w[0].clone()));
        }
        out.push(Atom::Open(w[0].clone(), w[1].clone()));
    }
    if domain.hi_closed() {
        out.push(Atom::Point(xs[xs.len() - 1].clone()));
    }
    out
}

/// Tag of an existing entry on one atom.
pub(crate) fn sample_entry(pieces: &[EntryTag], atom: &Atom) -> Result<AtomTag> {
    let x = atom.sample();
    let t = pieces
        .iter()
        .find(|t| t.domain().contains(&x))
        .ok_or_else(|| Error::OutOfDomain(x.to_string(), "profile".into()))?;
    Ok(match atom.cell() {
        None => AtomTag::Point(t.value_at(&x)),
        Some(cell) => AtomTag::Open(t.map(|f| f.with_domain_flags(true, true).restrict(&cell))?),
    })
}

struct Builder {
    exact: bool,
    lo: LogValue,
    lo_closed: bool,
    hi_closed: bool,
    lower: Vec<(LogValue, LogValue)>,
    upper: Vec<(LogValue, LogValue)>,
}

impl Builder {
    fn from_point(x: &LogValue, pv: &PointValue) -> Self {
        Builder {
            exact: matches!(pv, PointValue::Exact(_)),
            lo: x.clone(),
            lo_closed: true,
            hi_closed: true,
            lower: vec![(x.clone(), pv.lower().clone())],
            upper: vec![(x.clone(), pv.upper().clone())],
        }
    }

    fn from_open(t: &EntryTag) -> Self {
        Builder {
            exact: t.is_exact(),
            lo: t.domain().lo().clone(),
            lo_closed: false,
            hi_closed: false,
            lower: t.lower().knots().to_vec(),
            upper: t.upper().knots().to_vec(),
        }
    }

    fn last(&self) -> (&LogValue, &LogValue, &LogValue) {
        let (x, l) = self.lower.last().expect("builders hold a knot");
        (x, l, &self.upper.last().expect("builders hold a knot").1)
    }

    fn matches_point(&self, x: &LogValue, pv: &PointValue) -> bool {
        let (lx, l, u) = self.last();
        lx == x && self.exact == matches!(pv, PointValue::Exact(_)) && l == pv.lower() && u == pv.upper()
    }

    fn matches_open(&self, t: &EntryTag) -> bool {
        let (lx, l, u) = self.last();
        let (x0, y0) = &t.lower().knots()[0];
        lx == x0 && self.exact == t.is_exact() && l == y0 && u == &t.upper().knots()[0].1
    }

    fn extend(&mut self, t: &EntryTag) {
        self.lower.extend(t.lower().knots()[1..].iter().cloned());
        self.upper.extend(t.upper().knots()[1..].iter().cloned());
        self.hi_closed = false;
    }

    fn finish(self) -> Result<EntryTag> {
        if self.lower.len() < 2 {
            return Err(Error::Inconsistent(format!("isolated value at {}", self.lo)));
        }
        let hi = self.lower[self.lower.len() - 1].0.clone();
        let iv = Interval::new(self.lo, hi, self.lo_closed, self.hi_closed)?;
        let lower = PLFun::new(iv.clone(), self.lower)?;
        Ok(if self.exact {
            EntryTag::Exact(lower)
        } else {
            EntryTag::Bounded { lower, upper: PLFun::new(iv, self.upper)? }
        })
    }
}

/// Fuse per-atom tags into pieces. A bounded point next to an exact cell
/// whose limit lies in the bounds takes that limit (profiles are
/// continuous).
pub(crate) fn assemble(atoms: &[Atom], tags: Vec<AtomTag>) -> Result<Vec<EntryTag>> {
    debug_assert_eq!(atoms.len(), tags.len());
    let mut tags = tags;
    for k in 0..atoms.len() {
        let Atom::Point(x) = &atoms[k] else { continue };
        let AtomTag::Point(PointValue::Bounded(l, u)) = &tags[k] else { continue };
        let limit = |j: Option<usize>| -> Option<LogValue> {
            match tags.get(j?) {
                Some(AtomTag::Open(EntryTag::Exact(f))) => Some(f.eval_closure(x)),
                _ => None,
            }
        };
        let limits: Vec<LogValue> = [limit(k.checked_sub(1)), limit(Some(k + 1))].into_iter().flatten().collect();
        if let [a, b] = limits.as_slice() {
            if a != b {
                return Err(Error::Inconsistent(format!("exact one-sided limits {a} and {b} differ at {x}")));
            }
        }
        if let Some(y) = limits.into_iter().find(|y| l <= y && y <= u) {
            tags[k] = AtomTag::Point(PointValue::Exact(y));
        }
    }

    let mut out = Vec::new();
    let mut cur: Option<Builder> = None;
    for (atom, tag) in atoms.iter().zip(&tags) {
        match (atom, tag) {
            (Atom::Point(x), AtomTag::Point(pv)) => {
                if let Some(b) = cur.as_mut() {
                    if b.matches_point(x, pv) {
                        b.hi_closed = true;
                        continue;
                    }
                }
                if let Some(b) = cur.take() {
                    out.push(b.finish()?);
                }
                cur = Some(Builder::from_point(x, pv));
            }
            (Atom::Open(..), AtomTag::Open(t)) => {
                if let Some(b) = cur.as_mut() {
                    if b.matches_open(t) {
                        b.extend(t);
                        continue;
                    }
                }
                if let Some(b) = cur.take() {
                    out.push(b.finish()?);
                }
                cur = Some(Builder::from_open(t));
            }
            _ => return Err(Error::Inconsistent("atom and tag kinds disagree".into())),
        }
    }
    if let Some(b) = cur {
        out.push(b.finish()?);
    }
    Ok(out)
}
