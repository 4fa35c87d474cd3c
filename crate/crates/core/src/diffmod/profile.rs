//! Radius profiles from cyclic-vector operators.
//!
//! The general rule reads the profile off the parametric Newton polygon of
//! the points `(i, V_i(r̂))`: a slope `μ > r̂` gives the exact entry
//! `1/(p−1) + μ`; the remaining entries lie in `[r̂, 1/(p−1) + r̂]`.
//!
//! Rank-one operators with monomial leading coefficient get two sharper
//! rules. If no exponent `e` of the connection form has `p | e+1`, the module
//! is a Dwork module and its profile is given in closed form. If every
//! exponent has `p | e+1`, the module is the Frobenius pullback of an
//! explicit module, whose profile pulls back wherever the antecedent
//! condition holds.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::newton::{newton_polygon, parametric_hull, ParamHull, ValuedPoly};
use crate::plfun::{Interval, PLFun};
use crate::scalars::{q, LogValue, Rational};

use super::assemble::{assemble, atoms, Atom, AtomTag};
use super::{pi_val, CyclicOperator, EntryTag, PointValue, RadiiProfile};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProfileOptions {
    /// Use only the Newton-polygon rule, even for rank one.
    pub cyclic_only: bool,
}

/// `max(r̂, max_j(−v_j − j·r̂))` for a Dwork datum `r = Σ r_j x^j` with
/// `p ∤ j+1` for every exponent.
pub fn dwork_profile(p: u32, r: &ValuedPoly, interval: &Interval) -> Result<PLFun> {
    if let Some((j, _)) = r.terms().iter().find(|(j, _)| (j + 1).rem_euclid(p as i64) == 0) {
        return Err(Error::DivisibleByP(j + 1, p));
    }
    let mut f = PLFun::identity(interval.clone());
    for (j, v) in r.terms() {
        f = f.max(&PLFun::affine(interval.clone(), LogValue::from_int(-j), -v))?;
    }
    Ok(f)
}

pub fn radii_profile(op: &CyclicOperator, interval: &Interval) -> Result<RadiiProfile> {
    radii_profile_with(op, interval, ProfileOptions::default())
}

pub fn radii_profile_with(op: &CyclicOperator, interval: &Interval, opts: ProfileOptions) -> Result<RadiiProfile> {
    if interval.lo().is_negative() || (interval.lo().is_zero() && interval.lo_closed()) {
        return Err(Error::Precondition(format!("log-radius interval {interval} must lie in r̂ > 0")));
    }
    let p = op.prime();
    if !opts.cyclic_only {
        if let Some(theta) = op.connection_form() {
            let pe = p as i64;
            let wild = |e: &i64| (e + 1).rem_euclid(pe) == 0;
            let exps: Vec<i64> = theta.terms().iter().map(|(e, _)| *e).collect();
            if exps.is_empty() {
                return RadiiProfile::from_exact(p, vec![PLFun::identity(interval.clone())]);
            }
            if !exps.iter().any(wild) {
                let r = theta.map_terms(|e| e, &-pi_val(p))?;
                return RadiiProfile::from_exact(p, vec![dwork_profile(p, &r, interval)?]);
            }
            if exps.iter().all(|e| wild(e) && *e != -1) {
                return frobenius_descent(op, &theta, interval, opts);
            }
        }
    }
    let cyc = Cyclic::new(op, interval)?;
    let atoms = atoms(interval, cyc.cuts());
    let per_atom = atoms.iter().map(|a| cyc.tags(a)).collect::<Result<Vec<_>>>()?;
    finish(p, interval, &atoms, per_atom, op.rank())
}

fn finish(p: u32, interval: &Interval, atoms: &[Atom], per_atom: Vec<Vec<AtomTag>>, n: usize) -> Result<RadiiProfile> {
    let mut columns: Vec<Vec<AtomTag>> = vec![Vec::with_capacity(atoms.len()); n];
    for tags in per_atom {
        for (i, t) in tags.into_iter().enumerate() {
            columns[i].push(t);
        }
    }
    let entries = columns.into_iter().map(|c| assemble(atoms, c)).collect::<Result<Vec<_>>>()?;
    RadiiProfile::new(p, interval.clone(), entries)
}

// `E` has connection form θ with every exponent e = p(k+1) − 1, so E is the
// pullback along x ↦ x^p of F with form θ'_k = θ_e / p.
fn frobenius_descent(
    op: &CyclicOperator,
    theta: &ValuedPoly,
    interval: &Interval,
    opts: ProfileOptions,
) -> Result<RadiiProfile> {
    let p = op.prime();
    let pe = p as i64;
    let pq = Rational::from_integer(pe.into());
    let down = theta.map_terms(|e| (e + 1) / pe - 1, &-LogValue::one())?;
    let f_op = CyclicOperator::new(p, vec![down, ValuedPoly::monomial(0, LogValue::zero())])?;
    let g = radii_profile_with(&f_op, &interval.affine_image(&pq, &LogValue::zero())?, opts)?;

    // candidate E-profiles s ↦ g(ps)/p and the antecedent margin
    // h(s) = f(s) − s − 1/(p−1), which must be negative
    let c = pi_val(p);
    let cands: Vec<(PLFun, PLFun)> = g
        .entry(1)
        .iter()
        .filter_map(|t| match t {
            EntryTag::Exact(g) => Some(g),
            _ => None,
        })
        .map(|g| {
            let f = g.reparam(&pq, &LogValue::zero(), &q(1, pe))?;
            let h = f.add_affine(&-LogValue::one(), &-&c);
            Ok((f, h))
        })
        .collect::<Result<_>>()?;

    let cyc = Cyclic::new(op, interval)?;
    let mut cuts = cyc.cuts();
    for (f, h) in &cands {
        cuts.extend(f.knot_xs().cloned());
        cuts.extend(h.zero_crossings());
    }
    let atoms = atoms(interval, cuts);
    let per_atom = atoms
        .iter()
        .map(|a| {
            let x = a.sample();
            let hit = cands.iter().find(|(f, h)| f.domain().contains(&x) && h.eval_closure(&x).is_negative());
            match (hit, a.cell()) {
                (Some((f, _)), None) => Ok(vec![AtomTag::Point(PointValue::Exact(f.eval_closure(&x)))]),
                (Some((f, _)), Some(cell)) => {
                    Ok(vec![AtomTag::Open(EntryTag::Exact(f.with_domain_flags(true, true).restrict(&cell)?))])
                }
                (None, _) => cyc.tags(a),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    finish(p, interval, &atoms, per_atom, 1)
}

struct Cyclic<'a> {
    op: &'a CyclicOperator,
    hull: Option<ParamHull>,
    c: LogValue,
}

impl<'a> Cyclic<'a> {
    fn new(op: &'a CyclicOperator, interval: &Interval) -> Result<Self> {
        let present = op.coeffs().iter().filter(|p| !p.is_zero()).count();
        let hull = if present >= 2 { Some(parametric_hull(op.coeffs(), interval)?) } else { None };
        Ok(Cyclic { op, hull, c: pi_val(op.prime()) })
    }

    // Hull cell boundaries and the points where a slope crosses r̂.
    fn cuts(&self) -> BTreeSet<LogValue> {
        let mut cuts = BTreeSet::new();
        let Some(hull) = &self.hull else { return cuts };
        for cell in &hull.cells {
            let (a, b) = (cell.interval.lo(), cell.interval.hi());
            cuts.insert(a.clone());
            cuts.insert(b.clone());
            for e in &cell.edges {
                let (da, db) = (e.slope.eval_closure(a) - a, e.slope.eval_closure(b) - b);
                if da.opposite_sign(&db) {
                    cuts.insert(a + &da / (&da - &db) * (b - a));
                }
            }
        }
        cuts
    }

    fn tags(&self, atom: &Atom) -> Result<Vec<AtomTag>> {
        let n = self.op.rank();
        let x = atom.sample();
        match atom.cell() {
            Some(cell) => {
                let mut visible: Vec<(LogValue, PLFun)> = Vec::new();
                if let Some(hull) = &self.hull {
                    let hc = hull
                        .cells
                        .iter()
                        .find(|c| c.interval.contains(&x))
                        .ok_or_else(|| Error::Inconsistent(format!("no hull cell contains {x}")))?;
                    for e in &hc.edges {
                        let mu = e.slope.eval_closure(&x);
                        if mu > x {
                            let f = e.slope.with_domain_flags(true, true).restrict(&cell)?.add_affine(&LogValue::zero(), &self.c);
                            visible.extend(std::iter::repeat_n((mu, f), e.width() as usize));
                        }
                    }
                }
                visible.sort_by(|a, b| b.0.cmp(&a.0));
                let mut out: Vec<AtomTag> = visible.into_iter().map(|(_, f)| AtomTag::Open(EntryTag::Exact(f))).collect();
                let lower = PLFun::identity(cell);
                let upper = lower.add_affine(&LogValue::zero(), &self.c);
                out.resize(n, AtomTag::Open(EntryTag::Bounded { lower, upper }));
                Ok(out)
            }
            None => {
                let pts: Vec<(i64, LogValue)> = self
                    .op
                    .coeffs()
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(i, p)| Ok((i as i64, p.gauss_val(&x)?)))
                    .collect::<Result<_>>()?;
                let mut visible: Vec<LogValue> = if pts.len() >= 2 {
                    newton_polygon(&pts)?.expanded().into_iter().filter(|mu| *mu > x).collect()
                } else {
                    Vec::new()
                };
                visible.sort_by(|a, b| b.cmp(a));
                let mut out: Vec<AtomTag> =
                    visible.into_iter().map(|mu| AtomTag::Point(PointValue::Exact(mu + &self.c))).collect();
                out.resize(n, AtomTag::Point(PointValue::Bounded(x.clone(), &x + &self.c)));
                Ok(out)
            }
        }
    }
}
