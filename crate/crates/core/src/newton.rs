//! Valued Laurent polynomials, Gauss valuations and Newton polygons.
//!
//! All quantities are valuations (−log_p of norms). A polynomial is recorded
//! only through the valuations of its coefficients, which is all the radius
//! computations need once exponents are distinct.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::plfun::{Interval, PLFun};
use crate::scalars::{LogValue, Rational};

/// Σ a_e x^e recorded as pairs `(e, v_p(a_e))`, sorted by exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ValuedPoly {
    terms: Vec<(i64, LogValue)>,
}

impl ValuedPoly {
    pub fn new(terms: impl IntoIterator<Item = (i64, LogValue)>) -> Result<Self> {
        let mut terms: Vec<_> = terms.into_iter().collect();
        terms.sort_by_key(|(e, _)| *e);
        if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateExponent(w[0].0));
        }
        Ok(ValuedPoly { terms })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(e: i64, v: LogValue) -> Self {
        ValuedPoly { terms: vec![(e, v)] }
    }

    pub fn terms(&self) -> &[(i64, LogValue)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Relabel exponents by an injective map and shift every valuation.
    pub fn map_terms(&self, exp: impl Fn(i64) -> i64, shift: &LogValue) -> Result<Self> {
        Self::new(self.terms.iter().map(|(e, v)| (exp(*e), v + shift)))
    }

    /// min over terms of `v + e·r̂`.
    pub fn gauss_val(&self, r: &LogValue) -> Result<LogValue> {
        self.terms
            .iter()
            .map(|(e, v)| v + r.scale(&Rational::from_integer((*e).into())))
            .min()
            .ok_or(Error::ZeroPolynomial)
    }

    /// `r̂ ↦ gauss_val(r̂)` on an interval, as a concave PL function.
    pub fn gauss_profile(&self, domain: &Interval) -> Result<PLFun> {
        let affines: Vec<PLFun> = self
            .terms
            .iter()
            .map(|(e, v)| PLFun::affine(domain.clone(), LogValue::from_int(*e), v.clone()))
            .collect();
        if affines.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        PLFun::min_all(&affines)
    }
}

pub fn gauss_val(p: &ValuedPoly, r: &LogValue) -> Result<LogValue> {
    p.gauss_val(r)
}

/// Σ b_i x^i with each coefficient recorded as `(i, k, q)`: p-adic valuation
/// `k` and residue valuation `q`, so that the term has valuation
/// `k + q·r̂ + i·s·r̂` for the norm |·|_{ρ^v, s}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePoly {
    terms: Vec<(i64, Rational, Rational)>,
}

impl BivariatePoly {
    pub fn new(terms: impl IntoIterator<Item = (i64, Rational, Rational)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(BivariatePoly { terms })
    }

    pub fn terms(&self) -> &[(i64, Rational, Rational)] {
        &self.terms
    }

    pub fn gauss_val2(&self, r: &LogValue, s: &LogValue) -> Result<LogValue> {
        if !r.is_positive() || s.is_negative() {
            return Err(Error::Precondition(format!("need r̂ > 0 and s ≥ 0, got r̂ = {r}, s = {s}")));
        }
        Ok(self
            .terms
            .iter()
            .map(|(i, k, q)| LogValue::rational(k.clone()) + r.scale(q) + (s * r).scale(&Rational::from_integer((*i).into())))
            .min()
            .expect("nonempty by construction"))
    }

    /// `s ↦ gauss_val2(r̂, s)` for fixed `r̂`.
    pub fn profile_in_s(&self, r: &LogValue, domain: &Interval) -> Result<PLFun> {
        let affines: Vec<PLFun> = self
            .terms
            .iter()
            .map(|(i, k, q)| {
                let slope = r.scale(&Rational::from_integer((*i).into()));
                PLFun::affine(domain.clone(), slope, LogValue::rational(k.clone()) + r.scale(q))
            })
            .collect();
        PLFun::min_all(&affines)
    }

    /// `r̂ ↦ gauss_val2(r̂, s)` for fixed `s`.
    pub fn profile_in_r(&self, s: &LogValue, domain: &Interval) -> Result<PLFun> {
        let affines: Vec<PLFun> = self
            .terms
            .iter()
            .map(|(i, k, q)| {
                let slope = LogValue::rational(q.clone()) + s.scale(&Rational::from_integer((*i).into()));
                PLFun::affine(domain.clone(), slope, LogValue::rational(k.clone()))
            })
            .collect();
        PLFun::min_all(&affines)
    }
}

/// Ascending slopes of a lower convex hull with their horizontal widths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonSlopes {
    pub slopes: Vec<(LogValue, u64)>,
}

impl PolygonSlopes {
    pub fn total_width(&self) -> u64 {
        self.slopes.iter().map(|(_, m)| m).sum()
    }

    /// Slopes repeated by multiplicity, ascending.
    pub fn expanded(&self) -> Vec<LogValue> {
        self.slopes
            .iter()
            .flat_map(|(s, m)| std::iter::repeat_n(s.clone(), *m as usize))
            .collect()
    }

    fn merged(mut raw: Vec<(LogValue, u64)>) -> Self {
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        let mut slopes: Vec<(LogValue, u64)> = Vec::with_capacity(raw.len());
        for (s, m) in raw {
            match slopes.last_mut() {
                Some(last) if last.0 == s => last.1 += m,
                _ => slopes.push((s, m)),
            }
        }
        PolygonSlopes { slopes }
    }
}

// Indices (into `pts`, sorted by abscissa) of the lower hull vertices,
// collinear points dropped.
fn lower_hull(pts: &[(i64, LogValue)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(pts.len());
    for k in 0..pts.len() {
        while hull.len() >= 2 {
            let (a, b) = (&pts[hull[hull.len() - 2]], &pts[hull[hull.len() - 1]]);
            let c = &pts[k];
            // b is not strictly below segment ac
            let lhs = (&b.1 - &a.1) * LogValue::from_int(c.0 - a.0);
            let rhs = (&c.1 - &a.1) * LogValue::from_int(b.0 - a.0);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

fn sorted_points(points: &[(i64, LogValue)]) -> Result<Vec<(i64, LogValue)>> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let mut pts = points.to_vec();
    pts.sort_by_key(|(i, _)| *i);
    if let Some(w) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateExponent(w[0].0));
    }
    Ok(pts)
}

/// Lower convex hull of the points `(i, V_i)`.
pub fn newton_polygon(points: &[(i64, LogValue)]) -> Result<PolygonSlopes> {
    let pts = sorted_points(points)?;
    let hull = lower_hull(&pts);
    let raw = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (&pts[w[0]], &pts[w[1]]);
            let width = b.0 - a.0;
            ((&b.1 - &a.1) / LogValue::from_int(width), width as u64)
        })
        .collect();
    Ok(PolygonSlopes::merged(raw))
}

/// A hull edge between abscissae `left < right` whose slope is affine in r̂
/// on the owning cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullEdge {
    pub left: i64,
    pub right: i64,
    pub slope: PLFun,
}

impl HullEdge {
    pub fn width(&self) -> u64 {
        (self.right - self.left) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullCell {
    pub interval: Interval,
    pub edges: Vec<HullEdge>,
}

/// The Newton polygon of `(i, V_i(r̂))` over an interval of r̂, cut into
/// cells of constant hull combinatorics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamHull {
    pub cells: Vec<HullCell>,
}

impl ParamHull {
    /// Slopes at a point; on a shared cell endpoint either neighbour gives
    /// the same answer once equal slopes are merged.
    pub fn eval_at(&self, r: &LogValue) -> Result<PolygonSlopes> {
        let cell = self
            .cells
            .iter()
            .find(|c| c.interval.contains(r))
            .ok_or_else(|| Error::OutOfDomain(r.to_string(), self.domain().to_string()))?;
        let raw = cell.edges.iter().map(|e| (e.slope.eval_closure(r), e.width())).collect();
        Ok(PolygonSlopes::merged(raw))
    }

    pub fn domain(&self) -> Interval {
        let (first, last) = (&self.cells[0].interval, &self.cells[self.cells.len() - 1].interval);
        Interval::new(first.lo().clone(), last.hi().clone(), first.lo_closed(), last.hi_closed())
            .expect("cells are nondegenerate")
    }
}

/// Parametric Newton polygon of the heights `V_i = gauss_val(polys[i], ·)`;
/// zero entries contribute no point.
pub fn parametric_hull(polys: &[ValuedPoly], interval: &Interval) -> Result<ParamHull> {
    let present: Vec<(i64, PLFun)> = polys
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(i, p)| Ok((i as i64, p.gauss_profile(&interval.closure())?)))
        .collect::<Result<_>>()?;
    parametric_hull_of_heights(&present, interval)
}

/// Same as [`parametric_hull`] for arbitrary PL heights `(i, V_i)`.
pub fn parametric_hull_of_heights(heights: &[(i64, PLFun)], interval: &Interval) -> Result<ParamHull> {
    if heights.len() < 2 {
        return Err(Error::TooFewPoints(heights.len()));
    }
    let closed = interval.closure();
    let heights: Vec<(i64, PLFun)> = heights
        .iter()
        .map(|(i, v)| Ok((*i, v.restrict(&closed).map_err(|_| Error::OutOfDomain(closed.to_string(), v.domain().to_string()))?)))
        .collect::<Result<_>>()?;
    sorted_points(&heights.iter().map(|(i, _)| (*i, LogValue::zero())).collect::<Vec<_>>())?;

    let mut cuts: BTreeSet<LogValue> = heights.iter().flat_map(|(_, v)| v.knot_xs().cloned()).collect();
    let base: Vec<LogValue> = cuts.iter().cloned().collect();
    for w in base.windows(2) {
        let eval = |x: &LogValue| -> Vec<LogValue> { heights.iter().map(|(_, v)| v.eval_closure(x)).collect() };
        let (va, vb) = (eval(&w[0]), eval(&w[1]));
        let n = heights.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let orient = |vals: &[LogValue]| {
                        let (ia, ib, ic) = (heights[a].0, heights[b].0, heights[c].0);
                        (&vals[b] - &vals[a]) * LogValue::from_int(ic - ia)
                            - (&vals[c] - &vals[a]) * LogValue::from_int(ib - ia)
                    };
                    let (oa, ob) = (orient(&va), orient(&vb));
                    if oa.opposite_sign(&ob) {
                        let t = &oa / (&oa - &ob);
                        cuts.insert(&w[0] + t * (&w[1] - &w[0]));
                    }
                }
            }
        }
    }

    let cuts: Vec<LogValue> = cuts.into_iter().collect();
    let ncells = cuts.len() - 1;
    let mut cells: Vec<HullCell> = Vec::with_capacity(ncells);
    for (k, w) in cuts.windows(2).enumerate() {
        let cell_iv = Interval::new(
            w[0].clone(),
            w[1].clone(),
            if k == 0 { interval.lo_closed() } else { true },
            if k + 1 == ncells { interval.hi_closed() } else { true },
        )?;
        let mid = cell_iv.midpoint();
        let pts: Vec<(i64, LogValue)> = heights.iter().map(|(i, v)| (*i, v.eval_closure(&mid))).collect();
        let hull = lower_hull(&pts);
        let edges = hull
            .windows(2)
            .map(|e| {
                let (ia, ib) = (&heights[e[0]], &heights[e[1]]);
                let width = LogValue::from_int(ib.0 - ia.0);
                let at = |x: &LogValue| (ib.1.eval_closure(x) - ia.1.eval_closure(x)) / &width;
                let knots = vec![(w[0].clone(), at(&w[0])), (w[1].clone(), at(&w[1]))];
                Ok(HullEdge { left: ia.0, right: ib.0, slope: PLFun::new(cell_iv.clone(), knots)? })
            })
            .collect::<Result<Vec<_>>>()?;
        push_merging(&mut cells, HullCell { interval: cell_iv, edges });
    }
    Ok(ParamHull { cells })
}

// Append a cell, fusing it with the previous one when the combinatorics agree
// and every edge slope stays affine across the seam.
fn push_merging(cells: &mut Vec<HullCell>, cell: HullCell) {
    if let Some(prev) = cells.last_mut() {
        let same_shape = prev.edges.len() == cell.edges.len()
            && prev.edges.iter().zip(&cell.edges).all(|(a, b)| a.left == b.left && a.right == b.right);
        if same_shape {
            let iv = Interval::new(
                prev.interval.lo().clone(),
                cell.interval.hi().clone(),
                prev.interval.lo_closed(),
                cell.interval.hi_closed(),
            )
            .expect("adjacent cells");
            let fused: Option<Vec<HullEdge>> = prev
                .edges
                .iter()
                .zip(&cell.edges)
                .map(|(a, b)| {
                    let mut knots = a.slope.knots().to_vec();
                    knots.extend(b.slope.knots()[1..].iter().cloned());
                    let f = PLFun::new(iv.clone(), knots).ok()?;
                    f.is_affine().then_some(HullEdge { left: a.left, right: a.right, slope: f })
                })
                .collect();
            if let Some(edges) = fused {
                *prev = HullCell { interval: iv, edges };
                return;
            }
        }
    }
    cells.push(cell);
}
