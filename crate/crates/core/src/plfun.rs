//! Continuous piecewise-affine functions on intervals with exact knots.
//!
//! Every radius profile in the crate is a [`PLFun`]. Values are kept in
//! canonical form: knot abscissae strictly increase, the first and last knots
//! sit on the domain endpoints, and no interior knot is collinear with its
//! neighbours. Structural equality is therefore functional equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalars::{LogValue, Rational};

/// A nondegenerate interval with `LogValue` endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: LogValue,
    hi: LogValue,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: LogValue, hi: LogValue, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInput(format!("degenerate interval with endpoints {lo} and {hi}")));
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    pub fn closed(lo: LogValue, hi: LogValue) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: LogValue, hi: LogValue) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    /// `(lo, hi]`
    pub fn open_closed(lo: LogValue, hi: LogValue) -> Result<Self> {
        Self::new(lo, hi, false, true)
    }

    /// `[lo, hi)`
    pub fn closed_open(lo: LogValue, hi: LogValue) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    pub fn lo(&self) -> &LogValue {
        &self.lo
    }

    pub fn hi(&self) -> &LogValue {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn contains(&self, x: &LogValue) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Membership in the closure `[lo, hi]`.
    pub fn closure_contains(&self, x: &LogValue) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> LogValue {
        self.lo.midpoint(&self.hi)
    }

    pub fn width(&self) -> LogValue {
        &self.hi - &self.lo
    }

    /// Intersection, if it is a nondegenerate interval.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed).ok()
    }

    /// True if every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = match self.lo.cmp(&other.lo) {
            Ordering::Greater => true,
            Ordering::Equal => other.lo_closed || !self.lo_closed,
            Ordering::Less => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            Ordering::Less => true,
            Ordering::Equal => other.hi_closed || !self.hi_closed,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    /// The image under `t ↦ a·t + b` for rational `a ≠ 0`.
    pub fn affine_image(&self, a: &Rational, b: &LogValue) -> Result<Interval> {
        if a.is_zero() {
            return Err(Error::InvalidInput("zero scale factor".into()));
        }
        let map = |x: &LogValue| x.scale(a) + b;
        if *a > Rational::zero() {
            Interval::new(map(&self.lo), map(&self.hi), self.lo_closed, self.hi_closed)
        } else {
            Interval::new(map(&self.hi), map(&self.lo), self.hi_closed, self.lo_closed)
        }
    }

    pub fn with_flags(&self, lo_closed: bool, hi_closed: bool) -> Interval {
        Interval { lo_closed, hi_closed, ..self.clone() }
    }

    /// The closed hull `[lo, hi]`.
    pub fn closure(&self) -> Interval {
        self.with_flags(true, true)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineMode {
    Max,
    Min,
    Add,
}

/// A maximal affine piece of a [`PLFun`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopePiece {
    pub slope: LogValue,
    pub interval: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeList {
    pub pieces: Vec<SlopePiece>,
    pub terminal: LogValue,
}

/// A continuous piecewise-affine function on an [`Interval`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLFun {
    domain: Interval,
    knots: Vec<(LogValue, LogValue)>,
}

impl PLFun {
    /// Build from knots whose first and last abscissae are the domain
    /// endpoints. Redundant knots are dropped.
    pub fn new(domain: Interval, knots: Vec<(LogValue, LogValue)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidInput("a PL function needs at least two knots".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInput("knot abscissae must strictly increase".into()));
        }
        if knots[0].0 != domain.lo || knots[knots.len() - 1].0 != domain.hi {
            return Err(Error::InvalidInput(format!("knots do not span the domain {domain}")));
        }
        Ok(PLFun { domain, knots: canonicalize(knots) })
    }

    /// Knots on the closed hull of their abscissae.
    pub fn from_knots(knots: Vec<(LogValue, LogValue)>) -> Result<Self> {
        let (lo, hi) = match (knots.first(), knots.last()) {
            (Some(a), Some(b)) => (a.0.clone(), b.0.clone()),
            _ => return Err(Error::InvalidInput("no knots".into())),
        };
        Self::new(Interval::closed(lo, hi)?, knots)
    }

    /// `x ↦ slope·x + intercept`.
    pub fn affine(domain: Interval, slope: LogValue, intercept: LogValue) -> Self {
        let y = |x: &LogValue| &slope * x + &intercept;
        let knots = vec![(domain.lo.clone(), y(&domain.lo)), (domain.hi.clone(), y(&domain.hi))];
        PLFun { domain, knots }
    }

    pub fn identity(domain: Interval) -> Self {
        Self::affine(domain, LogValue::one(), LogValue::zero())
    }

    pub fn constant(domain: Interval, c: LogValue) -> Self {
        Self::affine(domain, LogValue::zero(), c)
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn knots(&self) -> &[(LogValue, LogValue)] {
        &self.knots
    }

    pub fn knot_xs(&self) -> impl Iterator<Item = &LogValue> {
        self.knots.iter().map(|(x, _)| x)
    }

    pub fn is_affine(&self) -> bool {
        self.knots.len() == 2
    }

    pub fn eval(&self, x: &LogValue) -> Result<LogValue> {
        if !self.domain.contains(x) {
            return Err(Error::OutOfDomain(x.to_string(), self.domain.to_string()));
        }
        Ok(self.eval_closure(x))
    }

    /// Evaluation on the closed hull of the domain; at an open endpoint this
    /// is the one-sided limit. Panics outside the hull.
    pub fn eval_closure(&self, x: &LogValue) -> LogValue {
        assert!(self.domain.closure_contains(x), "{x} outside {}", self.domain);
        let idx = self.knots.partition_point(|(kx, _)| kx < x);
        if idx < self.knots.len() && &self.knots[idx].0 == x {
            return self.knots[idx].1.clone();
        }
        let (xa, ya) = &self.knots[idx - 1];
        let (xb, yb) = &self.knots[idx];
        ya + (yb - ya) * (x - xa) / (xb - xa)
    }

    /// Pointwise max/min/sum on the intersection of the domains.
    pub fn combine(&self, mode: CombineMode, other: &PLFun) -> Result<PLFun> {
        let domain = self.domain.intersect(&other.domain).ok_or(Error::EmptyIntersection)?;
        let mut xs: Vec<LogValue> = self
            .knot_xs()
            .chain(other.knot_xs())
            .filter(|x| domain.closure_contains(x))
            .cloned()
            .chain([domain.lo.clone(), domain.hi.clone()])
            .collect();
        xs.sort();
        xs.dedup();
        if mode != CombineMode::Add {
            let mut with_crossings = Vec::with_capacity(xs.len() * 2);
            for w in xs.windows(2) {
                with_crossings.push(w[0].clone());
                let da = self.eval_closure(&w[0]) - other.eval_closure(&w[0]);
                let db = self.eval_closure(&w[1]) - other.eval_closure(&w[1]);
                if da.opposite_sign(&db) {
                    let t = &da / (&da - &db);
                    with_crossings.push(&w[0] + t * (&w[1] - &w[0]));
                }
            }
            with_crossings.push(xs[xs.len() - 1].clone());
            xs = with_crossings;
        }
        let knots = xs
            .into_iter()
            .map(|x| {
                let (a, b) = (self.eval_closure(&x), other.eval_closure(&x));
                let y = match mode {
                    CombineMode::Max => a.max(b),
                    CombineMode::Min => a.min(b),
                    CombineMode::Add => a + b,
                };
                (x, y)
            })
            .collect();
        PLFun::new(domain, knots)
    }

    pub fn max(&self, other: &PLFun) -> Result<PLFun> {
        self.combine(CombineMode::Max, other)
    }

    pub fn min(&self, other: &PLFun) -> Result<PLFun> {
        self.combine(CombineMode::Min, other)
    }

    pub fn add(&self, other: &PLFun) -> Result<PLFun> {
        self.combine(CombineMode::Add, other)
    }

    pub fn sub(&self, other: &PLFun) -> Result<PLFun> {
        self.add(&other.scale(&-LogValue::one()))
    }

    /// Pointwise max of a nonempty family.
    pub fn max_all<'a>(fs: impl IntoIterator<Item = &'a PLFun>) -> Result<PLFun> {
        let mut it = fs.into_iter();
        let first = it.next().ok_or_else(|| Error::InvalidInput("empty family".into()))?.clone();
        it.try_fold(first, |acc, f| acc.max(f))
    }

    /// Pointwise min of a nonempty family.
    pub fn min_all<'a>(fs: impl IntoIterator<Item = &'a PLFun>) -> Result<PLFun> {
        let mut it = fs.into_iter();
        let first = it.next().ok_or_else(|| Error::InvalidInput("empty family".into()))?.clone();
        it.try_fold(first, |acc, f| acc.min(f))
    }

    /// `c·f`.
    pub fn scale(&self, c: &LogValue) -> PLFun {
        let knots = self.knots.iter().map(|(x, y)| (x.clone(), c * y)).collect();
        PLFun { domain: self.domain.clone(), knots: canonicalize(knots) }
    }

    /// `f + (slope·x + intercept)`.
    pub fn add_affine(&self, slope: &LogValue, intercept: &LogValue) -> PLFun {
        let knots = self
            .knots
            .iter()
            .map(|(x, y)| (x.clone(), y + slope * x + intercept))
            .collect();
        PLFun { domain: self.domain.clone(), knots: canonicalize(knots) }
    }

    /// `g(t) = c·f(a·t + b)` on the pulled-back domain.
    pub fn reparam(&self, a: &Rational, b: &LogValue, c: &Rational) -> Result<PLFun> {
        if a.is_zero() {
            return Err(Error::InvalidInput("reparametrization with a = 0".into()));
        }
        let inv = a.recip();
        let shift = -b.scale(&inv);
        let domain = self.domain.affine_image(&inv, &shift)?;
        let mut knots: Vec<_> = self
            .knots
            .iter()
            .map(|(x, y)| (x.scale(&inv) + &shift, y.scale(c)))
            .collect();
        if *a < Rational::zero() {
            knots.reverse();
        }
        PLFun::new(domain, knots)
    }

    /// Restriction to a subinterval of the domain.
    pub fn restrict(&self, sub: &Interval) -> Result<PLFun> {
        if !sub.is_subset_of(&self.domain) {
            return Err(Error::OutOfDomain(sub.to_string(), self.domain.to_string()));
        }
        let mut knots = vec![(sub.lo.clone(), self.eval_closure(&sub.lo))];
        knots.extend(self.knots.iter().filter(|(x, _)| &sub.lo < x && x < &sub.hi).cloned());
        knots.push((sub.hi.clone(), self.eval_closure(&sub.hi)));
        PLFun::new(sub.clone(), knots)
    }

    /// Same function on the same closed hull with new endpoint flags.
    pub fn with_domain_flags(&self, lo_closed: bool, hi_closed: bool) -> PLFun {
        PLFun { domain: self.domain.with_flags(lo_closed, hi_closed), knots: self.knots.clone() }
    }

    /// Slopes of consecutive pieces, left to right.
    pub fn piece_slopes(&self) -> Vec<LogValue> {
        self.knots.windows(2).map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).collect()
    }

    /// True iff slopes are nondecreasing from left to right.
    pub fn is_convex(&self) -> bool {
        self.piece_slopes().windows(2).all(|w| w[0] <= w[1])
    }

    pub fn is_concave(&self) -> bool {
        self.piece_slopes().windows(2).all(|w| w[0] >= w[1])
    }

    pub fn slopes(&self) -> SlopeList {
        let slopes = self.piece_slopes();
        let n = slopes.len();
        let pieces = slopes
            .into_iter()
            .enumerate()
            .map(|(k, slope)| {
                let lo_closed = if k == 0 { self.domain.lo_closed } else { true };
                let hi_closed = if k + 1 == n { self.domain.hi_closed } else { true };
                let interval = Interval {
                    lo: self.knots[k].0.clone(),
                    hi: self.knots[k + 1].0.clone(),
                    lo_closed,
                    hi_closed,
                };
                SlopePiece { slope, interval }
            })
            .collect::<Vec<_>>();
        let terminal = pieces[pieces.len() - 1].slope.clone();
        SlopeList { pieces, terminal }
    }

    pub fn terminal_slope(&self) -> LogValue {
        let n = self.knots.len();
        (&self.knots[n - 1].1 - &self.knots[n - 2].1) / (&self.knots[n - 1].0 - &self.knots[n - 2].0)
    }

    /// Slope of the piece immediately left of `x`; `x` must not be the
    /// left end of the domain.
    pub fn left_slope_at(&self, x: &LogValue) -> Result<LogValue> {
        if !self.domain.closure_contains(x) || *x == self.domain.lo {
            return Err(Error::OutOfDomain(x.to_string(), self.domain.to_string()));
        }
        let idx = self.knots.partition_point(|(kx, _)| kx < x);
        Ok(self.piece_slopes()[idx - 1].clone())
    }

    /// Slope of the piece immediately right of `x`.
    pub fn right_slope_at(&self, x: &LogValue) -> Result<LogValue> {
        if !self.domain.closure_contains(x) || *x == self.domain.hi {
            return Err(Error::OutOfDomain(x.to_string(), self.domain.to_string()));
        }
        let idx = self.knots.partition_point(|(kx, _)| kx <= x);
        Ok(self.piece_slopes()[idx - 1].clone())
    }

    /// True iff every slope is a rational in `(1/n!)·ℤ`.
    pub fn slopes_in_factorial_lattice(&self, n: u32) -> bool {
        let fact: BigInt = (1..=n.max(1)).map(BigInt::from).product();
        self.piece_slopes().iter().all(|s| s.in_lattice(&fact))
    }

    /// Abscissae in the closed domain where the function vanishes at a knot
    /// or changes sign inside a piece.
    pub fn zero_crossings(&self) -> Vec<LogValue> {
        let mut out = Vec::new();
        for (k, w) in self.knots.windows(2).enumerate() {
            let ((xa, ya), (xb, yb)) = (&w[0], &w[1]);
            if k == 0 && ya.is_zero() {
                out.push(xa.clone());
            }
            if ya.opposite_sign(yb) {
                out.push(xa - ya * (xb - xa) / (yb - ya));
            }
            if yb.is_zero() {
                out.push(xb.clone());
            }
        }
        out
    }

    /// True iff `f(x) < 0` at every point of the domain.
    pub fn is_strictly_negative(&self) -> bool {
        let n = self.knots.len();
        let knots_ok = self.knots.iter().enumerate().all(|(k, (_, y))| {
            let open_end = (k == 0 && !self.domain.lo_closed) || (k + 1 == n && !self.domain.hi_closed);
            if open_end {
                !y.is_positive()
            } else {
                y.is_negative()
            }
        });
        knots_ok && self.knots.windows(2).all(|w| w[0].1.midpoint(&w[1].1).is_negative())
    }

    /// Breakpoint table, one row `x_a,x_b,y_a,y_b` per knot.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_a,x_b,y_a,y_b\n");
        for (x, y) in &self.knots {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_q(x.rational_part()),
                fmt_q(x.sqrt2_part()),
                fmt_q(y.rational_part()),
                fmt_q(y.sqrt2_part())
            ));
        }
        out
    }

    pub fn from_csv(text: &str, lo_closed: bool, hi_closed: bool) -> Result<PLFun> {
        let mut knots = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("x_a") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 4 {
                return Err(Error::InvalidInput(format!("line {}: expected 4 fields", lineno + 1)));
            }
            let parse = |s: &str| parse_q(s).map_err(|e| Error::InvalidInput(format!("line {}: {e}", lineno + 1)));
            let x = LogValue::new(parse(fields[0])?, parse(fields[1])?);
            let y = LogValue::new(parse(fields[2])?, parse(fields[3])?);
            knots.push((x, y));
        }
        let (lo, hi) = match (knots.first(), knots.last()) {
            (Some(a), Some(b)) => (a.0.clone(), b.0.clone()),
            _ => return Err(Error::InvalidInput("empty breakpoint table".into())),
        };
        PLFun::new(Interval::new(lo, hi, lo_closed, hi_closed)?, knots)
    }
}

impl fmt::Debug for PLFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PLFun{} {{", self.domain)?;
        for (k, (x, y)) in self.knots.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, " ({x}, {y})")?;
        }
        write!(f, " }}")
    }
}

/// `num/den`, always with an explicit denominator.
pub fn fmt_q(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse `n` or `n/d`; a zero denominator is an error.
pub fn parse_q(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator {n:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad denominator {d:?}"))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(n, d))
}

fn canonicalize(knots: Vec<(LogValue, LogValue)>) -> Vec<(LogValue, LogValue)> {
    let mut out: Vec<(LogValue, LogValue)> = Vec::with_capacity(knots.len());
    for k in knots {
        while out.len() >= 2 {
            let (xa, ya) = &out[out.len() - 2];
            let (xb, yb) = &out[out.len() - 1];
            // drop the middle knot when it is collinear with its neighbours
            if (yb - ya) * (&k.0 - xb) == (&k.1 - yb) * (xb - xa) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;
    use proptest::prelude::*;

    fn v(n: i64) -> LogValue {
        LogValue::from_int(n)
    }

    fn pl(pts: &[(i64, i64)]) -> PLFun {
        PLFun::from_knots(pts.iter().map(|&(x, y)| (v(x), v(y))).collect()).unwrap()
    }

    fn closed(a: i64, b: i64) -> Interval {
        Interval::closed(v(a), v(b)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = pl(&[(0, 1), (1, 1), (2, 3)]);
        assert_eq!(f.eval(&LogValue::frac(3, 2)).unwrap(), v(2));
        assert_eq!(pl(&[(0, 0), (1, 1)]).eval(&v(0)).unwrap(), v(0));
        assert_eq!(pl(&[(0, 2), (1, 1), (2, 2)]).eval(&v(1)).unwrap(), v(1));
        assert!(f.eval(&v(3)).is_err());
        let open = f.with_domain_flags(false, true);
        assert!(open.eval(&v(0)).is_err());
    }

    #[test]
    fn combine_examples() {
        let id = PLFun::identity(closed(0, 2));
        let one = PLFun::constant(closed(0, 2), v(1));
        assert_eq!(id.max(&one).unwrap(), pl(&[(0, 1), (1, 1), (2, 2)]));
        let id01 = PLFun::identity(closed(0, 1));
        assert_eq!(id01.add(&id01).unwrap(), PLFun::affine(closed(0, 1), v(2), v(0)));
        let f = pl(&[(0, 3), (1, 0), (4, 2)]);
        assert_eq!(f.min(&f).unwrap(), f);
        let disjoint = PLFun::identity(closed(5, 6));
        assert_eq!(id.max(&disjoint), Err(Error::EmptyIntersection));
    }

    #[test]
    fn canonical_form_drops_collinear_knots() {
        let f = pl(&[(0, 0), (1, 1), (2, 2), (3, 2)]);
        assert_eq!(f.knots().len(), 3);
        assert_eq!(f, pl(&[(0, 0), (2, 2), (3, 2)]));
    }

    #[test]
    fn reparam_examples() {
        // max(t,1) with a = 2, c = 1/2 gives max(t, 1/2)
        let f = PLFun::identity(closed(0, 4)).max(&PLFun::constant(closed(0, 4), v(1))).unwrap();
        let g = f.reparam(&q(2, 1), &LogValue::zero(), &q(1, 2)).unwrap();
        let expect = PLFun::identity(closed(0, 2))
            .max(&PLFun::constant(closed(0, 2), LogValue::frac(1, 2)))
            .unwrap();
        assert_eq!(g, expect);
        assert_eq!(f.reparam(&q(1, 1), &LogValue::zero(), &q(1, 1)).unwrap(), f);
        assert!(f.reparam(&q(0, 1), &LogValue::zero(), &q(1, 1)).is_err());

        // g(u) = f(2u) − u for f = max(s, 2 − s) is max(u, 2 − 3u)
        let f = pl(&[(0, 2), (1, 1), (2, 2)]);
        let g = f
            .reparam(&q(2, 1), &LogValue::zero(), &q(1, 1))
            .unwrap()
            .add_affine(&v(-1), &v(0));
        let dom = Interval::closed(v(0), v(1)).unwrap();
        let expect = PLFun::identity(dom.clone())
            .max(&PLFun::affine(dom, v(-3), v(2)))
            .unwrap();
        assert_eq!(g, expect);
    }

    #[test]
    fn negative_scale_reverses_domain() {
        let f = PLFun::identity(Interval::open_closed(v(0), v(3)).unwrap());
        let g = f.reparam(&q(-1, 1), &LogValue::zero(), &q(1, 1)).unwrap();
        assert_eq!(*g.domain(), Interval::closed_open(v(-3), v(0)).unwrap());
        assert_eq!(g.eval(&v(-2)).unwrap(), v(2));
    }

    #[test]
    fn convexity_examples() {
        assert!(pl(&[(0, 2), (1, 1), (2, 2)]).is_convex());
        assert!(!pl(&[(0, 0), (1, 1), (2, 1)]).is_convex());
        assert!(PLFun::affine(closed(0, 5), v(-7), v(1)).is_convex());
    }

    #[test]
    fn slope_examples() {
        let f = PLFun::identity(closed(0, 2)).max(&PLFun::constant(closed(0, 2), v(1))).unwrap();
        let s = f.slopes();
        assert_eq!(s.pieces.iter().map(|p| p.slope.clone()).collect::<Vec<_>>(), vec![v(0), v(1)]);
        assert_eq!(s.terminal, v(1));
        assert_eq!(s.pieces[0].interval, closed(0, 1));
        let c = PLFun::constant(closed(0, 1), v(3)).slopes();
        assert_eq!(c.pieces.len(), 1);
        assert_eq!(c.terminal, v(0));
        let t = pl(&[(0, 2), (1, 1), (2, 2)]).slopes();
        assert_eq!(t.pieces.iter().map(|p| p.slope.clone()).collect::<Vec<_>>(), vec![v(-1), v(1)]);
        assert_eq!(t.terminal, v(1));
    }

    #[test]
    fn one_sided_slopes() {
        let f = pl(&[(-1, 1), (0, 0), (1, 1)]);
        assert_eq!(f.left_slope_at(&v(0)).unwrap(), v(-1));
        assert_eq!(f.right_slope_at(&v(0)).unwrap(), v(1));
        assert_eq!(f.right_slope_at(&LogValue::frac(-1, 2)).unwrap(), v(-1));
        assert!(f.left_slope_at(&v(-1)).is_err());
    }

    #[test]
    fn factorial_lattice() {
        let f = PLFun::affine(closed(0, 1), LogValue::frac(1, 2), v(0));
        assert!(!f.slopes_in_factorial_lattice(1));
        assert!(f.slopes_in_factorial_lattice(2));
        let g = PLFun::affine(closed(0, 1), LogValue::sqrt2(), v(0));
        assert!(!g.slopes_in_factorial_lattice(5));
    }

    #[test]
    fn strict_negativity_respects_open_ends() {
        let f = PLFun::affine(Interval::open(v(0), v(1)).unwrap(), v(-1), v(0));
        assert!(f.is_strictly_negative());
        assert!(!f.with_domain_flags(true, false).is_strictly_negative());
        let zero = PLFun::constant(Interval::open(v(0), v(1)).unwrap(), v(0));
        assert!(!zero.is_strictly_negative());
    }

    #[test]
    fn csv_round_trip() {
        let f = PLFun::from_knots(vec![
            (LogValue::frac(1, 3), LogValue::sqrt2()),
            (v(2), LogValue::new(q(-5, 7), q(1, 2))),
        ])
        .unwrap()
        .with_domain_flags(false, true);
        let text = f.to_csv();
        assert!(text.starts_with("x_a,x_b,y_a,y_b\n1/3,0/1,0/1,1/1\n"));
        assert_eq!(PLFun::from_csv(&text, false, true).unwrap(), f);
        assert!(PLFun::from_csv("0,0,1/0,0\n1,0,0,0\n", true, true).is_err());
    }

    fn arb_fun() -> impl Strategy<Value = PLFun> {
        // knots at integer abscissae 0..=6 with optional √2 values
        prop::collection::vec((-8i64..8, 1i64..4, -2i64..3), 7).prop_map(|ys| {
            let knots = ys
                .into_iter()
                .enumerate()
                .map(|(k, (a, d, b))| (v(k as i64), LogValue::new(q(a, d), q(b, 3))))
                .collect();
            PLFun::from_knots(knots).unwrap()
        })
    }

    fn arb_point() -> impl Strategy<Value = LogValue> {
        (0i64..=60, -1i64..=1).prop_map(|(n, b)| {
            let x = LogValue::frac(n, 10) + LogValue::sqrt2().scale(&q(b, 100));
            x.max(v(0)).min(v(6))
        })
    }

    proptest! {
        #[test]
        fn combine_agrees_pointwise(f in arb_fun(), g in arb_fun(), xs in prop::collection::vec(arb_point(), 20)) {
            let mx = f.max(&g).unwrap();
            let mn = f.min(&g).unwrap();
            let sm = f.add(&g).unwrap();
            for x in &xs {
                let (a, b) = (f.eval(x).unwrap(), g.eval(x).unwrap());
                prop_assert_eq!(mx.eval(x).unwrap(), a.clone().max(b.clone()));
                prop_assert_eq!(mn.eval(x).unwrap(), a.clone().min(b.clone()));
                prop_assert_eq!(sm.eval(x).unwrap(), a + b);
            }
        }

        #[test]
        fn reparam_composes(f in arb_fun(), a in 1i64..4, sa in prop::bool::ANY, b in -3i64..3,
                            c in 1i64..5, a2 in 1i64..3, b2 in -2i64..2, c2 in -3i64..3,
                            xs in prop::collection::vec(0i64..=60, 20)) {
            let a = if sa { q(a, 2) } else { q(-a, 2) };
            let (b, c) = (LogValue::frac(b, 3), q(c, 2));
            let (a2, b2, c2) = (q(a2, 1), LogValue::from_int(b2), q(c2, 1));
            let twice = f.reparam(&a, &b, &c).unwrap().reparam(&a2, &b2, &c2).unwrap();
            let once = f.reparam(&(&a * &a2), &(b2.scale(&a) + &b), &(&c * &c2)).unwrap();
            prop_assert_eq!(twice.domain(), once.domain());
            let dom = once.domain().clone();
            for n in xs {
                let t = dom.lo() + dom.width().scale(&q(n, 60));
                prop_assert_eq!(twice.eval_closure(&t), once.eval_closure(&t));
            }
            prop_assert_eq!(twice, once);
        }

        #[test]
        fn canonical_form_is_unique(f in arb_fun(), extra in prop::collection::vec(0i64..=60, 0..5)) {
            // re-inserting redundant knots and re-canonicalizing recovers f
            let mut knots: Vec<_> = f.knots().to_vec();
            for n in extra {
                let x = LogValue::frac(n, 10);
                if knots.iter().all(|(kx, _)| *kx != x) {
                    knots.push((x.clone(), f.eval(&x).unwrap()));
                }
            }
            knots.sort_by(|a, b| a.0.cmp(&b.0));
            prop_assert_eq!(PLFun::new(f.domain().clone(), knots).unwrap(), f);
        }
    }
}
