//! Differential modules presented by cyclic-vector operators and their
//! subsidiary-radius profiles.
//!
//! A profile records `f̂_1 ≥ … ≥ f̂_n` as functions of `r̂`. Where the data
//! determine an entry it is [`EntryTag::Exact`]; elsewhere only an envelope is
//! known and the entry is [`EntryTag::Bounded`].

mod assemble;
mod checks;
mod padic;
mod profile;
mod transforms;

use std::fmt;

use crate::error::{Error, Result};
use crate::newton::ValuedPoly;
use crate::plfun::{Interval, PLFun};
use crate::scalars::{is_prime, LogValue};

pub use checks::{
    check_subharmonicity, check_subharmonicity_profiles, check_variation, robba_condition, separated,
    SubharmonicityReport, VariationReport,
};
pub use padic::{padic_val, PadicPoly};
pub use profile::{dwork_profile, radii_profile, radii_profile_with, ProfileOptions};
pub use transforms::{
    antecedent_exists, antecedent_pullback, antecedent_transform, descendant_multiset, descendant_sum_check,
    direct_sum_profile, tame_transform, DirectSum,
};

/// Valuation of π, where π^{p−1} = −p.
pub fn pi_val(p: u32) -> LogValue {
    LogValue::frac(1, p as i64 - 1)
}

/// `P_n·Tⁿ + … + P_0` acting on a cyclic vector, `T = d/dx`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicOperator {
    p: u32,
    coeffs: Vec<ValuedPoly>,
}

impl CyclicOperator {
    /// `coeffs[i]` is `P_i`; the leading coefficient must be nonzero.
    pub fn new(p: u32, coeffs: Vec<ValuedPoly>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        match coeffs.last() {
            None => return Err(Error::InvalidInput("operator needs at least one coefficient".into())),
            Some(_) if coeffs.len() < 2 => return Err(Error::InvalidInput("operator rank must be at least 1".into())),
            Some(lead) if lead.is_zero() => return Err(Error::ZeroPolynomial),
            _ => {}
        }
        Ok(CyclicOperator { p, coeffs })
    }

    /// `T − π·r`, the rank-one Dwork operator of `r`.
    pub fn dwork(p: u32, r: &ValuedPoly) -> Result<Self> {
        let p0 = r.map_terms(|e| e, &pi_val(p))?;
        Self::new(p, vec![p0, ValuedPoly::monomial(0, LogValue::zero())])
    }

    /// Pullback of the Dwork operator of `r` along `x ↦ x^p`: the connection
    /// form becomes `π·p·r(x^p)·x^{p−1}`.
    pub fn dwork_frobenius_pullback(p: u32, r: &ValuedPoly) -> Result<Self> {
        let pe = p as i64;
        let p0 = r.map_terms(|k| pe * k + pe - 1, &(pi_val(p) + LogValue::one()))?;
        Self::new(p, vec![p0, ValuedPoly::monomial(0, LogValue::zero())])
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ValuedPoly] {
        &self.coeffs
    }

    /// For rank one with monomial `P_1 = c·x^k`, the connection form
    /// `θ = −P_0/P_1` as valuation data.
    pub fn connection_form(&self) -> Option<ValuedPoly> {
        if self.rank() != 1 {
            return None;
        }
        match self.coeffs[1].terms() {
            [(k, vc)] => Some(self.coeffs[0].map_terms(|j| j - k, &-vc).expect("shift keeps exponents distinct")),
            _ => None,
        }
    }
}

/// Pullback of a Dwork datum along `x ↦ x^m`: `r(x^m)·m·x^{m−1}` with the
/// unit `m` absorbed.
pub fn tame_pullback_datum(r: &ValuedPoly, m: u32) -> Result<ValuedPoly> {
    let m = m as i64;
    r.map_terms(|j| m * j + m - 1, &LogValue::zero())
}

/// Tri-state answer for predicates that Bounded entries cannot settle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Indeterminate,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tri::True => "true",
            Tri::False => "false",
            Tri::Indeterminate => "indeterminate",
        }
    }
}

/// Value of an entry at one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointValue {
    Exact(LogValue),
    Bounded(LogValue, LogValue),
}

impl PointValue {
    pub fn lower(&self) -> &LogValue {
        match self {
            PointValue::Exact(y) | PointValue::Bounded(y, _) => y,
        }
    }

    pub fn upper(&self) -> &LogValue {
        match self {
            PointValue::Exact(y) | PointValue::Bounded(_, y) => y,
        }
    }
}

/// One piece of a profile entry; the piece domain is the domain of its
/// functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryTag {
    Exact(PLFun),
    Bounded { lower: PLFun, upper: PLFun },
}

impl EntryTag {
    pub fn domain(&self) -> &Interval {
        match self {
            EntryTag::Exact(f) => f.domain(),
            EntryTag::Bounded { lower, .. } => lower.domain(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, EntryTag::Exact(_))
    }

    pub fn lower(&self) -> &PLFun {
        match self {
            EntryTag::Exact(f) | EntryTag::Bounded { lower: f, .. } => f,
        }
    }

    pub fn upper(&self) -> &PLFun {
        match self {
            EntryTag::Exact(f) | EntryTag::Bounded { upper: f, .. } => f,
        }
    }

    /// Value on the closed hull of the piece.
    pub fn value_at(&self, x: &LogValue) -> PointValue {
        match self {
            EntryTag::Exact(f) => PointValue::Exact(f.eval_closure(x)),
            EntryTag::Bounded { lower, upper } => PointValue::Bounded(lower.eval_closure(x), upper.eval_closure(x)),
        }
    }

    pub fn map(&self, f: impl Fn(&PLFun) -> Result<PLFun>) -> Result<EntryTag> {
        Ok(match self {
            EntryTag::Exact(g) => EntryTag::Exact(f(g)?),
            EntryTag::Bounded { lower, upper } => EntryTag::Bounded { lower: f(lower)?, upper: f(upper)? },
        })
    }
}

/// Subsidiary-radius profile `f̂_1 ≥ … ≥ f̂_n` over a common domain. Each
/// entry is a left-to-right list of pieces partitioning the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiiProfile {
    p: u32,
    domain: Interval,
    entries: Vec<Vec<EntryTag>>,
}

impl RadiiProfile {
    pub fn new(p: u32, domain: Interval, entries: Vec<Vec<EntryTag>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("profile of rank 0".into()));
        }
        for (i, pieces) in entries.iter().enumerate() {
            check_partition(&domain, pieces).map_err(|e| Error::Inconsistent(format!("entry {}: {e}", i + 1)))?;
        }
        Ok(RadiiProfile { p, domain, entries })
    }

    /// A profile all of whose entries are exact functions on one domain.
    pub fn from_exact(p: u32, fs: Vec<PLFun>) -> Result<Self> {
        let domain = fs.first().ok_or_else(|| Error::InvalidInput("profile of rank 0".into()))?.domain().clone();
        if fs.iter().any(|f| *f.domain() != domain) {
            return Err(Error::InvalidInput("entries have different domains".into()));
        }
        Self::new(p, domain, fs.into_iter().map(|f| vec![EntryTag::Exact(f)]).collect())
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn entries(&self) -> &[Vec<EntryTag>] {
        &self.entries
    }

    /// Pieces of the 1-based entry `i`.
    pub fn entry(&self, i: usize) -> &[EntryTag] {
        &self.entries[i - 1]
    }

    /// The 1-based entry `i` if it is a single exact function.
    pub fn exact_entry(&self, i: usize) -> Option<&PLFun> {
        match self.entries.get(i.wrapping_sub(1))?.as_slice() {
            [EntryTag::Exact(f)] => Some(f),
            _ => None,
        }
    }

    pub fn exact_entries(&self) -> Option<Vec<&PLFun>> {
        (1..=self.rank()).map(|i| self.exact_entry(i)).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.exact_entries().is_some()
    }

    /// `f̂_1 + … + f̂_i` when those entries are exact.
    pub fn partial_sum(&self, i: usize) -> Option<PLFun> {
        let mut acc = self.exact_entry(1)?.clone();
        for k in 2..=i {
            acc = acc.add(self.exact_entry(k)?).ok()?;
        }
        Some(acc)
    }

    pub fn value_at(&self, i: usize, x: &LogValue) -> Result<PointValue> {
        self.entry(i)
            .iter()
            .find(|t| t.domain().contains(x))
            .map(|t| t.value_at(x))
            .ok_or_else(|| Error::OutOfDomain(x.to_string(), self.domain.to_string()))
    }

    /// Apply `f` to every function, with the new common domain `domain`.
    pub fn map_functions(&self, domain: Interval, f: impl Fn(&PLFun) -> Result<PLFun>) -> Result<RadiiProfile> {
        let entries = self
            .entries
            .iter()
            .map(|pieces| pieces.iter().map(|t| t.map(&f)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        RadiiProfile::new(self.p, domain, entries)
    }

    /// Restriction to a subinterval. A piece that would shrink to a single
    /// point is absorbed by its neighbour when the neighbour's statement
    /// remains true there.
    pub fn restrict(&self, sub: &Interval) -> Result<RadiiProfile> {
        if !sub.is_subset_of(&self.domain) {
            return Err(Error::OutOfDomain(sub.to_string(), self.domain.to_string()));
        }
        let mut entries = Vec::with_capacity(self.rank());
        for pieces in &self.entries {
            let mut out: Vec<EntryTag> = Vec::new();
            let mut pending: Option<(LogValue, PointValue)> = None;
            for t in pieces {
                match t.domain().intersect(sub) {
                    Some(iv) => {
                        let mut iv = iv;
                        if let Some((x, pv)) = pending.take() {
                            if !admits(t, &x, &pv) {
                                return Err(Error::Inconsistent(format!("cannot restrict across the point {x}")));
                            }
                            iv = iv.with_flags(true, iv.hi_closed());
                        }
                        out.push(t.map(|f| f.with_domain_flags(true, true).restrict(&iv))?);
                    }
                    None => {
                        let d = t.domain();
                        if sub.contains(d.hi()) && d.contains(d.hi()) && d.hi() == sub.lo() {
                            pending = Some((d.hi().clone(), t.value_at(d.hi())));
                        } else if sub.contains(d.lo()) && d.contains(d.lo()) && d.lo() == sub.hi() {
                            let last = out.last_mut().expect("a piece precedes the right endpoint");
                            if !admits(last, d.lo(), &t.value_at(d.lo())) {
                                return Err(Error::Inconsistent(format!("cannot restrict across the point {}", d.lo())));
                            }
                            let iv = last.domain().with_flags(last.domain().lo_closed(), true);
                            *last = last.map(|f| Ok(f.with_domain_flags(iv.lo_closed(), true)))?;
                        }
                    }
                }
            }
            entries.push(out);
        }
        RadiiProfile::new(self.p, sub.clone(), entries)
    }

    /// Breakpoint tables of all pieces, one block per entry.
    ///
    /// Columns: `entry,piece,tag,x_a,x_b,y_a,y_b,lo_closed,hi_closed`, where
    /// `tag` is `exact`, `lower` or `upper`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("entry,piece,tag,x_a,x_b,y_a,y_b,lo_closed,hi_closed\n");
        for (i, pieces) in self.entries.iter().enumerate() {
            for (k, t) in pieces.iter().enumerate() {
                let fs: Vec<(&str, &PLFun)> = match t {
                    EntryTag::Exact(f) => vec![("exact", f)],
                    EntryTag::Bounded { lower, upper } => vec![("lower", lower), ("upper", upper)],
                };
                for (tag, f) in fs {
                    let d = f.domain();
                    for line in f.to_csv().lines().skip(1) {
                        out.push_str(&format!(
                            "{},{},{tag},{line},{},{}\n",
                            i + 1,
                            k + 1,
                            d.lo_closed() as u8,
                            d.hi_closed() as u8
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn from_csv(p: u32, text: &str) -> Result<RadiiProfile> {
        use std::collections::BTreeMap;
        let mut blocks: BTreeMap<(usize, usize), Vec<(String, bool, bool, String)>> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with("entry") {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(Error::InvalidInput(format!("line {}: expected 9 fields", lineno + 1)));
            }
            let idx = |s: &str| s.parse::<usize>().map_err(|_| Error::InvalidInput(format!("line {}: bad index", lineno + 1)));
            let flag = |s: &str| match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(Error::InvalidInput(format!("line {}: bad flag {s:?}", lineno + 1))),
            };
            blocks.entry((idx(f[0])?, idx(f[1])?)).or_default().push((
                f[2].to_string(),
                flag(f[7])?,
                flag(f[8])?,
                f[3..7].join(","),
            ));
        }
        let mut entries: Vec<Vec<EntryTag>> = Vec::new();
        for ((i, _), rows) in blocks {
            let fun = |tag: &str| -> Result<Option<PLFun>> {
                let sel: Vec<_> = rows.iter().filter(|r| r.0 == tag).collect();
                if sel.is_empty() {
                    return Ok(None);
                }
                let text: String = sel.iter().map(|r| format!("{}\n", r.3)).collect();
                PLFun::from_csv(&text, sel[0].1, sel[0].2).map(Some)
            };
            let tag = match (fun("exact")?, fun("lower")?, fun("upper")?) {
                (Some(f), None, None) => EntryTag::Exact(f),
                (None, Some(lower), Some(upper)) => EntryTag::Bounded { lower, upper },
                _ => return Err(Error::InvalidInput(format!("entry {i}: malformed piece"))),
            };
            while entries.len() < i {
                entries.push(Vec::new());
            }
            entries[i - 1].push(tag);
        }
        let first = entries.first().and_then(|e| e.first()).ok_or_else(|| Error::InvalidInput("empty profile".into()))?;
        let last = entries[0].last().expect("nonempty");
        let domain = Interval::new(
            first.domain().lo().clone(),
            last.domain().hi().clone(),
            first.domain().lo_closed(),
            last.domain().hi_closed(),
        )?;
        RadiiProfile::new(p, domain, entries)
    }
}

// True if the piece's statement also holds at `x` given the value there.
fn admits(t: &EntryTag, x: &LogValue, pv: &PointValue) -> bool {
    match (t.value_at(x), pv) {
        (PointValue::Exact(a), PointValue::Exact(b)) => a == *b,
        (PointValue::Exact(_), PointValue::Bounded(..)) => false,
        (PointValue::Bounded(l, u), v) => l <= *v.lower() && *v.upper() <= u,
    }
}

fn check_partition(domain: &Interval, pieces: &[EntryTag]) -> std::result::Result<(), String> {
    let first = pieces.first().ok_or("no pieces")?.domain();
    let last = pieces[pieces.len() - 1].domain();
    if first.lo() != domain.lo() || first.lo_closed() != domain.lo_closed() {
        return Err(format!("pieces start at {first}, domain is {domain}"));
    }
    if last.hi() != domain.hi() || last.hi_closed() != domain.hi_closed() {
        return Err(format!("pieces end at {last}, domain is {domain}"));
    }
    for w in pieces.windows(2) {
        let (a, b) = (w[0].domain(), w[1].domain());
        if a.hi() != b.lo() || a.hi_closed() == b.lo_closed() {
            return Err(format!("pieces {a} and {b} do not tile"));
        }
    }
    for t in pieces {
        if let EntryTag::Bounded { lower, upper } = t {
            if lower.domain() != upper.domain() || upper.sub(lower).map_or(true, |d| d.knots().iter().any(|(_, y)| y.is_negative())) {
                return Err(format!("envelope on {} is not ordered", lower.domain()));
            }
        }
    }
    Ok(())
}

impl fmt::Display for RadiiProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rank {} profile on {} (p = {})", self.rank(), self.domain, self.p)?;
        for (i, pieces) in self.entries.iter().enumerate() {
            for t in pieces {
                match t {
                    EntryTag::Exact(g) => writeln!(f, "  f{}: exact {g:?}", i + 1)?,
                    EntryTag::Bounded { lower, upper } => {
                        writeln!(f, "  f{}: bounded on {} by {lower:?} .. {upper:?}", i + 1, lower.domain())?
                    }
                }
            }
        }
        Ok(())
    }
}
