//! JSON encodings of exact values. Rationals are `[num, den]` (or a bare
//! integer), log-values `[a_num, a_den, b_num, b_den]` for `a + b√2`.
//! Decimal floats are rejected everywhere.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use padic_radii::berkovich::{BerkovichPoint, Disc, LogRadius};
use padic_radii::dwork::ASParameter;
use padic_radii::newton::ValuedPoly;
use padic_radii::{GaloisField, HahnElement, Interval, LogValue, Rational};
use serde_json::{json, Value};

/// A validation failure at a JSON path such as `tasks[0].weights[1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for WireError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for WireError {}

pub type WireResult<T> = Result<T, WireError>;

/// A JSON value together with its path from the document root.
#[derive(Clone, Copy)]
pub struct At<'a> {
    pub value: &'a Value,
    path: &'a str,
}

pub struct Owned<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Owned<'a> {
    pub fn at(&self) -> At<'_> {
        At { value: self.value, path: &self.path }
    }
}

impl<'a> At<'a> {
    pub fn root(value: &'a Value) -> Self {
        At { value, path: "" }
    }

    pub fn path(&self) -> &str {
        self.path
    }

    pub fn err<T>(&self, message: impl Into<String>) -> WireResult<T> {
        Err(WireError { path: self.path.to_string(), message: message.into() })
    }

    pub fn field(&self, name: &str) -> WireResult<Owned<'a>> {
        match self.opt(name) {
            Some(v) => Ok(v),
            None => self.err(format!("missing field `{name}`")),
        }
    }

    pub fn opt(&self, name: &str) -> Option<Owned<'a>> {
        let path = if self.path.is_empty() { name.to_string() } else { format!("{}.{name}", self.path) };
        self.value.get(name).filter(|v| !v.is_null()).map(|value| Owned { value, path })
    }

    pub fn items(&self) -> WireResult<Vec<Owned<'a>>> {
        match self.value.as_array() {
            Some(xs) => Ok(xs
                .iter()
                .enumerate()
                .map(|(i, value)| Owned { value, path: format!("{}[{i}]", self.path) })
                .collect()),
            None => self.err("expected an array"),
        }
    }

    pub fn str(&self) -> WireResult<&'a str> {
        match self.value.as_str() {
            Some(s) => Ok(s),
            None => self.err("expected a string"),
        }
    }

    pub fn bool(&self) -> WireResult<bool> {
        match self.value.as_bool() {
            Some(b) => Ok(b),
            None => self.err("expected a boolean"),
        }
    }

    pub fn int(&self) -> WireResult<i64> {
        if self.value.is_f64() {
            return self.err("decimal floats are not allowed; use [num, den]");
        }
        match self.value.as_i64() {
            Some(n) => Ok(n),
            None => self.err("expected an integer"),
        }
    }

    pub fn uint(&self) -> WireResult<u32> {
        let n = self.int()?;
        match u32::try_from(n) {
            Ok(n) => Ok(n),
            Err(_) => self.err(format!("expected a nonnegative integer, got {n}")),
        }
    }

    pub fn rational(&self) -> WireResult<Rational> {
        if self.value.is_number() {
            return Ok(Rational::from_integer(self.int()?.into()));
        }
        let parts = self.items()?;
        if parts.len() != 2 {
            return self.err("a rational is [num, den]");
        }
        ratio(self, parts[0].at().int()?, parts[1].at().int()?)
    }

    pub fn logvalue(&self) -> WireResult<LogValue> {
        if self.value.is_number() {
            return Ok(LogValue::from_int(self.int()?));
        }
        let parts = self.items()?;
        let ints = parts.iter().map(|p| p.at().int()).collect::<WireResult<Vec<_>>>()?;
        match ints[..] {
            [n, d] => Ok(LogValue::rational(ratio(self, n, d)?)),
            [an, ad, bn, bd] => Ok(LogValue::new(ratio(self, an, ad)?, ratio(self, bn, bd)?)),
            _ => self.err("a log-value is an integer, [num, den] or [a_num, a_den, b_num, b_den]"),
        }
    }

    pub fn logvalues(&self) -> WireResult<Vec<LogValue>> {
        self.items()?.iter().map(|x| x.at().logvalue()).collect()
    }

    /// `[lo, hi]` (open) or `{"lo", "hi", "lo_closed", "hi_closed"}`.
    pub fn interval(&self) -> WireResult<Interval> {
        let (lo, hi, lc, hc) = if self.value.is_array() {
            let parts = self.items()?;
            if parts.len() != 2 {
                return self.err("an interval is [lo, hi] or an object");
            }
            (parts[0].at().logvalue()?, parts[1].at().logvalue()?, false, false)
        } else {
            let flag = |name: &str| self.opt(name).map_or(Ok(false), |f| f.at().bool());
            (
                self.field("lo")?.at().logvalue()?,
                self.field("hi")?.at().logvalue()?,
                flag("lo_closed")?,
                flag("hi_closed")?,
            )
        };
        Interval::new(lo, hi, lc, hc).or_else(|e| self.err(e.to_string()))
    }

    /// Terms `[[exponent, valuation], …]`.
    pub fn valued_poly(&self) -> WireResult<ValuedPoly> {
        let terms = self
            .items()?
            .iter()
            .map(|t| {
                let parts = t.at().items()?;
                if parts.len() != 2 {
                    return t.at().err("a term is [exponent, valuation]");
                }
                Ok((parts[0].at().int()?, parts[1].at().logvalue()?))
            })
            .collect::<WireResult<Vec<_>>>()?;
        ValuedPoly::new(terms).or_else(|e| self.err(e.to_string()))
    }

    /// Terms `[[coeff, exp_num, exp_den], …]` with coefficient codes in F_q.
    pub fn hahn(&self, field: &Arc<GaloisField>) -> WireResult<HahnElement> {
        let terms = self
            .items()?
            .iter()
            .map(|t| {
                let parts = t.at().items()?;
                if parts.len() != 3 {
                    return t.at().err("a term is [coeff, exp_num, exp_den]");
                }
                let c = parts[0].at().int()?;
                Ok((c, ratio(&t.at(), parts[1].at().int()?, parts[2].at().int()?)?))
            })
            .collect::<WireResult<Vec<_>>>()?;
        HahnElement::try_from_terms(field, terms).or_else(|e| self.err(e.to_string()))
    }

    pub fn hahns(&self, field: &Arc<GaloisField>) -> WireResult<Vec<HahnElement>> {
        self.items()?.iter().map(|x| x.at().hahn(field)).collect()
    }

    /// Terms `[[x_exponent, hahn], …]`.
    pub fn as_param(&self, field: &Arc<GaloisField>) -> WireResult<ASParameter> {
        let terms = self
            .items()?
            .iter()
            .map(|t| {
                let parts = t.at().items()?;
                if parts.len() != 2 {
                    return t.at().err("a term is [x_exponent, coefficient]");
                }
                Ok((parts[0].at().int()?, parts[1].at().hahn(field)?))
            })
            .collect::<WireResult<Vec<_>>>()?;
        Ok(ASParameter::new(field, terms))
    }

    /// A log-value or the string `"inf"`.
    pub fn radius(&self) -> WireResult<LogRadius> {
        if self.value.as_str() == Some("inf") {
            return Ok(LogRadius::Infinite);
        }
        Ok(LogRadius::Finite(self.logvalue()?))
    }

    pub fn disc(&self, field: &Arc<GaloisField>) -> WireResult<Disc> {
        let center = self.field("center")?.at().hahn(field)?;
        let s = self.field("s")?.at().radius()?;
        Disc::new(center, s).or_else(|e| self.err(e.to_string()))
    }

    /// `{"center", "s"}` or `{"prefix": [disc, …]}`.
    pub fn point(&self, field: &Arc<GaloisField>) -> WireResult<BerkovichPoint> {
        if let Some(prefix) = self.opt("prefix") {
            let discs = prefix.at().items()?.iter().map(|d| d.at().disc(field)).collect::<WireResult<Vec<_>>>()?;
            return BerkovichPoint::seq_prefix(discs).or_else(|e| self.err(e.to_string()));
        }
        Ok(BerkovichPoint::Disc(self.disc(field)?))
    }
}

fn ratio(at: &At<'_>, n: i64, d: i64) -> WireResult<Rational> {
    if d == 0 {
        return at.err("zero denominator");
    }
    Ok(Rational::new(n.into(), d.into()))
}

pub fn int_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => json!(x),
        None => json!(n.to_string()),
    }
}

pub fn rational_json(q: &Rational) -> Value {
    json!([int_json(q.numer()), int_json(q.denom())])
}

pub fn logvalue_json(x: &LogValue) -> Value {
    let (a, b) = (x.rational_part(), x.sqrt2_part());
    json!([int_json(a.numer()), int_json(a.denom()), int_json(b.numer()), int_json(b.denom())])
}

pub fn radius_json(r: &LogRadius) -> Value {
    match r {
        LogRadius::Finite(s) => logvalue_json(s),
        LogRadius::Infinite => json!("inf"),
    }
}

pub fn hahn_json(h: &HahnElement) -> Value {
    Value::Array(h.terms().iter().map(|(e, c)| json!([c, int_json(e.numer()), int_json(e.denom())])).collect())
}

pub fn as_param_json(u: &ASParameter) -> Value {
    Value::Array(u.coeffs().iter().map(|(i, c)| json!([i, hahn_json(c)])).collect())
}

pub fn disc_json(d: &Disc) -> Value {
    json!({ "center": hahn_json(d.center()), "s": radius_json(d.radius()) })
}

pub fn point_json(p: &BerkovichPoint) -> Value {
    match p {
        BerkovichPoint::Disc(d) => disc_json(d),
        BerkovichPoint::SeqPrefix(ds) => json!({ "prefix": ds.iter().map(disc_json).collect::<Vec<_>>() }),
    }
}

pub fn interval_json(i: &Interval) -> Value {
    json!({
        "lo": logvalue_json(i.lo()),
        "hi": logvalue_json(i.hi()),
        "lo_closed": i.lo_closed(),
        "hi_closed": i.hi_closed(),
    })
}
