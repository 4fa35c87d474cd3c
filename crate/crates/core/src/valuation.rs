//! Invariants of real valuations: rational rank, residual transcendence
//! degree and defect, plus Zariski's unimodular change of monomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::berkovich::PointType;
use crate::error::{Error, Result};
use crate::scalars::{LogValue, Rational};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Values `v(x_1), …, v(x_n)` of a monomial valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector(Vec<LogValue>);

impl WeightVector {
    pub fn new(weights: Vec<LogValue>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("a weight vector needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
            return Err(Error::InvalidInput(format!("weight {w} is not positive")));
        }
        Ok(WeightVector(weights))
    }

    pub fn weights(&self) -> &[LogValue] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariantTuple {
    pub trdeg: u32,
    pub ratrank: u32,
    pub restrdeg: u32,
    pub defect: u32,
}

impl InvariantTuple {
    /// Defect is `trdeg − ratrank − restrdeg`, which must be nonnegative.
    pub fn new(trdeg: u32, ratrank: u32, restrdeg: u32) -> Result<Self> {
        let defect = trdeg
            .checked_sub(ratrank + restrdeg)
            .ok_or_else(|| Error::InvalidInput(format!("ratrank {ratrank} + restrdeg {restrdeg} exceeds trdeg {trdeg}")))?;
        Ok(InvariantTuple { trdeg, ratrank, restrdeg, defect })
    }
}

/// `ℚ`-dimension of the span of the given values.
pub fn rational_rank(values: &[LogValue]) -> usize {
    let rows: Vec<[Rational; 2]> = values.iter().map(|v| [v.rational_part().clone(), v.sqrt2_part().clone()]).collect();
    let nonzero = rows.iter().find(|r| !r[0].is_zero() || !r[1].is_zero());
    match nonzero {
        None => 0,
        Some(a) => {
            if rows.iter().any(|b| &a[0] * &b[1] != &a[1] * &b[0]) {
                2
            } else {
                1
            }
        }
    }
}

/// Monomial valuations are Abhyankar: no defect.
pub fn monomial_invariants(w: &WeightVector) -> InvariantTuple {
    let n = w.weights().len() as u32;
    let rank = rational_rank(w.weights()) as u32;
    InvariantTuple::new(n, rank, n - rank).expect("rank never exceeds n")
}

/// Invariants after adjoining one variable, according to the type of the
/// point of the disc it restricts to.
pub fn extend_invariants(base: &InvariantTuple, point_type: PointType) -> InvariantTuple {
    let (dr, dk) = match point_type {
        PointType::RationalRadius => (0, 1),
        PointType::IrrationalRadius => (1, 0),
        PointType::Classical | PointType::NestedPrefix => (0, 0),
    };
    InvariantTuple::new(base.trdeg + 1, base.ratrank + dr, base.restrdeg + dk).expect("defect only grows")
}

/// An integer matrix `A` with `|det A| = 1`, `A⁻¹ ≥ 0` entrywise, and
/// `(A·c)_i > 0` for `i ≤ r`, `= 0` for `i > r`. Requires `c > 0` with
/// `c_1, …, c_r` a `ℚ`-basis of the span of `c`.
///
/// Each dependent `c_k` is eliminated against the current positive basis
/// values: pick a lattice basis of their `ℤ`-span in which all of them have
/// nonnegative coordinates (a unimodular cone of the dual lattice that
/// contains the functional `c` and sits inside the dual of their cone),
/// then complete the coordinate matrix by a nonnegative column to
/// determinant ±1. The result is checked before it is returned.
pub fn zariski_matrix(c: &[LogValue], r: usize) -> Result<IntMatrix> {
    let s = c.len();
    if r == 0 || r > s {
        return Err(Error::Precondition(format!("need 1 ≤ r ≤ {s}, got {r}")));
    }
    if let Some(x) = c.iter().find(|x| !x.is_positive()) {
        return Err(Error::Precondition(format!("value {x} is not positive")));
    }
    if rational_rank(&c[..r]) != r || rational_rank(c) != r {
        return Err(Error::Precondition(format!("the first {r} values are not a basis of the span")));
    }

    let mut a = identity(s);
    let mut cur = c.to_vec();
    for k in r..s {
        let idx: Vec<usize> = (0..r).chain(std::iter::once(k)).collect();
        let vals: Vec<LogValue> = idx.iter().map(|&i| cur[i].clone()).collect();
        let block = eliminate(&vals)?;
        let mut step = identity(s);
        for (bi, &i) in idx.iter().enumerate() {
            for (bj, &j) in idx.iter().enumerate() {
                step[i][j] = block[bi][bj].clone();
            }
        }
        cur = apply(&step, &cur);
        a = mat_mul(&step, &a);
    }
    verify(&a, c, r)?;
    Ok(a)
}

fn verify(a: &IntMatrix, c: &[LogValue], r: usize) -> Result<()> {
    let inv = inverse_unimodular(a).ok_or_else(|| Error::Inconsistent("matrix is not unimodular".into()))?;
    if inv.iter().flatten().any(|x| x.is_negative()) {
        return Err(Error::Inconsistent("inverse has a negative entry".into()));
    }
    let ac = apply(a, c);
    if ac.iter().enumerate().any(|(i, x)| if i < r { !x.is_positive() } else { !x.is_zero() }) {
        return Err(Error::Inconsistent("A·c has the wrong sign pattern".into()));
    }
    Ok(())
}

// `(r+1)×(r+1)` block sending (basis values, dependent value) to
// (new positive basis values, 0).
fn eliminate(vals: &[LogValue]) -> Result<IntMatrix> {
    let n = vals.len();
    let vecs = integer_vectors(vals);
    let coords: IntMatrix = if n == 2 {
        // rank one: multiples of the primitive vector on the line, which
        // is positive because vals[0] is
        let g = vecs[0][0].gcd(&vecs[0][1]);
        let prim = [&vecs[0][0] / &g, &vecs[0][1] / &g];
        let coord = |v: &[BigInt; 2]| if !prim[0].is_zero() { &v[0] / &prim[0] } else { &v[1] / &prim[1] };
        let (t0, t1) = (coord(&vecs[0]), coord(&vecs[1]));
        let span = t0.gcd(&t1);
        vec![vec![t0 / &span], vec![t1 / &span]]
    } else {
        nonnegative_coordinates(&vecs, vals)?
    };
    let w = cofactors(&coords);
    let x = nonnegative_solution(&w)
        .ok_or_else(|| Error::Inconsistent("no nonnegative unimodular completion".into()))?;
    let b: IntMatrix = coords
        .iter()
        .zip(&x)
        .map(|(row, xi)| row.iter().cloned().chain(std::iter::once(xi.clone())).collect())
        .collect();
    inverse_unimodular(&b).ok_or_else(|| Error::Inconsistent("completion is not unimodular".into()))
}

// Values in ℚ(√2) as integer vectors after clearing a common denominator.
fn integer_vectors(vals: &[LogValue]) -> Vec<[BigInt; 2]> {
    let den = vals
        .iter()
        .flat_map(|v| [v.rational_part().denom().clone(), v.sqrt2_part().denom().clone()])
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    vals.iter()
        .map(|v| {
            let f = |q: &Rational| (q * Rational::from_integer(den.clone())).to_integer();
            [f(v.rational_part()), f(v.sqrt2_part())]
        })
        .collect()
}

fn det2(a: &[BigInt; 2], b: &[BigInt; 2]) -> BigInt {
    &a[0] * &b[1] - &a[1] * &b[0]
}

// Rank-two case: coordinates of each vector in a lattice basis `u` with
// all coordinates ≥ 0 and `c(u_i) > 0`.
fn nonnegative_coordinates(vecs: &[[BigInt; 2]], vals: &[LogValue]) -> Result<IntMatrix> {
    let (l1, l2) = lattice_basis(vecs);
    let coords: Vec<[BigInt; 2]> = vecs
        .iter()
        .map(|v| {
            let t1 = &v[0] / &l1[0];
            let t2 = (&v[1] - &t1 * &l1[1]) / &l2[1];
            [t1, t2]
        })
        .collect();
    // c as a functional on lattice coordinates
    let lv = |l: &[BigInt; 2]| -> LogValue {
        let (v, t) = (&vecs[0], &vals[0]);
        // vals are linear in the integer vectors: c(x) = (x·(1, √2)) / den
        let unit = LogValue::new(Rational::from_integer(v[0].clone()), Rational::from_integer(v[1].clone()));
        let scale = t.checked_div(&unit).expect("nonzero");
        LogValue::new(Rational::from_integer(l[0].clone()), Rational::from_integer(l[1].clone())) * scale
    };
    let h = [lv(&l1), lv(&l2)];

    // extreme rays of the cone spanned by the coordinate vectors
    let ray = |left: bool| {
        coords
            .iter()
            .find(|g| {
                coords.iter().all(|o| {
                    let d = det2(g, o);
                    if left { !d.is_negative() } else { !d.is_positive() }
                })
            })
            .cloned()
    };
    let (g1, g2) = match (ray(true), ray(false)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Inconsistent("values do not span a pointed cone".into())),
    };
    let in_dual = |l: &[BigInt; 2]| {
        let dot = |g: &[BigInt; 2]| &l[0] * &g[0] + &l[1] * &g[1];
        !dot(&g1).is_negative() && !dot(&g2).is_negative()
    };
    let cross_h = |p: &[BigInt; 2]| -> LogValue {
        // det(p, h)
        h[1].scale(&Rational::from_integer(p[0].clone())) - h[0].scale(&Rational::from_integer(p[1].clone()))
    };
    let inside = |p: &[BigInt; 2], q: &[BigInt; 2]| cross_h(p).is_positive() && cross_h(q).is_negative();

    let (one, zero) = (BigInt::one(), BigInt::zero());
    let quadrants = [
        ([one.clone(), zero.clone()], [zero.clone(), one.clone()]),
        ([zero.clone(), one.clone()], [-one.clone(), zero.clone()]),
        ([-one.clone(), zero.clone()], [zero.clone(), -one.clone()]),
        ([zero.clone(), -one.clone()], [one.clone(), zero.clone()]),
    ];
    let (mut p, mut q) = quadrants
        .into_iter()
        .find(|(p, q)| inside(p, q))
        .expect("an irrational functional lies inside one quadrant");
    let mut steps = 0u32;
    while !(in_dual(&p) && in_dual(&q)) {
        let m = [&p[0] + &q[0], &p[1] + &q[1]];
        if cross_h(&m).is_positive() {
            p = m;
        } else {
            q = m;
        }
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::Inconsistent("dual cone refinement did not converge".into()));
        }
    }
    Ok(coords
        .iter()
        .map(|v| vec![&p[0] * &v[0] + &p[1] * &v[1], &q[0] * &v[0] + &q[1] * &v[1]])
        .collect())
}

// Lower-triangular basis (a, b), (0, d) of the span, a, d > 0.
fn lattice_basis(vecs: &[[BigInt; 2]]) -> ([BigInt; 2], [BigInt; 2]) {
    let mut cols: Vec<[BigInt; 2]> = vecs.to_vec();
    // Euclid on the first coordinates
    loop {
        cols.retain(|c| !c[0].is_zero() || !c[1].is_zero());
        let mut nz: Vec<usize> = (0..cols.len()).filter(|&i| !cols[i][0].is_zero()).collect();
        if nz.len() <= 1 {
            break;
        }
        nz.sort_by(|&i, &j| cols[i][0].abs().cmp(&cols[j][0].abs()));
        let piv = cols[nz[0]].clone();
        for &i in &nz[1..] {
            let t = cols[i][0].div_floor(&piv[0]);
            cols[i] = [&cols[i][0] - &t * &piv[0], &cols[i][1] - &t * &piv[1]];
        }
    }
    let pi = cols.iter().position(|c| !c[0].is_zero()).expect("rank two");
    let mut first = cols.remove(pi);
    let d = cols.iter().fold(BigInt::zero(), |acc, c| acc.gcd(&c[1]));
    if first[0].is_negative() {
        first = [-&first[0], -&first[1]];
    }
    let b = first[1].mod_floor(&d);
    ([first[0].clone(), b], [BigInt::zero(), d])
}

// `w` with `det[M | x] = w·x` for an `n×(n−1)` matrix `M`.
fn cofactors(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.len();
    (0..n)
        .map(|i| {
            let minor: IntMatrix = (0..n).filter(|&k| k != i).map(|k| m[k].clone()).collect();
            let sign = if (i + n - 1).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
            sign * det(&minor)
        })
        .collect()
}

// Nonnegative integer `x` with `w·x = ±1`.
fn nonnegative_solution(w: &[BigInt]) -> Option<Vec<BigInt>> {
    let n = w.len();
    if let Some(i) = w.iter().position(|x| x.abs().is_one()) {
        let mut x = vec![BigInt::zero(); n];
        x[i] = BigInt::one();
        return Some(x);
    }
    // integer solution by extended Euclid, then shift into the orthant
    let mut x = vec![BigInt::zero(); n];
    let mut g = BigInt::zero();
    for i in 0..n {
        if w[i].is_zero() {
            continue;
        }
        let e = g.extended_gcd(&w[i]);
        for xj in x.iter_mut() {
            *xj = &*xj * &e.x;
        }
        x[i] = e.y;
        g = e.gcd;
    }
    if !g.abs().is_one() {
        return None;
    }
    let pos: Vec<usize> = (0..n).filter(|&i| w[i].is_positive()).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| w[i].is_negative()).collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    // kernel vectors |w_k|·e_j + w_j·e_k have positive entries
    for &j in &pos {
        for &k in &neg {
            let need = |xi: &BigInt, step: &BigInt| if xi.is_negative() { (-xi).div_ceil(step) } else { BigInt::zero() };
            let t = need(&x[j], &(-&w[k])).max(need(&x[k], &w[j]));
            x[j] += &t * (-&w[k]);
            x[k] += &t * &w[j];
        }
    }
    Some(x)
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, m, k) = (a.len(), b[0].len(), b.len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum()).collect())
        .collect()
}

/// `A·c` computed exactly.
pub fn apply(a: &IntMatrix, c: &[LogValue]) -> Vec<LogValue> {
    a.iter()
        .map(|row| row.iter().zip(c).map(|(x, v)| v.scale(&Rational::from_integer(x.clone()))).sum())
        .collect()
}

/// Determinant by fraction-free elimination.
pub fn det(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Inverse of a matrix with determinant ±1, via the adjugate.
pub fn inverse_unimodular(m: &IntMatrix) -> Option<IntMatrix> {
    let n = m.len();
    let d = det(m);
    if !d.abs().is_one() {
        return None;
    }
    let cof = |i: usize, j: usize| -> BigInt {
        let minor: IntMatrix = (0..n)
            .filter(|&r| r != i)
            .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
            .collect();
        let s = if (i + j).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        s * det(&minor)
    };
    Some((0..n).map(|i| (0..n).map(|j| cof(j, i) * &d).collect()).collect())
}
