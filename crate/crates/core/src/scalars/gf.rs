use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order we build log tables for.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;

/// The finite field F_q, q = p^m, with elements encoded as integers `0..q`
/// whose base-p digits are the coefficients of a polynomial in a primitive
/// root `g` of a fixed irreducible modulus.
///
/// Multiplication goes through discrete-log tables; addition is digitwise.
pub struct GaloisField {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl GaloisField {
    pub fn new(p: u32, m: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("field degree must be positive".into()));
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_FIELD_ORDER).ok_or_else(|| {
            Error::InvalidInput(format!("field order {p}^{m} exceeds {MAX_FIELD_ORDER}"))
        })? as u32;
        let (modulus, exp) = find_primitive_modulus(p, m, q);
        let mut log = vec![0u32; q as usize];
        for (k, &e) in exp.iter().enumerate() {
            log[e as usize] = k as u32;
        }
        Ok(Arc::new(GaloisField { p, m, q, modulus, exp, log }))
    }

    pub fn prime(p: u32) -> Result<Arc<Self>> {
        Self::new(p, 1)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Image of an integer under ℤ → F_p ⊂ F_q.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        self.digitwise(x, y, |a, b| (a + b) % self.p)
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        self.digitwise(x, y, |a, b| (a + self.p - b) % self.p)
    }

    pub fn neg(&self, x: u32) -> u32 {
        self.sub(0, x)
    }

    pub fn mul(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            return 0;
        }
        let k = (self.log[x as usize] + self.log[y as usize]) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, x: u32) -> Option<u32> {
        if x == 0 {
            return None;
        }
        let k = (self.q - 1 - self.log[x as usize]) % (self.q - 1);
        Some(self.exp[k as usize])
    }

    pub fn pow(&self, x: u32, e: u64) -> u32 {
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let k = (self.log[x as usize] as u64 * (e % (self.q as u64 - 1))) % (self.q as u64 - 1);
        self.exp[k as usize]
    }

    /// Frobenius x ↦ x^p.
    pub fn frobenius(&self, x: u32) -> u32 {
        self.pow(x, self.p as u64)
    }

    /// The unique p-th root, x^(p^(m−1)).
    pub fn pth_root(&self, x: u32) -> u32 {
        self.pow(x, (self.p as u64).pow(self.m - 1))
    }

    fn digitwise(&self, mut x: u32, mut y: u32, f: impl Fn(u32, u32) -> u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            out += f(x % self.p, y % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        out
    }
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.m)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// First monic degree-m polynomial (in lexicographic order of its lower
// coefficients) for which x generates the multiplicative group.
fn find_primitive_modulus(p: u32, m: u32, q: u32) -> (Vec<u32>, Vec<u32>) {
    if m == 1 {
        for g in 1..p.max(2) {
            if let Some(exp) = power_table(p, m, &[], g, q) {
                return (vec![], exp);
            }
        }
        // p = 2: the trivial group generated by 1
        return (vec![], vec![1]);
    }
    for code in 0..q {
        let mut low = Vec::with_capacity(m as usize);
        let mut c = code;
        for _ in 0..m {
            low.push(c % p);
            c /= p;
        }
        if low[0] == 0 {
            continue;
        }
        if let Some(exp) = power_table(p, m, &low, p, q) {
            return (low, exp);
        }
    }
    unreachable!("every finite field has a primitive element")
}

// Powers of `gen` (an encoded element) modulo x^m − Σ low_i x^i; `None` if
// the order of `gen` is smaller than q − 1.
fn power_table(p: u32, m: u32, low: &[u32], gen: u32, q: u32) -> Option<Vec<u32>> {
    let decode = |mut v: u32| -> Vec<u32> {
        (0..m)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    };
    let encode = |digits: &[u32]| -> u32 { digits.iter().rev().fold(0, |acc, &d| acc * p + d) };
    let mulmod = |a: &[u32], b: &[u32]| -> Vec<u32> {
        let mut prod = vec![0u64; 2 * m as usize];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        // x^m ≡ −low(x)
        for k in (m as usize..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &l) in low.iter().enumerate() {
                let idx = k - m as usize + i;
                prod[idx] = (prod[idx] + (p as u64 - c) * l as u64) % p as u64;
            }
        }
        prod[..m as usize].iter().map(|&v| v as u32).collect()
    };
    let g = decode(gen);
    let mut table = Vec::with_capacity(q as usize - 1);
    let mut cur = decode(1);
    for k in 0..(q - 1) {
        let enc = encode(&cur);
        if k > 0 && enc == 1 {
            return None;
        }
        table.push(enc);
        cur = if m == 1 {
            vec![(cur[0] as u64 * gen as u64 % p as u64) as u32]
        } else {
            mulmod(&cur, &g)
        };
    }
    (encode(&cur) == 1).then_some(table)
}
