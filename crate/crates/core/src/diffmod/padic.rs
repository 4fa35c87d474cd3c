use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::newton::ValuedPoly;
use crate::scalars::{LogValue, Rational};

/// p-adic valuation of a rational; `None` for zero.
pub fn padic_val(x: &Rational, p: u32) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0i64;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    Some(count(x.numer()) - count(x.denom()))
}

/// A polynomial with exact rational coefficients, read p-adically. Used
/// where translation `x ↦ x + z` must be computed exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicPoly {
    p: u32,
    coeffs: Vec<Rational>,
}

impl PadicPoly {
    /// `coeffs[j]` is the coefficient of `x^j`.
    pub fn new(p: u32, coeffs: Vec<Rational>) -> Self {
        PadicPoly { p, coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `P(x + z)`.
    pub fn translate(&self, z: &Rational) -> PadicPoly {
        let n = self.coeffs.len();
        let mut out = vec![Rational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            // c·(x+z)^j = Σ_k c·C(j,k)·z^{j−k}·x^k
            let mut binom = BigInt::one();
            for k in 0..=j {
                if k > 0 {
                    binom = binom * BigInt::from(j - k + 1) / BigInt::from(k);
                }
                let zpow = pow(z, j - k);
                out[k] += c * Rational::from_integer(binom.clone()) * zpow;
            }
        }
        PadicPoly { p: self.p, coeffs: out }
    }

    /// Term valuations, zero coefficients dropped.
    pub fn to_valued(&self) -> ValuedPoly {
        ValuedPoly::new(self.coeffs.iter().enumerate().filter_map(|(j, c)| {
            padic_val(c, self.p).map(|v| (j as i64, LogValue::from_int(v)))
        }))
        .expect("exponents are distinct")
    }

    /// Image of an integral `z` in `F_p`.
    pub fn residue(z: &Rational, p: u32) -> Result<u32> {
        if padic_val(z, p).is_some_and(|v| v < 0) {
            return Err(Error::InvalidInput(format!("{z} is not {p}-integral")));
        }
        let pb = BigInt::from(p);
        let num = z.numer().mod_floor(&pb);
        let den = z.denom().mod_floor(&pb);
        // den is a unit mod p; invert by Fermat
        let inv = den.modpow(&(&pb - 2u32), &pb);
        Ok(u32::try_from((num * inv).mod_floor(&pb)).expect("residue below p"))
    }
}

fn pow(z: &Rational, e: usize) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, qi};

    #[test]
    fn valuations() {
        assert_eq!(padic_val(&q(18, 5), 3), Some(2));
        assert_eq!(padic_val(&q(2, 9), 3), Some(-2));
        assert_eq!(padic_val(&qi(0), 3), None);
    }

    #[test]
    fn translation_is_exact() {
        // (x+1)^2 = x^2 + 2x + 1
        let p = PadicPoly::new(3, vec![qi(0), qi(0), qi(1)]);
        assert_eq!(p.translate(&qi(1)).coeffs(), &[qi(1), qi(2), qi(1)]);
        assert_eq!(p.translate(&qi(1)).translate(&qi(-1)), p);
    }

    #[test]
    fn residues() {
        assert_eq!(PadicPoly::residue(&q(1, 2), 3).unwrap(), 2);
        assert_eq!(PadicPoly::residue(&qi(-1), 5).unwrap(), 4);
        assert!(PadicPoly::residue(&q(1, 3), 3).is_err());
    }
}
