//! Truncated Laurent series in one formal variable with [`Scalar`] coefficients.

use std::fmt;

use super::poly::Poly;
use super::scalar::Scalar;
use super::symbol::Sym;
use crate::error::{Error, Result};

/// Σ_{i < coeffs.len()} coeffs[i] · t^{val + i} + O(t^{val + coeffs.len()}).
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    pub val: i32,
    pub coeffs: Vec<Scalar>,
}

fn binom(n: i64, k: usize) -> Scalar {
    let mut num = num_bigint::BigInt::from(1);
    let mut den = num_bigint::BigInt::from(1);
    for i in 0..k as i64 {
        num *= n - i;
        den *= i + 1;
    }
    Scalar::rational(num_rational::BigRational::new(num, den))
}

impl Series {
    pub fn new(val: i32, coeffs: Vec<Scalar>) -> Series {
        Series { val, coeffs }
    }

    pub fn constant(c: Scalar, len: usize) -> Series {
        let mut coeffs = vec![Scalar::zero(); len.max(1)];
        coeffs[0] = c;
        Series { val: 0, coeffs }
    }

    /// Absolute precision: terms of exponent ≥ this are unknown.
    pub fn prec(&self) -> i32 {
        self.val + self.coeffs.len() as i32
    }

    pub fn coeff(&self, e: i32) -> Option<Scalar> {
        if e < self.val {
            return Some(Scalar::zero());
        }
        self.coeffs.get((e - self.val) as usize).cloned()
    }

    /// Drops leading zero coefficients, moving the valuation up.
    pub fn normalize(&mut self) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if k > 0 {
            self.coeffs.drain(..k);
            self.val += k as i32;
        }
    }

    pub fn truncate_to(&self, prec: i32) -> Series {
        let keep = (prec - self.val).max(0) as usize;
        let mut s = self.clone();
        s.coeffs.truncate(keep);
        s
    }

    pub fn add(&self, other: &Series) -> Series {
        let val = self.val.min(other.val);
        let prec = self.prec().min(other.prec());
        let n = (prec - val).max(0) as usize;
        let coeffs = (0..n)
            .map(|i| {
                let e = val + i as i32;
                self.coeff(e).unwrap().add(&other.coeff(e).unwrap())
            })
            .collect();
        Series { val, coeffs }
    }

    pub fn neg(&self) -> Series {
        Series { val: self.val, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        Series { val: self.val, coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn mul(&self, other: &Series) -> Series {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![Scalar::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Series { val: self.val + other.val, coeffs }
    }

    pub fn inv(&self) -> Result<Series> {
        let mut s = self.clone();
        s.normalize();
        if s.coeffs.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let n = s.coeffs.len();
        let a0inv = s.coeffs[0].inv()?;
        let mut out = vec![Scalar::zero(); n];
        out[0] = a0inv.clone();
        for k in 1..n {
            let mut acc = Scalar::zero();
            for j in 1..=k {
                acc = acc.add(&s.coeffs[j].mul(&out[k - j]));
            }
            out[k] = acc.mul(&a0inv).neg();
        }
        Ok(Series { val: -s.val, coeffs: out })
    }

    pub fn pow(&self, e: i64) -> Result<Series> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Series::constant(Scalar::one(), base.coeffs.len());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Expansion of a Laurent polynomial in the symbol `s` (coefficients free of `s`).
    pub fn from_poly_in(p: &Poly, s: Sym, len: usize) -> Series {
        let parts = p.collect_by(s);
        let val = parts.keys().next().copied().unwrap_or(0);
        let mut coeffs = vec![Scalar::zero(); len];
        for (k, c) in parts {
            let i = (k - val) as usize;
            if i < len {
                coeffs[i] = Scalar::from_poly(c);
            }
        }
        Series { val, coeffs }
    }

    /// Expansion of a scalar in the symbol `s` around `s = 0`, relative length `len`.
    pub fn expand(x: &Scalar, s: Sym, len: usize) -> Result<Series> {
        let num = Series::from_poly_in(x.numerator(), s, len);
        let mut acc = num;
        for (f, e) in x.denominator() {
            let fs = Series::from_poly_in(f, s, len);
            acc = acc.mul(&fs.pow(-(*e as i64))?);
        }
        Ok(acc)
    }

    /// Expansion of `x` at `q = u·(1 + t)` in powers of `t`, `u` a monomial.
    pub fn expand_at(x: &Scalar, q: Sym, u: &Scalar, len: usize) -> Result<Series> {
        let to_series = |p: &Poly| -> Result<Series> {
            let parts = p.collect_by(q);
            let mut acc = Series::new(0, vec![Scalar::zero(); len]);
            for (n, c) in parts {
                let w = Scalar::from_poly(c).mul(&u.pow(n as i64)?);
                let coeffs = (0..len).map(|i| w.mul(&binom(n as i64, i))).collect();
                acc = acc.add(&Series::new(0, coeffs));
            }
            acc.normalize();
            Ok(acc)
        };
        let mut acc = to_series(x.numerator())?;
        for (f, e) in x.denominator() {
            let mut fs = to_series(f)?;
            if fs.coeffs.is_empty() {
                return Err(Error::DivisionByZero);
            }
            fs.normalize();
            acc = acc.mul(&fs.pow(-(*e as i64))?);
        }
        Ok(acc)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                write!(f, "({})t^{} + ", c, self.val + i as i32)?;
            }
        }
        write!(f, "O(t^{})", self.prec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series() {
        let mu = Sym::MU;
        let x = Scalar::one().div(&Scalar::one().sub(&Scalar::var(mu).mul(&Scalar::q()))).unwrap();
        let s = Series::expand(&x, mu, 3).unwrap();
        assert_eq!(s.coeff(0).unwrap(), Scalar::one());
        assert_eq!(s.coeff(1).unwrap(), Scalar::q());
        assert_eq!(s.coeff(2).unwrap(), Scalar::q().mul(&Scalar::q()));
    }

    #[test]
    fn simple_pole_at_one() {
        // 1/(1-q) at q = 1 + t is -1/t.
        let x = Scalar::one().div(&Scalar::one().sub(&Scalar::q())).unwrap();
        let s = Series::expand_at(&x, Sym::Q, &Scalar::one(), 3).unwrap();
        assert_eq!(s.val, -1);
        assert_eq!(s.coeff(-1).unwrap(), Scalar::int(-1));
    }
}
