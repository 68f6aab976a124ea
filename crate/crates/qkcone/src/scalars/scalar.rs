//! Rational functions in the parameter symbols (q included) with a factored denominator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;

use super::cyclo::Cyclo;
use super::mono::Mono;
use super::poly::{MonoSubst, Poly};
use super::symbol::Sym;
use crate::error::{Error, Result};

/// `num / ∏ den_i^{e_i}` with every `den_i` in canonical form (see [`canonical`]).
#[derive(Clone)]
pub struct Scalar {
    num: Poly,
    den: Vec<(Poly, u32)>,
}

/// Splits a nonzero polynomial as `c · m · p` where `p` has no monomial content and the
/// term of `p` that is smallest under [`Mono::norm_cmp`] has coefficient 1.
pub fn canonical(p: &Poly) -> (Cyclo, Mono, Poly) {
    let m = p.min_mono();
    let shifted = p.mul_term(&Cyclo::one(), &m.inv());
    let (lead_m, lead_c) = shifted
        .terms()
        .iter()
        .min_by(|a, b| a.0.norm_cmp(&b.0))
        .cloned()
        .expect("canonical form of zero");
    if shifted.len() == 1 {
        return (lead_c, m.mul(&lead_m), Poly::one());
    }
    let inv = lead_c.inv().expect("nonzero coefficient");
    (lead_c, m, shifted.scale(&inv))
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { num: Poly::zero(), den: Vec::new() }
    }

    pub fn one() -> Scalar {
        Scalar::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::from_poly(Poly::int(n))
    }

    pub fn frac(p: i64, q: i64) -> Scalar {
        Scalar::from_cyclo(Cyclo::from_frac(p, q))
    }

    pub fn rational(r: BigRational) -> Scalar {
        Scalar::from_cyclo(Cyclo::from_rational(r))
    }

    pub fn from_cyclo(c: Cyclo) -> Scalar {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Scalar {
        Scalar { num: p, den: Vec::new() }
    }

    pub fn var(s: Sym) -> Scalar {
        Scalar::from_poly(Poly::var(s))
    }

    pub fn q() -> Scalar {
        Scalar::var(Sym::Q)
    }

    pub fn mono(c: Cyclo, m: Mono) -> Scalar {
        Scalar::from_poly(Poly::term(c, m))
    }

    pub fn pow_of(s: Sym, e: i32) -> Scalar {
        Scalar::mono(Cyclo::one(), Mono::pow_of(s, e))
    }

    /// 1 − c·m
    pub fn one_minus(c: Cyclo, m: Mono) -> Scalar {
        Scalar::from_poly(Poly::one_minus(c, m))
    }

    /// `num / ∏ f^e`, canonicalising every factor and cancelling what divides.
    pub fn from_parts(num: Poly, den: Vec<(Poly, u32)>) -> Result<Scalar> {
        let mut s = Scalar { num, den: Vec::new() };
        for (f, e) in den {
            if e == 0 {
                continue;
            }
            if f.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let (c, m, p) = canonical(&f);
            let ci = c.inv().ok_or(Error::DivisionByZero)?.pow(e as i64).unwrap();
            s.num = s.num.mul_term(&ci, &m.inv().pow(e as i32));
            if !p.is_one() {
                push_factor(&mut s.den, p, e);
            }
        }
        s.cancel();
        Ok(s)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &[(Poly, u32)] {
        &self.den
    }

    pub fn den_poly(&self) -> Poly {
        let mut d = Poly::one();
        for (f, e) in &self.den {
            d = d.mul(&f.pow(*e));
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<Cyclo> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else if self.num.is_zero() {
            Some(Cyclo::zero())
        } else {
            None
        }
    }

    pub fn as_monomial(&self) -> Option<(Cyclo, Mono)> {
        if self.den.is_empty() {
            self.num.as_monomial()
        } else {
            None
        }
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let mut i = 0;
        while i < self.den.len() {
            while self.den[i].1 > 0 {
                match self.num.div_exact(&self.den[i].0) {
                    Some(q) => {
                        self.num = q;
                        self.den[i].1 -= 1;
                    }
                    None => break,
                }
            }
            if self.den[i].1 == 0 {
                self.den.remove(i);
            } else {
                i += 1;
            }
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_empty() && other.den.is_empty() {
            return Scalar::from_poly(self.num.add(&other.num));
        }
        let mut lcm: Vec<(Poly, u32)> = self.den.clone();
        for (f, e) in &other.den {
            match lcm.iter_mut().find(|(g, _)| g == f) {
                Some(slot) => slot.1 = slot.1.max(*e),
                None => lcm.push((f.clone(), *e)),
            }
        }
        let scale = |s: &Scalar| -> Poly {
            let mut n = s.num.clone();
            for (f, e) in &lcm {
                let have = s.den.iter().find(|(g, _)| g == f).map(|x| x.1).unwrap_or(0);
                if *e > have {
                    n = n.mul(&f.pow(*e - have));
                }
            }
            n
        };
        let num = scale(self).add(&scale(other));
        let mut r = Scalar { num, den: lcm };
        r.cancel();
        r
    }

    pub fn neg(&self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_empty() && other.den.is_empty() {
            return Scalar::from_poly(self.num.mul(&other.num));
        }
        // Both operands are reduced, so only cross cancellations can occur.
        let mut a = Scalar { num: self.num.clone(), den: other.den.clone() };
        let mut b = Scalar { num: other.num.clone(), den: self.den.clone() };
        a.cancel();
        b.cancel();
        let mut den = a.den;
        for (f, e) in b.den {
            push_factor(&mut den, f, e);
        }
        Scalar { num: a.num.mul(&b.num), den }
    }

    pub fn scale(&self, c: &Cyclo) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_mono(&self, c: &Cyclo, m: &Mono) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { num: self.num.mul_term(c, m), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = self.den_poly();
        Scalar::from_parts(num, vec![(self.num.clone(), 1)])
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn symbols(&self) -> BTreeSet<Sym> {
        let mut s = self.num.symbols();
        for (f, _) in &self.den {
            s.extend(f.symbols());
        }
        s
    }

    pub fn contains(&self, s: Sym) -> bool {
        self.num.contains(s) || self.den.iter().any(|(f, _)| f.contains(s))
    }

    pub fn subst(&self, sub: &MonoSubst) -> Result<Scalar> {
        let err = || Error::DivisionByZeroAfterSubstitution(format!("{}", self));
        let num = self.num.subst(sub).ok_or_else(err)?;
        let mut den = Vec::with_capacity(self.den.len());
        for (f, e) in &self.den {
            let g = f.subst(sub).ok_or_else(err)?;
            if g.is_zero() {
                return Err(err());
            }
            den.push((g, *e));
        }
        Scalar::from_parts(num, den).map_err(|_| err())
    }

    /// Replaces the listed symbols by constants.
    pub fn eval_consts(&self, vals: &BTreeMap<Sym, Cyclo>) -> Result<Scalar> {
        let err = || Error::DivisionByZeroAfterSubstitution(format!("{}", self));
        let num = self.num.eval_consts(vals).ok_or_else(err)?;
        let mut den = Vec::with_capacity(self.den.len());
        for (f, e) in &self.den {
            let g = f.eval_consts(vals).ok_or_else(err)?;
            if g.is_zero() {
                return Err(err());
            }
            den.push((g, *e));
        }
        Scalar::from_parts(num, den).map_err(|_| err())
    }

    /// General substitution of symbols by scalars.
    pub fn substitute(&self, assignment: &BTreeMap<Sym, Scalar>) -> Result<Scalar> {
        let err = || Error::DivisionByZeroAfterSubstitution(format!("{}", self));
        let num = poly_substitute(&self.num, assignment)?;
        let mut den = Scalar::one();
        for (f, e) in &self.den {
            let g = poly_substitute(f, assignment)?;
            if g.is_zero() {
                return Err(err());
            }
            den = den.mul(&g.pow(*e as i64)?);
        }
        num.div(&den).map_err(|_| err())
    }

    /// Ψ^k: every symbol s ↦ s^k and ζ ↦ ζ^k.
    pub fn adams(&self, k: u32) -> Scalar {
        if k == 1 {
            return self.clone();
        }
        let num = self.num.adams(k);
        let den = self.den.iter().map(|(f, e)| (f.adams(k), *e)).collect();
        Scalar::from_parts(num, den).expect("adams image of a nonzero factor is nonzero")
    }

    pub fn map_coeffs(&self, f: impl Fn(&Cyclo) -> Cyclo) -> Scalar {
        let num = self.num.map_coeffs(&f);
        let den = self.den.iter().map(|(g, e)| (g.map_coeffs(&f), *e)).collect();
        Scalar::from_parts(num, den).expect("coefficient map keeps factors nonzero")
    }
}

fn push_factor(den: &mut Vec<(Poly, u32)>, f: Poly, e: u32) {
    match den.iter_mut().find(|(g, _)| *g == f) {
        Some(slot) => slot.1 += e,
        None => den.push((f, e)),
    }
}

fn poly_substitute(p: &Poly, assignment: &BTreeMap<Sym, Scalar>) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for (m, c) in p.terms() {
        let mut t = Scalar::from_cyclo(c.clone());
        let mut rest = Mono::one();
        for &(s, e) in m.pairs() {
            match assignment.get(&s) {
                Some(v) => {
                    t = t.mul(&v.pow(e as i64).map_err(|_| {
                        Error::DivisionByZeroAfterSubstitution(format!("{} at {}", p, s))
                    })?)
                }
                None => rest = rest.mul(&Mono::pow_of(s, e)),
            }
        }
        acc = acc.add(&t.mul_mono(&Cyclo::one(), &rest));
    }
    Ok(acc)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

impl From<Poly> for Scalar {
    fn from(p: Poly) -> Scalar {
        Scalar::from_poly(p)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/(", self.num)?;
        for (i, (g, e)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "({})", g)?;
            } else {
                write!(f, "({})^{}", g, e)?;
            }
        }
        write!(f, ")")
    }
}
