//! Sparse Laurent polynomials with cyclotomic coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::cyclo::Cyclo;
use super::mono::Mono;
use super::symbol::Sym;

/// A monomial substitution: each listed symbol is replaced by `coeff · mono`.
#[derive(Clone, Debug, Default)]
pub struct MonoSubst {
    pub map: BTreeMap<Sym, (Cyclo, Mono)>,
}

impl MonoSubst {
    pub fn new() -> Self {
        MonoSubst::default()
    }

    pub fn with(mut self, s: Sym, c: Cyclo, m: Mono) -> Self {
        self.map.insert(s, (c, m));
        self
    }

    pub fn set(&mut self, s: Sym, c: Cyclo, m: Mono) {
        self.map.insert(s, (c, m));
    }

    /// Image of a monomial as (coefficient, monomial).
    pub fn apply_mono(&self, m: &Mono) -> Option<(Cyclo, Mono)> {
        let mut c = Cyclo::one();
        let mut out = Mono::one();
        for &(s, e) in m.pairs() {
            match self.map.get(&s) {
                Some((k, img)) => {
                    if !k.is_one() {
                        c = c.mul(&k.pow(e as i64)?);
                    }
                    out = out.mul(&img.pow(e));
                }
                None => out = out.mul(&Mono::pow_of(s, e)),
            }
        }
        Some((c, out))
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: Vec<(Mono, Cyclo)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Cyclo::one())
    }

    pub fn constant(c: Cyclo) -> Poly {
        Poly::term(c, Mono::one())
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(Cyclo::from_int(n))
    }

    pub fn term(c: Cyclo, m: Mono) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(s: Sym) -> Poly {
        Poly::term(Cyclo::one(), Mono::var(s))
    }

    /// 1 − c·m
    pub fn one_minus(c: Cyclo, m: Mono) -> Poly {
        Poly::one().sub(&Poly::term(c, m))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, Cyclo)>) -> Poly {
        let mut acc: BTreeMap<Mono, Cyclo> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(x) => *x = x.add(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn terms(&self) -> &[(Mono, Cyclo)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn as_constant(&self) -> Option<Cyclo> {
        if self.terms.is_empty() {
            return Some(Cyclo::zero());
        }
        if self.terms.len() == 1 && self.terms[0].0.is_one() {
            return Some(self.terms[0].1.clone());
        }
        None
    }

    pub fn as_monomial(&self) -> Option<(Cyclo, Mono)> {
        if self.terms.len() == 1 {
            Some((self.terms[0].1.clone(), self.terms[0].0.clone()))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = if i == a.len() {
                Ordering::Greater
            } else if j == b.len() {
                Ordering::Less
            } else {
                a[i].0.cmp(&b[j].0)
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].1.add(&b[j].1);
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some((c, m)) = other.as_monomial() {
            return self.mul_term(&c, &m);
        }
        if let Some((c, m)) = self.as_monomial() {
            return other.mul_term(&c, &m);
        }
        let mut acc: BTreeMap<Mono, Cyclo> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca.mul(cb);
                match acc.get_mut(&m) {
                    Some(x) => *x = x.add(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Poly { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn mul_term(&self, c: &Cyclo, m: &Mono) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut terms: Vec<(Mono, Cyclo)> =
            self.terms.iter().map(|(x, k)| (x.mul(m), k.mul(c))).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn scale(&self, c: &Cyclo) -> Poly {
        self.mul_term(c, &Mono::one())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_mono(&self) -> Mono {
        let mut it = self.terms.iter();
        let mut g = match it.next() {
            Some((m, _)) => m.clone(),
            None => return Mono::one(),
        };
        for (m, _) in it {
            g = g.gcd(m);
        }
        g
    }

    pub fn symbols(&self) -> BTreeSet<Sym> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for x in m.symbols() {
                s.insert(x);
            }
        }
        s
    }

    pub fn contains(&self, s: Sym) -> bool {
        self.terms.iter().any(|(m, _)| m.contains(s))
    }

    /// (min, max) exponent of `s` across the terms.
    pub fn degree_range(&self, s: Sym) -> (i32, i32) {
        let mut lo = i32::MAX;
        let mut hi = i32::MIN;
        for (m, _) in &self.terms {
            let e = m.exp(s);
            lo = lo.min(e);
            hi = hi.max(e);
        }
        if self.terms.is_empty() {
            (0, 0)
        } else {
            (lo, hi)
        }
    }

    /// Splits by powers of `s`: Σ s^k · coeff_k.
    pub fn collect_by(&self, s: Sym) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, Vec<(Mono, Cyclo)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.exp(s)).or_default().push((m.without(s), c.clone()));
        }
        out.into_iter().map(|(k, v)| (k, Poly::from_terms(v))).collect()
    }

    pub fn subst(&self, sub: &MonoSubst) -> Option<Poly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let (k, img) = sub.apply_mono(m)?;
            terms.push((img, c.mul(&k)));
        }
        Some(Poly::from_terms(terms))
    }

    pub fn adams(&self, k: u32) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.pow(k as i32), c.adams(k))))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Cyclo) -> Cyclo) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

/// Monomial keyed by the lexicographic order.
#[derive(Clone, PartialEq, Eq)]
struct LexMono(Mono);

impl PartialOrd for LexMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LexMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.lex_cmp(&other.0)
    }
}

impl Poly {
    /// Leading term under the lexicographic order.
    fn lex_leading(&self) -> Option<&(Mono, Cyclo)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(&b.0))
    }

    /// Exact quotient `self / g` in the Laurent ring, or None when `g` does not divide.
    pub fn div_exact(&self, g: &Poly) -> Option<Poly> {
        if g.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some((c, m)) = g.as_monomial() {
            return Some(self.mul_term(&c.inv()?, &m.inv()));
        }
        let sf = self.min_mono();
        let sg = g.min_mono();
        let inv_sf = sf.inv();
        let inv_sg = sg.inv();
        let f0 = self.mul_term(&Cyclo::one(), &inv_sf);
        let g0 = g.mul_term(&Cyclo::one(), &inv_sg);
        for s in g0.symbols() {
            let (_, hg) = g0.degree_range(s);
            let (_, hf) = f0.degree_range(s);
            if hf < hg {
                return None;
            }
        }
        if f0.len() < 2 {
            return None;
        }
        let lex_trailing = |p: &Poly| p.terms.iter().min_by(|a, b| a.0.lex_cmp(&b.0)).map(|t| t.0.clone());
        if !lex_trailing(&f0)?.divisible_by(&lex_trailing(&g0)?) {
            return None;
        }
        let (lm_g, lc_g) = g0.lex_leading()?.clone();
        let lc_inv = lc_g.inv()?;
        let mut r: BTreeMap<LexMono, Cyclo> = f0.terms.into_iter().map(|(m, c)| (LexMono(m), c)).collect();
        let mut quo: Vec<(Mono, Cyclo)> = Vec::new();
        while let Some((lm_r, lc_r)) = r.pop_last() {
            if !lm_r.0.divisible_by(&lm_g) {
                return None;
            }
            let tm = lm_r.0.div(&lm_g);
            let tc = lc_r.mul(&lc_inv);
            for (m, c) in &g0.terms {
                if *m == lm_g {
                    continue;
                }
                let key = LexMono(m.mul(&tm));
                let delta = c.mul(&tc);
                match r.get_mut(&key) {
                    Some(x) => {
                        *x = x.sub(&delta);
                        if x.is_zero() {
                            r.remove(&key);
                        }
                    }
                    None => {
                        r.insert(key, delta.neg());
                    }
                }
            }
            quo.push((tm, tc));
        }
        let q = Poly::from_terms(quo);
        Some(q.mul_term(&Cyclo::one(), &sf.mul(&inv_sg)))
    }

    /// Evaluates with every symbol in `vals` replaced by a constant; other symbols stay.
    pub fn eval_consts(&self, vals: &BTreeMap<Sym, Cyclo>) -> Option<Poly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut k = c.clone();
            let mut rest = Mono::one();
            for &(s, e) in m.pairs() {
                match vals.get(&s) {
                    Some(v) => {
                        if v.is_zero() && e < 0 {
                            return None;
                        }
                        k = k.mul(&v.pow(e as i64)?);
                    }
                    None => rest = rest.mul(&Mono::pow_of(s, e)),
                }
            }
            terms.push((rest, k));
        }
        Some(Poly::from_terms(terms))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", c, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu() -> Poly {
        Poly::var(Sym::MU)
    }

    #[test]
    fn exact_division_of_product() {
        let f = Poly::one_minus(Cyclo::one(), Mono::var(Sym::MU));
        let g = Poly::one().add(&mu());
        let h = f.mul(&g);
        assert_eq!(h.div_exact(&f), Some(g.clone()));
        assert_eq!(h.div_exact(&g), Some(f.clone()));
        let k = Poly::one().add(&mu().mul(&mu()));
        assert_eq!(k.div_exact(&f), None);
    }

    #[test]
    fn laurent_division() {
        let f = Poly::one_minus(Cyclo::one(), Mono::var(Sym::MU));
        let shifted = f.mul_term(&Cyclo::from_int(3), &Mono::pow_of(Sym::Q, -2));
        let q = shifted.div_exact(&f).unwrap();
        assert_eq!(q, Poly::term(Cyclo::from_int(3), Mono::pow_of(Sym::Q, -2)));
    }

    #[test]
    fn substitution_inverse_pair() {
        let ab = Poly::term(Cyclo::one(), Mono::from_pairs([(Sym::A, 1), (Sym::B, 1)]));
        let sub = MonoSubst::new()
            .with(Sym::A, Cyclo::one(), Mono::var(Sym::MU))
            .with(Sym::B, Cyclo::one(), Mono::pow_of(Sym::MU, -1));
        assert_eq!(ab.subst(&sub).unwrap(), Poly::one());
    }

    #[test]
    fn multivariate_division() {
        let x = Poly::var(Sym::A);
        let y = Poly::var(Sym::B);
        let f = x.sub(&y);
        let g = x.add(&y).add(&Poly::one());
        let h = f.mul(&g).mul(&f);
        assert_eq!(h.div_exact(&f).unwrap().div_exact(&f), Some(g));
    }
}
