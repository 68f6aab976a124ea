//! Laurent monomials in the interned symbols.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use super::symbol::Sym;

/// A Laurent monomial ∏ s^e, stored sparse and sorted by symbol with nonzero exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(SmallVec<[(Sym, i32); 4]>);

impl Mono {
    pub fn one() -> Mono {
        Mono(SmallVec::new())
    }

    pub fn var(s: Sym) -> Mono {
        Mono::pow_of(s, 1)
    }

    pub fn pow_of(s: Sym, e: i32) -> Mono {
        let mut v = SmallVec::new();
        if e != 0 {
            v.push((s, e));
        }
        Mono(v)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Sym, i32)>) -> Mono {
        let mut m = Mono::one();
        for (s, e) in pairs {
            m = m.mul(&Mono::pow_of(s, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Sym, i32)] {
        &self.0
    }

    pub fn exp(&self, s: Sym) -> i32 {
        self.0.iter().find(|(t, _)| *t == s).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out: SmallVec<[(Sym, i32); 4]> = SmallVec::new();
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Mono(out)
    }

    pub fn inv(&self) -> Mono {
        Mono(self.0.iter().map(|&(s, e)| (s, -e)).collect())
    }

    pub fn div(&self, other: &Mono) -> Mono {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i32) -> Mono {
        if k == 0 {
            return Mono::one();
        }
        Mono(self.0.iter().map(|&(s, e)| (s, e * k)).collect())
    }

    /// Componentwise minimum of exponents (treating absent symbols as 0).
    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut out = Mono::one();
        for &(s, e) in self.0.iter() {
            let m = e.min(other.exp(s));
            if m != 0 {
                out = out.mul(&Mono::pow_of(s, m));
            }
        }
        for &(s, e) in other.0.iter() {
            if self.exp(s) == 0 && e < 0 {
                out = out.mul(&Mono::pow_of(s, e));
            }
        }
        out
    }

    /// Whether `other` divides `self` in the polynomial (nonnegative) sense.
    pub fn divisible_by(&self, other: &Mono) -> bool {
        other.0.iter().all(|&(s, e)| self.exp(s) >= e)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e as i64).sum()
    }

    pub fn without(&self, s: Sym) -> Mono {
        Mono(self.0.iter().copied().filter(|(t, _)| *t != s).collect())
    }

    pub fn contains(&self, s: Sym) -> bool {
        self.0.iter().any(|(t, _)| *t == s)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        self.0.iter().map(|(s, _)| *s)
    }

    /// Lexicographic monomial order, earlier symbols dominant.
    pub fn lex_cmp(&self, other: &Mono) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            let sa = a.get(i).map(|x| x.0);
            let sb = b.get(j).map(|x| x.0);
            match (sa, sb) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => {
                    return a[i].1.cmp(&0);
                }
                (None, Some(_)) => {
                    return 0.cmp(&b[j].1);
                }
                (Some(x), Some(y)) => {
                    if x < y {
                        return a[i].1.cmp(&0);
                    } else if y < x {
                        return 0.cmp(&b[j].1);
                    } else {
                        let c = a[i].1.cmp(&b[j].1);
                        if c != Ordering::Equal {
                            return c;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }

    /// Order used to pick the normalising term of a canonical factor:
    /// q-degree first, then total degree, then lexicographic.
    pub fn norm_cmp(&self, other: &Mono) -> Ordering {
        self.exp(Sym::Q)
            .cmp(&other.exp(Sym::Q))
            .then(self.total_degree().cmp(&other.total_degree()))
            .then(self.lex_cmp(other))
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(s, e) in self.0.iter() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", s)?;
            } else {
                write!(f, "{}^{}", s, e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiply_and_cancel() {
        let m = Mono::from_pairs([(Sym::MU, 2), (Sym::Q, 1)]);
        let n = Mono::from_pairs([(Sym::MU, -2)]);
        assert_eq!(m.mul(&n), Mono::var(Sym::Q));
        assert!(m.mul(&m.inv()).is_one());
    }

    #[test]
    fn lex_is_multiplicative() {
        let a = Mono::from_pairs([(Sym::Q, 1)]);
        let b = Mono::from_pairs([(Sym::MU, 5)]);
        assert_eq!(a.lex_cmp(&b), Ordering::Greater);
        let c = Mono::var(Sym::A);
        assert_eq!(a.mul(&c).lex_cmp(&b.mul(&c)), Ordering::Greater);
    }

    #[test]
    fn gcd_takes_minimum() {
        let a = Mono::from_pairs([(Sym::Q, 2), (Sym::MU, -1)]);
        let b = Mono::from_pairs([(Sym::Q, 1)]);
        assert_eq!(a.gcd(&b), Mono::from_pairs([(Sym::Q, 1), (Sym::MU, -1)]));
    }
}
