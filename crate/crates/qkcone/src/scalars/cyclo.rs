//! Exact arithmetic in cyclotomic fields Q(ζ_N), power basis modulo Φ_N.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn phi_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer coefficients of the `n`-th cyclotomic polynomial, ascending, monic.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<i64>> {
    assert!(n >= 1, "cyclotomic order must be positive");
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d of n.
    let mut num: Vec<i64> = vec![0; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let den = cyclotomic_poly(d);
            num = exact_div_monic(&num, &den);
        }
    }
    let arc = Arc::new(num);
    phi_cache().lock().unwrap().insert(n, arc.clone());
    arc
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    let mut quo = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        quo[i] = c;
        if c != 0 {
            for (j, &b) in den.iter().enumerate() {
                rem[i + j] -= c * b;
            }
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quo
}

/// Euler's totient.
pub fn totient(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// An element of Q(ζ_N) written in the power basis 1, ζ, …, ζ^{φ(N)-1}.
///
/// Elements of different orders are lifted to the lcm of the orders before
/// arithmetic. Results whose irrational part vanishes drop back to order 1.
#[derive(Clone)]
pub struct Cyclo {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo { order: 1, coeffs: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Cyclo::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Cyclo { order: 1, coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Cyclo::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(p: i64, q: i64) -> Self {
        Cyclo::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// ζ_n^k for a primitive `n`-th root of unity ζ_n.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        let e = k.rem_euclid(n as i64) as usize;
        let mut v = vec![BigRational::zero(); e + 1];
        v[e] = BigRational::one();
        Cyclo::from_power_coeffs(n, v)
    }

    /// Builds Σ c_i ζ_n^i from an arbitrary-length coefficient list.
    pub fn from_power_coeffs(n: u32, coeffs: Vec<BigRational>) -> Self {
        let mut c = Cyclo { order: n, coeffs: reduce_mod_phi(coeffs, n) };
        c.settle();
        c
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.order == 1 {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn settle(&mut self) {
        if self.order != 1 && self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            let c0 = self.coeffs[0].clone();
            self.order = 1;
            self.coeffs = vec![c0];
        }
    }

    /// Re-expresses the element in Q(ζ_m); `m` must be a multiple of the order.
    pub fn lift(&self, m: u32) -> Cyclo {
        if m == self.order {
            return self.clone();
        }
        assert!(m % self.order == 0, "cannot lift order {} to {}", self.order, m);
        let step = (m / self.order) as usize;
        let mut v = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[i * step] = c.clone();
        }
        Cyclo { order: m, coeffs: reduce_mod_phi(v, m) }
    }

    fn common(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        if a.order == b.order {
            return (a.clone(), b.clone());
        }
        let m = a.order.lcm(&b.order);
        (a.lift(m), b.lift(m))
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        if self.order == 1 && other.order == 1 {
            return Cyclo::from_rational(&self.coeffs[0] + &other.coeffs[0]);
        }
        let (a, b) = Cyclo::common(self, other);
        let coeffs = a.coeffs.iter().zip(b.coeffs.iter()).map(|(x, y)| x + y).collect();
        let mut r = Cyclo { order: a.order, coeffs };
        r.settle();
        r
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        if self.order == 1 && other.order == 1 {
            return Cyclo::from_rational(&self.coeffs[0] * &other.coeffs[0]);
        }
        if other.order == 1 {
            return self.scale(&other.coeffs[0]);
        }
        if self.order == 1 {
            return other.scale(&self.coeffs[0]);
        }
        let (a, b) = Cyclo::common(self, other);
        let mut v = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        let mut r = Cyclo { order: a.order, coeffs: reduce_mod_phi(v, a.order) };
        r.settle();
        r
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        let mut c = Cyclo { order: self.order, coeffs: self.coeffs.iter().map(|x| x * r).collect() };
        c.settle();
        c
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        if self.order == 1 {
            return Some(Cyclo::from_rational(self.coeffs[0].recip()));
        }
        let phi: Vec<BigRational> = cyclotomic_poly(self.order)
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        let s = qpoly_inverse_mod(&self.coeffs, &phi)?;
        let mut c = Cyclo { order: self.order, coeffs: reduce_mod_phi(s, self.order) };
        c.settle();
        Some(c)
    }

    pub fn div(&self, other: &Cyclo) -> Option<Cyclo> {
        other.inv().map(|i| self.mul(&i))
    }

    pub fn pow(&self, e: i64) -> Option<Cyclo> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Cyclo::one();
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul(&b);
            }
        }
        Some(acc)
    }

    /// Replaces ζ by ζ^k in the power-basis representative.
    ///
    /// This is a field automorphism when gcd(k, N) = 1; for other `k` it is
    /// only defined on the canonical representative.
    pub fn adams(&self, k: u32) -> Cyclo {
        assert!(k >= 1);
        if self.order == 1 || k == 1 {
            return self.clone();
        }
        let n = self.order as usize;
        let mut v = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[(i * k as usize) % n] += c;
            }
        }
        Cyclo::from_power_coeffs(self.order, v)
    }

    /// Some(r) with self = ζ_r^j primitive of order exactly r, when self is a root of unity.
    pub fn root_of_unity_order(&self) -> Option<u32> {
        let m = if self.order % 2 == 0 { self.order } else { 2 * self.order };
        let mut divisors: Vec<u32> = (1..=m).filter(|d| m % d == 0).collect();
        divisors.sort();
        for d in divisors {
            if self.pow(d as i64)?.is_one() {
                return Some(d);
            }
        }
        None
    }

    /// Writes a root of unity as ζ_m^j with m = lcm(2, order).
    pub fn root_of_unity_exponent(&self) -> Option<(u32, u32)> {
        let m = if self.order % 2 == 0 { self.order } else { 2 * self.order };
        for j in 0..m {
            if Cyclo::root_of_unity(m, j as i64).eq_value(self) {
                return Some((m, j));
            }
        }
        None
    }

    pub fn eq_value(&self, other: &Cyclo) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Cyclo::common(self, other);
        a.coeffs == b.coeffs
    }

    /// A sign-like normalisation key: true when the first nonzero coefficient is negative.
    pub fn leading_negative(&self) -> bool {
        self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.is_negative()).unwrap_or(false)
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        self.eq_value(other)
    }
}

impl Eq for Cyclo {}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let mut first = true;
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*z{}", c, self.order)?,
                _ => write!(f, "{}*z{}^{}", c, self.order, i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

fn reduce_mod_phi(mut v: Vec<BigRational>, n: u32) -> Vec<BigRational> {
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    if v.len() > deg {
        for i in (deg..v.len()).rev() {
            if v[i].is_zero() {
                continue;
            }
            let t = v[i].clone();
            for (j, &p) in phi.iter().enumerate() {
                if p != 0 {
                    let idx = i - deg + j;
                    v[idx] -= &t * BigRational::from_integer(BigInt::from(p));
                }
            }
        }
        v.truncate(deg);
    }
    while v.len() < deg {
        v.push(BigRational::zero());
    }
    v
}

fn trim(v: &mut Vec<BigRational>) {
    while v.len() > 1 && v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
}

fn qpoly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut bb = b.to_vec();
    trim(&mut bb);
    let db = bb.len() - 1;
    let lead = bb[db].clone();
    if r.len() < bb.len() {
        return (vec![BigRational::zero()], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..r.len() - db).rev() {
        let c = &r[i + db] / &lead;
        if !c.is_zero() {
            for (j, y) in bb.iter().enumerate() {
                r[i + j] -= &c * y;
            }
        }
        q[i] = c;
    }
    r.truncate(db.max(1));
    trim(&mut r);
    (q, r)
}

fn qpoly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    v
}

fn qpoly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut v = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        v[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        v[i] -= y;
    }
    trim(&mut v);
    v
}

fn is_zero_poly(v: &[BigRational]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// Inverse of `a` modulo the irreducible `m` over Q via the extended Euclidean algorithm.
fn qpoly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    let mut s0 = vec![BigRational::zero()];
    let mut s1 = vec![BigRational::one()];
    while !is_zero_poly(&r1) {
        let (q, r) = qpoly_divrem(&r0, &r1);
        let s2 = qpoly_sub(&s0, &qpoly_mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    trim(&mut r0);
    if r0.len() != 1 || r0[0].is_zero() {
        return None;
    }
    let c = r0[0].recip();
    Some(s0.into_iter().map(|x| x * &c).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(5), 4);
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let z = Cyclo::root_of_unity(4, 1);
        assert_eq!(z.mul(&z), Cyclo::from_int(-1));
        assert_eq!(z.mul(&z).order(), 1);
    }

    #[test]
    fn lifting_mixes_orders() {
        let z3 = Cyclo::root_of_unity(3, 1);
        let z4 = Cyclo::root_of_unity(4, 1);
        let p = z3.mul(&z4);
        assert_eq!(p.order(), 12);
        assert_eq!(p.pow(12).unwrap(), Cyclo::one());
        assert_eq!(p.root_of_unity_order(), Some(12));
    }

    #[test]
    fn inverse_roundtrip() {
        let z5 = Cyclo::root_of_unity(5, 1);
        let x = Cyclo::one().add(&z5.scale(&BigRational::from_integer(2.into())));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), Cyclo::one());
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        let mut s = Cyclo::zero();
        for k in 0..6 {
            s = s.add(&Cyclo::root_of_unity(6, k));
        }
        assert!(s.is_zero());
    }

    #[test]
    fn adams_on_zeta() {
        let z4 = Cyclo::root_of_unity(4, 1);
        assert_eq!(z4.adams(2), Cyclo::from_int(-1));
        assert_eq!(z4.adams(4), Cyclo::one());
    }

    #[test]
    fn root_exponent_lookup() {
        let z = Cyclo::root_of_unity(3, 2);
        let (m, j) = z.root_of_unity_exponent().unwrap();
        assert_eq!(Cyclo::root_of_unity(m, j as i64), z);
        assert_eq!(Cyclo::from_int(2).root_of_unity_order(), None);
        assert_eq!(Cyclo::from_int(-1).root_of_unity_order(), Some(2));
    }
}
