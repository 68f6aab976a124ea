//! Rational functions in q over a K-ring: factor classification, polarization,
//! residues, the symplectic form and Taylor expansion in parameters.

use std::fmt;

use crate::error::{Error, Result};
use crate::kring::{pairing, KClass};
use crate::loopspace::{LoopSpaceProfile, Role, SPlusMode};
use crate::scalars::{Cyclo, Mono, MonoSubst, Poly, Scalar, Series, Sym};

/// A KClass whose coordinates are rational functions of q.
pub type QRational = KClass;

/// How a canonical denominator factor sits relative to a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    /// q-free and invertible in the coefficient ring.
    ParameterUnit,
    /// Zeros only at points of the unit-root set (roots of unity, or λ^{1/m}ζ for tangent λ).
    UnitRoot,
    /// Allowed in S_+.
    PlusAdmissible,
    /// Neither.
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    PlusMember,
    MinusMember,
    Mixed,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub membership: Membership,
    pub offenders: Vec<String>,
}

/// The binomial `A − c·B·q^k` (k > 0) written through its zero locus `q^k = u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QBinomial {
    pub k: i32,
    pub u_coeff: Cyclo,
    pub u_mono: Mono,
}

impl QBinomial {
    pub fn of(g: &Poly) -> Option<QBinomial> {
        let parts = g.collect_by(Sym::Q);
        if parts.len() != 2 {
            return None;
        }
        let mut it = parts.into_iter();
        let (k0, a) = it.next()?;
        let (k1, b) = it.next()?;
        if k0 != 0 || k1 <= 0 {
            return None;
        }
        let (ca, ma) = a.as_monomial()?;
        let (cb, mb) = b.as_monomial()?;
        Some(QBinomial { k: k1, u_coeff: ca.neg().div(&cb)?, u_mono: ma.div(&mb) })
    }
}

/// Keeps the terms of lowest (or highest) exponent in `s` and strips `s`.
fn extreme_part(g: &Poly, s: Sym, lowest: bool) -> Poly {
    let parts = g.collect_by(s);
    let pick = if lowest { parts.into_iter().next() } else { parts.into_iter().next_back() };
    pick.map(|(_, p)| p).unwrap_or_else(Poly::zero)
}

/// The factor with every adic parameter sent to its distinguished point and characters to 1.
fn distinguished(g: &Poly, profile: &LoopSpaceProfile) -> Poly {
    let mut h = g.clone();
    for (s, role) in &profile.params {
        if !h.contains(*s) {
            continue;
        }
        h = match role {
            Role::Adic => extreme_part(&h, *s, true),
            Role::AdicInverse => extreme_part(&h, *s, false),
            Role::Character => {
                let sub = MonoSubst::new().with(*s, Cyclo::one(), Mono::one());
                h.subst(&sub).unwrap_or_else(Poly::zero)
            }
            Role::Field | Role::Laurent => h,
        };
    }
    h
}

fn unit_in_t(g0: &Poly, profile: &LoopSpaceProfile) -> bool {
    if g0.is_zero() {
        return false;
    }
    if g0.as_monomial().is_some() {
        return true;
    }
    g0.symbols().iter().all(|s| profile.role(*s) == Some(Role::Field))
}

fn is_root_of_unity(c: &Cyclo) -> bool {
    c.root_of_unity_order().is_some()
}

/// χ = r·w with k/r a positive integer, so that q^k = ζχ has roots ζ' w^{1/m}.
fn tangent_power(chi: &Mono, k: i32, tangent: &[Mono]) -> bool {
    use num_rational::Ratio;
    tangent.iter().any(|w| {
        let Some(&(s0, w0)) = w.pairs().first() else { return false };
        let r = Ratio::new(chi.exp(s0) as i64, w0 as i64);
        if r <= Ratio::from_integer(0) {
            return false;
        }
        let consistent = w.pairs().iter().all(|&(s, e)| Ratio::from_integer(chi.exp(s) as i64) == r * e as i64)
            && chi.pairs().iter().all(|&(s, _)| w.contains(s));
        let m = Ratio::from_integer(k as i64) / r;
        consistent && m.is_integer()
    })
}

pub fn classify_factor(g: &Poly, profile: &LoopSpaceProfile) -> FactorKind {
    if g.symbols().iter().any(|s| *s != Sym::Q && profile.role(*s).is_none()) {
        return FactorKind::Outside;
    }
    if !g.contains(Sym::Q) {
        return if unit_in_t(&distinguished(g, profile), profile) {
            FactorKind::ParameterUnit
        } else {
            FactorKind::Outside
        };
    }
    if let Some(b) = QBinomial::of(g) {
        if is_root_of_unity(&b.u_coeff) {
            if b.u_mono.is_one() {
                return FactorKind::UnitRoot;
            }
            let chars_only = b.u_mono.symbols().all(|s| profile.role(s) == Some(Role::Character));
            if chars_only && tangent_power(&b.u_mono, b.k, &profile.tangent) {
                return FactorKind::UnitRoot;
            }
        }
    }
    let plus_ok = match &profile.splus {
        SPlusMode::Min => false,
        SPlusMode::Max => true,
        SPlusMode::Custom(syms) => syms.iter().any(|s| g.contains(*s)),
    };
    if plus_ok && plus_test(g, profile) {
        return FactorKind::PlusAdmissible;
    }
    FactorKind::Outside
}

/// g(ζ, distinguished parameters) ≠ 0 for every root of unity ζ.
fn plus_test(g: &Poly, profile: &LoopSpaceProfile) -> bool {
    let g0 = distinguished(g, profile);
    if g0.is_zero() {
        return false;
    }
    if !g0.contains(Sym::Q) || g0.len() == 1 {
        return true;
    }
    let parts = g0.collect_by(Sym::Q);
    if parts.len() != 2 {
        return false;
    }
    let mut it = parts.into_iter();
    let (k0, a) = it.next().unwrap();
    let (k1, b) = it.next().unwrap();
    let (Some((ca, ma)), Some((cb, mb))) = (a.as_monomial(), b.as_monomial()) else {
        return false;
    };
    if k1 <= k0 {
        return false;
    }
    let u = ma.div(&mb);
    if !u.is_one() {
        return u.symbols().all(|s| matches!(profile.role(s), Some(Role::Field | Role::Laurent)));
    }
    match ca.neg().div(&cb) {
        Some(c) => !is_root_of_unity(&c),
        None => false,
    }
}

fn q_range(p: &Poly) -> (i32, i32) {
    p.degree_range(Sym::Q)
}

fn scalar_verdict(f: &Scalar, profile: &LoopSpaceProfile, offenders: &mut Vec<String>) -> Membership {
    if f.is_zero() {
        return Membership::PlusMember;
    }
    let mut any_outside = false;
    let mut any_unit_root = false;
    let mut den_deg = 0i64;
    for (g, e) in f.denominator() {
        match classify_factor(g, profile) {
            FactorKind::Outside => {
                any_outside = true;
                offenders.push(format!("{}", g));
            }
            FactorKind::UnitRoot => {
                any_unit_root = true;
                den_deg += q_range(g).1 as i64 * *e as i64;
            }
            FactorKind::PlusAdmissible => {
                den_deg = i64::MIN / 4;
            }
            FactorKind::ParameterUnit => {}
        }
    }
    if any_outside {
        return Membership::Outside;
    }
    if !any_unit_root {
        return Membership::PlusMember;
    }
    let (lo, hi) = q_range(f.numerator());
    if lo >= 0 && (hi as i64) < den_deg {
        Membership::MinusMember
    } else {
        Membership::Mixed
    }
}

/// Membership of `f` in the profile's S_+ side, S_- side, both (mixed) or neither.
pub fn classify(f: &QRational, profile: &LoopSpaceProfile) -> Verdict {
    let mut offenders = Vec::new();
    let mut kinds = Vec::new();
    for c in f.coords() {
        if !c.is_zero() {
            kinds.push(scalar_verdict(c, profile, &mut offenders));
        }
    }
    let membership = if kinds.contains(&Membership::Outside) {
        Membership::Outside
    } else if kinds.iter().all(|k| *k == Membership::PlusMember) {
        Membership::PlusMember
    } else if kinds.iter().all(|k| *k == Membership::MinusMember) {
        Membership::MinusMember
    } else {
        Membership::Mixed
    };
    Verdict { membership, offenders }
}

pub fn is_plus_member(f: &QRational, profile: &LoopSpaceProfile) -> bool {
    classify(f, profile).membership == Membership::PlusMember
}

pub fn is_minus_member(f: &QRational, profile: &LoopSpaceProfile) -> bool {
    f.is_zero() || classify(f, profile).membership == Membership::MinusMember
}

/// num · ∏ den_i⁻¹ with nilpotent parts of each denominator expanded away.
pub fn normalize(num: &QRational, den: &[QRational]) -> Result<QRational> {
    let mut acc = num.clone();
    for d in den {
        let inv = d
            .inv()
            .map_err(|_| Error::NonInvertibleDenominator(format!("{}", d)))?;
        acc = acc.mul(&inv)?;
    }
    Ok(acc)
}

/// Univariate polynomials in q over q-free scalars.
#[derive(Clone, Debug)]
struct UPoly(Vec<Scalar>);

impl UPoly {
    fn from_poly(p: &Poly) -> UPoly {
        let parts = p.collect_by(Sym::Q);
        let top = parts.keys().next_back().copied().unwrap_or(0).max(0) as usize;
        let mut v = vec![Scalar::zero(); top + 1];
        for (k, c) in parts {
            assert!(k >= 0, "negative q power in polynomial part");
            v[k as usize] = Scalar::from_poly(c);
        }
        UPoly(v).trim()
    }

    fn trim(mut self) -> UPoly {
        while self.0.len() > 1 && self.0.last().unwrap().is_zero() {
            self.0.pop();
        }
        if self.0.is_empty() {
            self.0.push(Scalar::zero());
        }
        self
    }

    fn deg(&self) -> i64 {
        if self.is_zero() {
            -1
        } else {
            self.0.len() as i64 - 1
        }
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let z = Scalar::zero();
        UPoly((0..n).map(|i| self.0.get(i).unwrap_or(&z).add(o.0.get(i).unwrap_or(&z))).collect()).trim()
    }

    fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| c.neg()).collect())
    }

    fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    fn mul(&self, o: &UPoly) -> UPoly {
        let mut v = vec![Scalar::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        UPoly(v).trim()
    }

    fn divrem(&self, d: &UPoly) -> Result<(UPoly, UPoly)> {
        let dd = d.deg();
        if dd < 0 {
            return Err(Error::DivisionByZero);
        }
        let lc = d.0[dd as usize].inv()?;
        let mut r = self.clone();
        let mut q = vec![Scalar::zero(); (self.deg() - dd + 1).max(1) as usize];
        while r.deg() >= dd {
            let k = (r.deg() - dd) as usize;
            let c = r.0[r.deg() as usize].mul(&lc);
            for (i, x) in d.0.iter().enumerate() {
                r.0[i + k] = r.0[i + k].sub(&c.mul(x));
            }
            q[k] = c;
            r = r.trim();
        }
        Ok((UPoly(q).trim(), r))
    }

    /// s with s·a ≡ 1 mod m.
    fn inverse_mod(a: &UPoly, m: &UPoly) -> Result<UPoly> {
        let (mut r0, mut r1) = (m.clone(), a.divrem(m)?.1);
        let (mut s0, mut s1) = (UPoly(vec![Scalar::zero()]), UPoly(vec![Scalar::one()]));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.deg() != 0 {
            return Err(Error::MixedFactor("plus and unit-root factors share a zero".into()));
        }
        let c = r0.0[0].inv()?;
        Ok(UPoly(s0.0.iter().map(|x| x.mul(&c)).collect()).trim())
    }

    fn to_scalar(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, c) in self.0.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&c.mul(&Scalar::pow_of(Sym::Q, i as i32)));
            }
        }
        acc
    }
}

/// 1 / ∏ f^e with the factor structure kept.
fn recip_product(fs: &[(Poly, u32)]) -> Result<Scalar> {
    Scalar::from_parts(Poly::one(), fs.to_vec())
}

/// Splits a scalar as plus + minus relative to the profile.
pub fn polarize_scalar(f: &Scalar, profile: &LoopSpaceProfile) -> Result<(Scalar, Scalar)> {
    if f.is_zero() {
        return Ok((Scalar::zero(), Scalar::zero()));
    }
    let mut unit_root = Vec::new();
    let mut plus = Vec::new();
    let mut units = Vec::new();
    for (g, e) in f.denominator() {
        match classify_factor(g, profile) {
            FactorKind::UnitRoot => unit_root.push((g.clone(), *e)),
            FactorKind::PlusAdmissible => plus.push((g.clone(), *e)),
            FactorKind::ParameterUnit => units.push((g.clone(), *e)),
            FactorKind::Outside => return Err(Error::MixedFactor(format!("{}", g))),
        }
    }
    if unit_root.is_empty() {
        return Ok((f.clone(), Scalar::zero()));
    }
    let c_inv = recip_product(&units)?;
    let (lo, _) = q_range(f.numerator());
    let s = (-lo).max(0);
    let n = UPoly::from_poly(&f.numerator().mul_term(&Cyclo::one(), &Mono::pow_of(Sym::Q, s)));
    let mut u = UPoly(vec![Scalar::one()]);
    for (g, e) in &unit_root {
        for _ in 0..*e {
            u = u.mul(&UPoly::from_poly(g));
        }
    }
    let mut w = UPoly::from_poly(&Poly::term(Cyclo::one(), Mono::pow_of(Sym::Q, s)));
    for (g, e) in &plus {
        for _ in 0..*e {
            w = w.mul(&UPoly::from_poly(g));
        }
    }
    let winv = UPoly::inverse_mod(&w, &u)?;
    let a = n.divrem(&u)?.1.mul(&winv).divrem(&u)?.1;
    let (b, rem) = n.sub(&a.mul(&w)).divrem(&u)?;
    debug_assert!(rem.is_zero());
    let u_inv = recip_product(&unit_root)?;
    let w_inv = recip_product(&plus)?.mul(&Scalar::pow_of(Sym::Q, -s));
    let minus = a.to_scalar().mul(&u_inv).mul(&c_inv);
    let plus_part = b.to_scalar().mul(&w_inv).mul(&c_inv);
    Ok((plus_part, minus))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationSplit {
    pub plus: QRational,
    pub minus: QRational,
}

pub fn polarize(f: &QRational, profile: &LoopSpaceProfile) -> Result<PolarizationSplit> {
    let mut plus = Vec::with_capacity(f.coords().len());
    let mut minus = Vec::with_capacity(f.coords().len());
    for c in f.coords() {
        let (p, m) = polarize_scalar(c, profile)?;
        plus.push(p);
        minus.push(m);
    }
    Ok(PolarizationSplit { plus: KClass::new(f.ring(), plus)?, minus: KClass::new(f.ring(), minus)? })
}

/// q ↦ c·q^l on every coordinate.
pub fn q_substitute(f: &QRational, c: &Cyclo, l: i32) -> Result<QRational> {
    let sub = MonoSubst::new().with(Sym::Q, c.clone(), Mono::pow_of(Sym::Q, l));
    f.subst(&sub)
}

/// Ω(f, g) = Σ_{q = roots of unity} Res ⟨f(q⁻¹), g(q)⟩_twist dq/q, computed as −h₋(0).
pub fn symplectic_pair(
    f: &QRational,
    g: &QRational,
    twist: &KClass,
    profile: &LoopSpaceProfile,
) -> Result<Scalar> {
    let fi = q_substitute(f, &Cyclo::one(), -1)?;
    let h = pairing(&fi, g, twist)?;
    let (_, minus) = polarize_scalar(&h, profile)?;
    let v = minus.eval_consts(&[(Sym::Q, Cyclo::zero())].into_iter().collect())?;
    Ok(v.neg())
}

/// Res_{q=u} f dq/q for a scalar, `u` a nonzero monomial.
pub fn residue_scalar(f: &Scalar, u: &Scalar) -> Result<Scalar> {
    let (c, m) = u
        .as_monomial()
        .ok_or_else(|| Error::Config(format!("residue point {} is not a monomial", u)))?;
    let at = MonoSubst::new().with(Sym::Q, c, m);
    let mut order = 0u32;
    for (g, e) in f.denominator() {
        let v = g.subst(&at).ok_or(Error::DivisionByZero)?;
        if v.is_zero() {
            order += e;
        }
    }
    if order == 0 || f.is_zero() {
        return Ok(Scalar::zero());
    }
    let len = order as usize + 3;
    let s = Series::expand_at(f, Sym::Q, u, len)?;
    let inv1pe = Series::new(0, (0..len).map(|i| Scalar::int(if i % 2 == 0 { 1 } else { -1 })).collect());
    let t = s.mul(&inv1pe);
    Ok(t.coeff(-1).unwrap_or_else(Scalar::zero))
}

pub fn residue_at(f: &QRational, u: &Scalar) -> Result<KClass> {
    f.try_map(|c| residue_scalar(c, u))
}

/// Truncated expansion in a set of parameters: coefficient i is the total-degree-i part.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries {
    pub params: Vec<Sym>,
    pub order: u32,
    pub coeffs: Vec<KClass>,
}

impl TruncSeries {
    pub fn sum(&self) -> Result<KClass> {
        let mut acc = KClass::zero(self.coeffs[0].ring());
        for c in &self.coeffs {
            acc = acc.add(c)?;
        }
        Ok(acc)
    }

    pub fn map(&self, f: impl Fn(&KClass) -> Result<KClass>) -> Result<TruncSeries> {
        Ok(TruncSeries {
            params: self.params.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            write!(f, "[{}] {}\n", i, c)?;
        }
        write!(f, "+ O(deg {})", self.order + 1)
    }
}

fn scaling_symbol() -> Sym {
    Sym::named("__expansion_t")
}

pub fn taylor_scalar(f: &Scalar, params: &[Sym], order: u32) -> Result<Vec<Scalar>> {
    let t = scaling_symbol();
    let mut sub = MonoSubst::new();
    for p in params {
        sub.set(*p, Cyclo::one(), Mono::from_pairs([(*p, 1), (t, 1)]));
    }
    let g = f.subst(&sub)?;
    let s = Series::expand(&g, t, order as usize + 1)
        .map_err(|_| Error::PoleAtExpansionPoint(format!("{}", f)))?;
    if s.val < 0 && s.coeffs.iter().any(|c| !c.is_zero()) {
        return Err(Error::PoleAtExpansionPoint(format!("{}", f)));
    }
    (0..=order as i32).map(|i| Ok(s.coeff(i).unwrap_or_else(Scalar::zero))).collect()
}

/// ι: expansion of f in the given parameters around 0 up to total degree `order`.
pub fn taylor_embed(f: &QRational, params: &[Sym], order: u32) -> Result<TruncSeries> {
    let per: Vec<Vec<Scalar>> =
        f.coords().iter().map(|c| taylor_scalar(c, params, order)).collect::<Result<_>>()?;
    let coeffs = (0..=order as usize)
        .map(|i| KClass::new(f.ring(), per.iter().map(|v| v[i].clone()).collect()))
        .collect::<Result<_>>()?;
    Ok(TruncSeries { params: params.to_vec(), order, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kring::KRing;

    fn pt(s: Scalar) -> KClass {
        KClass::constant(&KRing::point(), s)
    }

    fn q() -> Scalar {
        Scalar::q()
    }

    fn mu() -> Scalar {
        Scalar::var(Sym::MU)
    }

    fn one() -> Scalar {
        Scalar::one()
    }

    fn recip(s: Scalar) -> Scalar {
        s.inv().unwrap()
    }

    #[test]
    fn normalize_geometric_expansion() {
        let r = KRing::projective(1);
        let p = KClass::generator(&r, 0);
        let one = KClass::one(&r);
        let den = one.sub(&p.scale(&q())).unwrap();
        let f = normalize(&one, &[den]).unwrap();
        let a = recip(one_minus_q());
        let b = q().mul(&a).mul(&a);
        assert_eq!(f.coords(), &[a, b]);
        let den = one.sub(&p.scale(&mu())).unwrap();
        let g = normalize(&one, &[den]).unwrap();
        let c = recip(Scalar::one().sub(&mu()));
        assert_eq!(g.coords(), &[c.clone(), mu().mul(&c).mul(&c)]);
    }

    fn one_minus_q() -> Scalar {
        one().sub(&q())
    }

    #[test]
    fn classification_examples() {
        let prof = LoopSpaceProfile::mu_adic();
        let f = pt(recip(one().sub(&mu().mul(&q()))));
        assert_eq!(classify(&f, &prof).membership, Membership::PlusMember);
        let g = pt(recip(one_minus_q()).pow(2).unwrap());
        assert_eq!(classify(&g, &prof).membership, Membership::MinusMember);
        let lam = Sym::named("lambda");
        let eprof = LoopSpaceProfile::equivariant(&[lam], &[Mono::var(Sym::named("t"))]);
        let h = pt(recip(one().sub(&Scalar::var(lam).mul(&q().pow(2).unwrap()))));
        assert_eq!(classify(&h, &eprof).membership, Membership::Outside);
        let k = pt(recip(one().sub(&mu().mul(&recip(q())))));
        assert_eq!(classify(&k, &prof).membership, Membership::PlusMember);
    }

    #[test]
    fn polarize_examples() {
        let prof = LoopSpaceProfile::mu_adic();
        let f = pt(q().div(&one_minus_q()).unwrap());
        let s = polarize(&f, &prof).unwrap();
        assert_eq!(s.plus, pt(Scalar::int(-1)));
        assert_eq!(s.minus, pt(recip(one_minus_q())));

        let g = pt(recip(one_minus_q()).mul(&recip(one().sub(&mu().mul(&q())))));
        let s = polarize(&g, &prof).unwrap();
        let c = recip(one().sub(&mu()));
        assert_eq!(s.minus, pt(c.mul(&recip(one_minus_q()))));
        assert_eq!(s.plus, pt(mu().mul(&c).neg().mul(&recip(one().sub(&mu().mul(&q()))))));

        let lp = pt(q().pow(-2).unwrap().add(&Scalar::int(3)).add(&q().pow(5).unwrap()));
        let s = polarize(&lp, &prof).unwrap();
        assert_eq!(s.plus, lp);
        assert!(s.minus.is_zero());
    }

    #[test]
    fn omega_examples() {
        let prof = LoopSpaceProfile::mu_adic();
        let r = KRing::point();
        let tw = KClass::one(&r);
        let v = symplectic_pair(&pt(one()), &pt(recip(one_minus_q())), &tw, &prof).unwrap();
        assert_eq!(v, Scalar::int(-1));
        let w = symplectic_pair(&pt(recip(one_minus_q())), &pt(one()), &tw, &prof).unwrap();
        assert_eq!(w, Scalar::int(1));
    }

    #[test]
    fn residue_examples() {
        let lam = Scalar::var(Sym::named("lambda"));
        let f = recip(one().sub(&q().mul(&recip(lam.clone()))));
        assert_eq!(residue_scalar(&f, &lam).unwrap(), Scalar::int(-1));
        assert_eq!(residue_scalar(&recip(one_minus_q()), &one()).unwrap(), Scalar::int(-1));
        assert!(residue_scalar(&recip(one_minus_q()), &Scalar::int(2)).unwrap().is_zero());
        // double pole: Res_{q=1} q/(1-q)^2 dq/q = Res 1/(1-q)^2 dq = 0
        let g = recip(one_minus_q()).pow(2).unwrap().mul(&q());
        assert!(residue_scalar(&g, &one()).unwrap().is_zero());
        // Res_{q=1} 1/(q(1-q)^2) dq/q... = Res (q^-2)/(1-q)^2 dq = d/dq q^-2 at 1 = -2
        let h = recip(one_minus_q()).pow(2).unwrap().mul(&q().pow(-1).unwrap());
        assert_eq!(residue_scalar(&h, &one()).unwrap(), Scalar::int(-2));
    }

    #[test]
    fn taylor_examples() {
        let f = pt(recip(one().sub(&mu().mul(&q()))));
        let s = taylor_embed(&f, &[Sym::MU], 2).unwrap();
        let expected = one().add(&mu().mul(&q())).add(&mu().mul(&q()).pow(2).unwrap());
        assert_eq!(s.sum().unwrap(), pt(expected));
        let g = pt(one_minus_q());
        assert_eq!(taylor_embed(&g, &[Sym::MU], 3).unwrap().sum().unwrap(), g);
        let h = pt(recip(mu().mul(&q()).sub(&Scalar::int(0)).add(&mu())));
        assert!(matches!(taylor_embed(&h, &[Sym::MU], 2), Err(Error::PoleAtExpansionPoint(_))));
    }
}
