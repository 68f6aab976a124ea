//! Loop-space profiles, Novikov-truncated loop elements, Novikov substitutions and
//! reduction-of-coefficients maps.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kring::{KClass, KRing};
use crate::qrational::{classify, classify_factor, FactorKind, Membership, QRational};
use crate::scalars::{canonical_poly, Cyclo, Mono, MonoSubst, Scalar, Sym};

/// How a parameter enters the coefficient ring of a loop space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Formal power series in the parameter (distinguished point 0).
    Adic,
    /// Formal power series in the inverse parameter (distinguished point ∞).
    AdicInverse,
    /// Rational functions in the parameter.
    Field,
    /// Laurent polynomials in the parameter.
    Laurent,
    /// Equivariant character, sent to 1 by the non-equivariant limit.
    Character,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SPlusMode {
    /// Only powers of q and parameter units.
    Min,
    /// Every factor with no zero at a root of unity at the distinguished point.
    Max,
    /// As `Max`, restricted to factors involving one of the listed parameters.
    Custom(Vec<Sym>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpaceProfile {
    pub name: String,
    pub params: Vec<(Sym, Role)>,
    pub splus: SPlusMode,
    /// Tangent characters whose roots λ^{1/m} count as unit-root poles.
    pub tangent: Vec<Mono>,
}

impl LoopSpaceProfile {
    pub fn new(name: &str, params: Vec<(Sym, Role)>, splus: SPlusMode) -> LoopSpaceProfile {
        LoopSpaceProfile { name: name.to_string(), params, splus, tangent: Vec::new() }
    }

    pub fn role(&self, s: Sym) -> Option<Role> {
        self.params.iter().find(|(t, _)| *t == s).map(|(_, r)| *r)
    }

    pub fn with_param(mut self, s: Sym, role: Role) -> LoopSpaceProfile {
        match self.params.iter_mut().find(|(t, _)| *t == s) {
            Some(slot) => slot.1 = role,
            None => self.params.push((s, role)),
        }
        self
    }

    pub fn with_tangent(mut self, tangent: &[Mono]) -> LoopSpaceProfile {
        self.tangent = tangent.to_vec();
        self
    }

    /// K(X) ⊗ Λ(q) with 𝒦₊ the Laurent polynomials.
    pub fn standard() -> LoopSpaceProfile {
        LoopSpaceProfile::new("K", vec![], SPlusMode::Min)
    }

    /// 𝒦^μ: μ adic, S₊ maximal.
    pub fn mu_adic() -> LoopSpaceProfile {
        LoopSpaceProfile::new("K^mu", vec![(Sym::MU, Role::Adic)], SPlusMode::Max)
    }

    /// 𝒦[[μ⁻¹]]: μ⁻¹ adic.
    pub fn mu_inverse_adic() -> LoopSpaceProfile {
        LoopSpaceProfile::new("K[[mu^-1]]", vec![(Sym::MU, Role::AdicInverse)], SPlusMode::Max)
    }

    /// 𝒦(μ): μ a field parameter.
    pub fn mu_field() -> LoopSpaceProfile {
        LoopSpaceProfile::new("K(mu)", vec![(Sym::MU, Role::Field)], SPlusMode::Max)
    }

    /// 𝒦[μ, μ⁻¹].
    pub fn mu_laurent() -> LoopSpaceProfile {
        LoopSpaceProfile::new("K[mu,mu^-1]", vec![(Sym::MU, Role::Laurent)], SPlusMode::Min)
    }

    /// 𝒦^{a,b}: a and b adic, S₊ generated by factors involving them.
    pub fn ab_adic() -> LoopSpaceProfile {
        LoopSpaceProfile::new(
            "K^{a,b}",
            vec![(Sym::A, Role::Adic), (Sym::B, Role::Adic)],
            SPlusMode::Custom(vec![Sym::A, Sym::B]),
        )
    }

    /// 𝒦(μ)^{a,b}.
    pub fn mu_field_ab() -> LoopSpaceProfile {
        LoopSpaceProfile::new(
            "K(mu)^{a,b}",
            vec![(Sym::MU, Role::Field), (Sym::A, Role::Adic), (Sym::B, Role::Adic)],
            SPlusMode::Max,
        )
    }

    /// Equivariant variant: characters with roles `Character`, S^G₊ = π⁻¹(S₊).
    pub fn equivariant(chars: &[Sym], tangent: &[Mono]) -> LoopSpaceProfile {
        LoopSpaceProfile::new(
            "K_G",
            chars.iter().map(|c| (*c, Role::Character)).collect(),
            SPlusMode::Max,
        )
        .with_tangent(tangent)
    }

    pub fn by_name(name: &str) -> Option<LoopSpaceProfile> {
        Some(match name {
            "K" | "standard" => LoopSpaceProfile::standard(),
            "K^mu" | "mu-adic" => LoopSpaceProfile::mu_adic(),
            "K[[mu^-1]]" | "mu-inverse-adic" => LoopSpaceProfile::mu_inverse_adic(),
            "K(mu)" | "mu-field" => LoopSpaceProfile::mu_field(),
            "K[mu,mu^-1]" | "mu-laurent" => LoopSpaceProfile::mu_laurent(),
            "K^{a,b}" | "ab-adic" => LoopSpaceProfile::ab_adic(),
            "K(mu)^{a,b}" | "mu-field-ab" => LoopSpaceProfile::mu_field_ab(),
            _ => return None,
        })
    }

    /// Whether an element of `self` is canonically an element of `other`.
    pub fn includes_into(&self, other: &LoopSpaceProfile) -> bool {
        if self == other {
            return true;
        }
        let rank = |r: Option<Role>| match r {
            None => 0,
            Some(Role::Laurent) => 1,
            Some(Role::Field) => 2,
            Some(_) => 3,
        };
        self.params.iter().all(|(s, r)| match other.role(*s) {
            Some(o) if o == *r => true,
            Some(Role::Field) => *r == Role::Laurent,
            _ => false,
        }) && other.params.iter().all(|(s, r)| rank(self.role(*s)) <= rank(Some(*r)))
            && self.tangent.iter().all(|t| other.tangent.contains(t))
    }
}

/// Side on which membership is tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    Full,
}

/// A truncated point Σ_d Q^d J_d of the loop space.
#[derive(Clone, Debug)]
pub struct LoopElement {
    pub ring: Arc<KRing>,
    pub dmax: u32,
    pub n_vars: usize,
    pub entries: BTreeMap<Vec<i64>, QRational>,
}

impl LoopElement {
    pub fn new(ring: &Arc<KRing>, n_vars: usize, dmax: u32) -> LoopElement {
        LoopElement { ring: ring.clone(), dmax, n_vars, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, d: Vec<i64>, f: QRational) -> Result<()> {
        if d.len() != self.n_vars {
            return Err(Error::Config(format!("degree {:?} has wrong length", d)));
        }
        if d.iter().any(|&x| x < 0) {
            return Err(Error::Config(format!("degree {:?} is not effective", d)));
        }
        if d.iter().sum::<i64>() > self.dmax as i64 {
            return Ok(());
        }
        if !Arc::ptr_eq(f.ring(), &self.ring) && f.ring().name != self.ring.name {
            return Err(Error::ModelMismatch);
        }
        self.entries.insert(d, f);
        Ok(())
    }

    pub fn get(&self, d: &[i64]) -> QRational {
        self.entries.get(d).cloned().unwrap_or_else(|| KClass::zero(&self.ring))
    }

    /// All degrees with total degree ≤ dmax.
    pub fn all_degrees(n_vars: usize, dmax: u32) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..n_vars {
            let mut next = Vec::new();
            for d in &out {
                let used: i64 = d.iter().sum();
                for k in 0..=(dmax as i64 - used) {
                    let mut e = d.clone();
                    e.push(k);
                    next.push(e);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    pub fn map_entries(&self, f: impl Fn(&[i64], &QRational) -> Result<QRational>) -> Result<LoopElement> {
        let mut out = LoopElement::new(&self.ring, self.n_vars, self.dmax);
        for (d, v) in &self.entries {
            let w = f(d, v)?;
            if !w.is_zero() {
                out.entries.insert(d.clone(), w);
            }
        }
        Ok(out)
    }

    /// Same entries after a change of model with identical coordinates (used after limits).
    pub fn rebase(&self, ring: &Arc<KRing>) -> Result<LoopElement> {
        let mut out = LoopElement::new(ring, self.n_vars, self.dmax);
        for (d, v) in &self.entries {
            out.entries.insert(d.clone(), KClass::new(ring, v.coords().to_vec())?);
        }
        Ok(out)
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &LoopElement) -> Result<LoopElement> {
        let mut out = LoopElement::new(&self.ring, self.n_vars, self.dmax.min(other.dmax));
        let keys: std::collections::BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).cloned().collect();
        for d in keys {
            let v = self.get(&d).sub(&other.get(&d))?;
            if !v.is_zero() {
                out.entries.insert(d, v);
            }
        }
        Ok(out)
    }

    /// Degrees where the two elements differ.
    pub fn differences(&self, other: &LoopElement) -> Result<Vec<Vec<i64>>> {
        Ok(self.sub(other)?.entries.keys().cloned().collect())
    }

    pub fn is_lambda_plus_small_input(&self) -> bool {
        self.entries.keys().all(|d| d.iter().any(|&x| x != 0))
    }
}

impl PartialEq for LoopElement {
    fn eq(&self, other: &LoopElement) -> bool {
        self.n_vars == other.n_vars
            && self.sub(other).map(|d| d.entries.is_empty()).unwrap_or(false)
    }
}

#[derive(Clone, Debug)]
pub struct DegreeVerdict {
    pub degree: Vec<i64>,
    pub membership: Membership,
    pub ok: bool,
    pub offenders: Vec<String>,
}

pub fn check_profile_membership(
    j: &LoopElement,
    profile: &LoopSpaceProfile,
    side: Side,
) -> Vec<DegreeVerdict> {
    j.entries
        .iter()
        .map(|(d, f)| {
            let v = classify(f, profile);
            let ok = match side {
                Side::Plus => v.membership == Membership::PlusMember,
                Side::Minus => f.is_zero() || v.membership == Membership::MinusMember,
                Side::Full => v.membership != Membership::Outside,
            };
            DegreeVerdict { degree: d.clone(), membership: v.membership, ok, offenders: v.offenders }
        })
        .collect()
}

/// Q_i ↦ Q_i · m_i with each m_i a scalar (typically ± q^k μ^t).
#[derive(Clone, Debug, PartialEq)]
pub struct NovikovSubstitution {
    pub multipliers: Vec<Scalar>,
}

impl NovikovSubstitution {
    pub fn identity(n: usize) -> NovikovSubstitution {
        NovikovSubstitution { multipliers: vec![Scalar::one(); n] }
    }

    /// Q_i ↦ Q_i · c_i q^{k_i} μ^{t_i}.
    pub fn monomial(c: &[i64], k: &[i64], t: &[i64]) -> NovikovSubstitution {
        NovikovSubstitution {
            multipliers: (0..c.len())
                .map(|i| {
                    Scalar::mono(
                        Cyclo::from_int(c[i]),
                        Mono::from_pairs([(Sym::Q, k[i] as i32), (Sym::MU, t[i] as i32)]),
                    )
                })
                .collect(),
        }
    }

    pub fn factor(&self, d: &[i64]) -> Result<Scalar> {
        let mut acc = Scalar::one();
        for (m, &x) in self.multipliers.iter().zip(d) {
            if x != 0 {
                acc = acc.mul(&m.pow(x)?);
            }
        }
        Ok(acc)
    }

    pub fn compose(&self, other: &NovikovSubstitution) -> NovikovSubstitution {
        NovikovSubstitution {
            multipliers: self.multipliers.iter().zip(&other.multipliers).map(|(a, b)| a.mul(b)).collect(),
        }
    }
}

pub fn novikov_substitute(j: &LoopElement, sub: &NovikovSubstitution) -> Result<LoopElement> {
    if sub.multipliers.len() != j.n_vars {
        return Err(Error::Config("substitution length differs from the Novikov variable count".into()));
    }
    j.map_entries(|d, f| Ok(f.scale(&sub.factor(d)?)))
}

/// A parameter assignment π between two profiles.
#[derive(Clone, Debug)]
pub struct ReductionMap {
    pub name: String,
    pub assignment: MonoSubst,
    pub source: LoopSpaceProfile,
    pub target: LoopSpaceProfile,
}

impl ReductionMap {
    /// a ↦ μ, b ↦ μ⁻¹ from 𝒦(μ)^{a,b} to 𝒦(μ).
    pub fn ab_to_mu() -> ReductionMap {
        ReductionMap {
            name: "a->mu,b->mu^-1".into(),
            assignment: MonoSubst::new()
                .with(Sym::A, Cyclo::one(), Mono::var(Sym::MU))
                .with(Sym::B, Cyclo::one(), Mono::pow_of(Sym::MU, -1)),
            source: LoopSpaceProfile::mu_field_ab(),
            target: LoopSpaceProfile::mu_field(),
        }
    }

    /// μ ↦ 1 from 𝒦(μ) to 𝒦.
    pub fn mu_to_one() -> ReductionMap {
        ReductionMap {
            name: "mu->1".into(),
            assignment: MonoSubst::new().with(Sym::MU, Cyclo::one(), Mono::one()),
            source: LoopSpaceProfile::mu_field(),
            target: LoopSpaceProfile::standard(),
        }
    }

    pub fn identity(profile: &LoopSpaceProfile) -> ReductionMap {
        ReductionMap {
            name: "identity".into(),
            assignment: MonoSubst::new(),
            source: profile.clone(),
            target: profile.clone(),
        }
    }

    fn check_factor(&self, g: &crate::scalars::Poly) -> Result<()> {
        let before = classify_factor(g, &self.source);
        let img = g
            .subst(&self.assignment)
            .ok_or_else(|| Error::InvalidReduction(format!("{} is singular under {}", g, self.name)))?;
        if img.is_zero() {
            return Err(Error::InvalidReduction(format!("{} maps to 0 under {}", g, self.name)));
        }
        let (_, _, canon) = canonical_poly(&img);
        let after = if canon.is_one() { FactorKind::ParameterUnit } else { classify_factor(&canon, &self.target) };
        let ok = match before {
            FactorKind::ParameterUnit => after == FactorKind::ParameterUnit,
            FactorKind::PlusAdmissible => {
                matches!(after, FactorKind::PlusAdmissible | FactorKind::ParameterUnit)
            }
            FactorKind::UnitRoot => after == FactorKind::UnitRoot,
            FactorKind::Outside => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidReduction(format!(
                "factor {} ({:?} in {}) becomes {} ({:?} in {})",
                g, before, self.source.name, canon, after, self.target.name
            )))
        }
    }

    pub fn apply_scalar(&self, s: &Scalar) -> Result<Scalar> {
        for (g, _) in s.denominator() {
            self.check_factor(g)?;
        }
        s.subst(&self.assignment).map_err(|e| Error::InvalidReduction(e.to_string()))
    }

    pub fn apply(&self, f: &QRational) -> Result<QRational> {
        f.try_map(|c| self.apply_scalar(c))
    }
}

/// π applied degree-wise with the factor checks π(T¹) ⊆ T², π(S¹₊) ⊆ S²₊.
pub fn reduce_coefficients(j: &LoopElement, pi: &ReductionMap) -> Result<LoopElement> {
    let out = j.map_entries(|_, f| pi.apply(f))?;
    for v in check_profile_membership(&out, &pi.target, Side::Full) {
        if !v.ok {
            return Err(Error::InvalidReduction(format!(
                "degree {:?} leaves {}: {}",
                v.degree,
                pi.target.name,
                v.offenders.join(", ")
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Scalar {
        Scalar::q()
    }

    fn mu() -> Scalar {
        Scalar::var(Sym::MU)
    }

    #[test]
    fn membership_examples() {
        let r = KRing::point();
        let mut j = LoopElement::new(&r, 1, 2);
        j.insert(vec![0], KClass::constant(&r, Scalar::one().sub(&q()))).unwrap();
        for prof in [LoopSpaceProfile::standard(), LoopSpaceProfile::mu_adic(), LoopSpaceProfile::ab_adic()] {
            assert!(check_profile_membership(&j, &prof, Side::Plus).iter().all(|v| v.ok));
        }
        let f = Scalar::one().sub(&mu().mul(&q().inv().unwrap())).inv().unwrap();
        j.insert(vec![1], KClass::constant(&r, f)).unwrap();
        assert!(check_profile_membership(&j, &LoopSpaceProfile::mu_adic(), Side::Plus).iter().all(|v| v.ok));
        let g = Scalar::one().sub(&q()).inv().unwrap();
        j.insert(vec![2], KClass::constant(&r, g)).unwrap();
        let v = check_profile_membership(&j, &LoopSpaceProfile::mu_adic(), Side::Plus);
        assert!(!v[2].ok);
    }

    #[test]
    fn novikov_examples() {
        let r = KRing::point();
        let f = Scalar::var(Sym::named("f"));
        let mut j = LoopElement::new(&r, 1, 3);
        j.insert(vec![1], KClass::one(&r)).unwrap();
        j.insert(vec![2], KClass::constant(&r, f.clone())).unwrap();
        let s = NovikovSubstitution::monomial(&[-1], &[1], &[0]);
        let out = novikov_substitute(&j, &s).unwrap();
        assert_eq!(out.get(&[1]), KClass::constant(&r, q().neg()));
        let s2 = NovikovSubstitution::monomial(&[1], &[0], &[2]);
        let out2 = novikov_substitute(&j, &s2).unwrap();
        assert_eq!(out2.get(&[2]), KClass::constant(&r, f.mul(&mu().pow(4).unwrap())));
        assert_eq!(novikov_substitute(&j, &NovikovSubstitution::identity(1)).unwrap(), j);
        let both = novikov_substitute(&out, &s2).unwrap();
        assert_eq!(both, novikov_substitute(&j, &s.compose(&s2)).unwrap());
    }

    #[test]
    fn reduction_examples() {
        let r = KRing::projective(1);
        let p = KClass::generator(&r, 0);
        let one = KClass::one(&r);
        let a = Scalar::var(Sym::A);
        let b = Scalar::var(Sym::B);
        let num = one.sub(&p.scale(&a.mul(&q()))).unwrap();
        let den = one.sub(&p.inv().unwrap().scale(&b.mul(&q().inv().unwrap()))).unwrap();
        let mut j = LoopElement::new(&r, 1, 1);
        j.insert(vec![1], num.div(&den).unwrap()).unwrap();
        let out = reduce_coefficients(&j, &ReductionMap::ab_to_mu()).unwrap();
        let num2 = one.sub(&p.scale(&mu().mul(&q()))).unwrap();
        let den2 = one
            .sub(&p.inv().unwrap().scale(&mu().inv().unwrap().mul(&q().inv().unwrap())))
            .unwrap();
        assert_eq!(out.get(&[1]), num2.div(&den2).unwrap());

        let mut k = LoopElement::new(&r, 1, 2);
        let v = p.scale(&mu()).pow(2).unwrap().scale(&q().pow(3).unwrap());
        k.insert(vec![2], v).unwrap();
        let out = reduce_coefficients(&k, &ReductionMap::mu_to_one()).unwrap();
        assert_eq!(out.get(&[2]), p.pow(2).unwrap().scale(&q().pow(3).unwrap()));

        assert_eq!(reduce_coefficients(&k, &ReductionMap::identity(&LoopSpaceProfile::mu_field())).unwrap(), k);
    }

    #[test]
    fn reduction_rejects_pole_crossing() {
        let r = KRing::point();
        let mut j = LoopElement::new(&r, 1, 1);
        j.insert(vec![1], KClass::constant(&r, Scalar::one().sub(&mu().mul(&q())).inv().unwrap())).unwrap();
        assert!(matches!(
            reduce_coefficients(&j, &ReductionMap::mu_to_one()),
            Err(Error::InvalidReduction(_))
        ));
    }
}
