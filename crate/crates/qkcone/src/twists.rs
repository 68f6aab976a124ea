//! Degree-wise cone transforms: PFD multipliers, Euler, dual Euler, level and
//! R(a,b) twists, and the quantum Serre duality maps.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kring::{euler_class, BundleSpec, KClass, KRing, Model, MuMode};
use crate::loopspace::{
    check_profile_membership, LoopElement, LoopSpaceProfile, NovikovSubstitution, Role, Side,
};
use crate::qrational::{taylor_embed, QRational, TruncSeries};
use crate::scalars::{Cyclo, Mono, MonoSubst, Scalar, Sym};

fn qpow(k: i64) -> Scalar {
    Scalar::pow_of(Sym::Q, k as i32)
}

fn mu() -> Scalar {
    Scalar::var(Sym::MU)
}

fn sign_pow(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        Scalar::int(-1)
    }
}

/// ∏_{s=1}^m F(s)^e for m ≥ 0, and ∏_{s=m+1}^0 F(s)^{−e} for m < 0.
///
/// Each factor is raised to its power on its own so that denominators stay
/// factored.
pub fn signed_product(
    ring: &Arc<KRing>,
    m: i64,
    e: i64,
    f: impl Fn(i64) -> Result<KClass>,
) -> Result<KClass> {
    let mut acc = KClass::one(ring);
    if e == 0 {
        return Ok(acc);
    }
    let (range, power) = if m >= 0 { (1..=m, e) } else { (m + 1..=0, -e) };
    for s in range {
        acc = acc.mul(&f(s)?.pow(power)?)?;
    }
    Ok(acc)
}

fn one_minus(ring: &Arc<KRing>, x: &KClass) -> Result<KClass> {
    KClass::one(ring).sub(x)
}

/// ∏_j ∏_{s=1}^{m_j(d)} (1 − μ q^s f_j)^{sign_j}.
pub fn euler_multiplier(ring: &Arc<KRing>, spec: &BundleSpec, d: &[i64]) -> Result<KClass> {
    let mut acc = KClass::one(ring);
    for (j, s) in spec.summands.iter().enumerate() {
        let f = spec.f(ring, j)?;
        let p = signed_product(ring, spec.m(j, d), s.sign as i64, |k| {
            one_minus(ring, &f.scale(&mu().mul(&qpow(k))))
        })?;
        acc = acc.mul(&p)?;
    }
    Ok(acc)
}

/// ∏_j ∏_{s=1}^{m_j(d)} (1 − μ⁻¹ q^{−s} f_j⁻¹)^{−sign_j}.
pub fn dual_euler_multiplier(ring: &Arc<KRing>, spec: &BundleSpec, d: &[i64]) -> Result<KClass> {
    let mut acc = KClass::one(ring);
    for (j, s) in spec.summands.iter().enumerate() {
        let finv = spec.f(ring, j)?.inv()?;
        let p = signed_product(ring, spec.m(j, d), -(s.sign as i64), |k| {
            one_minus(ring, &finv.scale(&mu().inv()?.mul(&qpow(-k))))
        })?;
        acc = acc.mul(&p)?;
    }
    Ok(acc)
}

/// ∏_j [f_j^m q^{m(m+1)/2}]^{l·sign_j} with m = m_j(d); `weighted` uses μ f_j.
pub fn level_multiplier(
    ring: &Arc<KRing>,
    spec: &BundleSpec,
    d: &[i64],
    weighted: bool,
) -> Result<KClass> {
    let mut acc = KClass::one(ring);
    for (j, s) in spec.summands.iter().enumerate() {
        let e = spec.level * s.sign as i64;
        if e == 0 {
            continue;
        }
        let m = spec.m(j, d);
        let mut base = spec.f(ring, j)?.pow(m)?.scale(&qpow(m * (m + 1) / 2));
        if weighted {
            base = base.scale(&mu().pow(m)?);
        }
        acc = acc.mul(&base.pow(e)?)?;
    }
    Ok(acc)
}

/// ∏_j [(−1)^{l m} ∏_s (1 − a q^s f_j)^l / ∏_s (1 − b q^{−s} f_j⁻¹)^l]^{sign_j}.
pub fn rab_multiplier(ring: &Arc<KRing>, spec: &BundleSpec, d: &[i64]) -> Result<KClass> {
    let l = spec.level;
    let a = Scalar::var(Sym::A);
    let b = Scalar::var(Sym::B);
    let mut acc = KClass::one(ring);
    for (j, s) in spec.summands.iter().enumerate() {
        let e = l * s.sign as i64;
        let m = spec.m(j, d);
        let f = spec.f(ring, j)?;
        let finv = f.inv()?;
        let num = signed_product(ring, m, e, |k| one_minus(ring, &f.scale(&a.mul(&qpow(k)))))?;
        let den = signed_product(ring, m, -e, |k| one_minus(ring, &finv.scale(&b.mul(&qpow(-k)))))?;
        acc = acc.mul(&num)?.mul(&den)?.scale(&sign_pow(l * m));
    }
    Ok(acc)
}

/// The four stated forms of the quantum Serre correspondence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QsdForm {
    /// Substitution (−q^l)^{c₁(E)} and factors (1 − μf)/(1 − μf q^m).
    Mu,
    /// Substitution (−q^{l+1})^{c₁(E)} and factors (1 − μ⁻¹f⁻¹)/(1 − μ⁻¹f⁻¹q^{−m}).
    MuInv,
    /// Global scaling by Eu(μ⁻¹E), coefficients in μ, frame Q′.
    TwoA,
    /// Global scaling by Eu(μE^∨), coefficients in μ⁻¹, frame Q″.
    TwoB,
}

impl QsdForm {
    pub fn name(&self) -> &'static str {
        match self {
            QsdForm::Mu => "mu",
            QsdForm::MuInv => "muinv",
            QsdForm::TwoA => "2A",
            QsdForm::TwoB => "2B",
        }
    }

    pub fn parse(s: &str) -> Option<QsdForm> {
        Some(match s {
            "mu" => QsdForm::Mu,
            "muinv" => QsdForm::MuInv,
            "2A" | "2a" => QsdForm::TwoA,
            "2B" | "2b" => QsdForm::TwoB,
            _ => return None,
        })
    }

    fn shift(&self, l: i64) -> i64 {
        match self {
            QsdForm::Mu | QsdForm::TwoA => l,
            QsdForm::MuInv | QsdForm::TwoB => l + 1,
        }
    }
}

fn qsd_multiplier_signed(
    ring: &Arc<KRing>,
    spec: &BundleSpec,
    d: &[i64],
    form: QsdForm,
    exponent_sign: i64,
) -> Result<KClass> {
    let c = spec.c1e_pair(d);
    let subst = sign_pow(c).mul(&qpow(exponent_sign * form.shift(spec.level) * c));
    let body = match form {
        QsdForm::Mu | QsdForm::MuInv => {
            let mut acc = KClass::one(ring);
            for (j, s) in spec.summands.iter().enumerate() {
                let m = spec.m(j, d);
                let (x, qm) = match form {
                    QsdForm::Mu => (spec.f(ring, j)?.scale(&mu()), qpow(m)),
                    _ => (spec.f(ring, j)?.inv()?.scale(&mu().inv()?), qpow(-m)),
                };
                let e = s.sign as i64;
                let top = one_minus(ring, &x)?.pow(e)?;
                let bottom = one_minus(ring, &x.scale(&qm))?.pow(-e)?;
                acc = acc.mul(&top)?.mul(&bottom)?;
            }
            acc
        }
        QsdForm::TwoA => euler_class(ring, spec, MuMode::MuInvOnE)?,
        QsdForm::TwoB => euler_class(ring, spec, MuMode::MuOnEDual)?,
    };
    Ok(body.scale(&subst))
}

/// Full multiplier of the entry at degree d, substitution factor included.
pub fn qsd_multiplier(ring: &Arc<KRing>, spec: &BundleSpec, d: &[i64], form: QsdForm) -> Result<KClass> {
    qsd_multiplier_signed(ring, spec, d, form, 1)
}

/// The factor by which forms 2A / 2B exceed forms mu / muinv at degree d:
/// ∏_j (1 − μ f_j q^{m_j})^{sign_j} or ∏_j (1 − μ⁻¹ f_j⁻¹ q^{−m_j})^{sign_j}.
pub fn qsd_extra_factor(ring: &Arc<KRing>, spec: &BundleSpec, d: &[i64], form: QsdForm) -> Result<KClass> {
    let mut acc = KClass::one(ring);
    for (j, s) in spec.summands.iter().enumerate() {
        let m = spec.m(j, d);
        let x = match form {
            QsdForm::Mu | QsdForm::TwoA => spec.f(ring, j)?.scale(&mu().mul(&qpow(m))),
            QsdForm::MuInv | QsdForm::TwoB => spec.f(ring, j)?.inv()?.scale(&mu().inv()?.mul(&qpow(-m))),
        };
        acc = acc.mul(&one_minus(ring, &x)?.pow(s.sign as i64)?)?;
    }
    Ok(acc)
}

/// Q ↦ Q μ^{l c₁(E)} (forms mu, 2A) or Q ↦ Q μ^{(l+1) c₁(E)} (forms muinv, 2B):
/// converts coefficients of Q′^d (resp. Q″^d) into coefficients of Q^d.
pub fn novikov_frame(spec: &BundleSpec, n_vars: usize, form: QsdForm) -> NovikovSubstitution {
    let sh = form.shift(spec.level);
    let c: Vec<i64> = vec![1; n_vars];
    let k: Vec<i64> = vec![0; n_vars];
    let t: Vec<i64> = (0..n_vars).map(|i| sh * spec.c1e(i)).collect();
    NovikovSubstitution::monomial(&c, &k, &t)
}

/// Q_i ↦ Q_i q^{l c₁(E)_i}, relating the level-l twists by E and by E^∨.
pub fn level_duality_substitution(spec: &BundleSpec, n_vars: usize) -> NovikovSubstitution {
    let c: Vec<i64> = vec![1; n_vars];
    let k: Vec<i64> = (0..n_vars).map(|i| spec.level * spec.c1e(i)).collect();
    NovikovSubstitution::monomial(&c, &k, &vec![0; n_vars])
}

// ---------------------------------------------------------------------------
// Flag varieties through their abelian quotients.

/// Dimensions v_i of the tautological bundles V_i; the abelian target has one
/// generator P_{is} per Chern root, ordered (i, s) lexicographically, and the
/// abelianized Novikov degrees d_{is} use the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagData {
    pub v: Vec<usize>,
}

impl FlagData {
    pub fn n_roots(&self) -> usize {
        self.v.iter().sum()
    }

    pub fn offset(&self, i: usize) -> usize {
        self.v[..i].iter().sum()
    }

    /// V_j = Σ_s P_{js}, written through its dual Σ_s P_{js}⁻¹.
    pub fn tautological(&self, j: usize, level: i64) -> Result<BundleSpec> {
        if j >= self.v.len() || self.v[j] == 0 {
            return Err(Error::MissingChernRoots(j));
        }
        let n = self.n_roots();
        let summands = (0..self.v[j])
            .map(|s| {
                let mut e = vec![0; n];
                e[self.offset(j) + s] = -1;
                (1, e)
            })
            .collect();
        Ok(BundleSpec::new(summands, level))
    }

    /// Sums entries over the fibers of (d_{is}) ↦ (Σ_s d_{is}).
    pub fn specialize(&self, j: &LoopElement) -> Result<LoopElement> {
        if j.n_vars != self.n_roots() {
            return Err(Error::Config(format!(
                "abelian element has {} Novikov variables, flag data needs {}",
                j.n_vars,
                self.n_roots()
            )));
        }
        let mut out = LoopElement::new(&j.ring, self.v.len(), j.dmax);
        for (d, f) in &j.entries {
            let e: Vec<i64> =
                (0..self.v.len()).map(|i| d[self.offset(i)..self.offset(i) + self.v[i]].iter().sum()).collect();
            let acc = match out.entries.get(&e) {
                Some(g) => g.add(f)?,
                None => f.clone(),
            };
            out.entries.insert(e, acc);
        }
        out.entries.retain(|_, f| !f.is_zero());
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagForm {
    /// Scaling by Eu(μ⁻¹V_j).
    A,
    /// Scaling by Eu(μV_j^∨).
    B,
    /// Per-degree Chern-root factors (1 − μP_{js}⁻¹)/(1 − μP_{js}⁻¹q^{−d_{js}}).
    UnscaledMu,
    /// Per-degree Chern-root factors (1 − μ⁻¹P_{js})/(1 − μ⁻¹P_{js}q^{d_{js}}).
    UnscaledMuInv,
}

impl FlagForm {
    pub fn qsd_form(&self) -> QsdForm {
        match self {
            FlagForm::A => QsdForm::TwoA,
            FlagForm::B => QsdForm::TwoB,
            FlagForm::UnscaledMu => QsdForm::Mu,
            FlagForm::UnscaledMuInv => QsdForm::MuInv,
        }
    }
}

/// Multiplier of the flag correspondence for the tautological bundle V_j at
/// abelianized degree d. With `literal_exponents` the Novikov substitution
/// uses (−q^{−l})^{δ_{ij}} and (−q^{−(l+1)})^{δ_{ij}} in place of (−q^l), (−q^{l+1}).
pub fn flag_qsd_multiplier(
    ring: &Arc<KRing>,
    flag: &FlagData,
    j: usize,
    level: i64,
    form: FlagForm,
    d: &[i64],
    literal_exponents: bool,
) -> Result<KClass> {
    if ring.n_generators() != flag.n_roots() {
        return Err(Error::MissingChernRoots(j));
    }
    let spec = flag.tautological(j, level)?;
    qsd_multiplier_signed(ring, &spec, d, form.qsd_form(), if literal_exponents { -1 } else { 1 })
}

pub fn flag_qsd(
    j1: &LoopElement,
    flag: &FlagData,
    j: usize,
    level: i64,
    form: FlagForm,
    literal_exponents: bool,
) -> Result<LoopElement> {
    if j1.n_vars != flag.n_roots() {
        return Err(Error::MissingChernRoots(j));
    }
    j1.map_entries(|d, f| f.mul(&flag_qsd_multiplier(&j1.ring, flag, j, level, form, d, literal_exponents)?))
}

// ---------------------------------------------------------------------------
// Twist profiles and their application to loop elements.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamMode {
    Exact,
    /// Truncated expansion in μ up to the given order.
    SeriesMu(u32),
    /// Truncated expansion in μ⁻¹ up to the given order.
    SeriesMuInv(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwistKind {
    Euler,
    DualEuler,
    Level { weighted: bool },
    Rab,
    Qsd(QsdForm),
    FlagQsd { form: FlagForm, j: usize, flag: FlagData },
}

impl TwistKind {
    pub fn name(&self) -> String {
        match self {
            TwistKind::Euler => "euler".into(),
            TwistKind::DualEuler => "dual-euler".into(),
            TwistKind::Level { weighted: false } => "level".into(),
            TwistKind::Level { weighted: true } => "level-weighted".into(),
            TwistKind::Rab => "rab".into(),
            TwistKind::Qsd(f) => format!("qsd-{}", f.name()),
            TwistKind::FlagQsd { form: FlagForm::A, .. } => "flag-qsd-A".into(),
            TwistKind::FlagQsd { form: FlagForm::B, .. } => "flag-qsd-B".into(),
            TwistKind::FlagQsd { form: FlagForm::UnscaledMu, .. } => "flag-qsd-mu".into(),
            TwistKind::FlagQsd { form: FlagForm::UnscaledMuInv, .. } => "flag-qsd-muinv".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistProfile {
    pub kind: TwistKind,
    pub bundle: BundleSpec,
    pub mode: ParamMode,
}

impl TwistProfile {
    pub fn new(kind: TwistKind, bundle: BundleSpec) -> TwistProfile {
        TwistProfile { kind, bundle, mode: ParamMode::Exact }
    }

    pub fn with_mode(mut self, mode: ParamMode) -> TwistProfile {
        self.mode = mode;
        self
    }

    /// Rejects form and parameter-mode combinations that have no expansion.
    pub fn validate(&self) -> Result<()> {
        let mismatch = || {
            Err(Error::FormModeMismatch(format!("{} cannot run in mode {:?}", self.kind.name(), self.mode)))
        };
        let form = match &self.kind {
            TwistKind::Qsd(f) => Some(*f),
            TwistKind::FlagQsd { form, flag, j } => {
                flag.tautological(*j, self.bundle.level)?;
                Some(form.qsd_form())
            }
            TwistKind::Rab => {
                return match self.mode {
                    ParamMode::Exact => Ok(()),
                    _ => mismatch(),
                }
            }
            _ => None,
        };
        match (form, self.mode) {
            (_, ParamMode::Exact) => Ok(()),
            (Some(QsdForm::Mu) | Some(QsdForm::MuInv), _) => mismatch(),
            (Some(QsdForm::TwoA), ParamMode::SeriesMuInv(_)) => mismatch(),
            (Some(QsdForm::TwoB), ParamMode::SeriesMu(_)) => mismatch(),
            _ => Ok(()),
        }
    }

    /// Loop-space profile of admissible inputs, extended by the ring's characters.
    pub fn input_profile(&self, ring: &KRing) -> LoopSpaceProfile {
        let base = match (&self.kind, self.mode) {
            (TwistKind::Rab, _) => LoopSpaceProfile::mu_field_ab(),
            (_, ParamMode::Exact) => LoopSpaceProfile::mu_field(),
            (_, ParamMode::SeriesMu(_)) => LoopSpaceProfile::mu_adic(),
            (_, ParamMode::SeriesMuInv(_)) => LoopSpaceProfile::mu_inverse_adic(),
        };
        with_ring_characters(base, ring)
    }

    pub fn multiplier(&self, ring: &Arc<KRing>, d: &[i64]) -> Result<KClass> {
        let spec = &self.bundle;
        match &self.kind {
            TwistKind::Euler => euler_multiplier(ring, spec, d),
            TwistKind::DualEuler => dual_euler_multiplier(ring, spec, d),
            TwistKind::Level { weighted } => level_multiplier(ring, spec, d, *weighted),
            TwistKind::Rab => rab_multiplier(ring, spec, d),
            TwistKind::Qsd(form) => qsd_multiplier(ring, spec, d, *form),
            TwistKind::FlagQsd { form, j, flag } => flag_qsd_multiplier(ring, flag, *j, spec.level, *form, d, false),
        }
    }
}

pub fn with_ring_characters(mut profile: LoopSpaceProfile, ring: &KRing) -> LoopSpaceProfile {
    for c in ring.character_symbols() {
        profile = profile.with_param(c, Role::Character);
    }
    if let Model::FixedPoint(fp) = &ring.model {
        let mut tangent: Vec<Mono> = Vec::new();
        for t in fp.tangent.iter().flatten() {
            if !tangent.contains(t) {
                tangent.push(t.clone());
            }
        }
        profile = profile.with_tangent(&tangent);
    }
    profile
}

/// Truncation of an entry in μ (or μ⁻¹) to the given order, as a polynomial.
pub fn truncate_in_mu(f: &QRational, order: u32, inverse: bool) -> Result<QRational> {
    let flip = MonoSubst::new().with(Sym::MU, Cyclo::one(), Mono::pow_of(Sym::MU, -1));
    let g = if inverse { f.subst(&flip)? } else { f.clone() };
    let t = taylor_embed(&g, &[Sym::MU], order)?.sum()?;
    if inverse {
        t.subst(&flip)
    } else {
        Ok(t)
    }
}

/// Applies a twist degree by degree after checking the input profile.
pub fn apply_twist(j: &LoopElement, tp: &TwistProfile) -> Result<LoopElement> {
    tp.validate()?;
    if let TwistKind::FlagQsd { flag, .. } = &tp.kind {
        if j.n_vars != flag.n_roots() {
            return Err(Error::MissingChernRoots(j.n_vars));
        }
    } else if tp.bundle.summands.iter().any(|s| s.exps.len() != j.ring.n_generators()) {
        return Err(Error::Config(format!("bundle does not match the generators of {}", j.ring.name)));
    }
    let profile = tp.input_profile(&j.ring);
    for v in check_profile_membership(j, &profile, Side::Full) {
        if !v.ok {
            return Err(Error::ProfileViolation(format!(
                "degree {:?} is outside {}: {}",
                v.degree,
                profile.name,
                v.offenders.join(", ")
            )));
        }
    }
    let out = j.map_entries(|d, f| f.mul(&tp.multiplier(&j.ring, d)?))?;
    match tp.mode {
        ParamMode::Exact => Ok(out),
        ParamMode::SeriesMu(m) => out.map_entries(|_, f| truncate_in_mu(f, m, false)),
        ParamMode::SeriesMuInv(m) => out.map_entries(|_, f| truncate_in_mu(f, m, true)),
    }
}

pub fn euler_twist(j: &LoopElement, spec: &BundleSpec) -> Result<LoopElement> {
    apply_twist(j, &TwistProfile::new(TwistKind::Euler, spec.clone()))
}

pub fn dual_euler_twist(j: &LoopElement, spec: &BundleSpec) -> Result<LoopElement> {
    apply_twist(j, &TwistProfile::new(TwistKind::DualEuler, spec.clone()))
}

pub fn level_twist(j: &LoopElement, spec: &BundleSpec, weighted: bool) -> Result<LoopElement> {
    apply_twist(j, &TwistProfile::new(TwistKind::Level { weighted }, spec.clone()))
}

pub fn rab_twist(j: &LoopElement, spec: &BundleSpec) -> Result<LoopElement> {
    apply_twist(j, &TwistProfile::new(TwistKind::Rab, spec.clone()))
}

pub fn qsd_transform(j: &LoopElement, spec: &BundleSpec, form: QsdForm) -> Result<LoopElement> {
    apply_twist(j, &TwistProfile::new(TwistKind::Qsd(form), spec.clone()))
}

// ---------------------------------------------------------------------------
// Level identity.

#[derive(Clone, Debug)]
pub struct LevelIdentityRow {
    pub summand: usize,
    pub m: i64,
    pub lhs: KClass,
    pub rhs: KClass,
    pub equal: bool,
}

#[derive(Clone, Debug)]
pub struct LevelIdentityReport {
    pub degree: Vec<i64>,
    pub rows: Vec<LevelIdentityRow>,
}

impl LevelIdentityReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.equal)
    }
}

/// Per summand: [f^m q^{m(m+1)/2}]^{l·sign} against
/// [(−1)^m ∏(1 − μq^s f)/∏(1 − μ⁻¹q^{−s}f⁻¹)]^{l·sign} at μ = 1,
/// with μ set to 1 factor by factor.
pub fn level_identity_check(ring: &Arc<KRing>, spec: &BundleSpec, d: &[i64]) -> Result<LevelIdentityReport> {
    let at_one = MonoSubst::new().with(Sym::MU, Cyclo::one(), Mono::one());
    let mut rows = Vec::new();
    for (j, s) in spec.summands.iter().enumerate() {
        let single = BundleSpec { summands: vec![s.clone()], level: spec.level };
        let lhs = level_multiplier(ring, &single, d, false)?;
        let m = spec.m(j, d);
        let e = spec.level * s.sign as i64;
        let f = spec.f(ring, j)?;
        let f_inv = f.inv()?;
        let ratio = signed_product(ring, m, 1, |k| {
            let top = one_minus(ring, &f.scale(&mu().mul(&qpow(k))))?;
            let bottom = one_minus(ring, &f_inv.scale(&mu().inv()?.mul(&qpow(-k))))?;
            top.div(&bottom)?.subst(&at_one)
        })?
        .scale(&sign_pow(m));
        let rhs = ratio.pow(e)?;
        let equal = lhs == rhs;
        rows.push(LevelIdentityRow { summand: j, m, lhs, rhs, equal });
    }
    Ok(LevelIdentityReport { degree: d.to_vec(), rows })
}

// ---------------------------------------------------------------------------
// PFD operators.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfdKind {
    /// exp(D)
    O1,
    /// exp(Σ_k Ψ^k(D)/(k(1 − q^k)))
    O2,
}

/// coeff · q^{q_exp} · ∏ P_i^{e_i}, where a shifted term stands for
/// ∏ (P_i q^{Q_i∂_{Q_i}})^{e_i}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfdTerm {
    pub coeff: Scalar,
    pub q_exp: i32,
    pub exps: Vec<i32>,
    pub shifted: bool,
    pub kind: PfdKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfdSpec {
    pub terms: Vec<PfdTerm>,
}

impl PfdSpec {
    /// D = −Σ_j sign_j μ q (f_j − f_j(P q^{Q∂})).
    pub fn euler(spec: &BundleSpec) -> PfdSpec {
        let mut terms = Vec::new();
        for s in &spec.summands {
            let c = mu().mul(&Scalar::int(s.sign as i64)).mul(&Scalar::mono(Cyclo::one(), s.weight.clone()));
            for (shifted, coeff) in [(false, c.neg()), (true, c.clone())] {
                terms.push(PfdTerm { coeff, q_exp: 1, exps: s.exps.clone(), shifted, kind: PfdKind::O2 });
            }
        }
        PfdSpec { terms }
    }

    /// D = −Σ_j sign_j μ⁻¹ (f_j⁻¹ − f_j⁻¹(P q^{Q∂})), expanded in μ⁻¹.
    pub fn dual_euler(spec: &BundleSpec) -> PfdSpec {
        let mut terms = Vec::new();
        for s in &spec.summands {
            let c = mu()
                .inv()
                .expect("mu is invertible")
                .mul(&Scalar::int(s.sign as i64))
                .mul(&Scalar::mono(Cyclo::one(), s.weight.inv()));
            let exps: Vec<i32> = s.exps.iter().map(|e| -e).collect();
            for (shifted, coeff) in [(false, c.neg()), (true, c.clone())] {
                terms.push(PfdTerm { coeff, q_exp: 0, exps: exps.clone(), shifted, kind: PfdKind::O2 });
            }
        }
        PfdSpec { terms }
    }

    fn m(t: &PfdTerm, d: &[i64]) -> i64 {
        t.exps.iter().zip(d).map(|(&e, &x)| e as i64 * x).sum()
    }

    /// Ψ^k of the term evaluated at degree d.
    fn term_value(ring: &Arc<KRing>, t: &PfdTerm, d: &[i64], k: u32) -> Result<KClass> {
        let k64 = k as i64;
        let shift = if t.shifted { PfdSpec::m(t, d) } else { 0 };
        let exps: Vec<i32> = t.exps.iter().map(|e| e * k as i32).collect();
        Ok(KClass::line(ring, &exps)?.scale(&t.coeff.adams(k).mul(&qpow(k64 * (t.q_exp as i64 + shift)))))
    }
}

fn check_dims(ring: &Arc<KRing>, spec: &PfdSpec, d: &[i64]) -> Result<()> {
    for t in &spec.terms {
        if t.exps.len() != ring.n_generators() || t.exps.len() != d.len() {
            return Err(Error::Config("PFD term does not match the target".into()));
        }
    }
    Ok(())
}

/// Closed product form of a PFD operator at degree d. Supported shape: O₂
/// terms in pairs c q^a f (unshifted) and −c q^a f (shifted) with c = −n·w,
/// n an integer and w a monomial; the pair gives [∏_{s=1}^{m} (1 − w q^{a−1+s} f)]^n.
pub fn pfd_multiplier_closed(ring: &Arc<KRing>, spec: &PfdSpec, d: &[i64]) -> Result<QRational> {
    check_dims(ring, spec, d)?;
    let mut used = vec![false; spec.terms.len()];
    let mut acc = KClass::one(ring);
    for (i, t) in spec.terms.iter().enumerate() {
        if used[i] || t.shifted {
            continue;
        }
        let partner = spec.terms.iter().enumerate().position(|(k, u)| {
            !used[k]
                && k != i
                && u.shifted
                && u.kind == PfdKind::O2
                && t.kind == PfdKind::O2
                && u.q_exp == t.q_exp
                && u.exps == t.exps
                && u.coeff == t.coeff.neg()
        });
        let Some(k) = partner else {
            return Err(Error::NonTelescoping(format!("term {} has no telescoping partner", i)));
        };
        let (kappa, w) = t
            .coeff
            .as_monomial()
            .ok_or_else(|| Error::NonTelescoping(format!("coefficient {} is not a monomial", t.coeff)))?;
        let n = kappa
            .as_rational()
            .filter(|r| r.is_integer())
            .and_then(|r| num_traits::ToPrimitive::to_i64(&r.to_integer()))
            .ok_or_else(|| Error::NonTelescoping(format!("coefficient {} is not an integer multiple", t.coeff)))?;
        used[i] = true;
        used[k] = true;
        let f = KClass::line(ring, &t.exps)?;
        let w = Scalar::mono(Cyclo::one(), w);
        let a = t.q_exp as i64;
        let p = signed_product(ring, PfdSpec::m(t, d), -n, |s| one_minus(ring, &f.scale(&w.mul(&qpow(a - 1 + s)))))?;
        acc = acc.mul(&p)?;
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(Error::NonTelescoping(format!("term {} is unpaired", i)));
    }
    Ok(acc)
}

/// exp of the PFD exponent at degree d, truncated at total degree `order` in
/// the expansion parameters.
pub fn pfd_multiplier_series(
    ring: &Arc<KRing>,
    spec: &PfdSpec,
    d: &[i64],
    params: &[Sym],
    order: u32,
) -> Result<TruncSeries> {
    check_dims(ring, spec, d)?;
    for t in &spec.terms {
        let ok = t
            .coeff
            .as_monomial()
            .map(|(_, m)| params.iter().map(|p| m.exp(*p) as i64).sum::<i64>() >= 1
                && m.pairs().iter().all(|(s, e)| !params.contains(s) || *e >= 0))
            .unwrap_or(false);
        if !ok {
            return Err(Error::NoPositiveValuation(format!("{}", t.coeff)));
        }
    }
    let mut log = KClass::zero(ring);
    for t in &spec.terms {
        match t.kind {
            PfdKind::O1 => log = log.add(&PfdSpec::term_value(ring, t, d, 1)?)?,
            PfdKind::O2 => {
                for k in 1..=order.max(1) {
                    let w = Scalar::int(k as i64).mul(&Scalar::one().sub(&qpow(k as i64))).inv()?;
                    log = log.add(&PfdSpec::term_value(ring, t, d, k)?.scale(&w))?;
                }
            }
        }
    }
    let l = taylor_embed(&log, params, order)?;
    let mut e: Vec<KClass> = vec![KClass::one(ring)];
    for n in 1..=order as usize {
        let mut acc = KClass::zero(ring);
        for k in 1..=n {
            acc = acc.add(&l.coeffs[k].mul(&e[n - k])?.scale(&Scalar::int(k as i64)))?;
        }
        e.push(acc.scale(&Scalar::frac(1, n as i64)));
    }
    Ok(TruncSeries { params: params.to_vec(), order, coeffs: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> Arc<KRing> {
        KRing::projective(1)
    }

    fn p(r: &Arc<KRing>) -> KClass {
        KClass::generator(r, 0)
    }

    fn one_minus_x(r: &Arc<KRing>, x: KClass) -> KClass {
        KClass::one(r).sub(&x).unwrap()
    }

    #[test]
    fn signed_product_moves_negative_ranges_down() {
        let r = KRing::point();
        let f = |s: i64| Ok(KClass::constant(&r, Scalar::one().sub(&qpow(s))));
        assert_eq!(signed_product(&r, 0, 1, f).unwrap(), KClass::one(&r));
        let two = signed_product(&r, 2, 1, f).unwrap();
        let want = Scalar::one().sub(&qpow(1)).mul(&Scalar::one().sub(&qpow(2)));
        assert_eq!(two, KClass::constant(&r, want));
        // m = −2 covers s = −1, 0: 1/((1 − q⁻¹)(1 − 1)) would vanish, so use a shifted factor.
        let g = |s: i64| Ok(KClass::constant(&r, Scalar::one().sub(&qpow(s).mul(&mu()))));
        let neg = signed_product(&r, -2, 1, g).unwrap();
        let want = Scalar::one()
            .sub(&qpow(-1).mul(&mu()))
            .mul(&Scalar::one().sub(&mu()))
            .inv()
            .unwrap();
        assert_eq!(neg, KClass::constant(&r, want));
        let neg_inv = signed_product(&r, -2, -1, g).unwrap();
        assert_eq!(neg.mul(&neg_inv).unwrap(), KClass::one(&r));
    }

    #[test]
    fn euler_single_and_double_factor() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let x = p(&r);
        let e1 = euler_multiplier(&r, &spec, &[1]).unwrap();
        assert_eq!(e1, one_minus_x(&r, x.scale(&mu().mul(&qpow(1)))));
        let e2 = euler_multiplier(&r, &spec, &[2]).unwrap();
        let want = one_minus_x(&r, x.scale(&mu().mul(&qpow(1))))
            .mul(&one_minus_x(&r, x.scale(&mu().mul(&qpow(2)))))
            .unwrap();
        assert_eq!(e2, want);
        assert_eq!(euler_multiplier(&r, &spec, &[0]).unwrap(), KClass::one(&r));
        let neg = BundleSpec::new(vec![(-1, vec![1])], 0);
        assert_eq!(euler_multiplier(&r, &neg, &[1]).unwrap(), e1.inv().unwrap());
    }

    #[test]
    fn dual_euler_divides() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let x = p(&r).inv().unwrap();
        let got = dual_euler_multiplier(&r, &spec, &[1]).unwrap();
        let want = one_minus_x(&r, x.scale(&mu().inv().unwrap().mul(&qpow(-1)))).inv().unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn euler_times_dual_euler_is_rab_at_one_one() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 1);
        let prod = euler_multiplier(&r, &spec, &[1]).unwrap().mul(&dual_euler_multiplier(&r, &spec, &[1]).unwrap()).unwrap();
        let ab = MonoSubst::new()
            .with(Sym::A, Cyclo::one(), Mono::var(Sym::MU))
            .with(Sym::B, Cyclo::one(), Mono::pow_of(Sym::MU, -1));
        let rab = rab_multiplier(&r, &spec, &[1]).unwrap().subst(&ab).unwrap();
        assert_eq!(rab, prod.neg());
    }

    #[test]
    fn level_examples() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 1);
        let x = p(&r);
        let got = level_multiplier(&r, &spec, &[2], false).unwrap();
        assert_eq!(got, x.pow(2).unwrap().scale(&qpow(3)));
        let w = level_multiplier(&r, &spec, &[2], true).unwrap();
        assert_eq!(w, x.pow(2).unwrap().scale(&qpow(3).mul(&mu().pow(2).unwrap())));
        let zero = level_multiplier(&r, &spec.with_level(0), &[3], false).unwrap();
        assert_eq!(zero, KClass::one(&r));
    }

    #[test]
    fn rab_example() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 1);
        let x = p(&r);
        let a = Scalar::var(Sym::A);
        let b = Scalar::var(Sym::B);
        let num = one_minus_x(&r, x.scale(&a.mul(&qpow(1))));
        let den = one_minus_x(&r, x.inv().unwrap().scale(&b.mul(&qpow(-1))));
        let want = num.mul(&den.inv().unwrap()).unwrap().neg();
        assert_eq!(rab_multiplier(&r, &spec, &[1]).unwrap(), want);
        assert_eq!(rab_multiplier(&r, &spec, &[0]).unwrap(), KClass::one(&r));
    }

    #[test]
    fn rab_reduces_to_level() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 1);
        let ab = MonoSubst::new()
            .with(Sym::A, Cyclo::one(), Mono::var(Sym::MU))
            .with(Sym::B, Cyclo::one(), Mono::pow_of(Sym::MU, -1));
        let at_one = MonoSubst::new().with(Sym::MU, Cyclo::one(), Mono::one());
        let got = rab_multiplier(&r, &spec, &[2]).unwrap().subst(&ab).unwrap().subst(&at_one).unwrap();
        assert_eq!(got, p(&r).pow(2).unwrap().scale(&qpow(3)));
    }

    #[test]
    fn qsd_forms_agree_on_p1() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let a = qsd_multiplier(&r, &spec, &[1], QsdForm::Mu).unwrap();
        let b = qsd_multiplier(&r, &spec, &[1], QsdForm::MuInv).unwrap();
        let x = p(&r).scale(&mu());
        let want = one_minus_x(&r, x.clone())
            .mul(&one_minus_x(&r, x.scale(&qpow(1))).inv().unwrap())
            .unwrap()
            .neg();
        assert_eq!(a, want);
        assert_eq!(b, want);
        let two_a = qsd_multiplier(&r, &spec, &[0], QsdForm::TwoA).unwrap();
        assert_eq!(two_a, one_minus_x(&r, x));
    }

    #[test]
    fn qsd_2a_ratio() {
        let r = KRing::projective(2);
        let spec = BundleSpec::new(vec![(1, vec![1]), (1, vec![2])], 1);
        for d in 0..3 {
            let mu_form = qsd_multiplier(&r, &spec, &[d], QsdForm::Mu).unwrap();
            let two_a = qsd_multiplier(&r, &spec, &[d], QsdForm::TwoA).unwrap();
            let extra = qsd_extra_factor(&r, &spec, &[d], QsdForm::TwoA).unwrap();
            assert_eq!(two_a, mu_form.mul(&extra).unwrap());
        }
    }

    #[test]
    fn flag_literal_exponents_disagree() {
        let r = p1();
        let flag = FlagData { v: vec![1] };
        let a = flag_qsd_multiplier(&r, &flag, 0, 1, FlagForm::UnscaledMu, &[1], true).unwrap();
        let b = flag_qsd_multiplier(&r, &flag, 0, 1, FlagForm::UnscaledMuInv, &[1], true).unwrap();
        assert_ne!(a, b);
        let a = flag_qsd_multiplier(&r, &flag, 0, 1, FlagForm::UnscaledMu, &[1], false).unwrap();
        let b = flag_qsd_multiplier(&r, &flag, 0, 1, FlagForm::UnscaledMuInv, &[1], false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn flag_degree_zero_is_scaling_only() {
        let r = KRing::product_projective(&[1, 1]);
        let flag = FlagData { v: vec![2] };
        let got = flag_qsd_multiplier(&r, &flag, 0, 0, FlagForm::A, &[0, 0], false).unwrap();
        let spec = flag.tautological(0, 0).unwrap();
        assert_eq!(got, euler_class(&r, &spec, MuMode::MuInvOnE).unwrap());
        assert!(matches!(flag.tautological(1, 0), Err(Error::MissingChernRoots(1))));
    }

    #[test]
    fn flag_routing_touches_only_index_j() {
        let r = KRing::product_projective(&[1, 1]);
        let flag = FlagData { v: vec![1, 1] };
        let spec = flag.tautological(1, 2).unwrap();
        assert_eq!(spec.c1e(0), 0);
        assert_eq!(spec.c1e(1), 1);
        let at_d = flag_qsd_multiplier(&r, &flag, 1, 2, FlagForm::A, &[3, 0], false).unwrap();
        let at_0 = flag_qsd_multiplier(&r, &flag, 1, 2, FlagForm::A, &[0, 0], false).unwrap();
        assert_eq!(at_d, at_0);
        let at_1 = flag_qsd_multiplier(&r, &flag, 1, 2, FlagForm::A, &[0, 1], false).unwrap();
        assert_eq!(at_1, at_0.scale(&qpow(2).neg()));
    }

    #[test]
    fn specialize_sums_fibers() {
        let r = KRing::point();
        let flag = FlagData { v: vec![2] };
        let mut j = LoopElement::new(&r, 2, 2);
        j.insert(vec![1, 0], KClass::constant(&r, Scalar::int(2))).unwrap();
        j.insert(vec![0, 1], KClass::constant(&r, Scalar::int(3))).unwrap();
        let s = flag.specialize(&j).unwrap();
        assert_eq!(s.get(&[1]), KClass::constant(&r, Scalar::int(5)));
    }

    #[test]
    fn level_identity_small_cases() {
        let r = p1();
        for d in 0..4 {
            let spec = BundleSpec::new(vec![(1, vec![1])], 1);
            assert!(level_identity_check(&r, &spec, &[d]).unwrap().pass(), "d = {}", d);
        }
        let spec = BundleSpec::new(vec![(1, vec![1])], 1);
        let rep = level_identity_check(&r, &spec, &[1]).unwrap();
        assert_eq!(rep.rows[0].lhs, p(&r).scale(&qpow(1)));
    }

    #[test]
    fn pfd_closed_examples() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let pfd = PfdSpec::euler(&spec);
        for d in 0..4 {
            assert_eq!(pfd_multiplier_closed(&r, &pfd, &[d]).unwrap(), euler_multiplier(&r, &spec, &[d]).unwrap());
        }
        let dual = PfdSpec::dual_euler(&spec);
        for d in 0..4 {
            assert_eq!(
                pfd_multiplier_closed(&r, &dual, &[d]).unwrap(),
                dual_euler_multiplier(&r, &spec, &[d]).unwrap()
            );
        }
        let mut broken = pfd.clone();
        broken.terms.pop();
        assert!(matches!(pfd_multiplier_closed(&r, &broken, &[1]), Err(Error::NonTelescoping(_))));
    }

    #[test]
    fn pfd_series_examples() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let pfd = PfdSpec::euler(&spec);
        let s = pfd_multiplier_series(&r, &pfd, &[1], &[Sym::MU], 1).unwrap();
        assert_eq!(s.coeffs[0], KClass::one(&r));
        assert_eq!(s.coeffs[1], p(&r).scale(&mu().mul(&qpow(1))).neg());
        let s0 = pfd_multiplier_series(&r, &pfd, &[1], &[Sym::MU], 0).unwrap();
        assert_eq!(s0.coeffs, vec![KClass::one(&r)]);
        let s2 = pfd_multiplier_series(&r, &pfd, &[2], &[Sym::MU], 2).unwrap();
        let closed = taylor_embed(&pfd_multiplier_closed(&r, &pfd, &[2]).unwrap(), &[Sym::MU], 2).unwrap();
        assert_eq!(s2, closed);
        let bad = PfdSpec {
            terms: vec![PfdTerm { coeff: Scalar::one(), q_exp: 0, exps: vec![1], shifted: false, kind: PfdKind::O1 }],
        };
        assert!(matches!(pfd_multiplier_series(&r, &bad, &[1], &[Sym::MU], 2), Err(Error::NoPositiveValuation(_))));
    }

    #[test]
    fn twist_mode_mismatch() {
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let tp = TwistProfile::new(TwistKind::Qsd(QsdForm::Mu), spec.clone()).with_mode(ParamMode::SeriesMu(3));
        assert!(matches!(tp.validate(), Err(Error::FormModeMismatch(_))));
        let tp = TwistProfile::new(TwistKind::Qsd(QsdForm::TwoB), spec).with_mode(ParamMode::SeriesMu(3));
        assert!(matches!(tp.validate(), Err(Error::FormModeMismatch(_))));
    }

    #[test]
    fn euler_twist_on_degree_zero_is_identity() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let mut j = LoopElement::new(&r, 1, 3);
        j.insert(vec![0], KClass::constant(&r, Scalar::one().sub(&Scalar::q()))).unwrap();
        assert_eq!(euler_twist(&j, &spec).unwrap(), j);
    }
}
