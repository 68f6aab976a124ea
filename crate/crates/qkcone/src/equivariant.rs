//! Torus-fixed-point model: GKM graphs, the residue recursion verifier, the
//! transfer identity for qSD factors, non-equivariant limits and the
//! abelian Novikov specialization.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kring::{BundleSpec, KClass, KRing, Model};
use crate::loopspace::{LoopElement, LoopSpaceProfile, Side};
use crate::qrational::{classify, residue_scalar, Membership, QBinomial};
use crate::scalars::{Cyclo, Mono, MonoSubst, Poly, Scalar, Sym};
use crate::twists::{FlagData, QsdForm};

/// The orbit closure αβ: tangent character λ at α, homological degree D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkmEdge {
    pub from: usize,
    pub to: usize,
    pub character: Mono,
    pub degree: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct GkmGraph {
    pub ring: Arc<KRing>,
    pub edges: Vec<GkmEdge>,
}

pub fn character(i: usize) -> Sym {
    Sym::named(&format!("t{}", i))
}

impl GkmGraph {
    pub fn new(ring: &Arc<KRing>, edges: Vec<GkmEdge>) -> Result<GkmGraph> {
        if !ring.is_fixed_point() {
            return Err(Error::ModelMismatch);
        }
        let g = GkmGraph { ring: ring.clone(), edges };
        let problems = g.consistency_problems();
        if !problems.is_empty() {
            return Err(Error::Config(problems.join("; ")));
        }
        Ok(g)
    }

    /// P^n with characters t_0, …, t_n, P|_i = t_i and edges i → j of character t_j/t_i.
    pub fn projective(n: usize) -> GkmGraph {
        let chars: Vec<Scalar> = (0..=n).map(|i| Scalar::var(character(i))).collect();
        let ring = KRing::projective_fixed(&chars).expect("monomial characters");
        let mut edges = Vec::new();
        for i in 0..=n {
            for j in 0..=n {
                if i != j {
                    edges.push(GkmEdge {
                        from: i,
                        to: j,
                        character: Mono::var(character(j)).div(&Mono::var(character(i))),
                        degree: vec![1],
                    });
                }
            }
        }
        GkmGraph::new(&ring, edges).expect("projective GKM data is consistent")
    }

    pub fn n_points(&self) -> usize {
        self.ring.dim()
    }

    pub fn tangent(&self, alpha: usize) -> &[Mono] {
        match &self.ring.model {
            Model::FixedPoint(fp) => &fp.tangent[alpha],
            Model::Presentation(_) => &[],
        }
    }

    /// Edge symmetry, edge characters among the tangent characters, and
    /// P_i|_α = λ^{−D_i} P_i|_β for every generator.
    pub fn consistency_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            let back = self
                .edges
                .iter()
                .any(|b| b.from == e.to && b.to == e.from && b.character == e.character.inv() && b.degree == e.degree);
            if !back {
                out.push(format!("edge {} has no reverse edge", k));
            }
            if !self.tangent(e.from).contains(&e.character) {
                out.push(format!("edge {} character is not tangent at its source", k));
            }
            if e.degree.len() != self.ring.n_generators() {
                out.push(format!("edge {} degree has wrong length", k));
                continue;
            }
            for i in 0..self.ring.n_generators() {
                let g = KClass::generator(&self.ring, i);
                let lam = Scalar::mono(Cyclo::one(), e.character.pow(-(e.degree[i] as i32)));
                if g.coords()[e.from] != lam.mul(&g.coords()[e.to]) {
                    out.push(format!("edge {} violates restriction compatibility for generator {}", k, i));
                }
            }
        }
        out
    }

    fn rescale(&self, m: u32) -> MonoSubst {
        let mut sub = MonoSubst::new();
        for c in self.ring.character_symbols() {
            sub.set(c, Cyclo::one(), Mono::pow_of(c, m as i32));
        }
        sub
    }
}

/// The α-component of every entry.
pub fn restrict(j: &LoopElement, alpha: usize) -> Result<BTreeMap<Vec<i64>, Scalar>> {
    if !j.ring.is_fixed_point() {
        return Err(Error::ModelMismatch);
    }
    Ok(j.entries.iter().map(|(d, f)| (d.clone(), f.coords()[alpha].clone())).collect())
}

/// Coefficient C(α, β, m, edge) with the characters already rescaled so that
/// λ^{1/m} is the monomial λ; the verifier supplies −(1/m)·Q^{mD}.
pub type RecursionCoefficient<'a> = dyn Fn(usize, usize, u32, &GkmEdge) -> Result<Scalar> + 'a;

#[derive(Clone, Debug)]
pub struct RecursionEntry {
    pub vertex: usize,
    pub edge: Option<usize>,
    pub m: u32,
    pub degree: Vec<i64>,
    pub point: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct RecursionReport {
    pub entries: Vec<RecursionEntry>,
}

impl RecursionReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn failures(&self) -> Vec<&RecursionEntry> {
        self.entries.iter().filter(|e| !e.ok).collect()
    }
}

fn eval_q(f: &Scalar, at: &Scalar) -> Result<Scalar> {
    let (c, m) = at.as_monomial().ok_or_else(|| Error::Config(format!("{} is not a monomial", at)))?;
    f.subst(&MonoSubst::new().with(Sym::Q, c, m))
}

fn sub_degree(d: &[i64], e: &[i64], m: u32) -> Option<Vec<i64>> {
    let v: Vec<i64> = d.iter().zip(e).map(|(a, b)| a - m as i64 * b).collect();
    v.iter().all(|&x| x >= 0).then_some(v)
}

/// Residue conditions at q = ζλ^{1/m} along every edge, plus vanishing of the
/// residues at roots of non-tangent characters.
pub fn recursion_check(
    j: &LoopElement,
    graph: &GkmGraph,
    coeff: &RecursionCoefficient,
    m_max: u32,
) -> Result<RecursionReport> {
    if !Arc::ptr_eq(&j.ring, &graph.ring) && j.ring.name != graph.ring.name {
        return Err(Error::ModelMismatch);
    }
    let mut report = RecursionReport::default();
    let degrees = LoopElement::all_degrees(j.n_vars, j.dmax);
    for (k, e) in graph.edges.iter().enumerate() {
        for m in 1..=m_max {
            let sigma = graph.rescale(m);
            let c = coeff(e.from, e.to, m, e)?;
            for d in &degrees {
                let Some(db) = sub_degree(d, &e.degree, m) else { continue };
                let fa = j.get(d).coords()[e.from].subst(&sigma)?;
                let fb = j.get(&db).coords()[e.to].subst(&sigma)?;
                for r in 0..m {
                    let u = Scalar::mono(Cyclo::root_of_unity(m, r as i64), e.character.clone());
                    let entry = |ok: bool, detail: String| RecursionEntry {
                        vertex: e.from,
                        edge: Some(k),
                        m,
                        degree: d.clone(),
                        point: format!("{}", u),
                        ok,
                        detail,
                    };
                    let lhs = residue_scalar(&fa, &u);
                    let rhs = eval_q(&fb, &u).map(|v| v.mul(&c).mul(&Scalar::frac(-1, m as i64)));
                    report.entries.push(match (lhs, rhs) {
                        (Ok(l), Ok(r)) if l == r => entry(true, String::new()),
                        (Ok(l), Ok(r)) => entry(false, format!("residue {} but recursion gives {}", l, r)),
                        (Err(e1), _) => entry(false, format!("residue failed: {}", e1)),
                        (_, Err(e2)) => entry(false, format!("f_beta not regular there: {}", e2)),
                    });
                }
            }
        }
    }
    for alpha in 0..graph.n_points() {
        let tangent = graph.tangent(alpha);
        for d in &degrees {
            let f = j.get(d).coords()[alpha].clone();
            for (g, _) in f.denominator() {
                for (point, res) in non_tangent_residues(&f, g, tangent, m_max, graph)? {
                    let ok = res.as_ref().map(|r| r.is_zero()).unwrap_or(false);
                    let detail = match &res {
                        Ok(r) if !r.is_zero() => format!("nonzero residue {} at non-tangent point", r),
                        Err(e) => format!("residue failed: {}", e),
                        _ => String::new(),
                    };
                    report.entries.push(RecursionEntry { vertex: alpha, edge: None, m: 0, degree: d.clone(), point, ok, detail });
                }
            }
        }
    }
    Ok(report)
}

/// Residues of `f` at the roots of the factor `g` when its zero locus is a
/// character root not handled by an edge condition.
fn non_tangent_residues(
    f: &Scalar,
    g: &Poly,
    tangent: &[Mono],
    m_max: u32,
    graph: &GkmGraph,
) -> Result<Vec<(String, Result<Scalar>)>> {
    let chars = graph.ring.character_symbols();
    let Some(b) = QBinomial::of(g) else { return Ok(Vec::new()) };
    if b.u_mono.is_one() || b.u_mono.symbols().any(|s| !chars.contains(&s)) {
        return Ok(Vec::new());
    }
    let k = b.k as u32;
    if b.u_coeff.is_one() && tangent.contains(&b.u_mono) && k <= m_max {
        return Ok(Vec::new());
    }
    let Some((ord, a)) = b.u_coeff.root_of_unity_exponent() else { return Ok(Vec::new()) };
    let sigma = graph.rescale(k);
    let fs = f.subst(&sigma)?;
    let mut out = Vec::new();
    for r in 0..k {
        let z = Cyclo::root_of_unity(ord * k, a as i64).mul(&Cyclo::root_of_unity(k, r as i64));
        let u = Scalar::mono(z, b.u_mono.clone());
        out.push((format!("{} (characters rescaled by {})", u, k), residue_scalar(&fs, &u)));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Transfer identity.

#[derive(Clone, Debug)]
pub struct TransferEntry {
    pub edge: usize,
    pub m: u32,
    pub degree: Vec<i64>,
    pub summand: usize,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub ok: bool,
}

#[derive(Clone, Debug, Default)]
pub struct TransferReport {
    pub entries: Vec<TransferEntry>,
}

impl TransferReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }
}

/// The q-dependent per-summand factor of a qSD form at degree exponent `e = m_j(d)`.
fn family_factor(x: &Scalar, e: i64, form: QsdForm) -> Result<Scalar> {
    let mu = Scalar::var(Sym::MU);
    let q = Scalar::q();
    Ok(match form {
        QsdForm::Mu | QsdForm::TwoA => Scalar::one().sub(&mu.mul(x).mul(&q.pow(e)?)),
        QsdForm::MuInv | QsdForm::TwoB => Scalar::one().sub(&mu.inv()?.mul(&x.inv()?).mul(&q.pow(-e)?)),
    })
}

/// Checks, per edge, m, degree and summand, that the form's factor at
/// (α, d + mD) and at (β, d) agree at q = λ^{1/m}.
pub fn recursion_transfer_check(
    spec: &BundleSpec,
    graph: &GkmGraph,
    form: QsdForm,
    m_max: u32,
    dmax: u32,
) -> Result<TransferReport> {
    let ring = &graph.ring;
    let n = ring.n_generators();
    let mut report = TransferReport::default();
    for (k, e) in graph.edges.iter().enumerate() {
        for m in 1..=m_max {
            let sigma = graph.rescale(m);
            let at = Scalar::mono(Cyclo::one(), e.character.clone());
            for d in LoopElement::all_degrees(n, dmax) {
                let up: Vec<i64> = d.iter().zip(&e.degree).map(|(a, b)| a + m as i64 * b).collect();
                for j in 0..spec.summands.len() {
                    let f = spec.f(ring, j)?;
                    let fa = f.coords()[e.from].subst(&sigma)?;
                    let fb = f.coords()[e.to].subst(&sigma)?;
                    let lhs = eval_q(&family_factor(&fa, spec.m(j, &up), form)?, &at)?;
                    let rhs = eval_q(&family_factor(&fb, spec.m(j, &d), form)?, &at)?;
                    let ok = lhs == rhs;
                    report.entries.push(TransferEntry { edge: k, m, degree: d.clone(), summand: j, lhs, rhs, ok });
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Non-equivariant limit.

/// Characters ↦ 1, passing through the global class Σ_k c_k P^k recovered by
/// Lagrange interpolation over the fixed points. Supported for one-generator
/// fixed-point models with distinct restrictions of P (projective spaces).
pub fn nonequivariant_limit(
    j: &LoopElement,
    target: &Arc<KRing>,
    profile: &LoopSpaceProfile,
    side: Side,
) -> Result<LoopElement> {
    let Model::FixedPoint(fp) = &j.ring.model else { return Err(Error::ModelMismatch) };
    if j.ring.n_generators() != 1 || target.n_generators() != 1 || target.dim() != fp.points.len() {
        return Err(Error::Config("limit needs matching one-generator models".into()));
    }
    let chars = j.ring.character_symbols();
    let mut to_one = MonoSubst::new();
    for c in &chars {
        to_one.set(*c, Cyclo::one(), Mono::one());
    }
    let t: Vec<Scalar> = fp.restrictions.iter().map(|r| r[0].clone()).collect();
    let n = t.len();
    // Lagrange basis: ℓ_α(P) = ∏_{β≠α} (P − t_β)/(t_α − t_β), stored by powers of P.
    let mut basis: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    for a in 0..n {
        let mut poly = vec![Scalar::one()];
        for b in 0..n {
            if b == a {
                continue;
            }
            let w = t[a].sub(&t[b]).inv().map_err(|_| Error::LimitSingular("repeated fixed-point restriction".into()))?;
            let mut next = vec![Scalar::zero(); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] = next[k + 1].add(&c.mul(&w));
                next[k] = next[k].sub(&c.mul(&t[b]).mul(&w));
            }
            poly = next;
        }
        basis.push(poly);
    }
    let mut out = LoopElement::new(target, j.n_vars, j.dmax);
    for (d, f) in &j.entries {
        let mut class = KClass::zero(target);
        for k in 0..n {
            let mut ck = Scalar::zero();
            for (a, lag) in basis.iter().enumerate() {
                ck = ck.add(&f.coords()[a].mul(&lag[k]));
            }
            let lim = ck.subst(&to_one).map_err(|_| {
                Error::LimitSingular(format!("coefficient {} of P^{} at degree {:?}", ck, k, d))
            })?;
            class = class.add(&KClass::line(target, &[k as i32])?.scale(&lim))?;
        }
        if side == Side::Plus && !class.is_zero() {
            let v = classify(&class, profile);
            if v.membership != Membership::PlusMember {
                return Err(Error::PlusMinusLeak(format!(
                    "degree {:?}: limit leaves the plus side ({})",
                    d,
                    v.offenders.join(", ")
                )));
            }
        }
        if !class.is_zero() {
            out.entries.insert(d.clone(), class);
        }
    }
    Ok(out)
}

/// Q_{is} ↦ Q_i.
pub fn abelian_specialize(j: &LoopElement, flag: &FlagData) -> Result<LoopElement> {
    flag.specialize(j)
}

/// Gr(1,2) = P¹ with its abelian data: a single Chern root, so the abelian
/// quotient is P¹ itself with the same torus characters.
pub fn grassmannian_12() -> (GkmGraph, FlagData) {
    (GkmGraph::projective(1), FlagData { v: vec![1] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twists::{euler_twist, qsd_multiplier};

    fn t(i: usize) -> Scalar {
        Scalar::var(character(i))
    }

    fn q() -> Scalar {
        Scalar::q()
    }

    fn pt_class(g: &GkmGraph, coords: Vec<Scalar>) -> KClass {
        KClass::new(&g.ring, coords).unwrap()
    }

    /// f_0 = (1 − q) + Q C(1 − λ)/(1 − q λ⁻¹) with λ = t1/t0, and its mirror at vertex 1.
    fn passing_element(g: &GkmGraph, c: &Scalar) -> LoopElement {
        let lam = t(1).div(&t(0)).unwrap();
        let lam_inv = lam.inv().unwrap();
        let one = Scalar::one();
        let mut j = LoopElement::new(&g.ring, 1, 1);
        j.insert(vec![0], pt_class(g, vec![one.sub(&q()), one.sub(&q())])).unwrap();
        let f0 = c.mul(&one.sub(&lam)).mul(&one.sub(&q().mul(&lam_inv)).inv().unwrap());
        let f1 = c.mul(&one.sub(&lam_inv)).mul(&one.sub(&q().mul(&lam)).inv().unwrap());
        j.insert(vec![1], pt_class(g, vec![f0, f1])).unwrap();
        j
    }

    #[test]
    fn projective_graphs_are_consistent() {
        assert!(GkmGraph::projective(1).consistency_problems().is_empty());
        assert!(GkmGraph::projective(2).consistency_problems().is_empty());
    }

    #[test]
    fn restrict_components() {
        let g = GkmGraph::projective(1);
        let mut j = LoopElement::new(&g.ring, 1, 1);
        j.insert(vec![0], pt_class(&g, vec![Scalar::one(), Scalar::zero()])).unwrap();
        assert_eq!(restrict(&j, 1).unwrap()[&vec![0]], Scalar::zero());
        assert_eq!(restrict(&j, 0).unwrap()[&vec![0]], Scalar::one());
    }

    #[test]
    fn trivial_element_passes_vacuously() {
        let g = GkmGraph::projective(1);
        let mut j = LoopElement::new(&g.ring, 1, 2);
        j.insert(vec![0], KClass::constant(&g.ring, Scalar::one().sub(&q()))).unwrap();
        let c = |_: usize, _: usize, _: u32, _: &GkmEdge| Ok(Scalar::zero());
        assert!(recursion_check(&j, &g, &c, 2).unwrap().pass());
    }

    #[test]
    fn hand_built_element_passes_and_perturbation_fails() {
        let g = GkmGraph::projective(1);
        let c = Scalar::int(3);
        let j = passing_element(&g, &c);
        let good = |_: usize, _: usize, _: u32, _: &GkmEdge| Ok(Scalar::int(3));
        let rep = recursion_check(&j, &g, &good, 1).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures());
        let zero = |_: usize, _: usize, _: u32, _: &GkmEdge| Ok(Scalar::zero());
        assert!(!recursion_check(&j, &g, &zero, 1).unwrap().pass());
    }

    #[test]
    fn non_tangent_pole_fails() {
        let g = GkmGraph::projective(1);
        let mut j = passing_element(&g, &Scalar::int(3));
        let bad = Scalar::one().sub(&q().mul(&t(0)).mul(&t(1))).inv().unwrap();
        let f = j.get(&[1]);
        let f = f.add(&pt_class(&g, vec![bad, Scalar::zero()])).unwrap();
        j.insert(vec![1], f).unwrap();
        let good = |_: usize, _: usize, _: u32, _: &GkmEdge| Ok(Scalar::int(3));
        assert!(!recursion_check(&j, &g, &good, 1).unwrap().pass());
    }

    #[test]
    fn transfer_identity_example() {
        let g = GkmGraph::projective(1);
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let rep = recursion_transfer_check(&spec, &g, QsdForm::Mu, 1, 2).unwrap();
        assert!(rep.pass());
        let e = rep.entries.iter().find(|e| e.edge == 0 && e.degree == vec![2]).unwrap();
        let lam = t(1).div(&t(0)).unwrap();
        let want = Scalar::one().sub(&Scalar::var(Sym::MU).mul(&t(1)).mul(&lam.pow(2).unwrap()));
        assert_eq!(e.rhs, want);
    }

    #[test]
    fn transfer_sweep_on_p2() {
        let g = GkmGraph::projective(2);
        let spec = BundleSpec::new(vec![(1, vec![1]), (-1, vec![2])], 1);
        for form in [QsdForm::Mu, QsdForm::MuInv, QsdForm::TwoA, QsdForm::TwoB] {
            assert!(recursion_transfer_check(&spec, &g, form, 2, 2).unwrap().pass());
        }
    }

    #[test]
    fn limit_guards() {
        let g = GkmGraph::projective(1);
        let target = KRing::projective(1);
        let lam = t(1).div(&t(0)).unwrap();
        let leak = Scalar::one().sub(&lam.mul(&q().pow(2).unwrap())).inv().unwrap();
        let mut j = LoopElement::new(&g.ring, 1, 1);
        j.insert(vec![1], KClass::constant(&g.ring, leak)).unwrap();
        let profile = LoopSpaceProfile::standard();
        assert!(matches!(nonequivariant_limit(&j, &target, &profile, Side::Plus), Err(Error::PlusMinusLeak(_))));
        assert!(nonequivariant_limit(&j, &target, &profile, Side::Full).is_ok());
        let sing = t(0).sub(&t(1)).inv().unwrap();
        let mut j = LoopElement::new(&g.ring, 1, 1);
        j.insert(vec![1], KClass::constant(&g.ring, sing)).unwrap();
        assert!(matches!(nonequivariant_limit(&j, &target, &profile, Side::Full), Err(Error::LimitSingular(_))));
    }

    #[test]
    fn limit_of_line_factor() {
        let g = GkmGraph::projective(1);
        let target = KRing::projective(1);
        let p = KClass::generator(&g.ring, 0);
        let mu = Scalar::var(Sym::MU);
        let f = KClass::one(&g.ring).sub(&p.scale(&mu.mul(&q()))).unwrap();
        let mut j = LoopElement::new(&g.ring, 1, 1);
        j.insert(vec![1], f).unwrap();
        let lim = nonequivariant_limit(&j, &target, &LoopSpaceProfile::mu_field(), Side::Full).unwrap();
        let want = KClass::one(&target).sub(&KClass::generator(&target, 0).scale(&mu.mul(&q()))).unwrap();
        assert_eq!(lim.get(&[1]), want);
    }

    #[test]
    fn limit_commutes_with_euler_twist() {
        let g = GkmGraph::projective(1);
        let target = KRing::projective(1);
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let p = KClass::generator(&g.ring, 0);
        let mut j = LoopElement::new(&g.ring, 1, 2);
        j.insert(vec![1], p.scale(&q())).unwrap();
        j.insert(vec![2], p.pow(2).unwrap().add(&KClass::one(&g.ring)).unwrap()).unwrap();
        let prof = LoopSpaceProfile::mu_field();
        let a = nonequivariant_limit(&euler_twist(&j, &spec).unwrap(), &target, &prof, Side::Full).unwrap();
        let b = euler_twist(&nonequivariant_limit(&j, &target, &prof, Side::Full).unwrap(), &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gr12_specialization_is_identity() {
        let (g, flag) = grassmannian_12();
        let spec = flag.tautological(0, 1).unwrap();
        let mut j = LoopElement::new(&g.ring, 1, 2);
        j.insert(vec![1], qsd_multiplier(&g.ring, &spec, &[1], QsdForm::TwoA).unwrap()).unwrap();
        assert_eq!(abelian_specialize(&j, &flag).unwrap(), j);
    }
}
