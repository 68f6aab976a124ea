//! Finite models of K(X) and K_G(X), their classes, pairings and characteristic classes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalars::{Cyclo, Mono, MonoSubst, Scalar, Sym};

/// Presentation by nilpotent generators x_i = P_i − 1.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub basis: Vec<Vec<u32>>,
    pub reductions: BTreeMap<Vec<u32>, Vec<(usize, Scalar)>>,
    pub trace: Vec<Scalar>,
    index: BTreeMap<Vec<u32>, usize>,
    table: Vec<Vec<Vec<(usize, Scalar)>>>,
    max_degree: u32,
}

/// Fixed-point (localization) model.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub points: Vec<String>,
    /// restrictions[α][i] = P_i|_α
    pub restrictions: Vec<Vec<Scalar>>,
    /// tangent[α] = characters of T_α X
    pub tangent: Vec<Vec<Mono>>,
    pub characters: Vec<Sym>,
}

#[derive(Clone, Debug)]
pub enum Model {
    Presentation(Presentation),
    FixedPoint(FixedPoints),
}

#[derive(Clone, Debug)]
pub struct KRing {
    pub name: String,
    pub generators: Vec<String>,
    pub model: Model,
}

impl Presentation {
    pub fn new(
        n_gens: usize,
        basis: Vec<Vec<u32>>,
        reductions: BTreeMap<Vec<u32>, Vec<(usize, Scalar)>>,
        trace: Vec<Scalar>,
    ) -> Result<Presentation> {
        if basis.is_empty() || basis[0].iter().any(|&e| e != 0) {
            return Err(Error::Config("the first basis monomial must be 1".into()));
        }
        if basis.iter().any(|b| b.len() != n_gens) {
            return Err(Error::Config("basis exponent vectors must match the generator count".into()));
        }
        if trace.len() != basis.len() {
            return Err(Error::Config("trace table length must match the basis".into()));
        }
        let index: BTreeMap<Vec<u32>, usize> =
            basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        if index.len() != basis.len() {
            return Err(Error::Config("duplicate basis monomial".into()));
        }
        let max_degree = basis.iter().map(|b| b.iter().sum::<u32>()).max().unwrap_or(0);
        let mut table = vec![vec![Vec::new(); basis.len()]; basis.len()];
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                table[i][j] = if let Some(&k) = index.get(&e) {
                    vec![(k, Scalar::one())]
                } else if let Some(v) = reductions.get(&e) {
                    v.clone()
                } else {
                    Vec::new()
                };
            }
        }
        Ok(Presentation { basis, reductions, trace, index, table, max_degree })
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }
}

impl KRing {
    pub fn presentation(
        name: &str,
        generators: Vec<String>,
        basis: Vec<Vec<u32>>,
        reductions: BTreeMap<Vec<u32>, Vec<(usize, Scalar)>>,
        trace: Vec<Scalar>,
    ) -> Result<Arc<KRing>> {
        let p = Presentation::new(generators.len(), basis, reductions, trace)?;
        Ok(Arc::new(KRing { name: name.to_string(), generators, model: Model::Presentation(p) }))
    }

    pub fn fixed_point(
        name: &str,
        generators: Vec<String>,
        fp: FixedPoints,
    ) -> Result<Arc<KRing>> {
        if fp.restrictions.len() != fp.points.len() || fp.tangent.len() != fp.points.len() {
            return Err(Error::Config("fixed-point tables must have one row per point".into()));
        }
        if fp.restrictions.iter().any(|r| r.len() != generators.len()) {
            return Err(Error::Config("each point needs one restriction per generator".into()));
        }
        Ok(Arc::new(KRing { name: name.to_string(), generators, model: Model::FixedPoint(fp) }))
    }

    /// The point: K(pt) = Q.
    pub fn point() -> Arc<KRing> {
        KRing::presentation("pt", vec![], vec![vec![]], BTreeMap::new(), vec![Scalar::one()]).unwrap()
    }

    /// K(P^n) with P = O(−1), x = P − 1, x^{n+1} = 0 and χ(x^k) = (−1)^k.
    pub fn projective(n: usize) -> Arc<KRing> {
        KRing::product_projective(&[n])
    }

    /// K(P^{n_1} × … × P^{n_r}) with one O(−1) generator per factor.
    pub fn product_projective(dims: &[usize]) -> Arc<KRing> {
        let mut basis: Vec<Vec<u32>> = vec![vec![]];
        for &n in dims {
            let mut next = Vec::new();
            for b in &basis {
                for k in 0..=n as u32 {
                    let mut v = b.clone();
                    v.push(k);
                    next.push(v);
                }
            }
            basis = next;
        }
        let trace = basis
            .iter()
            .map(|b| Scalar::int(if b.iter().sum::<u32>() % 2 == 0 { 1 } else { -1 }))
            .collect();
        let name = dims.iter().map(|n| format!("P{}", n)).collect::<Vec<_>>().join("xP");
        let gens = (1..=dims.len()).map(|i| format!("P{}", i)).collect();
        KRing::presentation(&name, gens, basis, BTreeMap::new(), trace).unwrap()
    }

    /// Fixed-point model of P^n with P|_i = t_i and T_i P^n = {t_j / t_i : j ≠ i}.
    pub fn projective_fixed(chars: &[Scalar]) -> Result<Arc<KRing>> {
        let n = chars.len();
        let mut monos = Vec::with_capacity(n);
        for c in chars {
            let (k, m) = c
                .as_monomial()
                .ok_or_else(|| Error::Config(format!("character {} is not a monomial", c)))?;
            if !k.is_one() {
                return Err(Error::Config(format!("character {} has a coefficient", c)));
            }
            monos.push(m);
        }
        let mut characters: Vec<Sym> = Vec::new();
        for m in &monos {
            for s in m.symbols() {
                if !characters.contains(&s) {
                    characters.push(s);
                }
            }
        }
        let fp = FixedPoints {
            points: (0..n).map(|i| format!("p{}", i)).collect(),
            restrictions: chars.iter().map(|c| vec![c.clone()]).collect(),
            tangent: (0..n)
                .map(|i| (0..n).filter(|&j| j != i).map(|j| monos[j].div(&monos[i])).collect())
                .collect(),
            characters,
        };
        KRing::fixed_point(&format!("P{}-fixed", n - 1), vec!["P".into()], fp)
    }

    pub fn n_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        match &self.model {
            Model::Presentation(p) => p.basis.len(),
            Model::FixedPoint(f) => f.points.len(),
        }
    }

    pub fn is_fixed_point(&self) -> bool {
        matches!(self.model, Model::FixedPoint(_))
    }

    pub fn character_symbols(&self) -> Vec<Sym> {
        match &self.model {
            Model::FixedPoint(f) => f.characters.clone(),
            Model::Presentation(_) => Vec::new(),
        }
    }
}

/// An element of a K-ring model with coefficients in [`Scalar`].
#[derive(Clone)]
pub struct KClass {
    ring: Arc<KRing>,
    coords: Vec<Scalar>,
}

fn same(a: &Arc<KRing>, b: &Arc<KRing>) -> bool {
    Arc::ptr_eq(a, b) || a.name == b.name && a.dim() == b.dim()
}

impl KClass {
    pub fn new(ring: &Arc<KRing>, coords: Vec<Scalar>) -> Result<KClass> {
        if coords.len() != ring.dim() {
            return Err(Error::Config(format!(
                "class has {} coordinates, model {} needs {}",
                coords.len(),
                ring.name,
                ring.dim()
            )));
        }
        Ok(KClass { ring: ring.clone(), coords })
    }

    pub fn zero(ring: &Arc<KRing>) -> KClass {
        KClass { ring: ring.clone(), coords: vec![Scalar::zero(); ring.dim()] }
    }

    pub fn constant(ring: &Arc<KRing>, c: Scalar) -> KClass {
        match &ring.model {
            Model::Presentation(_) => {
                let mut coords = vec![Scalar::zero(); ring.dim()];
                coords[0] = c;
                KClass { ring: ring.clone(), coords }
            }
            Model::FixedPoint(_) => KClass { ring: ring.clone(), coords: vec![c; ring.dim()] },
        }
    }

    pub fn one(ring: &Arc<KRing>) -> KClass {
        KClass::constant(ring, Scalar::one())
    }

    pub fn basis_element(ring: &Arc<KRing>, i: usize) -> KClass {
        let mut coords = vec![Scalar::zero(); ring.dim()];
        coords[i] = Scalar::one();
        KClass { ring: ring.clone(), coords }
    }

    /// The line bundle P_i.
    pub fn generator(ring: &Arc<KRing>, i: usize) -> KClass {
        match &ring.model {
            Model::Presentation(p) => {
                let mut coords = vec![Scalar::zero(); ring.dim()];
                coords[0] = Scalar::one();
                let mut e = vec![0u32; ring.n_generators()];
                e[i] = 1;
                if let Some(k) = p.index_of(&e) {
                    coords[k] = Scalar::one();
                }
                KClass { ring: ring.clone(), coords }
            }
            Model::FixedPoint(f) => KClass {
                ring: ring.clone(),
                coords: f.restrictions.iter().map(|r| r[i].clone()).collect(),
            },
        }
    }

    /// ∏_i P_i^{e_i}.
    pub fn line(ring: &Arc<KRing>, exps: &[i32]) -> Result<KClass> {
        let mut acc = KClass::one(ring);
        for (i, &e) in exps.iter().enumerate() {
            if e != 0 {
                acc = acc.mul(&KClass::generator(ring, i).pow(e as i64)?)?;
            }
        }
        Ok(acc)
    }

    pub fn ring(&self) -> &Arc<KRing> {
        &self.ring
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &KClass) -> Result<()> {
        if same(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::ModelMismatch)
        }
    }

    pub fn add(&self, other: &KClass) -> Result<KClass> {
        self.check(other)?;
        Ok(KClass {
            ring: self.ring.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &KClass) -> Result<KClass> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> KClass {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, s: &Scalar) -> KClass {
        self.map(|c| c.mul(s))
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> KClass {
        KClass { ring: self.ring.clone(), coords: self.coords.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<KClass> {
        let coords = self.coords.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(KClass { ring: self.ring.clone(), coords })
    }

    pub fn mul(&self, other: &KClass) -> Result<KClass> {
        self.check(other)?;
        match &self.ring.model {
            Model::FixedPoint(_) => Ok(KClass {
                ring: self.ring.clone(),
                coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.mul(b)).collect(),
            }),
            Model::Presentation(p) => {
                let mut out = vec![Scalar::zero(); self.coords.len()];
                for (i, a) in self.coords.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in other.coords.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let ab = a.mul(b);
                        for (k, c) in &p.table[i][j] {
                            out[*k] = out[*k].add(&ab.mul(c));
                        }
                    }
                }
                Ok(KClass { ring: self.ring.clone(), coords: out })
            }
        }
    }

    /// Scalar part (coefficient of 1) and nilpotent remainder; presentation mode only.
    fn split_unit(&self) -> (Scalar, KClass) {
        let c0 = self.coords[0].clone();
        let mut rest = self.clone();
        rest.coords[0] = Scalar::zero();
        (c0, rest)
    }

    pub fn inv(&self) -> Result<KClass> {
        match &self.ring.model {
            Model::FixedPoint(_) => self
                .try_map(|c| c.inv().map_err(|_| Error::NonInvertibleFactor(format!("{}", self)))),
            Model::Presentation(p) => {
                let (c0, n) = self.split_unit();
                if c0.is_zero() {
                    return Err(Error::NonInvertibleFactor(format!("{}", self)));
                }
                let c0inv = c0.inv()?;
                let t = n.scale(&c0inv).neg();
                let mut acc = KClass::one(&self.ring);
                let mut pw = KClass::one(&self.ring);
                for _ in 0..p.max_degree {
                    pw = pw.mul(&t)?;
                    if pw.is_zero() {
                        break;
                    }
                    acc = acc.add(&pw)?;
                }
                Ok(acc.scale(&c0inv))
            }
        }
    }

    pub fn div(&self, other: &KClass) -> Result<KClass> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<KClass> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = KClass::one(&self.ring);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// Ψ^k: P_i ↦ P_i^k on generators and Ψ^k on scalars.
    pub fn adams(&self, k: u32) -> Result<KClass> {
        if k == 1 {
            return Ok(self.clone());
        }
        match &self.ring.model {
            Model::FixedPoint(_) => Ok(self.map(|c| c.adams(k))),
            Model::Presentation(p) => {
                let ring = &self.ring;
                let xs: Vec<KClass> = (0..ring.n_generators())
                    .map(|i| {
                        let g = KClass::generator(ring, i);
                        g.pow(k as i64)?.sub(&KClass::one(ring))
                    })
                    .collect::<Result<_>>()?;
                let mut acc = KClass::zero(ring);
                for (b, c) in p.basis.iter().zip(&self.coords) {
                    if c.is_zero() {
                        continue;
                    }
                    let mut term = KClass::constant(ring, c.adams(k));
                    for (i, &e) in b.iter().enumerate() {
                        for _ in 0..e {
                            term = term.mul(&xs[i])?;
                        }
                    }
                    acc = acc.add(&term)?;
                }
                Ok(acc)
            }
        }
    }

    pub fn subst(&self, sub: &MonoSubst) -> Result<KClass> {
        self.try_map(|c| c.subst(sub))
    }

    pub fn eval_consts(&self, vals: &BTreeMap<Sym, Cyclo>) -> Result<KClass> {
        self.try_map(|c| c.eval_consts(vals))
    }

    pub fn contains(&self, s: Sym) -> bool {
        self.coords.iter().any(|c| c.contains(s))
    }
}

impl PartialEq for KClass {
    fn eq(&self, other: &KClass) -> bool {
        same(&self.ring, &other.ring) && self.coords.iter().zip(&other.coords).all(|(a, b)| a == b)
    }
}

impl fmt::Debug for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, "]")
    }
}

/// χ(X; a ⊗ b ⊗ twist).
pub fn pairing(a: &KClass, b: &KClass, twist: &KClass) -> Result<Scalar> {
    let abf = a.mul(b)?.mul(twist)?;
    euler_characteristic(&abf)
}

/// χ(X; a) by the trace table or by localization.
pub fn euler_characteristic(a: &KClass) -> Result<Scalar> {
    match &a.ring.model {
        Model::Presentation(p) => {
            let mut acc = Scalar::zero();
            for (c, t) in a.coords.iter().zip(&p.trace) {
                acc = acc.add(&c.mul(t));
            }
            Ok(acc)
        }
        Model::FixedPoint(fp) => {
            let mut acc = Scalar::zero();
            for (alpha, c) in a.coords.iter().enumerate() {
                let mut e = Scalar::one();
                for w in &fp.tangent[alpha] {
                    e = e.mul(&Scalar::one_minus(Cyclo::one(), w.inv()));
                }
                acc = acc.add(&c.div(&e)?);
            }
            let chars = &fp.characters;
            if acc.denominator().iter().any(|(f, _)| chars.iter().any(|s| f.contains(*s))) {
                return Err(Error::NonGlobalClass(format!("{}", acc)));
            }
            Ok(acc)
        }
    }
}

/// Exact inverse of a square matrix by Gaussian elimination.
pub fn invert_matrix(m: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Config("singular Gram matrix".into()))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let pinv = a[col][col].inv()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(&pinv);
            inv[col][j] = inv[col][j].mul(&pinv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
                inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
            }
        }
    }
    Ok(inv)
}

/// Dual basis {φ^α} with ⟨φ_α, φ^β⟩_twist = δ_αβ.
pub fn dual_basis(basis: &[KClass], twist: &KClass) -> Result<Vec<KClass>> {
    let n = basis.len();
    let mut g = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = pairing(&basis[i], &basis[j], twist)?;
        }
    }
    let gi = invert_matrix(&g)?;
    let ring = basis.first().map(|b| b.ring.clone()).ok_or(Error::Config("empty basis".into()))?;
    (0..n)
        .map(|a| {
            let mut acc = KClass::zero(&ring);
            for (b, row) in basis.iter().zip(&gi) {
                acc = acc.add(&b.scale(&row[a]))?;
            }
            Ok(acc)
        })
        .collect()
}

/// One summand ± f_j of E^∨ with f_j = χ_j ∏ P_i^{e_{ji}}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub sign: i32,
    pub exps: Vec<i32>,
    pub weight: Mono,
}

/// A virtual bundle given through its dual E^∨ = Σ_j ± f_j, with a level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSpec {
    pub summands: Vec<Summand>,
    pub level: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuMode {
    /// weight μ⁻¹ on E
    MuInvOnE,
    /// weight μ on E^∨
    MuOnEDual,
}

impl BundleSpec {
    pub fn new(summands: Vec<(i32, Vec<i32>)>, level: i64) -> BundleSpec {
        BundleSpec {
            summands: summands
                .into_iter()
                .map(|(sign, exps)| Summand { sign, exps, weight: Mono::one() })
                .collect(),
            level,
        }
    }

    pub fn with_level(&self, level: i64) -> BundleSpec {
        BundleSpec { summands: self.summands.clone(), level }
    }

    pub fn rank(&self) -> i64 {
        self.summands.iter().map(|s| s.sign as i64).sum()
    }

    /// m_j(d) = Σ_i e_{ji} d_i = −⟨c₁(f_j), d⟩.
    pub fn m(&self, j: usize, d: &[i64]) -> i64 {
        self.summands[j].exps.iter().zip(d).map(|(&e, &x)| e as i64 * x).sum()
    }

    /// c₁(E)_i = −Σ_j sign_j e_{ji}.
    pub fn c1e(&self, i: usize) -> i64 {
        -self.summands.iter().map(|s| s.sign as i64 * s.exps.get(i).copied().unwrap_or(0) as i64).sum::<i64>()
    }

    /// ⟨c₁(E), d⟩ = Σ_i c₁(E)_i d_i.
    pub fn c1e_pair(&self, d: &[i64]) -> i64 {
        (0..d.len()).map(|i| self.c1e(i) * d[i]).sum()
    }

    /// The spec of E^∨ (so that its dual is E): every f_j ↦ f_j⁻¹.
    pub fn dual(&self) -> BundleSpec {
        BundleSpec {
            summands: self
                .summands
                .iter()
                .map(|s| Summand {
                    sign: s.sign,
                    exps: s.exps.iter().map(|e| -e).collect(),
                    weight: s.weight.inv(),
                })
                .collect(),
            level: self.level,
        }
    }

    /// f_j as a class.
    pub fn f(&self, ring: &Arc<KRing>, j: usize) -> Result<KClass> {
        let s = &self.summands[j];
        if s.exps.len() != ring.n_generators() {
            return Err(Error::Config(format!(
                "summand {} has {} exponents, target has {} generators",
                j,
                s.exps.len(),
                ring.n_generators()
            )));
        }
        Ok(KClass::line(ring, &s.exps)?.scale(&Scalar::mono(Cyclo::one(), s.weight.clone())))
    }
}

fn mu() -> Scalar {
    Scalar::var(Sym::MU)
}

/// Eu(μ⁻¹E) = ∏(1 − μ f_j)^{±1} or Eu(μE^∨) = ∏(1 − μ⁻¹ f_j⁻¹)^{±1}.
pub fn euler_class(ring: &Arc<KRing>, spec: &BundleSpec, mode: MuMode) -> Result<KClass> {
    let mut acc = KClass::one(ring);
    let one = KClass::one(ring);
    for (j, s) in spec.summands.iter().enumerate() {
        let f = spec.f(ring, j)?;
        let factor = match mode {
            MuMode::MuInvOnE => one.sub(&f.scale(&mu()))?,
            MuMode::MuOnEDual => one.sub(&f.inv()?.scale(&mu().inv()?))?,
        };
        let factor = if s.sign < 0 { factor.inv()? } else { factor };
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// det^{power} of μ⁻¹E or of μE^∨.
pub fn det_class(ring: &Arc<KRing>, spec: &BundleSpec, power: i64, mode: MuMode) -> Result<KClass> {
    let mut det = KClass::one(ring);
    for (j, s) in spec.summands.iter().enumerate() {
        let f = spec.f(ring, j)?;
        let w = match mode {
            MuMode::MuInvOnE => f.inv()?.scale(&mu().inv()?),
            MuMode::MuOnEDual => f.scale(&mu()),
        };
        det = det.mul(&w.pow(s.sign as i64)?)?;
    }
    det.pow(power)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> Arc<KRing> {
        KRing::projective(1)
    }

    #[test]
    fn nilpotent_square() {
        let r = p1();
        let p = KClass::generator(&r, 0);
        let sq = p.mul(&p).unwrap();
        assert_eq!(sq.coords(), &[Scalar::one(), Scalar::int(2)]);
        assert_eq!(p.adams(2).unwrap(), sq);
        assert_eq!(p.mul(&KClass::one(&r)).unwrap(), p);
    }

    #[test]
    fn fixed_point_euler_characteristics() {
        let t = Scalar::var(Sym::named("t"));
        let r = KRing::projective_fixed(&[Scalar::one(), t]).unwrap();
        let one = KClass::one(&r);
        assert_eq!(euler_characteristic(&one).unwrap(), Scalar::one());
        let p = KClass::generator(&r, 0);
        assert!(euler_characteristic(&p).unwrap().is_zero());
        let pt = KRing::point();
        assert_eq!(euler_characteristic(&KClass::one(&pt)).unwrap(), Scalar::one());
    }

    #[test]
    fn presentation_matches_localization_on_p2() {
        let ts: Vec<Scalar> = ["t0", "t1", "t2"].iter().map(|n| Scalar::var(Sym::named(n))).collect();
        let fixed = KRing::projective_fixed(&ts).unwrap();
        let pres = KRing::projective(2);
        for k in -3..=3i64 {
            let a = euler_characteristic(&KClass::generator(&pres, 0).pow(k).unwrap()).unwrap();
            let b = euler_characteristic(&KClass::generator(&fixed, 0).pow(k).unwrap()).unwrap();
            let ones: BTreeMap<Sym, Cyclo> =
                ["t0", "t1", "t2"].iter().map(|n| (Sym::named(n), Cyclo::one())).collect();
            assert_eq!(b.eval_consts(&ones).unwrap(), a, "k = {}", k);
        }
    }

    #[test]
    fn non_global_class_is_rejected() {
        let t = Scalar::var(Sym::named("t"));
        let r = KRing::projective_fixed(&[Scalar::one(), t.clone()]).unwrap();
        let c = KClass::new(&r, vec![Scalar::one(), Scalar::zero()]).unwrap();
        assert!(matches!(euler_characteristic(&c), Err(Error::NonGlobalClass(_))));
    }

    #[test]
    fn euler_and_det_examples() {
        let r = p1();
        let spec = BundleSpec::new(vec![(1, vec![1])], 0);
        let p = KClass::generator(&r, 0);
        let one = KClass::one(&r);
        let e1 = euler_class(&r, &spec, MuMode::MuInvOnE).unwrap();
        assert_eq!(e1, one.sub(&p.scale(&mu())).unwrap());
        let e2 = euler_class(&r, &spec, MuMode::MuOnEDual).unwrap();
        assert_eq!(e2, one.sub(&p.inv().unwrap().scale(&mu().inv().unwrap())).unwrap());
        let d = det_class(&r, &spec, -1, MuMode::MuInvOnE).unwrap();
        assert_eq!(d, p.scale(&mu()));
        assert_eq!(det_class(&r, &spec, 0, MuMode::MuInvOnE).unwrap(), one);
        let empty = BundleSpec::new(vec![], 0);
        assert_eq!(euler_class(&r, &empty, MuMode::MuInvOnE).unwrap(), one);
    }

    #[test]
    fn det_of_two_summands_in_dual_mode() {
        let r = KRing::product_projective(&[1, 1]);
        let spec = BundleSpec::new(vec![(1, vec![1, 0]), (1, vec![0, 1])], 0);
        let f1 = spec.f(&r, 0).unwrap();
        let f2 = spec.f(&r, 1).unwrap();
        let d = det_class(&r, &spec, 1, MuMode::MuOnEDual).unwrap();
        assert_eq!(d, f1.mul(&f2).unwrap().scale(&mu().pow(2).unwrap()));
    }

    #[test]
    fn det_euler_ratio_identity() {
        let r = KRing::projective(2);
        let spec = BundleSpec::new(vec![(1, vec![1]), (1, vec![2]), (-1, vec![-1])], 0);
        let lhs = det_class(&r, &spec, -1, MuMode::MuInvOnE)
            .unwrap()
            .scale(&Scalar::int(if spec.rank() % 2 == 0 { 1 } else { -1 }));
        let rhs = euler_class(&r, &spec, MuMode::MuInvOnE)
            .unwrap()
            .div(&euler_class(&r, &spec, MuMode::MuOnEDual).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn dual_basis_property() {
        let r = KRing::projective(2);
        let basis: Vec<KClass> = (0..3).map(|i| KClass::basis_element(&r, i)).collect();
        let twist = KClass::generator(&r, 0).scale(&mu());
        let dual = dual_basis(&basis, &twist).unwrap();
        for (i, b) in basis.iter().enumerate() {
            for (j, d) in dual.iter().enumerate() {
                let v = pairing(b, d, &twist).unwrap();
                assert_eq!(v, Scalar::int((i == j) as i64));
            }
        }
    }

    #[test]
    fn spec_bookkeeping() {
        let spec = BundleSpec::new(vec![(1, vec![1, 0]), (-1, vec![2, 1])], 1);
        assert_eq!(spec.m(1, &[1, 3]), 5);
        assert_eq!(spec.c1e(0), 1);
        assert_eq!(spec.c1e(1), 1);
        assert_eq!(spec.c1e_pair(&[1, 3]), 4);
        assert_eq!(spec.rank(), 0);
    }
}
