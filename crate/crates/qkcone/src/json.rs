//! JSON forms of scalars, classes, loop elements, targets, bundles and
//! twist profiles.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::equivariant::GkmGraph;
use crate::error::{Error, Result};
use crate::kring::{BundleSpec, KClass, KRing, Summand};
use crate::loopspace::LoopElement;
use crate::scalars::{Cyclo, Mono, Poly, Scalar, Sym};
use crate::twists::{FlagData, FlagForm, ParamMode, QsdForm, TwistKind, TwistProfile};

fn cfg(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// A rational written "p/q", or a cyclotomic number in the power basis of ζ_order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CycloJson {
    Rational(String),
    Cyclotomic { order: u32, coeffs: Vec<String> },
}

impl CycloJson {
    pub fn from_cyclo(c: &Cyclo) -> CycloJson {
        match c.as_rational() {
            Some(r) => CycloJson::Rational(r.to_string()),
            None => CycloJson::Cyclotomic { order: c.order(), coeffs: c.coeffs().iter().map(|r| r.to_string()).collect() },
        }
    }

    pub fn to_cyclo(&self) -> Result<Cyclo> {
        let parse = |s: &str| s.trim().parse::<BigRational>().map_err(|_| cfg(format!("bad rational {:?}", s)));
        Ok(match self {
            CycloJson::Rational(s) => Cyclo::from_rational(parse(s)?),
            CycloJson::Cyclotomic { order, coeffs } => {
                if *order == 0 {
                    return Err(cfg("cyclotomic order must be positive"));
                }
                Cyclo::from_power_coeffs(*order, coeffs.iter().map(|s| parse(s)).collect::<Result<_>>()?)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub c: CycloJson,
    #[serde(default)]
    pub m: BTreeMap<String, i32>,
}

pub fn mono_to_json(m: &Mono) -> BTreeMap<String, i32> {
    m.pairs().iter().map(|(s, e)| (s.name(), *e)).collect()
}

pub fn mono_from_json(m: &BTreeMap<String, i32>) -> Mono {
    Mono::from_pairs(m.iter().map(|(s, e)| (Sym::named(s), *e)))
}

pub fn poly_to_json(p: &Poly) -> Vec<TermJson> {
    p.terms().iter().map(|(m, c)| TermJson { c: CycloJson::from_cyclo(c), m: mono_to_json(m) }).collect()
}

pub fn poly_from_json(t: &[TermJson]) -> Result<Poly> {
    Ok(Poly::from_terms(t.iter().map(|x| Ok((mono_from_json(&x.m), x.c.to_cyclo()?))).collect::<Result<Vec<_>>>()?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorJson {
    pub factor: Vec<TermJson>,
    pub exp: u32,
}

/// num / ∏ factor^exp.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarJson {
    pub num: Vec<TermJson>,
    #[serde(default)]
    pub den: Vec<FactorJson>,
}

impl ScalarJson {
    pub fn from_scalar(s: &Scalar) -> ScalarJson {
        ScalarJson {
            num: poly_to_json(s.numerator()),
            den: s.denominator().iter().map(|(f, e)| FactorJson { factor: poly_to_json(f), exp: *e }).collect(),
        }
    }

    pub fn to_scalar(&self) -> Result<Scalar> {
        let den = self.den.iter().map(|f| Ok((poly_from_json(&f.factor)?, f.exp))).collect::<Result<Vec<_>>>()?;
        Scalar::from_parts(poly_from_json(&self.num)?, den)
    }
}

/// Coordinates of a class in the target's basis (presentation) or per fixed point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QRationalJson {
    pub coords: Vec<ScalarJson>,
}

impl QRationalJson {
    pub fn from_class(k: &KClass) -> QRationalJson {
        QRationalJson { coords: k.coords().iter().map(ScalarJson::from_scalar).collect() }
    }

    pub fn to_class(&self, ring: &Arc<KRing>) -> Result<KClass> {
        KClass::new(ring, self.coords.iter().map(|c| c.to_scalar()).collect::<Result<_>>()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetModel {
    Point,
    Projective { dims: Vec<usize> },
    GkmProjective { n: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetConfig {
    #[serde(flatten)]
    pub model: TargetModel,
    /// Tautological ranks v_i when the target is the abelian quotient of a flag variety.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<Vec<usize>>,
}

/// A built target: its K-ring, GKM data when fixed-point, and flag data.
#[derive(Clone, Debug)]
pub struct Target {
    pub config: TargetConfig,
    pub ring: Arc<KRing>,
    pub graph: Option<GkmGraph>,
    pub flag: Option<FlagData>,
}

impl Target {
    pub fn n_vars(&self) -> usize {
        self.ring.n_generators()
    }
}

impl TargetConfig {
    pub fn projective(dims: &[usize]) -> TargetConfig {
        TargetConfig { model: TargetModel::Projective { dims: dims.to_vec() }, flag: None }
    }

    pub fn build(&self) -> Result<Target> {
        let (ring, graph) = match &self.model {
            TargetModel::Point => (KRing::point(), None),
            TargetModel::Projective { dims } => {
                if dims.is_empty() || dims.contains(&0) {
                    return Err(cfg("projective dims must be positive"));
                }
                (KRing::product_projective(dims), None)
            }
            TargetModel::GkmProjective { n } => {
                if *n == 0 {
                    return Err(cfg("gkm-projective needs n >= 1"));
                }
                let g = GkmGraph::projective(*n);
                (g.ring.clone(), Some(g))
            }
        };
        let flag = match &self.flag {
            Some(v) => {
                let f = FlagData { v: v.clone() };
                if f.n_roots() != ring.n_generators() {
                    return Err(Error::MissingChernRoots(f.n_roots()));
                }
                Some(f)
            }
            None => None,
        };
        Ok(Target { config: self.clone(), ring, graph, flag })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopEntryJson {
    pub degree: Vec<i64>,
    pub qrational: QRationalJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopElementJson {
    pub target: TargetConfig,
    #[serde(rename = "D_max")]
    pub d_max: u32,
    pub entries: Vec<LoopEntryJson>,
}

impl LoopElementJson {
    pub fn from_element(j: &LoopElement, target: &TargetConfig) -> LoopElementJson {
        LoopElementJson {
            target: target.clone(),
            d_max: j.dmax,
            entries: j
                .entries
                .iter()
                .map(|(d, f)| LoopEntryJson { degree: d.clone(), qrational: QRationalJson::from_class(f) })
                .collect(),
        }
    }

    pub fn to_element(&self, target: &Target) -> Result<LoopElement> {
        if self.target != target.config {
            return Err(cfg("loop element was written for a different target"));
        }
        let mut j = LoopElement::new(&target.ring, target.n_vars(), self.d_max);
        for e in &self.entries {
            j.insert(e.degree.clone(), e.qrational.to_class(&target.ring)?)?;
        }
        Ok(j)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummandJson {
    pub sign: i32,
    pub exps: Vec<i32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weight: BTreeMap<String, i32>,
}

/// E through its dual: E^∨ = Σ sign_j · weight_j · ∏ P_i^{exps_ji}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleJson {
    pub summands: Vec<SummandJson>,
    #[serde(default)]
    pub level: i64,
}

impl BundleJson {
    pub fn from_spec(s: &BundleSpec) -> BundleJson {
        BundleJson {
            summands: s
                .summands
                .iter()
                .map(|x| SummandJson { sign: x.sign, exps: x.exps.clone(), weight: mono_to_json(&x.weight) })
                .collect(),
            level: s.level,
        }
    }

    pub fn to_spec(&self) -> Result<BundleSpec> {
        if self.summands.iter().any(|s| s.sign != 1 && s.sign != -1) {
            return Err(cfg("summand signs must be +1 or -1"));
        }
        Ok(BundleSpec {
            summands: self
                .summands
                .iter()
                .map(|s| Summand { sign: s.sign, exps: s.exps.clone(), weight: mono_from_json(&s.weight) })
                .collect(),
            level: self.level,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeJson {
    #[default]
    Exact,
    SeriesMu(u32),
    SeriesMuInv(u32),
}

impl From<ModeJson> for ParamMode {
    fn from(m: ModeJson) -> ParamMode {
        match m {
            ModeJson::Exact => ParamMode::Exact,
            ModeJson::SeriesMu(k) => ParamMode::SeriesMu(k),
            ModeJson::SeriesMuInv(k) => ParamMode::SeriesMuInv(k),
        }
    }
}

/// Twist profile as configured: `kind` is one of euler, dual-euler, level,
/// level-weighted, rab, qsd-mu, qsd-muinv, qsd-2A, qsd-2B, flag-qsd-A, flag-qsd-B.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<i64>,
    #[serde(default)]
    pub mode: ModeJson,
    /// Tautological index for the flag forms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

impl TwistJson {
    pub fn to_profile(&self, target: &Target) -> Result<TwistProfile> {
        let flag_kind = |form: FlagForm| -> Result<(TwistKind, BundleSpec)> {
            let flag = target.flag.clone().ok_or(Error::MissingChernRoots(0))?;
            let j = self.j.ok_or_else(|| cfg("flag forms need the index j"))?;
            let level = self.level.unwrap_or(0);
            let bundle = flag.tautological(j, level)?;
            Ok((TwistKind::FlagQsd { form, j, flag }, bundle))
        };
        let (kind, bundle) = match self.kind.as_str() {
            "flag-qsd-A" => flag_kind(FlagForm::A)?,
            "flag-qsd-B" => flag_kind(FlagForm::B)?,
            "flag-qsd-mu" => flag_kind(FlagForm::UnscaledMu)?,
            "flag-qsd-muinv" => flag_kind(FlagForm::UnscaledMuInv)?,
            other => {
                let kind = match other {
                    "euler" => TwistKind::Euler,
                    "dual-euler" => TwistKind::DualEuler,
                    "level" => TwistKind::Level { weighted: false },
                    "level-weighted" => TwistKind::Level { weighted: true },
                    "rab" => TwistKind::Rab,
                    k if k.starts_with("qsd-") => TwistKind::Qsd(
                        QsdForm::parse(&k[4..]).ok_or_else(|| cfg(format!("unknown qsd form {:?}", k)))?,
                    ),
                    k => return Err(cfg(format!("unknown twist kind {:?}", k))),
                };
                let mut spec = self.bundle.as_ref().ok_or_else(|| cfg(format!("{} needs a bundle", other)))?.to_spec()?;
                if let Some(l) = self.level {
                    spec.level = l;
                }
                if spec.summands.iter().any(|s| s.exps.len() != target.n_vars()) {
                    return Err(cfg("bundle exponents do not match the target generators"));
                }
                (kind, spec)
            }
        };
        let tp = TwistProfile { kind, bundle, mode: self.mode.into() };
        tp.validate()?;
        Ok(tp)
    }
}

pub fn to_string_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_round_trip() {
        let z = Cyclo::root_of_unity(3, 1);
        let x = Scalar::mono(z, Mono::var(Sym::MU))
            .add(&Scalar::frac(2, 3))
            .div(&Scalar::one().sub(&Scalar::q().mul(&Scalar::var(Sym::named("t0")))))
            .unwrap();
        let j = ScalarJson::from_scalar(&x);
        let text = serde_json::to_string(&j).unwrap();
        let back: ScalarJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_scalar().unwrap(), x);
    }

    #[test]
    fn target_and_bundle_configs() {
        let t: TargetConfig = serde_json::from_str(r#"{"kind":"projective","dims":[1,1]}"#).unwrap();
        assert_eq!(t.build().unwrap().n_vars(), 2);
        let g: TargetConfig = serde_json::from_str(r#"{"kind":"gkm-projective","n":2}"#).unwrap();
        assert!(g.build().unwrap().graph.is_some());
        let b: BundleJson = serde_json::from_str(r#"{"summands":[{"sign":1,"exps":[1]}],"level":2}"#).unwrap();
        assert_eq!(b.to_spec().unwrap(), BundleSpec::new(vec![(1, vec![1])], 2));
        let bad: BundleJson = serde_json::from_str(r#"{"summands":[{"sign":2,"exps":[1]}]}"#).unwrap();
        assert!(bad.to_spec().is_err());
    }

    #[test]
    fn loop_element_round_trip() {
        let cfg = TargetConfig::projective(&[1]);
        let target = cfg.build().unwrap();
        let mut j = LoopElement::new(&target.ring, 1, 2);
        let p = KClass::generator(&target.ring, 0);
        j.insert(vec![1], p.scale(&Scalar::one().sub(&Scalar::q()).inv().unwrap())).unwrap();
        let text = to_string_pretty(&LoopElementJson::from_element(&j, &cfg));
        let back: LoopElementJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_element(&target).unwrap(), j);
    }

    #[test]
    fn twist_json_kinds() {
        let target = TargetConfig::projective(&[1]).build().unwrap();
        let t: TwistJson = serde_json::from_str(
            r#"{"kind":"qsd-2A","bundle":{"summands":[{"sign":1,"exps":[1]}]},"level":1,"mode":{"series-mu":3}}"#,
        )
        .unwrap();
        assert!(t.to_profile(&target).is_ok());
        let t: TwistJson = serde_json::from_str(
            r#"{"kind":"qsd-mu","bundle":{"summands":[{"sign":1,"exps":[1]}]},"mode":{"series-mu":3}}"#,
        )
        .unwrap();
        assert!(matches!(t.to_profile(&target), Err(Error::FormModeMismatch(_))));
        let t: TwistJson = serde_json::from_str(r#"{"kind":"flag-qsd-A","j":0}"#).unwrap();
        assert!(matches!(t.to_profile(&target), Err(Error::MissingChernRoots(_))));
    }
}
