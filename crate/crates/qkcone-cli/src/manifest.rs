//! Run manifests and transform pipelines.

use serde::{Deserialize, Serialize};

use qkcone::json::{BundleJson, Target, TargetConfig, TwistJson};
use qkcone::loopspace::{novikov_substitute, reduce_coefficients, LoopElement, LoopSpaceProfile, NovikovSubstitution, ReductionMap};
use qkcone::twists::{
    apply_twist, level_duality_substitution, novikov_frame, with_ring_characters, ParamMode, QsdForm, TwistKind,
    TwistProfile,
};
use qkcone::{Error, Result};

/// One pipeline stage as written in the pipeline file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "kebab-case")]
pub enum StageJson {
    Twist(TwistJson),
    /// Q_i ↦ Q_i · c_i q^{k_i} μ^{t_i}.
    Novikov { c: Vec<i64>, k: Vec<i64>, t: Vec<i64> },
    /// "ab-to-mu" or "mu-to-one".
    Reduction { map: String },
    /// Q_i ↦ Q_i q^{l c₁(E)_i}.
    LevelDuality { bundle: BundleJson },
    /// Q ↦ Q μ^{shift · c₁(E)} for a qSD form.
    Frame { bundle: BundleJson, form: String },
}

/// A type-checked stage ready to run.
#[derive(Clone, Debug)]
pub enum Stage {
    Twist(TwistProfile),
    Novikov(NovikovSubstitution, &'static str),
    Reduction(ReductionMap),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProvenanceEntry {
    pub stage: usize,
    pub operation: String,
    pub formula: String,
}

impl Stage {
    pub fn formula_id(&self) -> String {
        match self {
            Stage::Twist(tp) => match &tp.kind {
                TwistKind::Euler => "twist/euler-multiplier".into(),
                TwistKind::DualEuler => "twist/dual-euler-multiplier".into(),
                TwistKind::Level { weighted: false } => "twist/level-multiplier".into(),
                TwistKind::Level { weighted: true } => "twist/level-multiplier-weighted".into(),
                TwistKind::Rab => "twist/rab-multiplier".into(),
                TwistKind::Qsd(f) => format!("qsd/form-{}", f.name()),
                TwistKind::FlagQsd { form, .. } => format!("qsd/flag-{:?}", form).to_lowercase(),
            },
            Stage::Novikov(_, id) => (*id).into(),
            Stage::Reduction(r) => format!("reduction/{}", r.name),
        }
    }

    pub fn operation(&self) -> String {
        match self {
            Stage::Twist(tp) => {
                let mode = match tp.mode {
                    ParamMode::Exact => String::new(),
                    ParamMode::SeriesMu(k) => format!(" mod mu^{}", k + 1),
                    ParamMode::SeriesMuInv(k) => format!(" mod mu^-{}", k + 1),
                };
                format!("{}{}", tp.kind.name(), mode)
            }
            Stage::Novikov(s, _) => {
                let m: Vec<String> = s.multipliers.iter().map(|m| m.to_string()).collect();
                format!("Q -> Q*[{}]", m.join(", "))
            }
            Stage::Reduction(r) => r.name.clone(),
        }
    }

    /// Profiles the stage consumes and produces; None for profile-neutral stages.
    fn profiles(&self, target: &Target) -> Option<(LoopSpaceProfile, LoopSpaceProfile)> {
        match self {
            Stage::Twist(tp) => {
                let p = tp.input_profile(&target.ring);
                Some((p.clone(), p))
            }
            Stage::Novikov(..) => None,
            Stage::Reduction(r) => Some((
                with_ring_characters(r.source.clone(), &target.ring),
                with_ring_characters(r.target.clone(), &target.ring),
            )),
        }
    }

    pub fn apply(&self, j: &LoopElement) -> Result<LoopElement> {
        match self {
            Stage::Twist(tp) => apply_twist(j, tp),
            Stage::Novikov(s, _) => novikov_substitute(j, s),
            Stage::Reduction(r) => reduce_coefficients(j, r),
        }
    }
}

fn stage_error(i: usize, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("stage {}: {}", i, m)),
        Error::ProfileViolation(m) => Error::ProfileViolation(format!("stage {}: {}", i, m)),
        Error::FormModeMismatch(m) => Error::FormModeMismatch(format!("stage {}: {}", i, m)),
        Error::InvalidReduction(m) => Error::InvalidReduction(format!("stage {}: {}", i, m)),
        other => Error::Config(format!("stage {}: {}", i, other)),
    }
}

/// Builds and type-checks a pipeline: each stage's input profile must contain
/// the previous stage's output profile.
pub fn build_pipeline(stages: &[StageJson], target: &Target, series_order: Option<u32>) -> Result<Vec<Stage>> {
    let n = target.n_vars();
    let mut out = Vec::with_capacity(stages.len());
    let mut current: Option<LoopSpaceProfile> = None;
    for (i, s) in stages.iter().enumerate() {
        let stage = (|| -> Result<Stage> {
            Ok(match s {
                StageJson::Twist(t) => {
                    let mut tp = t.to_profile(target)?;
                    if let Some(k) = series_order {
                        tp.mode = match tp.mode {
                            ParamMode::Exact => ParamMode::Exact,
                            ParamMode::SeriesMu(_) => ParamMode::SeriesMu(k),
                            ParamMode::SeriesMuInv(_) => ParamMode::SeriesMuInv(k),
                        };
                    }
                    Stage::Twist(tp)
                }
                StageJson::Novikov { c, k, t } => {
                    if c.len() != n || k.len() != n || t.len() != n {
                        return Err(Error::Config(format!("novikov stage needs {} entries per list", n)));
                    }
                    if c.iter().any(|&x| x == 0) {
                        return Err(Error::Config("novikov multipliers must be invertible".into()));
                    }
                    Stage::Novikov(NovikovSubstitution::monomial(c, k, t), "novikov/monomial")
                }
                StageJson::Reduction { map } => Stage::Reduction(match map.as_str() {
                    "ab-to-mu" => ReductionMap::ab_to_mu(),
                    "mu-to-one" => ReductionMap::mu_to_one(),
                    other => return Err(Error::Config(format!("unknown reduction {:?}", other))),
                }),
                StageJson::LevelDuality { bundle } => {
                    let spec = bundle.to_spec()?;
                    Stage::Novikov(level_duality_substitution(&spec, n), "level/duality-substitution")
                }
                StageJson::Frame { bundle, form } => {
                    let spec = bundle.to_spec()?;
                    let f = QsdForm::parse(form).ok_or_else(|| Error::Config(format!("unknown qsd form {:?}", form)))?;
                    Stage::Novikov(novikov_frame(&spec, n, f), "qsd/novikov-frame")
                }
            })
        })()
        .map_err(|e| stage_error(i, e))?;
        if let Some((input, output)) = stage.profiles(target) {
            if let Some(prev) = &current {
                if !prev.includes_into(&input) {
                    return Err(Error::Config(format!(
                        "stage {}: expects {} but receives {}",
                        i, input.name, prev.name
                    )));
                }
            }
            current = Some(output);
        }
        out.push(stage);
    }
    Ok(out)
}

/// Runs the stages in order and records one provenance entry per stage.
pub fn run_pipeline(j: &LoopElement, stages: &[Stage]) -> Result<(LoopElement, Vec<ProvenanceEntry>)> {
    let mut cur = j.clone();
    let mut log = Vec::with_capacity(stages.len());
    for (i, s) in stages.iter().enumerate() {
        cur = s.apply(&cur).map_err(|e| stage_error(i, e))?;
        log.push(ProvenanceEntry { stage: i, operation: s.operation(), formula: s.formula_id() });
    }
    Ok((cur, log))
}

/// Everything a run needs, assembled from the command line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub target: TargetConfig,
    pub input: Option<String>,
    pub pipeline: Vec<StageJson>,
    pub dmax: u32,
    pub series_order: Option<u32>,
    pub suite: Option<String>,
    pub out: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use qkcone::json::TargetConfig;

    fn p1() -> Target {
        TargetConfig::projective(&[1]).build().unwrap()
    }

    fn stages(text: &str) -> Vec<StageJson> {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn rab_output_needs_both_reductions() {
        let t = p1();
        let rab = r#"{"stage":"twist","kind":"rab","bundle":{"summands":[{"sign":1,"exps":[1]}]}}"#;
        let ok = stages(&format!(
            r#"[{},{{"stage":"reduction","map":"ab-to-mu"}},{{"stage":"reduction","map":"mu-to-one"}}]"#,
            rab
        ));
        assert_eq!(build_pipeline(&ok, &t, None).unwrap().len(), 3);
        let bad = stages(&format!(r#"[{},{{"stage":"reduction","map":"mu-to-one"}}]"#, rab));
        let err = build_pipeline(&bad, &t, None).unwrap_err();
        assert!(err.to_string().contains("stage 1"), "{}", err);
    }

    #[test]
    fn novikov_lists_are_checked() {
        let t = p1();
        let short = stages(r#"[{"stage":"novikov","c":[1,1],"k":[0],"t":[0]}]"#);
        assert!(build_pipeline(&short, &t, None).is_err());
        let zero = stages(r#"[{"stage":"novikov","c":[0],"k":[0],"t":[0]}]"#);
        assert!(build_pipeline(&zero, &t, None).is_err());
    }

    #[test]
    fn series_order_overrides_series_modes_only() {
        let t = p1();
        let mode_of = |kind: &str, mode: &str| {
            let text = format!(
                r#"[{{"stage":"twist","kind":"{}","bundle":{{"summands":[{{"sign":1,"exps":[1]}}]}}{}}}]"#,
                kind, mode
            );
            match &build_pipeline(&stages(&text), &t, Some(5)).unwrap()[0] {
                Stage::Twist(tp) => tp.mode,
                _ => unreachable!(),
            }
        };
        assert_eq!(mode_of("qsd-2A", r#","mode":{"series-mu":2}"#), ParamMode::SeriesMu(5));
        assert_eq!(mode_of("qsd-2B", r#","mode":{"series-mu-inv":1}"#), ParamMode::SeriesMuInv(5));
        assert_eq!(mode_of("euler", ""), ParamMode::Exact);
    }

    #[test]
    fn provenance_has_one_entry_per_stage() {
        let t = p1();
        let j = crate::seeds::seed("P1-trivial", &t, 2).unwrap();
        let s = stages(
            r#"[{"stage":"level-duality","bundle":{"summands":[{"sign":1,"exps":[1]}],"level":1}},
                {"stage":"frame","bundle":{"summands":[{"sign":1,"exps":[1]}]},"form":"mu"}]"#,
        );
        let built = build_pipeline(&s, &t, None).unwrap();
        let (_, log) = run_pipeline(&j, &built).unwrap();
        let ids: Vec<&str> = log.iter().map(|e| e.formula.as_str()).collect();
        assert_eq!(ids, ["level/duality-substitution", "qsd/novikov-frame"]);
    }
}
