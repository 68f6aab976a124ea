//! Batch front end for qkcone: loads target, input and pipeline files, applies
//! transforms and runs verification suites with JSON output.

pub mod manifest;
pub mod seeds;
pub mod suites;

use std::fs;

use serde::Serialize;

use qkcone::json::{LoopElementJson, Target, TargetConfig};
use qkcone::loopspace::LoopElement;
use qkcone::Error;

use manifest::{build_pipeline, run_pipeline, ProvenanceEntry, RunManifest, StageJson};
use suites::{run_suite, SuiteContext, SuiteReport};

pub const DEFAULT_DMAX: u32 = 3;

/// Failure of a run, with its process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {}", m),
            CliError::Verification(m) => write!(f, "verification failed: {}", m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Config(e.to_string())
    }
}

/// Reads a JSON argument given either inline (starting with `{` or `[`) or as a file path.
pub fn read_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, CliError> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Config(format!("cannot read {} {:?}: {}", what, arg, e)))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid {} {:?}: {}", what, arg, e)))
}

#[derive(Serialize)]
struct InputInfo {
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    convention: Option<String>,
}

#[derive(Serialize)]
struct TransformOutput {
    input: InputInfo,
    provenance: Vec<ProvenanceEntry>,
    result: LoopElementJson,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    target: &'a TargetConfig,
    dmax: u32,
    report: SuiteReport,
}

fn load_input(m: &RunManifest, target: &Target) -> Result<Option<(LoopElement, InputInfo)>, CliError> {
    let Some(arg) = &m.input else { return Ok(None) };
    if seeds::is_seed(arg) {
        let j = seeds::seed(arg, target, m.dmax)?;
        let info = InputInfo {
            source: format!("seed:{}", arg),
            convention: Some("external example, not derived from the cone transforms".into()),
        };
        return Ok(Some((j, info)));
    }
    let ej: LoopElementJson = read_json(arg, "input")?;
    let full = ej.to_element(target)?;
    let mut j = LoopElement::new(&target.ring, full.n_vars, m.dmax.min(full.dmax));
    for (d, f) in full.entries {
        j.insert(d, f)?;
    }
    Ok(Some((j, InputInfo { source: arg.clone(), convention: None })))
}

/// Applies the pipeline to the input and returns the serialized result.
pub fn run_transform(m: &RunManifest) -> Result<String, CliError> {
    let target = m.target.build()?;
    let stages = build_pipeline(&m.pipeline, &target, m.series_order)?;
    let (j, info) = load_input(m, &target)?
        .ok_or_else(|| CliError::Config("transform needs --input (a file or a seed name)".into()))?;
    let (out, provenance) = run_pipeline(&j, &stages)?;
    let doc = TransformOutput { input: info, provenance, result: LoopElementJson::from_element(&out, &m.target) };
    Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
}

/// Runs one suite. A failing report is returned as `Err(Verification)` carrying the JSON.
pub fn run_verify(m: &RunManifest) -> Result<String, (String, CliError)> {
    let cfg = |e: CliError| (String::new(), e);
    let suite = m.suite.as_deref().ok_or_else(|| cfg(CliError::Config("no suite given".into())))?;
    let target = m.target.build().map_err(|e| cfg(e.into()))?;
    build_pipeline(&m.pipeline, &target, m.series_order).map_err(|e| cfg(e.into()))?;
    let input = load_input(m, &target).map_err(cfg)?;
    let ctx = SuiteContext { target: &target, input: input.as_ref().map(|x| &x.0), dmax: m.dmax, series_order: m.series_order };
    let report = run_suite(suite, &ctx).map_err(|e| cfg(e.into()))?;
    let pass = report.pass;
    let failed = report.failed;
    let doc = VerifyOutput { target: &m.target, dmax: m.dmax, report };
    let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    if pass {
        Ok(text)
    } else {
        Err((text, CliError::Verification(format!("{} of the suite's cases failed", failed))))
    }
}

/// Assembles a manifest from raw argument values.
pub fn manifest_from_args(
    target: &str,
    input: Option<String>,
    pipeline: Option<&str>,
    dmax: Option<u32>,
    series_order: Option<u32>,
    suite: Option<String>,
    out: Option<String>,
) -> Result<RunManifest, CliError> {
    let target: TargetConfig = read_json(target, "target")?;
    let pipeline: Vec<StageJson> = match pipeline {
        Some(p) => read_json(p, "pipeline")?,
        None => Vec::new(),
    };
    let dmax = match (dmax, &input) {
        (Some(d), _) => d,
        (None, Some(i)) if !seeds::is_seed(i) => read_json::<LoopElementJson>(i, "input")?.d_max,
        _ => DEFAULT_DMAX,
    };
    Ok(RunManifest { target, input, pipeline, dmax, series_order, suite, out })
}
