//! Scenario runner: loads a scenario, runs its checks and produces a
//! canonical JSON report.
//!
//! Reports have sorted keys and list completion digits lowest power first.
//! Running the same scenario at the same precision always produces the same
//! bytes. `verify` recomputes every check from the inputs recorded in a
//! report, with no lifting or search, and compares.

mod codec;
mod run;
mod scenario;

pub use codec::{decode_rational, encode_rational, BaseCodec, ScenarioField};
pub use run::{brute_force_select, hensel_prefix};
pub use scenario::{ChainScenario, Check, ConfigError, OstrowskiScenario, PrefixSource, Scenario, ScenarioKind};

use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::ci_stages::Outcome;
use crate::valued_arith::{BaseField, PAdicRationals, PrimeField, RationalFunctions, Rationals, RingDescriptor};
use run::{ostrowski_inputs_json, run_checks, run_ostrowski, ChainInputs};

/// Environment variable supplying a default pseudo-limit precision.
pub const PRECISION_ENV: &str = "PSEUDOLIM_PRECISION";

const BUILTINS: [(&str, &str); 4] = [
    ("sqrt2_7adic", include_str!("../../scenarios/sqrt2_7adic.toml")),
    ("artin_schreier_p2", include_str!("../../scenarios/artin_schreier_p2.toml")),
    ("sqrt_1pt_f3t", include_str!("../../scenarios/sqrt_1pt_f3t.toml")),
    ("ostrowski_demo", include_str!("../../scenarios/ostrowski_demo.toml")),
];

const NEGATIVE_CONTROLS: [(&str, &str); 2] = [
    ("tampered_prefix", include_str!("../../scenarios/tampered_prefix.toml")),
    ("wrong_degree_g", include_str!("../../scenarios/wrong_degree_g.toml")),
];

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error at {0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl LabError {
    pub const EXIT_CODE: i32 = 3;
}

pub fn list_scenarios() -> Vec<&'static str> {
    BUILTINS.iter().map(|(name, _)| *name).collect()
}

pub fn negative_controls() -> Vec<&'static str> {
    NEGATIVE_CONTROLS.iter().map(|(name, _)| *name).collect()
}

/// Source text of a built-in scenario or negative control.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTINS.iter().chain(NEGATIVE_CONTROLS.iter()).find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Resolves a built-in name, falling back to a file path.
pub fn load_scenario(name_or_path: &str) -> Result<Scenario, LabError> {
    match builtin_source(name_or_path) {
        Some(src) => Ok(Scenario::parse(src)?),
        None => {
            let src = std::fs::read_to_string(name_or_path)
                .map_err(|e| LabError::Io { path: name_or_path.to_string(), message: e.to_string() })?;
            Ok(Scenario::parse(&src)?)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub outcome: Outcome,
    pub body: Value,
}

impl Report {
    /// Pretty-printed JSON with sorted keys and a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn check(&self, name: &str) -> Option<&Value> {
        self.body.get("checks")?.get(name)
    }
}

pub fn emit_report(report: &Report, path: &Path) -> Result<(), LabError> {
    std::fs::write(path, report.to_canonical_json())
        .map_err(|e| LabError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn assemble(name: &str, kind: &str, inputs: Value, checks: Map<String, Value>, outcome: Outcome, failure: Value) -> Report {
    Report {
        scenario: name.to_string(),
        outcome,
        body: json!({
            "scenario": name,
            "kind": kind,
            "inputs": inputs,
            "checks": checks,
            "verdict": outcome.to_string(),
            "failure": failure,
        }),
    }
}

fn chain_report<K: ScenarioField>(k: &K, name: &str, inputs: &ChainInputs<K>) -> Report {
    let results = run_checks(k, inputs);
    let mut inputs_json = inputs.to_json(k);
    inputs_json["ring"] = json!(k.descriptor().to_string());
    assemble(name, "chain", inputs_json, results.sections, results.outcome, results.failure)
}

fn run_chain_in<K: ScenarioField>(k: &K, name: &str, chain: &ChainScenario) -> Result<Report, LabError> {
    Ok(chain_report(k, name, &ChainInputs::from_scenario(k, chain)?))
}

/// Calls `$body` with `$k` bound to the field named by a ring descriptor.
macro_rules! with_field {
    ($desc:expr, $k:ident => $body:expr) => {
        match $desc {
            RingDescriptor::PAdic(p) => {
                let $k = PAdicRationals::new(p);
                $body
            }
            RingDescriptor::TAdic(BaseField::Prime(p)) => {
                let $k = RationalFunctions::new(PrimeField::new(p));
                $body
            }
            RingDescriptor::TAdic(BaseField::Rationals) => {
                let $k = RationalFunctions::new(Rationals);
                $body
            }
        }
    };
}

pub fn run(scenario: &Scenario) -> Result<Report, LabError> {
    match &scenario.kind {
        ScenarioKind::Chain(chain) => with_field!(chain.ring, k => run_chain_in(&k, &scenario.name, chain)),
        ScenarioKind::Ostrowski(ostrowski) => {
            let (checks, outcome, failure) = run_ostrowski(ostrowski);
            Ok(assemble(&scenario.name, "ostrowski", ostrowski_inputs_json(ostrowski), checks, outcome, failure))
        }
    }
}

/// Effective precision: explicit flag, then the environment, then the
/// scenario's own value.
pub fn resolve_precision(flag: Option<u32>) -> Result<Option<u32>, ConfigError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|p| *p >= 1)
            .map(Some)
            .ok_or_else(|| ConfigError::new(PRECISION_ENV, format!("expected a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// Outcome of the recomputation.
    pub outcome: Outcome,
    /// Top-level report fields whose recorded content differs from the
    /// recomputation.
    pub mismatches: Vec<String>,
}

impl Verification {
    pub fn exit_code(&self) -> i32 {
        if self.mismatches.is_empty() {
            self.outcome.exit_code()
        } else {
            Outcome::Fail.exit_code()
        }
    }
}

fn field<'a>(v: &'a Value, path: &str) -> Result<&'a Value, ConfigError> {
    let mut cur = v;
    for key in path.split('.') {
        cur = cur.get(key).ok_or_else(|| ConfigError::new(path, "missing field"))?;
    }
    Ok(cur)
}

fn chain_inputs_from_report<K: ScenarioField>(k: &K, inputs: &Value) -> Result<ChainInputs<K>, ConfigError> {
    let get = |key: &str| field(inputs, key).map_err(|e| ConfigError::new(format!("inputs.{key}"), e.message));
    let err = |key: &'static str| move |e: String| ConfigError::new(format!("inputs.{key}"), e);
    let array = |key: &str| -> Result<&Vec<Value>, ConfigError> {
        get(key)?.as_array().ok_or_else(|| ConfigError::new(format!("inputs.{key}"), "expected an array"))
    };
    let h = k.decode_poly(get("h")?).map_err(err("h"))?;
    let elements = array("prefix")?.iter().map(|v| k.decode(v)).collect::<Result<Vec<_>, _>>().map_err(err("prefix"))?;
    let x = k.decode_digits(get("x")?).map_err(err("x"))?;
    let precision = get("x_precision")?
        .as_u64()
        .and_then(|p| u32::try_from(p).ok())
        .ok_or_else(|| ConfigError::new("inputs.x_precision", "expected a precision"))?;
    let g_list = array("g_list")?.iter().map(|g| k.decode_poly(g)).collect::<Result<Vec<_>, _>>().map_err(err("g_list"))?;
    let ka_index = get("ka_index")?.as_u64().ok_or_else(|| ConfigError::new("inputs.ka_index", "expected an index"))? as usize;
    let stage_indices = array("stage_indices")?
        .iter()
        .map(|v| v.as_u64().map(|i| i as usize))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ConfigError::new("inputs.stage_indices", "expected indices"))?;
    let checks = array("checks")?
        .iter()
        .map(|v| Check::ALL.into_iter().find(|c| Some(c.name()) == v.as_str()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ConfigError::new("inputs.checks", "unknown check"))?;
    Ok(ChainInputs { h, elements, x, precision, g_list, ka_index, stage_indices, checks })
}

/// Recomputes a report from its recorded inputs and compares it field by
/// field.
pub fn verify_report(text: &str) -> Result<Verification, LabError> {
    let recorded: Value =
        serde_json::from_str(text).map_err(|e| ConfigError::new("<report>", format!("not JSON: {e}")))?;
    let name = field(&recorded, "scenario")?.as_str().ok_or_else(|| ConfigError::new("scenario", "expected a string"))?;
    let inputs = field(&recorded, "inputs")?;
    let recomputed = match field(&recorded, "kind")?.as_str() {
        Some("chain") => {
            let ring: RingDescriptor = field(inputs, "ring")?
                .as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| ConfigError::new("inputs.ring", "expected a ring descriptor"))?;
            with_field!(ring, k => chain_report(&k, name, &chain_inputs_from_report(&k, inputs)?))
        }
        Some("ostrowski") => {
            let toml_like = json!({
                "name": name,
                "kind": "ostrowski",
                "group": field(inputs, "group")?,
                "betas": field(inputs, "betas")?,
                "ts": field(inputs, "ts")?,
                "gammas": field(inputs, "gammas")?,
            });
            let source = toml::to_string(&toml_like).map_err(|e| ConfigError::new("inputs", e.to_string()))?;
            run(&Scenario::parse(&source)?)?
        }
        _ => return Err(ConfigError::new("kind", "expected \"chain\" or \"ostrowski\"").into()),
    };
    let mismatches = ["scenario", "kind", "inputs", "checks", "verdict", "failure"]
        .into_iter()
        .filter(|key| recorded.get(key) != recomputed.body.get(key))
        .map(str::to_string)
        .collect();
    Ok(Verification { outcome: recomputed.outcome, mismatches })
}
