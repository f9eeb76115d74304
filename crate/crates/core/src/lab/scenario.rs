//! Scenario files: flat TOML read into typed descriptions.
//!
//! ```toml
//! name = "sqrt2_7adic"
//! ring = "padic:7"
//! h = [-2, 0, 1]
//! root0 = 3
//! x_precision = 16
//! checks = ["validate", "kap1", "ka", "stages", "transitions", "compose"]
//! g_list = [[-3, 1], [0, 1]]
//!
//! [prefix]
//! hensel = { poly = [-2, 0, 1], root0 = 3 }
//! length = 12
//! ```
//!
//! A prefix may instead be given as `literal = [...]`. Scenarios with
//! `kind = "ostrowski"` carry `group`, `betas`, `ts` and `gammas` instead.

use std::fmt;

use num_rational::BigRational;
use serde_json::{Map, Value};
use thiserror::Error;

use super::codec::decode_rational;
use crate::ordered_values::{GroupDescriptor, GroupElement};
use crate::valued_arith::RingDescriptor;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Validate,
    Kap1,
    Ka,
    Stages,
    Transitions,
    Compose,
}

impl Check {
    pub const ALL: [Check; 6] = [Check::Validate, Check::Kap1, Check::Ka, Check::Stages, Check::Transitions, Check::Compose];

    pub fn name(self) -> &'static str {
        match self {
            Check::Validate => "validate",
            Check::Kap1 => "kap1",
            Check::Ka => "ka",
            Check::Stages => "stages",
            Check::Transitions => "transitions",
            Check::Compose => "compose",
        }
    }

    pub fn prerequisite(self) -> Option<Check> {
        match self {
            Check::Validate => None,
            Check::Kap1 | Check::Ka => Some(Check::Validate),
            Check::Stages => Some(Check::Kap1),
            Check::Transitions => Some(Check::Stages),
            Check::Compose => Some(Check::Transitions),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrefixSource {
    Literal(Vec<Value>),
    /// Partial sums of the first `length` nonzero terms of the root of
    /// `poly` lifting `root0`.
    Hensel { poly: Value, root0: Value, length: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainScenario {
    pub ring: RingDescriptor,
    pub h: Value,
    /// Residue-field root of `h` that the pseudo limit `x` lifts.
    pub root0: Value,
    pub x_precision: u32,
    pub prefix: PrefixSource,
    /// Sorted in dependency order.
    pub checks: Vec<Check>,
    pub g_list: Vec<Value>,
    pub ka_index: usize,
    /// Defaults to every index with a successor.
    pub stage_indices: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OstrowskiScenario {
    pub group: GroupDescriptor,
    pub betas: Vec<GroupElement>,
    pub ts: Vec<i64>,
    pub gammas: Vec<GroupElement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    Chain(ChainScenario),
    Ostrowski(OstrowskiScenario),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
}

impl Scenario {
    pub fn parse(source: &str) -> Result<Scenario, ConfigError> {
        let table: toml::Table = toml::from_str(source).map_err(|e| ConfigError::new("<file>", e.message()))?;
        let value = serde_json::to_value(table).map_err(|e| ConfigError::new("<file>", e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(ConfigError::new("<file>", "expected a table"));
        };
        let top = Fields { map: &map, path: String::new() };
        let name = top.string("name")?;
        let kind = match top.opt("kind").map(|_| top.string("kind")).transpose()?.as_deref() {
            None | Some("chain") => ScenarioKind::Chain(parse_chain(&top)?),
            Some("ostrowski") => ScenarioKind::Ostrowski(parse_ostrowski(&top)?),
            Some(other) => return Err(ConfigError::new("kind", format!("unknown kind {other:?}"))),
        };
        Ok(Scenario { name, kind })
    }

    /// Replaces the pseudo-limit precision; no effect on other kinds.
    pub fn with_precision(mut self, precision: u32) -> Self {
        if let ScenarioKind::Chain(c) = &mut self.kind {
            c.x_precision = precision;
        }
        self
    }
}

struct Fields<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Fields<'a> {
    fn path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn only(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        match self.map.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(ConfigError::new(self.path(k), "unknown field")),
            None => Ok(()),
        }
    }

    fn opt(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    fn get(&self, key: &str) -> Result<&'a Value, ConfigError> {
        self.opt(key).ok_or_else(|| ConfigError::new(self.path(key), "missing field"))
    }

    fn string(&self, key: &str) -> Result<String, ConfigError> {
        self.get(key)?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| ConfigError::new(self.path(key), "expected a string"))
    }

    fn uint(&self, key: &str) -> Result<u64, ConfigError> {
        self.get(key)?.as_u64().ok_or_else(|| ConfigError::new(self.path(key), "expected a non-negative integer"))
    }

    fn array(&self, key: &str) -> Result<&'a Vec<Value>, ConfigError> {
        self.get(key)?.as_array().ok_or_else(|| ConfigError::new(self.path(key), "expected an array"))
    }

    fn table(&self, key: &str) -> Result<Fields<'a>, ConfigError> {
        let map = self.get(key)?.as_object().ok_or_else(|| ConfigError::new(self.path(key), "expected a table"))?;
        Ok(Fields { map, path: self.path(key) })
    }
}

fn coefficient_array(fields: &Fields, key: &str) -> Result<Value, ConfigError> {
    let coeffs = fields.array(key)?;
    if coeffs.is_empty() {
        return Err(ConfigError::new(fields.path(key), "empty polynomial"));
    }
    Ok(Value::Array(coeffs.clone()))
}

fn parse_chain(top: &Fields) -> Result<ChainScenario, ConfigError> {
    top.only(&["name", "kind", "ring", "h", "root0", "x_precision", "prefix", "checks", "g_list", "ka_index", "stage_indices"])?;
    let ring: RingDescriptor =
        top.string("ring")?.parse().map_err(|e: crate::valued_arith::ArithError| ConfigError::new("ring", e.to_string()))?;
    let h = coefficient_array(top, "h")?;
    if h.as_array().map_or(0, Vec::len) < 3 {
        return Err(ConfigError::new("h", "deg h must be at least 2"));
    }
    let x_precision = u32::try_from(top.uint("x_precision")?)
        .ok()
        .filter(|p| *p >= 1)
        .ok_or_else(|| ConfigError::new("x_precision", "expected a positive 32-bit integer"))?;

    let prefix_fields = top.table("prefix")?;
    prefix_fields.only(&["literal", "hensel", "length"])?;
    let prefix = match (prefix_fields.opt("literal"), prefix_fields.opt("hensel")) {
        (Some(_), None) => PrefixSource::Literal(prefix_fields.array("literal")?.clone()),
        (None, Some(_)) => {
            let gen = prefix_fields.table("hensel")?;
            gen.only(&["poly", "root0"])?;
            let poly = match gen.opt("poly") {
                Some(_) => coefficient_array(&gen, "poly")?,
                None => h.clone(),
            };
            let length = usize::try_from(prefix_fields.uint("length")?).unwrap_or(usize::MAX);
            PrefixSource::Hensel { poly, root0: gen.get("root0")?.clone(), length }
        }
        _ => return Err(ConfigError::new("prefix", "exactly one of literal or hensel is required")),
    };
    let root0 = match (top.opt("root0"), &prefix) {
        (Some(r), _) => r.clone(),
        (None, PrefixSource::Hensel { poly, root0, .. }) if *poly == h => root0.clone(),
        _ => return Err(ConfigError::new("root0", "missing field")),
    };

    let mut checks = Vec::new();
    match top.opt("checks") {
        None => checks.extend(Check::ALL),
        Some(_) => {
            for (idx, c) in top.array("checks")?.iter().enumerate() {
                let path = format!("checks[{idx}]");
                let name = c.as_str().ok_or_else(|| ConfigError::new(&path, "expected a string"))?;
                let check = Check::ALL
                    .into_iter()
                    .find(|k| k.name() == name)
                    .ok_or_else(|| ConfigError::new(&path, format!("unknown check {name:?}")))?;
                if checks.contains(&check) {
                    return Err(ConfigError::new(&path, format!("duplicate check {name:?}")));
                }
                checks.push(check);
            }
        }
    }
    checks.sort();
    for c in &checks {
        if let Some(pre) = c.prerequisite() {
            if !checks.contains(&pre) {
                return Err(ConfigError::new("checks", format!("{c} requires {pre}")));
            }
        }
    }

    let mut g_list = Vec::new();
    if top.opt("g_list").is_some() {
        for (idx, g) in top.array("g_list")?.iter().enumerate() {
            match g.as_array() {
                Some(a) if !a.is_empty() => g_list.push(g.clone()),
                _ => return Err(ConfigError::new(format!("g_list[{idx}]"), "expected a nonempty coefficient array")),
            }
        }
    }
    let ka_index = match top.opt("ka_index") {
        Some(_) => top.uint("ka_index")? as usize,
        None => 0,
    };
    let stage_indices = match top.opt("stage_indices") {
        None => None,
        Some(_) => Some(
            top.array("stage_indices")?
                .iter()
                .enumerate()
                .map(|(idx, v)| {
                    v.as_u64()
                        .map(|i| i as usize)
                        .ok_or_else(|| ConfigError::new(format!("stage_indices[{idx}]"), "expected an index"))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    Ok(ChainScenario { ring, h, root0, x_precision, prefix, checks, g_list, ka_index, stage_indices })
}

fn group_element(group: GroupDescriptor, v: &Value, path: &str) -> Result<GroupElement, ConfigError> {
    let coords: Vec<BigRational> = match v {
        Value::Array(items) => items.iter().map(decode_rational).collect::<Result<_, _>>(),
        other => decode_rational(other).map(|q| vec![q]),
    }
    .map_err(|e| ConfigError::new(path, e))?;
    GroupElement::from_coords(group, &coords).map_err(|e| ConfigError::new(path, e.to_string()))
}

fn parse_ostrowski(top: &Fields) -> Result<OstrowskiScenario, ConfigError> {
    top.only(&["name", "kind", "group", "betas", "ts", "gammas"])?;
    let group: GroupDescriptor = top.string("group")?.parse().map_err(|e: crate::ordered_values::ValueError| {
        ConfigError::new("group", e.to_string())
    })?;
    let elements = |key: &str| -> Result<Vec<GroupElement>, ConfigError> {
        top.array(key)?
            .iter()
            .enumerate()
            .map(|(idx, v)| group_element(group, v, &format!("{key}[{idx}]")))
            .collect()
    };
    let betas = elements("betas")?;
    let gammas = elements("gammas")?;
    let ts = top
        .array("ts")?
        .iter()
        .enumerate()
        .map(|(idx, v)| v.as_i64().ok_or_else(|| ConfigError::new(format!("ts[{idx}]"), "expected an integer")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OstrowskiScenario { group, betas, ts, gammas })
}
