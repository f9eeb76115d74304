use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::codec::{encode_rational, ScenarioField};
use super::scenario::{ChainScenario, Check, ConfigError, OstrowskiScenario, PrefixSource};
use crate::ci_stages::{
    build_stage, cocycle_holds, compose_chain_link, transition, AlgebraPresentation, LiftRecord, Outcome,
    StageError, StagePresentation, TransitionMap,
};
use crate::ordered_values::{ostrowski_select, Extended, GroupElement, ValueError};
use crate::poly_calc::Poly;
use crate::pseudo_seq::{is_pseudo_limit, ka_decompose, kap1_check, validate_prefix, PseudoLimit, PseudoPrefix};
use crate::valued_arith::{hensel_lift, CertifiedValue, Completion, Ring, ValuedField};

type CElem<K> = <<K as ValuedField>::Completion as Ring>::Elem;

/// Deepest expansion searched for nonzero terms of a lifted root.
const MAX_PREFIX_DEPTH: u32 = 4096;

pub(crate) fn completion_cap(precision: u32) -> u32 {
    precision.saturating_mul(2).saturating_add(64)
}

pub(crate) fn ext(v: Extended<i64>) -> Value {
    match v {
        Extended::Finite(n) => json!(n),
        Extended::Infinity => json!("inf"),
    }
}

pub(crate) fn cert(v: &CertifiedValue) -> Value {
    match v {
        CertifiedValue::Exactly(e) => json!({ "exactly": ext(*e) }),
        CertifiedValue::AtLeast(k) => json!({ "at_least": k }),
    }
}

/// Everything the checks consume, after generation and decoding.
pub(crate) struct ChainInputs<K: ScenarioField> {
    pub h: Poly<K::Elem>,
    pub elements: Vec<K::Elem>,
    pub x: CElem<K>,
    pub precision: u32,
    pub g_list: Vec<Poly<K::Elem>>,
    pub ka_index: usize,
    pub stage_indices: Vec<usize>,
    pub checks: Vec<Check>,
}

impl<K: ScenarioField> ChainInputs<K> {
    pub fn from_scenario(k: &K, s: &ChainScenario) -> Result<Self, ConfigError> {
        let poly = |v: &Value, path: &str| k.decode_poly(v).map_err(|e| ConfigError::new(path, e));
        let h = poly(&s.h, "h")?;
        let elements = match &s.prefix {
            PrefixSource::Literal(items) => items
                .iter()
                .enumerate()
                .map(|(idx, v)| k.decode(v).map_err(|e| ConfigError::new(format!("prefix.literal[{idx}]"), e)))
                .collect::<Result<Vec<_>, _>>()?,
            PrefixSource::Hensel { poly: f, root0, length } => {
                let f = poly(f, "prefix.hensel.poly")?;
                let r = k.decode_residue(root0).map_err(|e| ConfigError::new("prefix.hensel.root0", e))?;
                hensel_prefix(k, &f, &r, *length)?
            }
        };
        let r = k.decode_residue(&s.root0).map_err(|e| ConfigError::new("root0", e))?;
        let x = hensel_lift(k, &h, &r, s.x_precision).map_err(|e| ConfigError::new("root0", e.to_string()))?;
        let g_list = s
            .g_list
            .iter()
            .enumerate()
            .map(|(idx, g)| poly(g, &format!("g_list[{idx}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let stage_indices = s.stage_indices.clone().unwrap_or_else(|| (0..elements.len().saturating_sub(1)).collect());
        Ok(ChainInputs {
            h,
            elements,
            x,
            precision: s.x_precision,
            g_list,
            ka_index: s.ka_index,
            stage_indices,
            checks: s.checks.clone(),
        })
    }

    pub fn to_json(&self, k: &K) -> Value {
        let c = k.completion(completion_cap(self.precision));
        json!({
            "h": k.encode_poly(&self.h),
            "prefix": self.elements.iter().map(|v| k.encode(v)).collect::<Vec<_>>(),
            "x": k.encode_digits(&c, &self.x),
            "x_precision": self.precision,
            "g_list": self.g_list.iter().map(|g| k.encode_poly(g)).collect::<Vec<_>>(),
            "ka_index": self.ka_index,
            "stage_indices": self.stage_indices,
            "checks": self.checks.iter().map(|c| c.name()).collect::<Vec<_>>(),
        })
    }
}

/// `v_i` is the sum of the first `i + 1` nonzero terms of the root of `f`
/// lifting `root0`.
pub fn hensel_prefix<K: ValuedField>(
    k: &K,
    f: &Poly<K::Elem>,
    root0: &<K::Residue as Ring>::Elem,
    length: usize,
) -> Result<Vec<K::Elem>, ConfigError> {
    let mut depth = (2 * length as u32).max(32);
    loop {
        let x = hensel_lift(k, f, root0, depth).map_err(|e| ConfigError::new("prefix.hensel.root0", e.to_string()))?;
        let c = k.completion(depth);
        let positions: Vec<u32> = c
            .digits(&x)
            .iter()
            .enumerate()
            .filter(|(_, d)| !c.digit_is_zero(d))
            .map(|(i, _)| i as u32)
            .take(length)
            .collect();
        if positions.len() == length {
            return Ok(positions.iter().map(|&p| k.truncation(&c.truncate(&x, p + 1))).collect());
        }
        if depth >= MAX_PREFIX_DEPTH {
            return Err(ConfigError::new(
                "prefix.length",
                format!("the root has only {} nonzero terms below degree {depth}", positions.len()),
            ));
        }
        depth = (depth * 2).min(MAX_PREFIX_DEPTH);
    }
}

pub(crate) struct CheckResults {
    pub sections: Map<String, Value>,
    pub outcome: Outcome,
    pub failure: Value,
}

struct Failure {
    body: Map<String, Value>,
    error: StageError,
}

impl Failure {
    fn new(error: impl Into<StageError>) -> Self {
        Failure { body: Map::new(), error: error.into() }
    }
}

fn outcome_of(e: &StageError) -> Outcome {
    if e.is_indeterminate() {
        Outcome::Indeterminate
    } else {
        Outcome::Fail
    }
}

struct ChainState<K: ScenarioField> {
    prefix: Option<PseudoPrefix<K::Elem>>,
    limit: Option<PseudoLimit<K>>,
    stages: Vec<StagePresentation<K>>,
    transitions: BTreeMap<(usize, usize), TransitionMap<K>>,
}

/// Runs the requested checks in dependency order. A check whose
/// prerequisite did not pass is skipped.
pub(crate) fn run_checks<K: ScenarioField>(k: &K, inp: &ChainInputs<K>) -> CheckResults {
    let mut state = ChainState::<K> { prefix: None, limit: None, stages: vec![], transitions: BTreeMap::new() };
    let mut sections = Map::new();
    let mut passed: Vec<Check> = vec![];
    let mut outcome = Outcome::Pass;
    let mut failure = Value::Null;
    for &check in &inp.checks {
        if check.prerequisite().is_some_and(|pre| !passed.contains(&pre)) {
            sections.insert(check.name().into(), json!({ "status": "SKIPPED" }));
            continue;
        }
        let result = match check {
            Check::Validate => check_validate(k, inp, &mut state),
            Check::Kap1 => check_kap1(k, inp, &state),
            Check::Ka => check_ka(k, inp, &state),
            Check::Stages => check_stages(k, inp, &mut state),
            Check::Transitions => check_transitions(k, &mut state),
            Check::Compose => check_compose(k, &state),
        };
        let body = match result {
            Ok(mut body) => {
                passed.push(check);
                body.insert("status".into(), json!("PASS"));
                body
            }
            Err(Failure { mut body, error }) => {
                let status = outcome_of(&error);
                outcome = outcome.max(status);
                body.insert("status".into(), json!(status.to_string()));
                body.insert("witness".into(), json!(error.to_string()));
                if failure.is_null() {
                    failure = json!({ "check": check.name(), "status": status.to_string(), "witness": error.to_string() });
                }
                body
            }
        };
        sections.insert(check.name().into(), Value::Object(body));
    }
    CheckResults { sections, outcome, failure }
}

fn check_validate<K: ScenarioField>(
    k: &K,
    inp: &ChainInputs<K>,
    state: &mut ChainState<K>,
) -> Result<Map<String, Value>, Failure> {
    let prefix = validate_prefix(k, inp.elements.clone()).map_err(Failure::new)?;
    let mut body = Map::new();
    body.insert("breadths".into(), json!(prefix.breadths()));
    let c = k.completion(completion_cap(inp.precision));
    let limit_values = is_pseudo_limit(k, &c, &inp.x, &prefix).map_err(|e| Failure { body: body.clone(), error: e.into() })?;
    body.insert("limit_values".into(), Value::Array(limit_values.values.iter().map(cert).collect()));
    state.prefix = Some(prefix.clone());
    let limit = PseudoLimit::new(k, prefix, c, inp.x.clone()).map_err(|e| Failure { body: body.clone(), error: e.into() })?;
    state.limit = Some(limit);
    Ok(body)
}

fn check_kap1<K: ScenarioField>(k: &K, inp: &ChainInputs<K>, state: &ChainState<K>) -> Result<Map<String, Value>, Failure> {
    let prefix = state.prefix.as_ref().expect("validated");
    let values = kap1_check(k, &inp.h, prefix).map_err(Failure::new)?;
    let mut body = Map::new();
    body.insert("values".into(), Value::Array(values.into_iter().map(ext).collect()));
    Ok(body)
}

fn check_ka<K: ScenarioField>(k: &K, inp: &ChainInputs<K>, state: &ChainState<K>) -> Result<Map<String, Value>, Failure> {
    let limit = state.limit.as_ref().expect("validated");
    let c = limit.completion();
    let mut entries = vec![];
    let mut first_error = None;
    for g in &inp.g_list {
        match ka_decompose(k, g, &inp.h, limit, inp.ka_index) {
            Ok(dec) => entries.push(json!({
                "g": k.encode_poly(g),
                "status": "PASS",
                "i_used": dec.i_used,
                "d": k.encode(&dec.d),
                "u_coeffs": dec.u_coeffs.iter().map(|e| k.encode(e)).collect::<Vec<_>>(),
                "term_values": dec.term_values.iter().copied().map(ext).collect::<Vec<_>>(),
                "val_u": cert(&c.val(&dec.u)),
                "agreement": cert(&dec.agreement),
            })),
            Err(e) => {
                let e = StageError::from(e);
                entries.push(json!({
                    "g": k.encode_poly(g),
                    "status": outcome_of(&e).to_string(),
                    "witness": e.to_string(),
                }));
                let worse = first_error.as_ref().is_none_or(|f: &StageError| outcome_of(&e) < outcome_of(f));
                if worse {
                    first_error = Some(e);
                }
            }
        }
    }
    let mut body = Map::new();
    body.insert("index".into(), json!(inp.ka_index));
    body.insert("decompositions".into(), Value::Array(entries));
    match first_error {
        None => Ok(body),
        Some(error) => Err(Failure { body, error }),
    }
}

fn check_stages<K: ScenarioField>(
    k: &K,
    inp: &ChainInputs<K>,
    state: &mut ChainState<K>,
) -> Result<Map<String, Value>, Failure> {
    let limit = state.limit.as_ref().expect("validated");
    let c = limit.completion();
    let mut body = Map::new();
    if inp.stage_indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::new(StageError::IndexOrder(inp.stage_indices.clone())));
    }
    let mut entries = vec![];
    for &i in &inp.stage_indices {
        match build_stage(k, limit, &inp.h, i) {
            Ok(s) => {
                entries.push(json!({
                    "i": s.i,
                    "g": k.encode_poly(&s.g),
                    "u": k.encode(&s.u),
                    "content": ext(s.content),
                    "h_i": k.encode_poly(&s.h_i),
                    "x_i": k.encode_digits(c, &s.x_i),
                    "identity": cert(&s.identity),
                    "residual": cert(&s.residual),
                }));
                state.stages.push(s);
            }
            Err(error) => {
                body.insert("stages".into(), Value::Array(entries));
                return Err(Failure { body, error });
            }
        }
    }
    body.insert("stages".into(), Value::Array(entries));
    Ok(body)
}

fn transition_json<K: ScenarioField>(k: &K, t: &TransitionMap<K>) -> Value {
    json!({
        "i": t.i,
        "j": t.j,
        "a": k.encode(&t.a),
        "b": k.encode(&t.b),
        "val_a": ext(t.val_a),
        "val_b": ext(t.val_b),
        "c": k.encode(&t.c),
        "agreement": cert(&t.agreement),
    })
}

/// Transitions between every pair of built stages, and the cocycle
/// condition on every triple.
fn check_transitions<K: ScenarioField>(k: &K, state: &mut ChainState<K>) -> Result<Map<String, Value>, Failure> {
    let limit = state.limit.as_ref().expect("validated");
    let stages = &state.stages;
    for a in 0..stages.len() {
        for b in a + 1..stages.len() {
            let t = transition(k, limit, &stages[a], &stages[b]).map_err(Failure::new)?;
            state.transitions.insert((stages[a].i, stages[b].i), t);
        }
    }
    let mut triples = 0usize;
    for a in 0..stages.len() {
        for b in a + 1..stages.len() {
            for c in b + 1..stages.len() {
                let (i, j, l) = (stages[a].i, stages[b].i, stages[c].i);
                let t = &state.transitions;
                if !cocycle_holds(k, &t[&(i, j)], &t[&(j, l)], &t[&(i, l)]) {
                    return Err(Failure::new(StageError::Cocycle(i, j, l)));
                }
                triples += 1;
            }
        }
    }
    let consecutive: Vec<Value> =
        stages.windows(2).map(|w| transition_json(k, &state.transitions[&(w[0].i, w[1].i)])).collect();
    let mut body = Map::new();
    body.insert("transitions".into(), Value::Array(consecutive));
    body.insert("pairs_checked".into(), json!(state.transitions.len()));
    body.insert("cocycle_triples".into(), json!(triples));
    Ok(body)
}

pub(crate) fn presentation_json<K: ScenarioField>(k: &K, p: &AlgebraPresentation<K::Elem>) -> Value {
    let relations: Vec<Value> = p
        .relations
        .iter()
        .map(|r| {
            let terms: Vec<Value> =
                r.poly.terms().iter().map(|(e, c)| json!({ "exponents": e, "coeff": k.encode(c) })).collect();
            let lift = match &r.lift {
                LiftRecord::Original => Value::Null,
                LiftRecord::Lifted { from, relation } => json!({ "from": from, "relation": relation }),
            };
            json!({ "pivot": p.variables[r.pivot], "lift": lift, "terms": terms })
        })
        .collect();
    json!({
        "name": p.name,
        "base": p.base,
        "variables": p.variables,
        "relations": relations,
    })
}

fn check_compose<K: ScenarioField>(k: &K, state: &ChainState<K>) -> Result<Map<String, Value>, Failure> {
    let limit = state.limit.as_ref().expect("validated");
    let mut links = vec![];
    for w in state.stages.windows(2) {
        let t = &state.transitions[&(w[0].i, w[1].i)];
        let (p, worst) = compose_chain_link(k, limit, &w[0], t, &w[1]).map_err(Failure::new)?;
        if worst.exact().is_some() {
            return Err(Failure::new(StageError::TransitionMismatch { i: w[0].i, j: w[1].i, found: worst }));
        }
        links.push(json!({
            "i": w[0].i,
            "j": w[1].i,
            "presentation": presentation_json(k, &p),
            "relation_value": cert(&worst),
        }));
    }
    let mut body = Map::new();
    body.insert("links".into(), Value::Array(links));
    Ok(body)
}

/// Direct enumeration: the first index from which every pair of lines
/// `beta_i + t_i gamma_s` is ordered by slope, and the index of the smallest
/// value at the last gamma. `None` if the last gamma is not yet ordered.
pub fn brute_force_select(
    betas: &[GroupElement],
    ts: &[i64],
    gammas: &[GroupElement],
) -> Result<Option<(usize, usize)>, ValueError> {
    let mut ordered = Vec::with_capacity(gammas.len());
    let mut last_values = vec![];
    for gamma in gammas {
        let values = betas
            .iter()
            .zip(ts)
            .map(|(b, t)| b.checked_add(&gamma.scalar_mul(*t)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut ok = true;
        for a in 0..values.len() {
            for b in 0..values.len() {
                if ts[a] < ts[b] && values[a].compare(&values[b])? != std::cmp::Ordering::Less {
                    ok = false;
                }
            }
        }
        ordered.push(ok);
        last_values = values;
    }
    if !ordered.last().copied().unwrap_or(false) {
        return Ok(None);
    }
    let nu = ordered.iter().rposition(|ok| !ok).map_or(0, |p| p + 1);
    let mut r = 0;
    for (idx, v) in last_values.iter().enumerate() {
        if v.compare(&last_values[r])? == std::cmp::Ordering::Less {
            r = idx;
        }
    }
    Ok(Some((nu, r)))
}

fn group_json(g: &GroupElement) -> Value {
    match g {
        GroupElement::Int(a) => encode_rational(&num_rational::BigRational::from_integer(a.clone())),
        GroupElement::Rat(q) => encode_rational(q),
        GroupElement::Lex(c) => Value::Array(
            c.iter().map(|a| encode_rational(&num_rational::BigRational::from_integer(a.clone()))).collect(),
        ),
    }
}

pub(crate) fn ostrowski_inputs_json(s: &OstrowskiScenario) -> Value {
    json!({
        "group": s.group.to_string(),
        "betas": s.betas.iter().map(group_json).collect::<Vec<_>>(),
        "ts": s.ts,
        "gammas": s.gammas.iter().map(group_json).collect::<Vec<_>>(),
    })
}

/// Solver certificate, oracle answer and the resulting outcome.
pub(crate) fn run_ostrowski(s: &OstrowskiScenario) -> (Map<String, Value>, Outcome, Value) {
    let mut sections = Map::new();
    let solver = ostrowski_select(&s.betas, &s.ts, &s.gammas);
    let oracle = brute_force_select(&s.betas, &s.ts, &s.gammas);
    let solver_json = match &solver {
        Ok(sel) => json!({ "nu": sel.nu, "r": sel.r }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let oracle_json = match &oracle {
        Ok(Some((nu, r))) => json!({ "nu": nu, "r": r }),
        Ok(None) => json!({ "error": "prefix too short" }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let (outcome, failure) = match (&solver, &oracle) {
        (Ok(sel), Ok(Some((nu, r)))) if (sel.nu, sel.r) == (*nu, *r) => (Outcome::Pass, Value::Null),
        (Err(ValueError::PrefixTooShort(..)), Ok(None)) => (
            Outcome::Indeterminate,
            json!({ "check": "ostrowski", "status": "INDETERMINATE", "witness": "gammas end before every pair is ordered" }),
        ),
        _ => (
            Outcome::Fail,
            json!({ "check": "ostrowski", "status": "FAIL", "witness": format!("solver {solver_json}, enumeration {oracle_json}") }),
        ),
    };
    sections.insert(
        "ostrowski".into(),
        json!({ "certificate": solver_json, "brute_force": oracle_json, "status": outcome.to_string() }),
    );
    (sections, outcome, failure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valued_arith::{PAdicRationals, PrimeField, RationalFunctions};
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn hensel_prefix_partial_sums() {
        let k = PAdicRationals::new(7);
        let f = Poly::new(&k, vec![q(-2), q(0), q(1)]);
        let v = hensel_prefix(&k, &f, &3, 4).unwrap();
        assert_eq!(v, vec![q(3), q(10), q(108), q(2166)]);

        let ft = RationalFunctions::new(PrimeField::new(2));
        let t = ft.t();
        let f = Poly::new(&ft, vec![t.clone(), ft.one(), ft.one()]);
        let v = hensel_prefix(&ft, &f, &0, 3).unwrap();
        assert_eq!(v[2], ft.add(&ft.add(&t, &ft.pow(&t, 2)), &ft.pow(&t, 4)));

        // Y - 5 has the root 5, with a single nonzero digit
        let f = Poly::new(&k, vec![q(-5), q(1)]);
        assert_eq!(hensel_prefix(&k, &f, &5, 2).unwrap_err().path, "prefix.length");
    }

    #[test]
    fn brute_force_examples() {
        let ints = |v: &[i64]| v.iter().map(|&x| GroupElement::int(x)).collect::<Vec<_>>();
        assert_eq!(brute_force_select(&ints(&[5, 0]), &[1, 3], &ints(&[1, 2, 3, 4])).unwrap(), Some((2, 0)));
        assert_eq!(brute_force_select(&ints(&[7]), &[2], &ints(&[1, 2])).unwrap(), Some((0, 0)));
        assert_eq!(brute_force_select(&ints(&[5, 0]), &[1, 3], &ints(&[1, 2])).unwrap(), None);
        let lex = |v: &[[i64; 2]]| v.iter().map(|c| GroupElement::lex(c.iter().copied())).collect::<Vec<_>>();
        let sel = brute_force_select(&lex(&[[0, 0], [0, 10]]), &[2, 1], &lex(&[[1, 0], [2, 0], [3, 0]])).unwrap();
        assert_eq!(sel, Some((0, 1)));
    }
}
