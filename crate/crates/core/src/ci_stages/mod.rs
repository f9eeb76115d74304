//! Stage algebras `V[X_i]/(h_i)` attached to a pseudo limit `x` of a prefix,
//! the transition maps `X_i -> a + b X_j` between them, and finite chain
//! certificates.

mod presentation;

pub use presentation::{
    compose_presentations, AlgebraPresentation, LiftRecord, MultiPoly, PresentationError, Relation,
};

use std::fmt;

use thiserror::Error;

use crate::ordered_values::Extended;
use crate::poly_calc::{compose_linear, content, eval_approx, primitive_part, Poly, PolyError, PolyRing};
use crate::pseudo_seq::{kap1_check, validate_prefix, PseudoLimit, SeqError};
use crate::valued_arith::{ArithError, CertifiedValue, Completion, Ring, ValuedField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StageError {
    #[error("stage {i}: g_i(x_i) and h(x) differ at value {found}")]
    StageIdentity { i: usize, found: CertifiedValue },
    #[error("stage {i}: h_i(x_i) has value {found}, x is not a root of h")]
    ResidualNotCertified { i: usize, found: CertifiedValue },
    #[error("transition {i}->{j}: val(a) = {val_a}, val(b) = {val_b}, expected 0 and {expected}")]
    ValueCertificateFailure { i: usize, j: usize, val_a: Extended<i64>, val_b: Extended<i64>, expected: i64 },
    #[error("transition {i}->{j}: x_i and a + b x_j differ at value {found}")]
    TransitionMismatch { i: usize, j: usize, found: CertifiedValue },
    #[error("transition {i}->{j}: h_i(a + bX) is not a constant multiple of h_j")]
    NotDivisible { i: usize, j: usize },
    #[error("stage indices must be strictly increasing: {0:?}")]
    IndexOrder(Vec<usize>),
    #[error("cocycle fails for ({0}, {1}, {2})")]
    Cocycle(usize, usize, usize),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

impl From<ArithError> for StageError {
    fn from(e: ArithError) -> Self {
        StageError::Seq(SeqError::Arith(e))
    }
}

impl StageError {
    pub fn is_indeterminate(&self) -> bool {
        match self {
            StageError::Seq(e) => e.is_indeterminate(),
            StageError::Poly(PolyError::Arith(ArithError::InsufficientPrecision(_))) => true,
            StageError::Presentation(PresentationError::Arith(ArithError::InsufficientPrecision(_))) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Pass,
    Fail,
    Indeterminate,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Indeterminate => 2,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Indeterminate => "INDETERMINATE",
        })
    }
}

type CElem<K> = <<K as ValuedField>::Completion as Ring>::Elem;

/// `g_i = h(v_i + (v_{i+1} - v_i) X) = u h_i` with `h_i` primitive, and the
/// root `x_i = (x - v_i)/(v_{i+1} - v_i)` of `h_i`.
#[derive(Debug, Clone)]
pub struct StagePresentation<K: ValuedField> {
    pub i: usize,
    pub g: Poly<K::Elem>,
    pub u: K::Elem,
    pub content: Extended<i64>,
    pub h_i: Poly<K::Elem>,
    pub x_i: CElem<K>,
    /// `val(g_i(x_i) - h(x))`.
    pub identity: CertifiedValue,
    /// `val(h_i(x_i))`.
    pub residual: CertifiedValue,
}

pub fn build_stage<K: ValuedField>(
    k: &K,
    limit: &PseudoLimit<K>,
    h: &Poly<K::Elem>,
    i: usize,
) -> Result<StagePresentation<K>, StageError> {
    let x_i = limit.normalized(k, i)?;
    let v = limit.prefix().elements();
    let g = compose_linear(k, h, &v[i], &k.sub(&v[i + 1], &v[i]));
    let (u, h_i) = primitive_part(k, &g)?;
    debug_assert_eq!(content(k, &h_i), Extended::Finite(0));
    debug_assert_eq!(h_i.degree(), h.degree());
    let c = limit.completion();
    let gx = eval_approx(k, c, &g, &x_i)?;
    let hx = eval_approx(k, c, h, limit.x())?;
    let identity = c.val_diff(&gx, &hx);
    if identity.exact().is_some() {
        return Err(StageError::StageIdentity { i, found: identity });
    }
    let residual = c.val(&eval_approx(k, c, &h_i, &x_i)?);
    if residual.exact().is_some() {
        return Err(StageError::ResidualNotCertified { i, found: residual });
    }
    Ok(StagePresentation { i, content: k.val(&u), g, u, h_i, x_i, identity, residual })
}

/// `x_i = a + b x_j` with `a` a unit and `b` in the maximal ideal, and
/// `h_i(a + bX) = c h_j(X)` over the field.
#[derive(Debug, Clone)]
pub struct TransitionMap<K: ValuedField> {
    pub i: usize,
    pub j: usize,
    pub a: K::Elem,
    pub b: K::Elem,
    pub val_a: Extended<i64>,
    pub val_b: Extended<i64>,
    /// The constant `c` of the divisibility check.
    pub c: K::Elem,
    /// `val(x_i - (a + b x_j))`.
    pub agreement: CertifiedValue,
}

pub fn transition<K: ValuedField>(
    k: &K,
    limit: &PseudoLimit<K>,
    si: &StagePresentation<K>,
    sj: &StagePresentation<K>,
) -> Result<TransitionMap<K>, StageError> {
    let (i, j) = (si.i, sj.i);
    if i >= j {
        return Err(StageError::IndexOrder(vec![i, j]));
    }
    let v = limit.prefix().elements();
    let gammas = limit.prefix().breadths();
    let step = k.sub(&v[i + 1], &v[i]);
    let a = k.div(&k.sub(&v[j], &v[i]), &step).expect("breadths are finite");
    let b = k.div(&k.sub(&v[j + 1], &v[j]), &step).expect("breadths are finite");
    let (val_a, val_b) = (k.val(&a), k.val(&b));
    let expected = gammas[j] - gammas[i];
    if val_a != Extended::Finite(0) || val_b != Extended::Finite(expected) || expected <= 0 {
        return Err(StageError::ValueCertificateFailure { i, j, val_a, val_b, expected });
    }
    let comp = limit.completion();
    let image = comp.add(&k.embed(comp, &a)?, &comp.mul(&k.embed(comp, &b)?, &sj.x_i));
    let agreement = comp.val_diff(&si.x_i, &image);
    if agreement.exact().is_some() {
        return Err(StageError::TransitionMismatch { i, j, found: agreement });
    }
    let substituted = compose_linear(k, &si.h_i, &a, &b);
    let lead_j = sj.h_i.leading().expect("stage relations are nonzero");
    let c = k.div(substituted.leading().expect("b is nonzero"), lead_j).expect("nonzero leading coefficient");
    let polys = PolyRing::new(k.clone());
    if substituted != polys.scale(&c, &sj.h_i) {
        return Err(StageError::NotDivisible { i, j });
    }
    Ok(TransitionMap { i, j, a, b, val_a, val_b, c, agreement })
}

/// `(a_ij, b_ij)` followed by `(a_jk, b_jk)` equals `(a_ik, b_ik)`.
pub fn cocycle_holds<K: ValuedField>(
    k: &K,
    ij: &TransitionMap<K>,
    jk: &TransitionMap<K>,
    ik: &TransitionMap<K>,
) -> bool {
    ij.j == jk.i
        && (ij.i, jk.j) == (ik.i, ik.j)
        && k.add(&ij.a, &k.mul(&ij.b, &jk.a)) == ik.a
        && k.mul(&ij.b, &jk.b) == ik.b
}

fn variable_name(i: usize) -> String {
    format!("X_{i}")
}

/// `V[X_i]/(h_i)`.
pub fn stage_presentation<K: ValuedField>(k: &K, stage: &StagePresentation<K>) -> AlgebraPresentation<K::Elem> {
    AlgebraPresentation {
        name: format!("V[X_{}]/(h_{})", stage.i, stage.i),
        base: "V".into(),
        base_variables: vec![],
        variables: vec![variable_name(stage.i)],
        relations: vec![Relation {
            poly: MultiPoly::from_univariate(k, &stage.h_i, 1, 0),
            pivot: 0,
            lift: LiftRecord::Original,
        }],
    }
}

/// `B[X_j]/(X_i - a - b X_j)` over `B = V[X_i]/(h_i)`.
pub fn transition_presentation<K: ValuedField>(k: &K, t: &TransitionMap<K>) -> AlgebraPresentation<K::Elem> {
    let terms = [(vec![1, 0], k.one()), (vec![0, 0], k.neg(&t.a)), (vec![0, 1], k.neg(&t.b))];
    AlgebraPresentation {
        name: format!("V[X_{}]/(h_{})[X_{}]", t.i, t.i, t.j),
        base: format!("V[X_{}]/(h_{})", t.i, t.i),
        base_variables: vec![variable_name(t.i)],
        variables: vec![variable_name(t.j)],
        relations: vec![Relation { poly: MultiPoly::from_terms(k, 2, terms), pivot: 0, lift: LiftRecord::Original }],
    }
}

/// Composes `V[X_i]/(h_i)` with the transition to stage `j` and returns the
/// smallest value among the composed relations at `(x_i, x_j)`.
pub fn compose_chain_link<K: ValuedField>(
    k: &K,
    limit: &PseudoLimit<K>,
    si: &StagePresentation<K>,
    t: &TransitionMap<K>,
    sj: &StagePresentation<K>,
) -> Result<(AlgebraPresentation<K::Elem>, CertifiedValue), StageError> {
    let composed = compose_presentations(k, &stage_presentation(k, si), &transition_presentation(k, t))?;
    let c = limit.completion();
    let values = composed.eval_relations(k, c, &[si.x_i.clone(), sj.x_i.clone()])?;
    let worst = values.iter().map(|r| c.val(r)).min_by_key(|v| v.lower_bound()).expect("two relations");
    Ok((composed, worst))
}

#[derive(Debug, Clone)]
pub struct ChainCertificate<K: ValuedField> {
    pub indices: Vec<usize>,
    pub kap1: Vec<Extended<i64>>,
    pub stages: Vec<StagePresentation<K>>,
    pub transitions: Vec<TransitionMap<K>>,
    pub cocycle_triples: usize,
    pub outcome: Outcome,
    pub failure: Option<String>,
}

/// Validates the prefix and the limit, builds the stages at `indices`, the
/// transitions between consecutive ones, and checks the cocycle condition on
/// consecutive triples. Stops at the first failure.
pub fn union_report<K: ValuedField>(
    k: &K,
    elements: Vec<K::Elem>,
    h: &Poly<K::Elem>,
    completion: K::Completion,
    x: CElem<K>,
    indices: &[usize],
) -> ChainCertificate<K> {
    let mut cert = ChainCertificate {
        indices: indices.to_vec(),
        kap1: vec![],
        stages: vec![],
        transitions: vec![],
        cocycle_triples: 0,
        outcome: Outcome::Pass,
        failure: None,
    };
    if let Err(e) = fill_chain(k, elements, h, completion, x, &mut cert) {
        cert.outcome = if e.is_indeterminate() { Outcome::Indeterminate } else { Outcome::Fail };
        cert.failure = Some(e.to_string());
    }
    cert
}

fn fill_chain<K: ValuedField>(
    k: &K,
    elements: Vec<K::Elem>,
    h: &Poly<K::Elem>,
    completion: K::Completion,
    x: CElem<K>,
    cert: &mut ChainCertificate<K>,
) -> Result<(), StageError> {
    if cert.indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(StageError::IndexOrder(cert.indices.clone()));
    }
    let prefix = validate_prefix(k, elements)?;
    cert.kap1 = kap1_check(k, h, &prefix)?;
    let limit = PseudoLimit::new(k, prefix, completion, x)?;
    for &i in &cert.indices {
        cert.stages.push(build_stage(k, &limit, h, i)?);
    }
    for w in cert.stages.windows(2) {
        cert.transitions.push(transition(k, &limit, &w[0], &w[1])?);
    }
    for (w, pair) in cert.stages.windows(3).zip(cert.transitions.windows(2)) {
        let ik = transition(k, &limit, &w[0], &w[2])?;
        if !cocycle_holds(k, &pair[0], &pair[1], &ik) {
            return Err(StageError::Cocycle(w[0].i, w[1].i, w[2].i));
        }
        cert.cocycle_triples += 1;
    }
    Ok(())
}
