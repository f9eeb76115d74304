//! Finite prefixes of pseudo-convergent sequences: validation, breadths,
//! pseudo-limit checks, classification of polynomial values and the
//! Taylor-dominance decomposition `g(x) = d * u` with `u` a unit.

use thiserror::Error;

use crate::ordered_values::Extended;
use crate::poly_calc::{eval_approx, hasse_derivatives, Poly, PolyRing};
use crate::valued_arith::{ArithError, CertifiedValue, Completion, Ring, ValuedField};

/// A verdict needs at least this many consecutive stable comparisons.
pub const MIN_STABLE_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("a prefix needs at least 3 elements, got {0}")]
    TooShort(usize),
    #[error("element {index} has negative value {value} and is not in the valuation ring")]
    NotInValuationRing { index: usize, value: i64 },
    #[error("not pseudo-convergent: witness triple ({0}, {1}, {2})")]
    NotPseudoConvergent(usize, usize, usize),
    #[error("not a pseudo limit: val(w - v_{index}) is {found}, breadth is {expected}")]
    NotPseudoLimit { index: usize, found: CertifiedValue, expected: i64 },
    #[error("index {index} out of range (needs a successor in a prefix of length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("values {values:?} are eventually constant; the scenario contradicts the strict growth it assumes")]
    LemmaViolationCandidate { values: Vec<Extended<i64>> },
    #[error("values {values:?} do not stabilize within the prefix")]
    Undetermined { values: Vec<Extended<i64>> },
    #[error("Taylor term {n} does not dominate at any index from {from} (last tried {last})")]
    DominanceFailure { from: usize, last: usize, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("certificate does not re-verify: {0}")]
    VerificationFailure(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

impl SeqError {
    /// Precision and stabilization problems are not failures of the claims.
    pub fn is_indeterminate(&self) -> bool {
        matches!(
            self,
            SeqError::Undetermined { .. } | SeqError::Arith(ArithError::InsufficientPrecision(_))
        )
    }
}

/// A validated prefix `v_0, ..., v_{N-1}` with its breadths
/// `gamma_i = val(v_{i+1} - v_i)`, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoPrefix<E> {
    elements: Vec<E>,
    breadths: Vec<i64>,
}

impl<E> PseudoPrefix<E> {
    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn breadths(&self) -> &[i64] {
        &self.breadths
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn check_stage_index(&self, i: usize) -> Result<(), SeqError> {
        if i + 1 < self.len() {
            Ok(())
        } else {
            Err(SeqError::IndexOutOfRange { index: i, len: self.len() })
        }
    }
}

/// Checks `val(v_i - v_k) < val(v_j - v_k)` for every triple `i < j < k`.
pub fn validate_prefix<K: ValuedField>(
    k: &K,
    elements: Vec<K::Elem>,
) -> Result<PseudoPrefix<K::Elem>, SeqError> {
    let n = elements.len();
    if n < 3 {
        return Err(SeqError::TooShort(n));
    }
    for (index, v) in elements.iter().enumerate() {
        if let Extended::Finite(value) = k.val(v) {
            if value < 0 {
                return Err(SeqError::NotInValuationRing { index, value });
            }
        }
    }
    let dist: Vec<Vec<Extended<i64>>> = (0..n)
        .map(|a| (0..n).map(|b| k.val(&k.sub(&elements[a], &elements[b]))).collect())
        .collect();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                if dist[i][l] >= dist[j][l] {
                    return Err(SeqError::NotPseudoConvergent(i, j, l));
                }
            }
        }
    }
    let breadths = (0..n - 1)
        .map(|i| match dist[i][i + 1] {
            Extended::Finite(g) => g,
            Extended::Infinity => unreachable!("strict triple inequalities exclude repeats"),
        })
        .collect::<Vec<_>>();
    // Ultrametric consequence: the breadth is the distance to every later element.
    for i in 0..n - 1 {
        if let Some(j) = (i + 1..n).find(|&j| dist[i][j] != Extended::Finite(breadths[i])) {
            return Err(SeqError::NotPseudoConvergent(i, i + 1, j));
        }
    }
    Ok(PseudoPrefix { elements, breadths })
}

/// Outcome of a pseudo-limit test: `val(w - v_i)` for every `i < N - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitCertificate {
    pub values: Vec<CertifiedValue>,
    pub holds: bool,
}

/// Tests `val(w - v_i) = gamma_i` for all `i < N - 1`, for `w` in the completion.
pub fn is_pseudo_limit<K: ValuedField>(
    k: &K,
    c: &K::Completion,
    w: &<K::Completion as Ring>::Elem,
    prefix: &PseudoPrefix<K::Elem>,
) -> Result<LimitCertificate, SeqError> {
    let top = *prefix.breadths.last().expect("validated prefixes have breadths");
    let available = c.precision(w);
    if i64::from(available) <= top {
        return Err(ArithError::InsufficientPrecision(format!(
            "pseudo-limit test needs precision above {top}, element known to {available}"
        ))
        .into());
    }
    let values = prefix.elements[..prefix.len() - 1]
        .iter()
        .map(|v| Ok(c.val(&c.sub(w, &k.embed(c, v)?))))
        .collect::<Result<Vec<_>, ArithError>>()?;
    let holds = values.iter().zip(&prefix.breadths).all(|(v, g)| v.is_exactly(*g));
    Ok(LimitCertificate { values, holds })
}

/// Same test for an exact element of the field.
pub fn is_pseudo_limit_exact<K: ValuedField>(
    k: &K,
    w: &K::Elem,
    prefix: &PseudoPrefix<K::Elem>,
) -> LimitCertificate {
    let values: Vec<CertifiedValue> = prefix.elements[..prefix.len() - 1]
        .iter()
        .map(|v| CertifiedValue::Exactly(k.val(&k.sub(w, v))))
        .collect();
    let holds = values.iter().zip(&prefix.breadths).all(|(v, g)| v.is_exactly(*g));
    LimitCertificate { values, holds }
}

/// A prefix together with a certified pseudo limit `x` in the completion.
#[derive(Debug, Clone)]
pub struct PseudoLimit<K: ValuedField> {
    prefix: PseudoPrefix<K::Elem>,
    completion: K::Completion,
    x: <K::Completion as Ring>::Elem,
}

impl<K: ValuedField> PseudoLimit<K> {
    pub fn new(
        k: &K,
        prefix: PseudoPrefix<K::Elem>,
        completion: K::Completion,
        x: <K::Completion as Ring>::Elem,
    ) -> Result<Self, SeqError> {
        let cert = is_pseudo_limit(k, &completion, &x, &prefix)?;
        if let Some(index) = (0..cert.values.len()).find(|&i| !cert.values[i].is_exactly(prefix.breadths[i])) {
            return Err(SeqError::NotPseudoLimit {
                index,
                found: cert.values[index].clone(),
                expected: prefix.breadths[index],
            });
        }
        Ok(PseudoLimit { prefix, completion, x })
    }

    pub fn prefix(&self) -> &PseudoPrefix<K::Elem> {
        &self.prefix
    }

    pub fn completion(&self) -> &K::Completion {
        &self.completion
    }

    pub fn x(&self) -> &<K::Completion as Ring>::Elem {
        &self.x
    }

    /// `x_i = (x - v_i) / (v_{i+1} - v_i)`, a unit of the completion.
    pub fn normalized(&self, k: &K, i: usize) -> Result<<K::Completion as Ring>::Elem, SeqError> {
        self.prefix.check_stage_index(i)?;
        let c = &self.completion;
        let v = &self.prefix.elements;
        let num = c.sub(&self.x, &k.embed(c, &v[i])?);
        let den = k.embed(c, &k.sub(&v[i + 1], &v[i]))?;
        Ok(c.divide(&num, &den)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Increasing { from: usize },
    EventuallyConstant { value: Extended<i64>, from: usize },
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub values: Vec<Extended<i64>>,
    pub verdict: Verdict,
}

/// Classifies the tail behaviour of `val(f(v_i))` over the prefix.
pub fn classify<K: ValuedField>(k: &K, f: &Poly<K::Elem>, prefix: &PseudoPrefix<K::Elem>) -> Classification {
    let polys = PolyRing::new(k.clone());
    let values: Vec<Extended<i64>> = prefix.elements.iter().map(|v| k.val(&polys.eval(f, v))).collect();
    let verdict = classify_values(&values);
    Classification { values, verdict }
}

fn classify_values(values: &[Extended<i64>]) -> Verdict {
    let n = values.len();
    let tail_start = |pred: &dyn Fn(&Extended<i64>, &Extended<i64>) -> bool| {
        let mut from = n.saturating_sub(1);
        while from > 0 && pred(&values[from - 1], &values[from]) {
            from -= 1;
        }
        from
    };
    let inc = tail_start(&|a, b| a < b);
    if n - 1 - inc >= MIN_STABLE_STEPS {
        return Verdict::Increasing { from: inc };
    }
    let constant = tail_start(&|a, b| a == b);
    if n - 1 - constant >= MIN_STABLE_STEPS {
        return Verdict::EventuallyConstant { value: values[n - 1], from: constant };
    }
    Verdict::Undetermined
}

/// Certifies that `val(h(v_i))` is eventually strictly increasing and
/// returns the value list.
pub fn kap1_check<K: ValuedField>(
    k: &K,
    h: &Poly<K::Elem>,
    prefix: &PseudoPrefix<K::Elem>,
) -> Result<Vec<Extended<i64>>, SeqError> {
    let Classification { values, verdict } = classify(k, h, prefix);
    match verdict {
        Verdict::Increasing { .. } => Ok(values),
        Verdict::EventuallyConstant { .. } => Err(SeqError::LemmaViolationCandidate { values }),
        Verdict::Undetermined => Err(SeqError::Undetermined { values }),
    }
}

/// `g(x) = d * u` with `d = g(v_i)` and `u = 1 + sum_n c_n x_i^n`, each
/// `c_n` in the maximal ideal.
#[derive(Debug, Clone)]
pub struct KaDecomposition<K: ValuedField> {
    pub i_used: usize,
    pub d: K::Elem,
    /// `c_1, ..., c_deg`, exact.
    pub u_coeffs: Vec<K::Elem>,
    pub u: <K::Completion as Ring>::Elem,
    /// Values of the Taylor terms `(D^(n) g)(v_i) (x - v_i)^n`, `n = 0..=deg g`.
    pub term_values: Vec<Extended<i64>>,
    /// `g(x) - d u` vanishes to this precision.
    pub agreement: CertifiedValue,
}

/// Taylor-term values at index `i`, using `val(x - v_i) = gamma_i`.
pub fn taylor_term_values<K: ValuedField>(
    k: &K,
    derivatives: &[Poly<K::Elem>],
    prefix: &PseudoPrefix<K::Elem>,
    i: usize,
) -> Vec<Extended<i64>> {
    let polys = PolyRing::new(k.clone());
    let gamma = prefix.breadths[i];
    derivatives
        .iter()
        .enumerate()
        .map(|(n, d)| k.val(&polys.eval(d, &prefix.elements[i])) + Extended::Finite(n as i64 * gamma))
        .collect()
}

/// The first offending Taylor index, or `None` if term 0 strictly dominates
/// and finite term values are pairwise distinct.
fn dominance_violation(terms: &[Extended<i64>]) -> Option<usize> {
    let lead = terms[0];
    if lead.is_infinite() {
        return Some(0);
    }
    for (n, t) in terms.iter().enumerate().skip(1) {
        if *t <= lead {
            return Some(n);
        }
        if !t.is_infinite() && terms[..n].contains(t) {
            return Some(n);
        }
    }
    None
}

/// Writes `g(x) = d * u` with `val(u) = 0`, choosing the first index `>= i`
/// where the constant Taylor term strictly dominates.
pub fn ka_decompose<K: ValuedField>(
    k: &K,
    g: &Poly<K::Elem>,
    h: &Poly<K::Elem>,
    limit: &PseudoLimit<K>,
    i: usize,
) -> Result<KaDecomposition<K>, SeqError> {
    let prefix = limit.prefix();
    let (Some(dg), Some(dh)) = (g.degree(), h.degree()) else {
        return Err(SeqError::Precondition("g and h must be nonzero".into()));
    };
    if dg >= dh {
        return Err(SeqError::Precondition(format!("deg g = {dg} is not below deg h = {dh}")));
    }
    match classify(k, g, prefix) {
        Classification { verdict: Verdict::EventuallyConstant { .. }, .. } => {}
        Classification { verdict: Verdict::Undetermined, values } => {
            return Err(SeqError::Undetermined { values })
        }
        Classification { values, .. } => {
            return Err(SeqError::Precondition(format!(
                "values of g are not eventually constant: {values:?}"
            )))
        }
    }
    prefix.check_stage_index(i)?;

    let derivatives = hasse_derivatives(k, g);
    let mut chosen = None;
    let mut last_violation = 0;
    for idx in i..prefix.len() - 1 {
        let terms = taylor_term_values(k, &derivatives, prefix, idx);
        match dominance_violation(&terms) {
            None => {
                chosen = Some((idx, terms));
                break;
            }
            Some(n) => last_violation = n,
        }
    }
    let Some((i_used, term_values)) = chosen else {
        return Err(SeqError::DominanceFailure { from: i, last: prefix.len() - 2, n: last_violation });
    };

    let polys = PolyRing::new(k.clone());
    let v = prefix.elements();
    let d = polys.eval(g, &v[i_used]);
    let step = k.sub(&v[i_used + 1], &v[i_used]);
    let d_inv = k.inv(&d).expect("dominant term is finite");
    let mut u_coeffs = Vec::with_capacity(dg);
    let mut step_pow = k.one();
    for der in &derivatives[1..] {
        step_pow = k.mul(&step_pow, &step);
        let coeff = k.mul(&k.mul(&polys.eval(der, &v[i_used]), &step_pow), &d_inv);
        if k.val(&coeff) <= Extended::Finite(0) {
            return Err(SeqError::VerificationFailure(format!(
                "coefficient {coeff:?} of u is not in the maximal ideal"
            )));
        }
        u_coeffs.push(coeff);
    }

    let c = limit.completion();
    let x_i = limit.normalized(k, i_used)?;
    let mut u_poly = vec![k.one()];
    u_poly.extend(u_coeffs.iter().cloned());
    let u = eval_approx(k, c, &Poly::new(k, u_poly), &x_i)?;
    match c.val(&u) {
        v if v.is_exactly(0) => {}
        CertifiedValue::AtLeast(_) => {
            return Err(ArithError::InsufficientPrecision("u is indistinguishable from zero".into()).into())
        }
        other => return Err(SeqError::VerificationFailure(format!("val(u) is {other}, expected 0"))),
    }
    let gx = eval_approx(k, c, g, limit.x())?;
    let du = c.mul(&k.embed(c, &d)?, &u);
    let agreement = c.val_diff(&gx, &du);
    if agreement.exact().is_some() {
        return Err(SeqError::VerificationFailure(format!("g(x) and d*u differ at value {agreement}")));
    }
    Ok(KaDecomposition { i_used, d, u_coeffs, u, term_values, agreement })
}
