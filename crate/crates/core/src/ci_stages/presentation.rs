//! Finite presentations `A[X_1, ..., X_m] / (f_1, ..., f_r)` over the
//! valuation ring, with triangular shape standing in for regularity.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ordered_values::Extended;
use crate::poly_calc::Poly;
use crate::valued_arith::{ArithError, Ring, ValuedField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("relation {relation} is not triangular: {reason}")]
    NonTriangular { relation: usize, reason: String },
    #[error("no lift for base generator {0}")]
    LiftMissing(String),
    #[error("inner presentation is over {found}, outer presents {expected}")]
    BaseMismatch { expected: String, found: String },
    #[error("malformed presentation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Sparse polynomial in a fixed number of variables; exponent vectors map
/// to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly<E> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, E>,
}

impl<E: Clone> MultiPoly<E> {
    /// Sums repeated monomials and drops zero coefficients.
    ///
    /// # Panics
    /// If an exponent vector does not have length `nvars`.
    pub fn from_terms<R: Ring<Elem = E>>(
        ring: &R,
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, E)>,
    ) -> Self {
        let mut map: BTreeMap<Vec<u32>, E> = BTreeMap::new();
        for (exp, c) in terms {
            assert_eq!(exp.len(), nvars, "exponent vector length");
            let sum = match map.get(&exp) {
                Some(prev) => ring.add(prev, &c),
                None => c,
            };
            map.insert(exp, sum);
        }
        map.retain(|_, c| !ring.is_zero(c));
        MultiPoly { nvars, terms: map }
    }

    /// `f(X_var)` as a polynomial in `nvars` variables.
    pub fn from_univariate<R: Ring<Elem = E>>(ring: &R, f: &Poly<E>, nvars: usize, var: usize) -> Self {
        let terms = f.coeffs().iter().enumerate().map(|(d, c)| {
            let mut exp = vec![0; nvars];
            exp[var] = d as u32;
            (exp, c.clone())
        });
        Self::from_terms(ring, nvars, terms)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, E> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Coefficient of the top power of `var`, as a polynomial in the others.
    pub fn leading_in<R: Ring<Elem = E>>(&self, ring: &R, var: usize) -> Option<Self> {
        let top = self.degree_in(var)?;
        let terms = self.terms.iter().filter(|(e, _)| e[var] == top).map(|(e, c)| {
            let mut e = e.clone();
            e[var] = 0;
            (e, c.clone())
        });
        Some(Self::from_terms(ring, self.nvars, terms))
    }

    /// The value of a constant polynomial.
    pub fn as_constant<R: Ring<Elem = E>>(&self, ring: &R) -> Option<E> {
        match self.terms.len() {
            0 => Some(ring.zero()),
            1 => self.terms.get(&vec![0; self.nvars]).cloned(),
            _ => None,
        }
    }

    /// Renames variable `v` to `map[v]` in a ring of `nvars` variables.
    pub fn reindex<R: Ring<Elem = E>>(&self, ring: &R, map: &[usize], nvars: usize) -> Self {
        let terms = self.terms.iter().map(|(e, c)| {
            let mut out = vec![0; nvars];
            for (v, d) in e.iter().enumerate() {
                out[map[v]] += d;
            }
            (out, c.clone())
        });
        Self::from_terms(ring, nvars, terms)
    }

    /// Evaluates at a point of the completion; coefficients must lie in the
    /// valuation ring.
    pub fn eval_approx<K: ValuedField<Elem = E>>(
        &self,
        k: &K,
        c: &K::Completion,
        point: &[<K::Completion as Ring>::Elem],
    ) -> Result<<K::Completion as Ring>::Elem, ArithError> {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let mut acc = c.zero();
        for (exp, coeff) in &self.terms {
            let mut term = k.embed(c, coeff)?;
            for (x, d) in point.iter().zip(exp) {
                if *d > 0 {
                    term = c.mul(&term, &c.pow(x, *d));
                }
            }
            acc = c.add(&acc, &term);
        }
        Ok(acc)
    }
}

/// Where a relation came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftRecord {
    /// Stated directly over the base.
    Original,
    /// Representative chosen for relation `relation` of presentation `from`,
    /// whose coefficients were residue classes over an intermediate algebra.
    Lifted { from: String, relation: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation<E> {
    pub poly: MultiPoly<E>,
    /// Index into `variables` of the variable this relation solves for.
    pub pivot: usize,
    pub lift: LiftRecord,
}

/// `base[variables] / (relations)`. Relation polynomials range over
/// `base_variables` followed by `variables`; the base variables name
/// generators of the base algebra that may appear in coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraPresentation<E> {
    pub name: String,
    pub base: String,
    pub base_variables: Vec<String>,
    pub variables: Vec<String>,
    pub relations: Vec<Relation<E>>,
}

impl<E: Clone> AlgebraPresentation<E> {
    pub fn nvars(&self) -> usize {
        self.base_variables.len() + self.variables.len()
    }

    /// Every relation is monic or primitive in its own pivot variable, with
    /// a constant leading coefficient, and involves no later variable.
    pub fn check_triangular<K: ValuedField<Elem = E>>(&self, k: &K) -> Result<(), PresentationError> {
        let nb = self.base_variables.len();
        if self.relations.len() > self.variables.len() {
            return Err(PresentationError::Malformed(format!(
                "{} relations in {} variables",
                self.relations.len(),
                self.variables.len()
            )));
        }
        let mut previous: Option<usize> = None;
        for (r, rel) in self.relations.iter().enumerate() {
            let bad = |reason: String| PresentationError::NonTriangular { relation: r, reason };
            if rel.poly.nvars() != self.nvars() {
                return Err(PresentationError::Malformed(format!("relation {r} has the wrong arity")));
            }
            if rel.pivot >= self.variables.len() || previous.is_some_and(|p| p >= rel.pivot) {
                return Err(bad("pivots must be distinct and increasing".into()));
            }
            previous = Some(rel.pivot);
            let pivot = nb + rel.pivot;
            if let Some(later) = (pivot + 1..self.nvars()).find(|&v| rel.poly.involves(v)) {
                return Err(bad(format!("involves later variable {}", self.variables[later - nb])));
            }
            let name = &self.variables[rel.pivot];
            if rel.poly.degree_in(pivot).unwrap_or(0) == 0 {
                return Err(bad(format!("has degree 0 in {name}")));
            }
            let lead = rel.poly.leading_in(k, pivot).expect("nonzero relation");
            let Some(lc) = lead.as_constant(k) else {
                return Err(bad(format!("leading coefficient in {name} is not a constant")));
            };
            let content = rel.poly.terms().values().map(|c| k.val(c)).min().unwrap_or(Extended::Infinity);
            if !k.is_zero(&k.sub(&lc, &k.one())) && content != Extended::Finite(0) {
                return Err(bad(format!("neither monic nor primitive in {name}")));
            }
        }
        Ok(())
    }

    /// Evaluates every relation at `point` (base variables first).
    pub fn eval_relations<K: ValuedField<Elem = E>>(
        &self,
        k: &K,
        c: &K::Completion,
        point: &[<K::Completion as Ring>::Elem],
    ) -> Result<Vec<<K::Completion as Ring>::Elem>, ArithError> {
        self.relations.iter().map(|r| r.poly.eval_approx(k, c, point)).collect()
    }
}

/// Given `B = A[X]/(f)` and `C = B[Y]/(g)`, returns `C = A[X, Y]/(f, G)`
/// where each `G_k` is the stored representative of `g_k`.
pub fn compose_presentations<K: ValuedField>(
    k: &K,
    outer: &AlgebraPresentation<K::Elem>,
    inner: &AlgebraPresentation<K::Elem>,
) -> Result<AlgebraPresentation<K::Elem>, PresentationError> {
    outer.check_triangular(k)?;
    inner.check_triangular(k)?;
    if inner.base != outer.name {
        return Err(PresentationError::BaseMismatch { expected: outer.name.clone(), found: inner.base.clone() });
    }
    let outer_names: Vec<&String> = outer.base_variables.iter().chain(&outer.variables).collect();
    if let Some(clash) = inner.variables.iter().find(|v| outer_names.contains(v)) {
        return Err(PresentationError::Malformed(format!("variable {clash} is already in use")));
    }
    let mut map = Vec::with_capacity(inner.nvars());
    for v in &inner.base_variables {
        match outer_names.iter().position(|o| *o == v) {
            Some(idx) => map.push(idx),
            None => return Err(PresentationError::LiftMissing(v.clone())),
        }
    }
    let offset = outer_names.len();
    map.extend((0..inner.variables.len()).map(|q| offset + q));
    let nvars = offset + inner.variables.len();

    let identity: Vec<usize> = (0..offset).collect();
    let mut relations: Vec<Relation<K::Elem>> = outer
        .relations
        .iter()
        .map(|r| Relation { poly: r.poly.reindex(k, &identity, nvars), pivot: r.pivot, lift: r.lift.clone() })
        .collect();
    relations.extend(inner.relations.iter().enumerate().map(|(idx, r)| Relation {
        poly: r.poly.reindex(k, &map, nvars),
        pivot: outer.variables.len() + r.pivot,
        lift: LiftRecord::Lifted { from: inner.name.clone(), relation: idx },
    }));
    let composed = AlgebraPresentation {
        name: inner.name.clone(),
        base: outer.base.clone(),
        base_variables: outer.base_variables.clone(),
        variables: outer.variables.iter().chain(&inner.variables).cloned().collect(),
        relations,
    };
    composed.check_triangular(k)?;
    Ok(composed)
}
