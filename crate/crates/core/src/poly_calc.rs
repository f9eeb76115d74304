//! Dense univariate polynomials over a ring context: arithmetic, Hasse-Schmidt
//! derivatives, linear substitution, content and primitive part.

use num_bigint::BigInt;
use num_integer::binomial;
use thiserror::Error;

use crate::ordered_values::Extended;
use crate::valued_arith::{ArithError, Field, Ring, ValuedField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Coefficients lowest degree first; the leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E: Clone> Poly<E> {
    pub fn new<R: Ring<Elem = E>>(ring: &R, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant<R: Ring<Elem = E>>(ring: &R, c: E) -> Self {
        Poly::new(ring, vec![c])
    }

    /// `c * Y^deg`.
    pub fn monomial<R: Ring<Elem = E>>(ring: &R, c: E, deg: usize) -> Self {
        let mut coeffs = vec![ring.zero(); deg];
        coeffs.push(c);
        Poly::new(ring, coeffs)
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeff<R: Ring<Elem = E>>(&self, ring: &R, k: usize) -> E {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn map<R: Ring, F: FnMut(&E) -> R::Elem>(&self, target: &R, f: F) -> Poly<R::Elem> {
        Poly::new(target, self.coeffs.iter().map(f).collect())
    }
}

/// The polynomial ring `R[Y]` as a ring context.
#[derive(Debug, Clone)]
pub struct PolyRing<R> {
    pub base: R,
}

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R) -> Self {
        PolyRing { base }
    }

    pub fn variable(&self) -> Poly<R::Elem> {
        Poly::monomial(&self.base, self.base.one(), 1)
    }

    pub fn scale(&self, c: &R::Elem, f: &Poly<R::Elem>) -> Poly<R::Elem> {
        f.map(&self.base, |a| self.base.mul(c, a))
    }

    /// Horner evaluation.
    pub fn eval(&self, f: &Poly<R::Elem>, a: &R::Elem) -> R::Elem {
        f.coeffs
            .iter()
            .rev()
            .fold(self.base.zero(), |acc, c| self.base.add(&self.base.mul(&acc, a), c))
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type Elem = Poly<R::Elem>;

    fn zero(&self) -> Self::Elem {
        Poly::zero()
    }

    fn one(&self) -> Self::Elem {
        Poly::constant(&self.base, self.base.one())
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.coeffs.len().max(b.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (a.coeffs.get(k), b.coeffs.get(k)) {
                (Some(x), Some(y)) => self.base.add(x, y),
                (Some(x), None) | (None, Some(x)) => x.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(&self.base, coeffs)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.map(&self.base, |c| self.base.neg(c))
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![self.base.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                coeffs[i + j] = self.base.add(&coeffs[i + j], &self.base.mul(x, y));
            }
        }
        Poly::new(&self.base, coeffs)
    }

    fn from_int(&self, n: &BigInt) -> Self::Elem {
        Poly::constant(&self.base, self.base.from_int(n))
    }
}

impl<F: Field> PolyRing<F> {
    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(
        &self,
        f: &Poly<F::Elem>,
        g: &Poly<F::Elem>,
    ) -> Option<(Poly<F::Elem>, Poly<F::Elem>)> {
        let dg = g.degree()?;
        let lead_inv = self.base.inv(g.leading()?)?;
        let mut rem = f.clone();
        let mut quot = vec![self.base.zero(); f.coeffs.len().saturating_sub(dg)];
        while let Some(dr) = rem.degree() {
            if dr < dg {
                break;
            }
            let c = self.base.mul(rem.leading().expect("nonzero"), &lead_inv);
            quot[dr - dg] = c.clone();
            let shifted = self.mul(&Poly::monomial(&self.base, c, dr - dg), g);
            rem = self.sub(&rem, &shifted);
        }
        Some((Poly::new(&self.base, quot), rem))
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, f: &Poly<F::Elem>, g: &Poly<F::Elem>) -> Poly<F::Elem> {
        let (mut a, mut b) = (f.clone(), g.clone());
        while !b.is_zero() {
            let (_, r) = self.div_rem(&a, &b).expect("b is nonzero");
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    pub fn monic(&self, f: &Poly<F::Elem>) -> Poly<F::Elem> {
        match f.leading().and_then(|c| self.base.inv(c)) {
            Some(inv) => self.scale(&inv, f),
            None => f.clone(),
        }
    }
}

/// The `n`-th Hasse-Schmidt derivative: `sum_m a_m C(m, n) Y^(m - n)`, with
/// the binomial computed in `Z` and mapped into the coefficient ring.
pub fn hasse_derivative<R: Ring>(ring: &R, f: &Poly<R::Elem>, n: usize) -> Poly<R::Elem> {
    let coeffs = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(n)
        .map(|(m, a)| ring.mul(a, &ring.from_int(&binomial(BigInt::from(m), BigInt::from(n)))))
        .collect();
    Poly::new(ring, coeffs)
}

/// `[D^(0) f, ..., D^(deg f) f]`; empty for the zero polynomial.
pub fn hasse_derivatives<R: Ring>(ring: &R, f: &Poly<R::Elem>) -> Vec<Poly<R::Elem>> {
    (0..f.coeffs().len()).map(|n| hasse_derivative(ring, f, n)).collect()
}

/// `f(a + bY) = sum_n (D^(n) f)(a) b^n Y^n`.
pub fn compose_linear<R: Ring>(
    ring: &R,
    f: &Poly<R::Elem>,
    a: &R::Elem,
    b: &R::Elem,
) -> Poly<R::Elem> {
    let polys = PolyRing::new(ring.clone());
    let mut b_pow = ring.one();
    let mut coeffs = Vec::with_capacity(f.coeffs().len());
    for d in hasse_derivatives(ring, f) {
        coeffs.push(ring.mul(&polys.eval(&d, a), &b_pow));
        b_pow = ring.mul(&b_pow, b);
    }
    Poly::new(ring, coeffs)
}

/// Minimum coefficient value; `Infinity` for the zero polynomial.
pub fn content<K: ValuedField>(k: &K, f: &Poly<K::Elem>) -> Extended<i64> {
    f.coeffs().iter().map(|c| k.val(c)).min().unwrap_or(Extended::Infinity)
}

/// Splits `f = u * h` with `u` the uniformizer power realizing the content and
/// `h` primitive (content zero).
pub fn primitive_part<K: ValuedField>(
    k: &K,
    f: &Poly<K::Elem>,
) -> Result<(K::Elem, Poly<K::Elem>), PolyError> {
    let Extended::Finite(c) = content(k, f) else {
        return Err(PolyError::ZeroPolynomial);
    };
    let u = k.uniformizer_pow(c);
    let u_inv = k.uniformizer_pow(-c);
    let h = f.map(k, |a| k.mul(a, &u_inv));
    Ok((u, h))
}

/// Evaluates a polynomial over the exact field at a completion element.
/// Coefficients must lie in the valuation ring.
pub fn eval_approx<K: ValuedField>(
    k: &K,
    c: &K::Completion,
    f: &Poly<K::Elem>,
    x: &<K::Completion as Ring>::Elem,
) -> Result<<K::Completion as Ring>::Elem, ArithError> {
    let mut acc = c.zero();
    for coeff in f.coeffs().iter().rev() {
        acc = c.add(&c.mul(&acc, x), &k.embed(c, coeff)?);
    }
    Ok(acc)
}
