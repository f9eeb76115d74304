use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{Field, Ring};
use crate::poly_calc::{Poly, PolyRing};

/// The rational numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn from_int(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
}

/// The prime field `F_p`; elements are canonical residues `0 <= a < p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// # Panics
    /// If `p` is not prime.
    pub fn new(p: u64) -> Self {
        assert!(super::is_prime(p), "{p} is not prime");
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((u128::from(*a) + u128::from(*b)) % u128::from(self.p)) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((u128::from(*a) * u128::from(*b)) % u128::from(self.p)) as u64
    }

    fn from_int(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        (((n % &p) + &p) % &p).to_u64().expect("reduced below p")
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> Option<u64> {
        (!a.is_multiple_of(self.p)).then(|| self.pow(a, (self.p - 2) as u32))
    }
}

/// A rational function `num / den`, reduced, with `den` monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<E> {
    pub(crate) num: Poly<E>,
    pub(crate) den: Poly<E>,
}

impl<E: Clone> RatFunc<E> {
    pub fn numerator(&self) -> &Poly<E> {
        &self.num
    }

    pub fn denominator(&self) -> &Poly<E> {
        &self.den
    }
}

/// The field `F(t)` of rational functions over a base field.
#[derive(Debug, Clone)]
pub struct RationalFunctions<F> {
    pub(crate) base: F,
    polys: PolyRing<F>,
}

impl<F: Field> RationalFunctions<F> {
    pub fn new(base: F) -> Self {
        RationalFunctions { polys: PolyRing::new(base.clone()), base }
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn t(&self) -> RatFunc<F::Elem> {
        self.from_poly(self.polys.variable())
    }

    pub fn from_poly(&self, num: Poly<F::Elem>) -> RatFunc<F::Elem> {
        RatFunc { num, den: self.polys.one() }
    }

    pub fn constant(&self, c: F::Elem) -> RatFunc<F::Elem> {
        self.from_poly(Poly::constant(&self.base, c))
    }

    /// `num / den` in lowest terms; `None` if `den` is zero.
    pub fn fraction(&self, num: Poly<F::Elem>, den: Poly<F::Elem>) -> Option<RatFunc<F::Elem>> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(self.zero());
        }
        let g = self.polys.gcd(&num, &den);
        let (num, _) = self.polys.div_rem(&num, &g)?;
        let (den, _) = self.polys.div_rem(&den, &g)?;
        let lead = self.base.inv(den.leading()?)?;
        Some(RatFunc { num: self.polys.scale(&lead, &num), den: self.polys.scale(&lead, &den) })
    }
}

impl<F: Field> Ring for RationalFunctions<F> {
    type Elem = RatFunc<F::Elem>;

    fn zero(&self) -> Self::Elem {
        RatFunc { num: Poly::zero(), den: self.polys.one() }
    }

    fn one(&self) -> Self::Elem {
        RatFunc { num: self.polys.one(), den: self.polys.one() }
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.num.is_zero()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.den == b.den {
            return self.fraction(self.polys.add(&a.num, &b.num), a.den.clone()).expect("nonzero den");
        }
        let num = self.polys.add(&self.polys.mul(&a.num, &b.den), &self.polys.mul(&b.num, &a.den));
        self.fraction(num, self.polys.mul(&a.den, &b.den)).expect("nonzero den")
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        RatFunc { num: self.polys.neg(&a.num), den: a.den.clone() }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let num = self.polys.mul(&a.num, &b.num);
        self.fraction(num, self.polys.mul(&a.den, &b.den)).expect("nonzero den")
    }

    fn from_int(&self, n: &BigInt) -> Self::Elem {
        self.constant(self.base.from_int(n))
    }
}

impl<F: Field> Field for RationalFunctions<F> {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        self.fraction(a.den.clone(), a.num.clone())
    }
}
