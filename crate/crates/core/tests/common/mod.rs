#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use pseudolim::poly_calc::Poly;
use pseudolim::valued_arith::{Field, PAdicRationals, PrimeField, RatFunc, RationalFunctions, Rationals, Ring};

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Multiplicity of `p` in a nonzero integer, by repeated division.
pub fn int_multiplicity(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (quo, rem) = n.div_rem(&p);
        if !rem.is_zero() {
            return k;
        }
        n = quo;
        k += 1;
    }
}

/// `p`-adic value of a rational, `None` for zero.
pub fn padic_value_oracle(a: &BigRational, p: u64) -> Option<i64> {
    (!a.is_zero()).then(|| int_multiplicity(a.numer(), p) - int_multiplicity(a.denom(), p))
}

/// A random rational with value roughly in `-4..8`, zero with probability 1/20.
pub fn random_padic(r: &mut ChaCha8Rng, p: u64) -> BigRational {
    if r.gen_ratio(1, 20) {
        return BigRational::zero();
    }
    let p = BigInt::from(p);
    let num = p.pow(r.gen_range(0..6)) * BigInt::from(r.gen_range(1i64..2000)) * if r.gen() { 1 } else { -1 };
    let den = p.pow(r.gen_range(0..4)) * BigInt::from(r.gen_range(1i64..500));
    BigRational::new(num, den)
}

pub trait RandomBase: Field {
    fn random(&self, r: &mut ChaCha8Rng) -> Self::Elem;
    fn random_nonzero(&self, r: &mut ChaCha8Rng) -> Self::Elem {
        loop {
            let e = self.random(r);
            if !self.is_zero(&e) {
                return e;
            }
        }
    }
}

impl RandomBase for PrimeField {
    fn random(&self, r: &mut ChaCha8Rng) -> u64 {
        r.gen_range(0..self.modulus())
    }
}

impl RandomBase for Rationals {
    fn random(&self, r: &mut ChaCha8Rng) -> BigRational {
        BigRational::new(r.gen_range(-9i64..10).into(), r.gen_range(1i64..6).into())
    }
}

/// Random polynomial of degree at most `deg` whose coefficients below `low`
/// vanish and whose coefficient at `low` is nonzero.
pub fn random_poly_with_order<F: RandomBase>(base: &F, r: &mut ChaCha8Rng, low: usize, deg: usize) -> Vec<F::Elem> {
    let mut c = vec![base.zero(); low];
    c.push(base.random_nonzero(r));
    for _ in low..deg {
        c.push(base.random(r));
    }
    c
}

/// A random element of `F(t)` and its value computed from the raw
/// numerator and denominator (`None` for zero).
pub fn random_tadic<F: RandomBase>(
    k: &RationalFunctions<F>,
    r: &mut ChaCha8Rng,
) -> (RatFunc<F::Elem>, Option<i64>) {
    let base = k.base();
    if r.gen_ratio(1, 20) {
        return (k.zero(), None);
    }
    let a = r.gen_range(0..5);
    let b = r.gen_range(0..3);
    let (na, nb) = (r.gen_range(0..4), r.gen_range(0..3));
    let num = random_poly_with_order(base, r, a, a + na);
    let den = random_poly_with_order(base, r, b, b + nb);
    let e = k.fraction(Poly::new(base, num), Poly::new(base, den)).expect("nonzero denominator");
    (e, Some(a as i64 - b as i64))
}

pub fn seven_adic() -> PAdicRationals {
    PAdicRationals::new(7)
}

pub fn one<R: Ring>(ring: &R) -> R::Elem {
    ring.one()
}

/// Coefficients of `(1 + t)^(1/2)` over `F_p`, `p` odd, from the binomial
/// series with `binom(1/2, n)` computed in `Q` and reduced mod `p`.
pub fn sqrt_one_plus_t_series(p: u64, terms: usize) -> Vec<u64> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut coeff = BigRational::one();
    let mut out = Vec::with_capacity(terms);
    let f = PrimeField::new(p);
    for n in 0..terms {
        let num = f.from_int(coeff.numer());
        let den = f.from_int(coeff.denom());
        out.push(f.div(&num, &den).expect("denominator is a power of 2"));
        coeff = coeff * (&half - BigRational::from_integer(n.into())) / BigRational::from_integer((n + 1).into());
    }
    out
}
