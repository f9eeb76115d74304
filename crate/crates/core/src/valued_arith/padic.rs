use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{
    ApproxElement, ArithError, CertifiedValue, Completion, Field, PrimeField, Rationals, Ring,
    RingDescriptor, ValuedField,
};
use crate::ordered_values::Extended;

/// `Q` with the `p`-adic valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PAdicRationals {
    p: u64,
}

impl PAdicRationals {
    /// # Panics
    /// If `p` is not prime.
    pub fn new(p: u64) -> Self {
        assert!(super::is_prime(p), "{p} is not prime");
        PAdicRationals { p }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }
}

fn int_val(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

impl Ring for PAdicRationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        Rationals.zero()
    }

    fn one(&self) -> BigRational {
        Rationals.one()
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

impl Field for PAdicRationals {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        Rationals.inv(a)
    }
}

impl ValuedField for PAdicRationals {
    type Residue = PrimeField;
    type Completion = PAdicIntegers;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::PAdic(self.p)
    }

    fn residue_field(&self) -> PrimeField {
        PrimeField::new(self.p)
    }

    fn completion(&self, cap: u32) -> PAdicIntegers {
        PAdicIntegers::new(self.p, cap)
    }

    fn val(&self, a: &BigRational) -> Extended<i64> {
        if a.is_zero() {
            return Extended::Infinity;
        }
        let p = BigInt::from(self.p);
        Extended::Finite(int_val(a.numer(), &p) - int_val(a.denom(), &p))
    }

    fn uniformizer_pow(&self, k: i64) -> BigRational {
        let pk = BigRational::from_integer(num_traits::pow(BigInt::from(self.p), k.unsigned_abs() as usize));
        if k >= 0 {
            pk
        } else {
            pk.recip()
        }
    }

    fn residue(&self, a: &BigRational) -> Result<u64, ArithError> {
        match self.val(a) {
            Extended::Finite(v) if v < 0 => Err(ArithError::NegativeValue(v)),
            Extended::Finite(0) => {
                let p = BigInt::from(self.p);
                let inv = mod_inverse(a.denom(), &p).expect("unit denominator");
                Ok((a.numer() * inv).mod_floor(&p).to_u64().expect("below p"))
            }
            _ => Ok(0),
        }
    }

    fn embed(&self, c: &PAdicIntegers, a: &BigRational) -> Result<ApproxElement<u64>, ArithError> {
        if let Extended::Finite(v) = self.val(a) {
            if v < 0 {
                return Err(ArithError::NegativeValue(v));
            }
        }
        let m = c.modulus(c.cap);
        let inv = mod_inverse(a.denom(), &m).expect("denominator prime to p");
        Ok(c.from_residue_int(&(a.numer() * inv), c.cap))
    }

    fn truncation(&self, x: &ApproxElement<u64>) -> BigRational {
        BigRational::from_integer(PAdicIntegers::new(self.p, 1).to_int(x))
    }

    fn lift_residue(&self, r: &u64) -> BigRational {
        BigRational::from_integer(BigInt::from(*r))
    }
}

/// `Z_p` to bounded precision. Digits are `0 <= d < p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicIntegers {
    p: u64,
    cap: u32,
}

impl PAdicIntegers {
    pub fn new(p: u64, cap: u32) -> Self {
        assert!(super::is_prime(p), "{p} is not prime");
        assert!(cap >= 1, "precision cap must be positive");
        PAdicIntegers { p, cap }
    }

    fn modulus(&self, n: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.p), n as usize)
    }

    /// The integer `0 <= r < p^N` whose digits these are.
    pub fn to_int(&self, a: &ApproxElement<u64>) -> BigInt {
        let p = BigInt::from(self.p);
        a.digits().iter().rev().fold(BigInt::zero(), |acc, d| acc * &p + BigInt::from(*d))
    }

    /// `n mod p^precision` as an element known to that precision.
    pub fn from_residue_int(&self, n: &BigInt, precision: u32) -> ApproxElement<u64> {
        let precision = precision.min(self.cap);
        let p = BigInt::from(self.p);
        let mut r = n.mod_floor(&self.modulus(precision));
        let mut digits = Vec::with_capacity(precision as usize);
        for _ in 0..precision {
            let (q, d) = r.div_rem(&p);
            digits.push(d.to_u64().expect("digit below p"));
            r = q;
        }
        ApproxElement::from_digits(digits)
    }

    fn value_floor(&self, a: &ApproxElement<u64>) -> u32 {
        match self.val(a) {
            CertifiedValue::Exactly(Extended::Finite(k)) | CertifiedValue::AtLeast(k) => k as u32,
            CertifiedValue::Exactly(Extended::Infinity) => self.cap,
        }
    }
}

impl Ring for PAdicIntegers {
    type Elem = ApproxElement<u64>;

    fn zero(&self) -> Self::Elem {
        ApproxElement::from_digits(vec![0; self.cap as usize])
    }

    fn one(&self) -> Self::Elem {
        self.from_residue_int(&BigInt::one(), self.cap)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.digits().iter().all(|d| *d == 0)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.precision().min(b.precision());
        self.from_residue_int(&(self.to_int(a) + self.to_int(b)), n)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.from_residue_int(&-self.to_int(a), a.precision())
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.precision().min(b.precision());
        self.from_residue_int(&(self.to_int(a) - self.to_int(b)), n)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = (a.precision() + self.value_floor(b)).min(b.precision() + self.value_floor(a));
        self.from_residue_int(&(self.to_int(a) * self.to_int(b)), n)
    }

    fn from_int(&self, n: &BigInt) -> Self::Elem {
        self.from_residue_int(n, self.cap)
    }
}

impl Completion for PAdicIntegers {
    type Digit = u64;
    type Residue = PrimeField;

    fn residue_field(&self) -> PrimeField {
        PrimeField::new(self.p)
    }

    fn cap(&self) -> u32 {
        self.cap
    }

    fn precision(&self, a: &Self::Elem) -> u32 {
        a.precision()
    }

    fn digits<'a>(&self, a: &'a Self::Elem) -> &'a [u64] {
        a.digits()
    }

    fn digit_is_zero(&self, d: &u64) -> bool {
        *d == 0
    }

    fn truncate(&self, a: &Self::Elem, n: u32) -> Self::Elem {
        ApproxElement::from_digits(a.digits()[..a.digits().len().min(n as usize)].to_vec())
    }

    fn divide(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ArithError> {
        let k = match self.val(b) {
            CertifiedValue::Exactly(Extended::Finite(k)) => k as u32,
            _ => return Err(ArithError::DivisionByIndistinguishableZero),
        };
        if let CertifiedValue::Exactly(Extended::Finite(va)) = self.val(a) {
            if va < i64::from(k) {
                return Err(ArithError::NegativeValue(va - i64::from(k)));
            }
        }
        let n = a.precision().min(b.precision()).min(self.cap);
        if n <= k {
            return Err(ArithError::InsufficientPrecision(format!(
                "quotient by an element of value {k} known only to precision {n}"
            )));
        }
        let pk = self.modulus(k);
        let m = self.modulus(n - k);
        let a_shift = self.to_int(a) / &pk;
        let b_unit = self.to_int(b) / &pk;
        let inv = mod_inverse(&b_unit, &m).expect("unit part is invertible");
        Ok(self.from_residue_int(&(a_shift * inv), n - k))
    }

    fn from_residue(&self, r: &u64, precision: u32) -> Self::Elem {
        self.from_residue_int(&BigInt::from(*r), precision)
    }

    fn residue_digit(&self, d: &u64) -> u64 {
        *d
    }
}
