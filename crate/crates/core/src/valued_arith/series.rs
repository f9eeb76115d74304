use num_bigint::BigInt;

use super::{
    ApproxElement, ArithError, BaseField, CertifiedValue, Completion, Field, PrimeField, RatFunc,
    RationalFunctions, Rationals, Ring, RingDescriptor, ValuedField,
};
use crate::ordered_values::Extended;
use crate::poly_calc::Poly;

/// Base fields usable under `F(t)` and `F[[t]]`.
pub trait TAdicBase: Field {
    fn base_field(&self) -> BaseField;
}

impl TAdicBase for Rationals {
    fn base_field(&self) -> BaseField {
        BaseField::Rationals
    }
}

impl TAdicBase for PrimeField {
    fn base_field(&self) -> BaseField {
        BaseField::Prime(self.modulus())
    }
}

/// `F[[t]]` to bounded precision.
#[derive(Debug, Clone)]
pub struct PowerSeries<F> {
    base: F,
    cap: u32,
}

impl<F: Field> PowerSeries<F> {
    pub fn new(base: F, cap: u32) -> Self {
        assert!(cap >= 1, "precision cap must be positive");
        PowerSeries { base, cap }
    }

    /// Element with the given coefficients, known to `precision` terms.
    pub fn from_coeffs(&self, coeffs: &[F::Elem], precision: u32) -> ApproxElement<F::Elem> {
        let n = precision.min(self.cap) as usize;
        let digits = (0..n).map(|k| coeffs.get(k).cloned().unwrap_or_else(|| self.base.zero())).collect();
        ApproxElement::from_digits(digits)
    }

    fn value_floor(&self, a: &ApproxElement<F::Elem>) -> u32 {
        a.digits().iter().position(|d| !self.base.is_zero(d)).unwrap_or(a.digits().len()) as u32
    }

    fn convolve(&self, a: &[F::Elem], b: &[F::Elem], n: usize) -> Vec<F::Elem> {
        let mut out = vec![self.base.zero(); n];
        for (i, x) in a.iter().enumerate().take(n) {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n - i) {
                out[i + j] = self.base.add(&out[i + j], &self.base.mul(x, y));
            }
        }
        out
    }

    /// Inverse of a series with invertible constant term, to `n` terms.
    fn inverse_unit(&self, u: &[F::Elem], n: usize) -> Vec<F::Elem> {
        let u0_inv = self.base.inv(&u[0]).expect("unit constant term");
        let mut inv: Vec<F::Elem> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                inv.push(u0_inv.clone());
                continue;
            }
            let mut acc = self.base.zero();
            for j in 1..=k.min(u.len() - 1) {
                acc = self.base.add(&acc, &self.base.mul(&u[j], &inv[k - j]));
            }
            inv.push(self.base.neg(&self.base.mul(&acc, &u0_inv)));
        }
        inv
    }
}

impl<F: Field> Ring for PowerSeries<F> {
    type Elem = ApproxElement<F::Elem>;

    fn zero(&self) -> Self::Elem {
        self.from_coeffs(&[], self.cap)
    }

    fn one(&self) -> Self::Elem {
        self.from_coeffs(&[self.base.one()], self.cap)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.digits().iter().all(|d| self.base.is_zero(d))
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let digits = a.digits().iter().zip(b.digits()).map(|(x, y)| self.base.add(x, y)).collect();
        ApproxElement::from_digits(digits)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        ApproxElement::from_digits(a.digits().iter().map(|x| self.base.neg(x)).collect())
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = (a.precision() + self.value_floor(b))
            .min(b.precision() + self.value_floor(a))
            .min(self.cap);
        ApproxElement::from_digits(self.convolve(a.digits(), b.digits(), n as usize))
    }

    fn from_int(&self, n: &BigInt) -> Self::Elem {
        self.from_coeffs(&[self.base.from_int(n)], self.cap)
    }
}

impl<F: Field> Completion for PowerSeries<F> {
    type Digit = F::Elem;
    type Residue = F;

    fn residue_field(&self) -> F {
        self.base.clone()
    }

    fn cap(&self) -> u32 {
        self.cap
    }

    fn precision(&self, a: &Self::Elem) -> u32 {
        a.precision()
    }

    fn digits<'a>(&self, a: &'a Self::Elem) -> &'a [F::Elem] {
        a.digits()
    }

    fn digit_is_zero(&self, d: &F::Elem) -> bool {
        self.base.is_zero(d)
    }

    fn truncate(&self, a: &Self::Elem, n: u32) -> Self::Elem {
        ApproxElement::from_digits(a.digits()[..a.digits().len().min(n as usize)].to_vec())
    }

    fn divide(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ArithError> {
        let k = match self.val(b) {
            CertifiedValue::Exactly(Extended::Finite(k)) => k as usize,
            _ => return Err(ArithError::DivisionByIndistinguishableZero),
        };
        if let CertifiedValue::Exactly(Extended::Finite(va)) = self.val(a) {
            if va < k as i64 {
                return Err(ArithError::NegativeValue(va - k as i64));
            }
        }
        let n = a.precision().min(b.precision()).min(self.cap) as usize;
        if n <= k {
            return Err(ArithError::InsufficientPrecision(format!(
                "quotient by an element of value {k} known only to precision {n}"
            )));
        }
        let inv = self.inverse_unit(&b.digits()[k..], n - k);
        Ok(ApproxElement::from_digits(self.convolve(&a.digits()[k..], &inv, n - k)))
    }

    fn from_residue(&self, r: &F::Elem, precision: u32) -> Self::Elem {
        self.from_coeffs(std::slice::from_ref(r), precision)
    }

    fn residue_digit(&self, d: &F::Elem) -> F::Elem {
        d.clone()
    }
}

fn t_order<F: Field>(base: &F, f: &Poly<F::Elem>) -> Option<usize> {
    f.coeffs().iter().position(|c| !base.is_zero(c))
}

impl<F: TAdicBase> ValuedField for RationalFunctions<F> {
    type Residue = F;
    type Completion = PowerSeries<F>;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::TAdic(self.base.base_field())
    }

    fn residue_field(&self) -> F {
        self.base.clone()
    }

    fn completion(&self, cap: u32) -> PowerSeries<F> {
        PowerSeries::new(self.base.clone(), cap)
    }

    fn val(&self, a: &RatFunc<F::Elem>) -> Extended<i64> {
        match (t_order(&self.base, &a.num), t_order(&self.base, &a.den)) {
            (Some(n), Some(d)) => Extended::Finite(n as i64 - d as i64),
            _ => Extended::Infinity,
        }
    }

    fn uniformizer_pow(&self, k: i64) -> RatFunc<F::Elem> {
        let tk = self.from_poly(Poly::monomial(&self.base, self.base.one(), k.unsigned_abs() as usize));
        if k >= 0 {
            tk
        } else {
            self.inv(&tk).expect("t^k is nonzero")
        }
    }

    fn residue(&self, a: &RatFunc<F::Elem>) -> Result<F::Elem, ArithError> {
        match self.val(a) {
            Extended::Finite(v) if v < 0 => Err(ArithError::NegativeValue(v)),
            Extended::Finite(0) => {
                Ok(self.base.div(&a.num.coeffs()[0], &a.den.coeffs()[0]).expect("reduced denominator"))
            }
            _ => Ok(self.base.zero()),
        }
    }

    fn embed(
        &self,
        c: &PowerSeries<F>,
        a: &RatFunc<F::Elem>,
    ) -> Result<ApproxElement<F::Elem>, ArithError> {
        if let Extended::Finite(v) = self.val(a) {
            if v < 0 {
                return Err(ArithError::NegativeValue(v));
            }
        }
        let n = c.cap as usize;
        let inv = c.inverse_unit(a.den.coeffs(), n);
        Ok(ApproxElement::from_digits(c.convolve(a.num.coeffs(), &inv, n)))
    }

    fn truncation(&self, x: &ApproxElement<F::Elem>) -> RatFunc<F::Elem> {
        self.from_poly(Poly::new(&self.base, x.digits().to_vec()))
    }

    fn lift_residue(&self, r: &F::Elem) -> RatFunc<F::Elem> {
        self.constant(r.clone())
    }
}
