//! Exact valued fields, their completions, and precision-tracked elements.
//!
//! Rings are explicit context objects (`Rationals`, `PrimeField { p }`, ...)
//! and elements are plain data; every operation goes through the context.
//! This keeps runtime parameters such as the prime or the precision cap out
//! of the elements themselves.
//!
//! Two kinds of fields carry a valuation here:
//!
//! * `PAdicRationals`: `Q` with the `p`-adic valuation, completed to `Z_p`;
//! * `RationalFunctions<F>`: `F(t)` with the `t`-adic valuation, completed to
//!   `F[[t]]`, for `F` a prime field or `Q`.
//!
//! Both have value group `Z`. Elements of the field itself are exact, so their
//! valuation is always known; elements of the completion are digit lists
//! known modulo `p^N` (resp. `t^N`) and report a [`CertifiedValue`].

mod fields;
mod hensel;
mod padic;
mod series;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::ordered_values::Extended;

pub use fields::{PrimeField, RatFunc, RationalFunctions, Rationals};
pub use hensel::hensel_lift;
pub use padic::{PAdicIntegers, PAdicRationals};
pub use series::{PowerSeries, TAdicBase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("division by an element indistinguishable from zero")]
    DivisionByIndistinguishableZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element has negative value {0}, not in the valuation ring")]
    NegativeValue(i64),
    #[error("residue root is not a root of the reduced polynomial")]
    NotARoot,
    #[error("residue root is not simple (derivative vanishes in the residue field)")]
    NotSimpleRoot,
    #[error("unknown ring descriptor `{0}`")]
    UnknownDescriptor(String),
}

/// A commutative ring given by a context object.
pub trait Ring: Clone {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Image of an integer under the canonical map `Z -> R`.
    fn from_int(&self, n: &BigInt) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_int(&BigInt::from(n))
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
}

/// Valuation of an element known only to finite precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifiedValue {
    /// The valuation is provably this value.
    Exactly(Extended<i64>),
    /// Every known digit below this index vanishes; the true value is at least this.
    AtLeast(i64),
}

impl CertifiedValue {
    pub fn exact(&self) -> Option<Extended<i64>> {
        match self {
            CertifiedValue::Exactly(v) => Some(*v),
            CertifiedValue::AtLeast(_) => None,
        }
    }

    /// Largest value known to be a lower bound.
    pub fn lower_bound(&self) -> Extended<i64> {
        match self {
            CertifiedValue::Exactly(v) => *v,
            CertifiedValue::AtLeast(k) => Extended::Finite(*k),
        }
    }

    pub fn is_exactly(&self, v: i64) -> bool {
        *self == CertifiedValue::Exactly(Extended::Finite(v))
    }
}

impl fmt::Display for CertifiedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifiedValue::Exactly(v) => write!(f, "={v}"),
            CertifiedValue::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

/// An element of a completion: the digits of `p^0 .. p^{N-1}` (resp. the
/// coefficients of `t^0 .. t^{N-1}`), lowest first, known modulo `p^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ApproxElement<D> {
    digits: Vec<D>,
}

impl<D> ApproxElement<D> {
    pub(crate) fn from_digits(digits: Vec<D>) -> Self {
        ApproxElement { digits }
    }

    pub fn digits(&self) -> &[D] {
        &self.digits
    }

    /// Absolute precision `N`: the element is known modulo `p^N`.
    pub fn precision(&self) -> u32 {
        self.digits.len() as u32
    }
}

/// A complete discrete valuation ring approximated by truncated digit lists.
///
/// `cap` is the precision given to exactly known elements (integers, exact
/// field elements); every result is clamped to it.
pub trait Completion: Ring {
    type Digit: Clone + PartialEq + fmt::Debug;
    type Residue: Field;

    fn residue_field(&self) -> Self::Residue;
    fn cap(&self) -> u32;
    fn precision(&self, a: &Self::Elem) -> u32;
    fn digits<'a>(&self, a: &'a Self::Elem) -> &'a [Self::Digit];
    fn digit_is_zero(&self, d: &Self::Digit) -> bool;
    /// Reduces the known precision to at most `n`.
    fn truncate(&self, a: &Self::Elem, n: u32) -> Self::Elem;
    /// `a / b` with pessimistic precision `min(N_a, N_b) - val(b)`.
    fn divide(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ArithError>;
    /// Canonical lift of a residue: the residue as digit 0, zeros above.
    fn from_residue(&self, r: &<Self::Residue as Ring>::Elem, precision: u32) -> Self::Elem;
    fn residue_digit(&self, d: &Self::Digit) -> <Self::Residue as Ring>::Elem;

    fn val(&self, a: &Self::Elem) -> CertifiedValue {
        match self.digits(a).iter().position(|d| !self.digit_is_zero(d)) {
            Some(k) => CertifiedValue::Exactly(Extended::Finite(k as i64)),
            None => CertifiedValue::AtLeast(i64::from(self.precision(a))),
        }
    }

    fn residue(&self, a: &Self::Elem) -> <Self::Residue as Ring>::Elem {
        match self.digits(a).first() {
            Some(d) => self.residue_digit(d),
            None => self.residue_field().zero(),
        }
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.val(a).is_exactly(0)
    }

    /// Certified value of `a - b`; both agree to precision `k` iff this is `AtLeast(k)`.
    fn val_diff(&self, a: &Self::Elem, b: &Self::Elem) -> CertifiedValue {
        self.val(&self.sub(a, b))
    }
}

/// A field with a discrete valuation into `Z` and a completion.
pub trait ValuedField: Field {
    type Residue: Field;
    type Completion: Completion<Residue = Self::Residue>;

    fn descriptor(&self) -> RingDescriptor;
    fn residue_field(&self) -> Self::Residue;
    fn completion(&self, cap: u32) -> Self::Completion;
    /// Exact valuation; `Infinity` only for zero.
    fn val(&self, a: &Self::Elem) -> Extended<i64>;
    /// `p^k` resp. `t^k`.
    fn uniformizer_pow(&self, k: i64) -> Self::Elem;
    /// Reduction modulo the maximal ideal.
    fn residue(&self, a: &Self::Elem) -> Result<<Self::Residue as Ring>::Elem, ArithError>;
    /// Image in the completion at its cap precision; requires `val(a) >= 0`.
    fn embed(
        &self,
        c: &Self::Completion,
        a: &Self::Elem,
    ) -> Result<<Self::Completion as Ring>::Elem, ArithError>;
    /// The exact element whose expansion is the known digits of `x`.
    fn truncation(&self, x: &<Self::Completion as Ring>::Elem) -> Self::Elem;
    /// Lift of a residue-field element to its canonical representative.
    fn lift_residue(&self, r: &<Self::Residue as Ring>::Elem) -> Self::Elem;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.val(a) == Extended::Finite(0)
    }

    fn in_valuation_ring(&self, a: &Self::Elem) -> bool {
        self.val(a) >= Extended::Finite(0)
    }
}

/// Base field of a `t`-adic ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseField {
    Rationals,
    Prime(u64),
}

/// The concrete valuation rings supported by the scenario layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    PAdic(u64),
    TAdic(BaseField),
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::PAdic(p) => write!(f, "padic:{p}"),
            RingDescriptor::TAdic(BaseField::Prime(p)) => write!(f, "tadic:F{p}"),
            RingDescriptor::TAdic(BaseField::Rationals) => write!(f, "tadic:Q"),
        }
    }
}

impl FromStr for RingDescriptor {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::UnknownDescriptor(s.to_string());
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind {
            "padic" => {
                let p: u64 = arg.parse().map_err(|_| bad())?;
                is_prime(p).then_some(RingDescriptor::PAdic(p)).ok_or_else(bad)
            }
            "tadic" if arg == "Q" => Ok(RingDescriptor::TAdic(BaseField::Rationals)),
            "tadic" => {
                let p: u64 = arg.strip_prefix('F').and_then(|n| n.parse().ok()).ok_or_else(bad)?;
                is_prime(p).then_some(RingDescriptor::TAdic(BaseField::Prime(p))).ok_or_else(bad)
            }
            _ => Err(bad()),
        }
    }
}
