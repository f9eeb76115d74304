//! JSON encodings of field elements, digits and polynomials.
//!
//! Rationals are JSON integers when they fit in an `i64` and `"a/b"`
//! strings otherwise. Elements of `F(t)` are a base constant, an array of
//! base constants (a polynomial in `t`, lowest power first) or an object
//! `{"num": [...], "den": [...]}`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::poly_calc::Poly;
use crate::valued_arith::{
    ApproxElement, Completion, Field, PAdicRationals, PrimeField, RatFunc, RationalFunctions, Rationals, Ring,
    TAdicBase, ValuedField,
};

/// A valued field whose elements can be read from and written to reports.
pub trait ScenarioField: ValuedField {
    fn decode(&self, v: &Value) -> Result<Self::Elem, String>;
    fn encode(&self, e: &Self::Elem) -> Value;
    fn decode_residue(&self, v: &Value) -> Result<<Self::Residue as Ring>::Elem, String>;
    fn decode_digits(&self, v: &Value) -> Result<<Self::Completion as Ring>::Elem, String>;
    fn encode_digits(&self, c: &Self::Completion, x: &<Self::Completion as Ring>::Elem) -> Value;

    fn decode_poly(&self, v: &Value) -> Result<Poly<Self::Elem>, String> {
        let items = v.as_array().ok_or_else(|| format!("expected a coefficient array, got {v}"))?;
        let coeffs = items.iter().map(|c| self.decode(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(self, coeffs))
    }

    fn encode_poly(&self, f: &Poly<Self::Elem>) -> Value {
        Value::Array(f.coeffs().iter().map(|c| self.encode(c)).collect())
    }
}

/// Base fields of `F(t)` with a JSON encoding for their elements.
pub trait BaseCodec: TAdicBase {
    fn decode_base(&self, v: &Value) -> Result<Self::Elem, String>;
    fn encode_base(&self, e: &Self::Elem) -> Value;
}

pub fn decode_rational(v: &Value) -> Result<BigRational, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(|i| BigRational::from_integer(i.into()))
            .ok_or_else(|| format!("expected an integer, got {n}")),
        Value::String(s) => s.trim().parse::<BigRational>().map_err(|e| format!("bad rational {s:?}: {e}")),
        other => Err(format!("expected a number or \"a/b\" string, got {other}")),
    }
}

pub fn encode_rational(q: &BigRational) -> Value {
    if q.is_integer() {
        if let Some(i) = q.numer().to_i64() {
            return json!(i);
        }
    }
    Value::String(q.to_string())
}

impl BaseCodec for Rationals {
    fn decode_base(&self, v: &Value) -> Result<BigRational, String> {
        decode_rational(v)
    }

    fn encode_base(&self, e: &BigRational) -> Value {
        encode_rational(e)
    }
}

impl BaseCodec for PrimeField {
    fn decode_base(&self, v: &Value) -> Result<u64, String> {
        let q = decode_rational(v)?;
        let num = self.from_int(q.numer());
        let den = self.from_int(q.denom());
        self.div(&num, &den).ok_or_else(|| format!("{q} has a denominator divisible by {}", self.modulus()))
    }

    fn encode_base(&self, e: &u64) -> Value {
        json!(e)
    }
}

fn digits_array(v: &Value) -> Result<&Vec<Value>, String> {
    v.as_array().ok_or_else(|| format!("expected a digit array, got {v}"))
}

impl ScenarioField for PAdicRationals {
    fn decode(&self, v: &Value) -> Result<BigRational, String> {
        decode_rational(v)
    }

    fn encode(&self, e: &BigRational) -> Value {
        encode_rational(e)
    }

    fn decode_residue(&self, v: &Value) -> Result<u64, String> {
        let r = self.residue(&decode_rational(v)?).map_err(|e| e.to_string())?;
        Ok(r)
    }

    fn decode_digits(&self, v: &Value) -> Result<ApproxElement<u64>, String> {
        let p = self.prime();
        let digits = digits_array(v)?
            .iter()
            .map(|d| match d.as_u64() {
                Some(d) if d < p => Ok(d),
                _ => Err(format!("{d} is not a digit base {p}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ApproxElement::from_digits(digits))
    }

    fn encode_digits(&self, c: &Self::Completion, x: &ApproxElement<u64>) -> Value {
        json!(c.digits(x))
    }
}

impl<F: BaseCodec> ScenarioField for RationalFunctions<F> {
    fn decode(&self, v: &Value) -> Result<RatFunc<F::Elem>, String> {
        let base = self.base();
        let poly = |v: &Value| -> Result<Poly<F::Elem>, String> {
            let items = v.as_array().ok_or_else(|| format!("expected a polynomial in t, got {v}"))?;
            let coeffs = items.iter().map(|c| base.decode_base(c)).collect::<Result<Vec<_>, _>>()?;
            Ok(Poly::new(base, coeffs))
        };
        match v {
            Value::Array(_) => Ok(self.from_poly(poly(v)?)),
            Value::Object(map) => {
                let num = poly(map.get("num").ok_or("fraction without \"num\"")?)?;
                let den = poly(map.get("den").ok_or("fraction without \"den\"")?)?;
                self.fraction(num, den).ok_or_else(|| "zero denominator".to_string())
            }
            _ => Ok(self.constant(base.decode_base(v)?)),
        }
    }

    fn encode(&self, e: &RatFunc<F::Elem>) -> Value {
        let base = self.base();
        let poly = |p: &Poly<F::Elem>| Value::Array(p.coeffs().iter().map(|c| base.encode_base(c)).collect());
        let den = e.denominator();
        if den.degree() == Some(0) {
            match e.numerator().degree() {
                None => base.encode_base(&base.zero()),
                Some(0) => base.encode_base(&e.numerator().coeffs()[0]),
                Some(_) => poly(e.numerator()),
            }
        } else {
            json!({ "num": poly(e.numerator()), "den": poly(den) })
        }
    }

    fn decode_residue(&self, v: &Value) -> Result<F::Elem, String> {
        self.residue(&self.decode(v)?).map_err(|e| e.to_string())
    }

    fn decode_digits(&self, v: &Value) -> Result<ApproxElement<F::Elem>, String> {
        let digits = digits_array(v)?.iter().map(|d| self.base().decode_base(d)).collect::<Result<Vec<_>, _>>()?;
        Ok(ApproxElement::from_digits(digits))
    }

    fn encode_digits(&self, c: &Self::Completion, x: &ApproxElement<F::Elem>) -> Value {
        Value::Array(c.digits(x).iter().map(|d| self.base().encode_base(d)).collect())
    }
}
