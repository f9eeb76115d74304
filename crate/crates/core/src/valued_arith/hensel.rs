use super::{ArithError, CertifiedValue, Completion, Ring, ValuedField};
use crate::poly_calc::{eval_approx, hasse_derivative, Poly, PolyRing};

/// Lifts a simple residue-field root of `f` to a root known modulo `p^target`
/// (resp. `t^target`) by Newton iteration in the completion.
///
/// The returned element has precision `target` and `f` of it is `AtLeast(target)`.
pub fn hensel_lift<K: ValuedField>(
    k: &K,
    f: &Poly<K::Elem>,
    root0: &<K::Residue as Ring>::Elem,
    target: u32,
) -> Result<<K::Completion as Ring>::Elem, ArithError> {
    if target == 0 {
        return Err(ArithError::InsufficientPrecision("target precision must be positive".into()));
    }
    let residue_field = k.residue_field();
    let reduced = Poly::new(
        &residue_field,
        f.coeffs().iter().map(|c| k.residue(c)).collect::<Result<Vec<_>, _>>()?,
    );
    let residue_polys = PolyRing::new(residue_field.clone());
    if !residue_field.is_zero(&residue_polys.eval(&reduced, root0)) {
        return Err(ArithError::NotARoot);
    }
    let reduced_derivative = hasse_derivative(&residue_field, &reduced, 1);
    if residue_field.is_zero(&residue_polys.eval(&reduced_derivative, root0)) {
        return Err(ArithError::NotSimpleRoot);
    }

    let c = k.completion(target);
    let derivative = hasse_derivative(k, f, 1);
    let mut x = c.from_residue(root0, target);
    // Newton doubles the number of correct digits, so this bound is generous.
    for _ in 0..=(u32::BITS - target.leading_zeros() + 1) {
        let fx = eval_approx(k, &c, f, &x)?;
        if c.precision(&fx) >= target && c.val(&fx) == CertifiedValue::AtLeast(i64::from(target)) {
            return Ok(x);
        }
        let step = c.divide(&fx, &eval_approx(k, &c, &derivative, &x)?)?;
        x = c.truncate(&c.sub(&x, &step), target);
    }
    Err(ArithError::InsufficientPrecision("Newton iteration did not converge".into()))
}
