//! Inverse of a matrix section in `Mat_d` of a star algebra.

use crate::algebra::{AlgebraError, MatrixJet};

use super::{Section, StarError};

/// `v` with `a ∗ v = 1` through `ν^max_order`, solved one order at a time:
/// the only term of `(a ∗ v)_s` involving `v_s` is `a_0 v_s`.
///
/// `star` is the product of the algebra; `accuracy` bounds the pointwise
/// inverse of `a_0` when it is not a polynomial.
pub fn nu_mat_invert(
    a: &Section,
    max_order: i32,
    accuracy: i32,
    star: impl Fn(&Section, &Section) -> Result<Section, StarError>,
) -> Result<Section, StarError> {
    if let Some(mx) = a.max_order() {
        if mx < max_order {
            return Err(AlgebraError::WindowUnderflow { order: max_order, max: mx }.into());
        }
    }
    if a.min_order().is_some_and(|s| s < 0) {
        return Err(AlgebraError::Precondition("series has a polar part".into()).into());
    }
    let a0 = a.get(0)?;
    let a0_inv = a0.inverse(accuracy)?;
    let mut v = Section::constant(a0_inv.clone());
    for s in 1..=max_order {
        let p = star(a, &v)?;
        if p.max_order().is_some_and(|m| m < s) {
            return Err(StarError::Window { requested: s, available: p.max_order().unwrap() });
        }
        let vs: MatrixJet = (&a0_inv * &p.get(s)?).neg();
        v = v.add(&Section::monomial(s, vs));
    }
    Ok(v.with_max(Some(max_order)))
}
