//! Operators on the formal Fock space: mixed tensors `A_K^I` with a bound
//! `|I| ≤ |K| + r + offset` on the support of the `ν^r` component.

use crate::algebra::{GaussianRational, NuSeries};

use super::{delta_tensor, rank, IndexedTensor, TensorError, Variance};

#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub tensor: IndexedTensor,
    pub offset: i32,
}

impl FockOperator {
    /// Checks the bound on every stored coefficient.
    pub fn new(tensor: IndexedTensor, offset: i32) -> Result<Self, TensorError> {
        if tensor.variance != Variance::Mixed {
            return Err(TensorError::Variance(tensor.variance, Variance::Mixed));
        }
        for ((k, i), v) in tensor.iter() {
            for (s, c) in v.iter() {
                if !c.is_zero() && rank(i) as i32 > rank(k) as i32 + s + offset {
                    return Err(TensorError::Witness(format!("K = {k:?}, I = {i:?}, ν^{s}")));
                }
            }
        }
        Ok(FockOperator { tensor, offset })
    }

    pub fn identity(m: usize, dim: usize, nvars: usize, max_rank: u32) -> Self {
        FockOperator { tensor: delta_tensor(Variance::Mixed, m, dim, nvars, max_rank), offset: 0 }
    }
}

/// `A_K^P B_P^I` for `|K| ≤ max_rank`.
///
/// The result is complete through its window when `a` holds every entry
/// with `|K| ≤ max_rank` and `b` every entry whose first index can be
/// reached through the bound of `a`.
pub fn fock_compose(a: &FockOperator, b: &FockOperator, max_rank: u32) -> Result<FockOperator, TensorError> {
    let t = a.tensor.contract_with(&b.tensor, None, |k, _| rank(k) <= max_rank)?;
    FockOperator::new(t, a.offset + b.offset)
}

/// The inverse of `E` through `ν^{max_order}` on `|K| ≤ max_rank`.
///
/// The `ν⁰` part of `E` must be `c_n Δ` on the blocks `|I| = |K| = n`
/// (with `c_n ≠ 0`) plus terms with `|I| < |K|`; it is inverted by a finite
/// Neumann series in the rank. Higher orders are solved one at a time from
/// `C = E₀⁻¹ (Δ − (E − E₀)∘C)`. Entries of `E` with
/// `|K|, |I| ≤ max_rank + max_order` must be present.
pub fn fock_invert(e: &FockOperator, max_order: i32, max_rank: u32) -> Result<FockOperator, TensorError> {
    let t = &e.tensor;
    let reach = max_rank + max_order.max(0) as u32;
    let window = Some(max_order);
    let delta = delta_tensor(Variance::Mixed, t.m(), t.dim(), t.nvars(), reach).with_max_order(window);
    let t = t.restrict(|k, _| k <= reach).truncate(max_order);
    let lowest = t.iter().filter_map(|(_, v)| v.min_order()).min();
    if lowest.is_some_and(|s| s < 0) {
        return Err(TensorError::LeadingTerm("negative ν-order".into()));
    }
    let e0 = t.map_entries(|v| NuSeries::constant(v.get(0).expect("order 0 is in the window")));
    // Diagonal blocks: c_n Δ.
    let mut d_inv = IndexedTensor::for_chart_like(&t).with_max_order(window);
    for ((k, i), v) in delta.iter() {
        let n = rank(k);
        let block = e0.entry(k, i).get(0).map_err(TensorError::Algebra)?;
        let delta_ki = v.get(0).map_err(TensorError::Algebra)?;
        let c = scalar_ratio(&block, &delta_ki)
            .ok_or_else(|| TensorError::LeadingTerm(format!("ν⁰ block at K = {k:?} is not a multiple of Δ")))?;
        if e0.iter().any(|((k2, i2), w)| rank(k2) == n && rank(i2) == n && (k2 != i2) && !w.is_zero()) {
            return Err(TensorError::LeadingTerm(format!("ν⁰ block of rank {n} is not diagonal")));
        }
        d_inv.add_entry(k.clone(), i.clone(), v.scale(&c.recip().expect("nonzero block")));
    }
    if e0.iter().any(|((k, i), w)| rank(i) > rank(k) && !w.is_zero()) {
        return Err(TensorError::LeadingTerm("ν⁰ part raises the rank".into()));
    }
    let lower = e0.restrict(|k, i| i < k);
    // E₀⁻¹ = Σ_j (−D⁻¹ L)^j D⁻¹.
    let step = d_inv.contract(&lower)?.scale(&GaussianRational::from_int(-1));
    let mut term = d_inv.clone();
    let mut e0_inv = d_inv.clone();
    for _ in 0..reach {
        term = step.contract(&term)?;
        if term.is_empty() {
            break;
        }
        e0_inv = e0_inv.add(&term)?;
    }
    let n = t.sub(&e0)?;
    let mut c = e0_inv.clone();
    for _ in 0..max_order {
        let nc = n.contract_with(&c, window, |k, _| rank(k) <= reach)?;
        c = e0_inv.contract_with(&delta.sub(&nc)?, window, |k, _| rank(k) <= reach)?;
    }
    let c = c.restrict(|k, _| k <= max_rank);
    FockOperator::new(c, e.offset)
}

/// `c` with `a = c · b` when `b` is a nonzero multiple of the identity
/// constant and `a` is a constant multiple of it.
fn scalar_ratio(a: &crate::algebra::MatrixJet, b: &crate::algebra::MatrixJet) -> Option<GaussianRational> {
    let b0 = b.entry(0, 0).value_at_origin().ok()?;
    let a0 = a.entry(0, 0).value_at_origin().ok()?;
    if b0.is_zero() {
        return None;
    }
    let c = &a0 / &b0;
    (!c.is_zero() && a.agrees_with(&b.scale(&c))).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tensors::{c_from_graphs, e_from_calabi, g_tensors, lift_c, lift_e, CBounds, EBounds, TensorContext};

    #[test]
    fn identity_is_neutral() {
        let chart = fixtures::rich_bundle(2);
        let ctx = TensorContext::for_degree(&chart, 2).unwrap();
        let c = c_from_graphs(&ctx, &CBounds::new(2)).unwrap();
        let (gl, _) = g_tensors(&chart, 4);
        let a = FockOperator::new(lift_c(&c, &gl).unwrap(), 0).unwrap();
        let id = FockOperator::identity(1, 2, 2, 4);
        let left = fock_compose(&id, &a, 2).unwrap();
        assert!(left.tensor.agrees_with(&a.tensor, |k, _| rank(k) <= 2));
    }

    #[test]
    fn delta_inverts_to_delta() {
        let id = FockOperator::identity(2, 1, 4, 4);
        let inv = fock_invert(&id, 2, 2).unwrap();
        assert!(inv.tensor.agrees_with(&id.tensor, |k, _| rank(k) <= 2));
    }

    #[test]
    fn flat_e_inverse_is_scaled_delta() {
        let chart = fixtures::flat_chart(1, 3);
        let (_, gu) = g_tensors(&chart, 6);
        let e = e_from_calabi(&chart, &EBounds { max_k: 5, max_l: 6, max_order: 3 }).unwrap();
        let e = FockOperator::new(lift_e(&e, &gu).unwrap(), 0).unwrap();
        let c = fock_invert(&e, 3, 2).unwrap();
        let id = FockOperator::identity(1, 1, 2, 2).tensor;
        let mut want = IndexedTensor::for_chart_like(&id);
        for ((k, i), v) in id.iter() {
            let r = crate::algebra::factorial(rank(k) as usize).recip().unwrap();
            want.add_entry(k.clone(), i.clone(), v.scale(&GaussianRational::real(r)));
        }
        assert!(c.tensor.agrees_with(&want, |k, _| rank(k) <= 2));
    }

    #[test]
    fn inverse_matches_graph_sum() {
        let chart = fixtures::rich_bundle(2);
        let (order, p0) = (2, 1u32);
        let reach = p0 + order as u32;
        let (gl, gu) = g_tensors(&chart, reach + order as u32 + 2);
        let e = e_from_calabi(&chart, &EBounds { max_k: reach, max_l: reach + order as u32, max_order: order + 2 }).unwrap();
        let e_op = FockOperator::new(lift_e(&e, &gu).unwrap().truncate(order), 0).unwrap();
        let inv = fock_invert(&e_op, order, p0).unwrap();
        let ctx = TensorContext::for_degree(&chart, order + p0 as i32).unwrap();
        let c = c_from_graphs(&ctx, &CBounds { max_order: order + p0 as i32, max_l: Some(p0), max_k: None }).unwrap();
        let lifted = lift_c(&c, &gl).unwrap().truncate(order);
        let keep = |k: &[u32], _: &[u32]| rank(k) <= p0;
        assert!(inv.tensor.agrees_with(&lifted, keep), "{:?}", inv.tensor.first_difference(&lifted, keep));
    }

    #[test]
    fn rejects_rank_raising_leading_term() {
        let mut t = FockOperator::identity(1, 1, 2, 2).tensor;
        t.add_term(vec![0], vec![1], 0, crate::algebra::MatrixJet::identity(1, 2));
        let op = FockOperator::new(t, 1).unwrap();
        assert!(matches!(fock_invert(&op, 1, 1), Err(TensorError::LeadingTerm(_))));
    }

    #[test]
    fn scaled_delta_inverts() {
        let t = FockOperator::identity(1, 1, 2, 3).tensor.scale(&GaussianRational::from_int(2));
        let inv = fock_invert(&FockOperator::new(t, 0).unwrap(), 1, 2).unwrap();
        let want = FockOperator::identity(1, 1, 2, 2).tensor.scale(&GaussianRational::ratio(1, 2));
        assert!(inv.tensor.agrees_with(&want, |_, _| true));
    }
}
