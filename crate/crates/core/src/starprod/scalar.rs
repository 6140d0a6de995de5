//! The scalar star product with separation of variables of the chart's
//! formal potential, lifted entrywise to matrices.
//!
//! Its tensor is obtained by inverting `E_K^I` computed from `e^{D}` on the
//! Fock space, so no graph sum is involved.

use crate::algebra::MatrixJet;
use crate::geometry::Chart;
use crate::tensors::{e_from_calabi, fock_invert, g_tensors, lift_e, EBounds, FockOperator, IndexedTensor};

use super::{bidifferential, check_section, Section, StarError};

#[derive(Clone, Debug)]
pub struct ScalarStar {
    /// `C^{L̄K}` of the scalar product (dimension 1).
    pub c: IndexedTensor,
    pub order: i32,
    m: usize,
    nvars: usize,
}

impl ScalarStar {
    /// The product of the chart's potential through `ν^order`; the bundle
    /// of `chart` is ignored.
    pub fn new(chart: &Chart, order: i32) -> Result<Self, StarError> {
        let sc = chart.scalar_chart()?;
        let r = order.max(0) as u32;
        let reach = 2 * r;
        let e = e_from_calabi(&sc, &EBounds { max_k: reach, max_l: reach + r, max_order: order })?;
        let (_, gu) = g_tensors(&sc, reach + r);
        let e_op = FockOperator::new(lift_e(&e, &gu)?.truncate(order), 0)?;
        let c_mixed = fock_invert(&e_op, order, r)?;
        let c = gu.restrict(|a, _| a <= r).contract_with(&c_mixed.tensor, Some(order), |_, _| true)?;
        Ok(ScalarStar { c, order, m: chart.m(), nvars: chart.nvars() })
    }

    /// `f ∗ g` for matrix sections, `(f ∗ g)_{ij} = Σ_k f_{ik} ∗ g_{kj}`.
    pub fn star(&self, f: &Section, g: &Section) -> Result<Section, StarError> {
        let dim = f.template().dim();
        check_section(f, dim, self.nvars)?;
        check_section(g, dim, self.nvars)?;
        let m = self.m;
        let left = |x: &MatrixJet, l: &[u32]| x.derive_multi(&antiholomorphic(m, l));
        let right = |x: &MatrixJet, k: &[u32]| x.derive_multi(&holomorphic(m, k));
        Ok(bidifferential(f, g, &self.c, left, right, None))
    }
}

/// Full exponent vector of `∂_K`.
pub(crate) fn holomorphic(m: usize, k: &[u32]) -> Vec<u32> {
    let mut e = vec![0; 2 * m];
    e[..m].copy_from_slice(k);
    e
}

/// Full exponent vector of `∂_L̄`.
pub(crate) fn antiholomorphic(m: usize, l: &[u32]) -> Vec<u32> {
    let mut e = vec![0; 2 * m];
    e[m..].copy_from_slice(l);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{GaussianRational, Jet};
    use crate::fixtures;
    use crate::geometry::poisson_bracket;
    use crate::tensors::{c_from_graphs, CBounds, TensorContext};

    fn sec(j: Jet) -> Section {
        Section::constant(MatrixJet::from_scalar(j))
    }

    #[test]
    fn flat_zbar_star_z() {
        let chart = fixtures::flat_chart(1, 3);
        let s = ScalarStar::new(&chart, 3).unwrap();
        let (z, zb) = (Jet::z(1, 0), Jet::zbar(1, 0));
        let p = s.star(&sec(zb.clone()), &sec(z.clone())).unwrap();
        let want = sec(&zb * &z).add(&sec(Jet::one(2)).shift(1));
        assert!(p.first_difference(&want, |a, b| a.agrees_with(b)).is_none(), "{p:?}");
        let q = s.star(&sec(z.clone()), &sec(zb.clone())).unwrap();
        assert!(q.first_difference(&sec(&z * &zb), |a, b| a.agrees_with(b)).is_none());
    }

    #[test]
    fn matches_special_free_graph_sum() {
        for chart in [fixtures::rich_scalar(2), fixtures::flat_chart(2, 2)] {
            let s = ScalarStar::new(&chart, 2).unwrap();
            let ctx = TensorContext::for_degree(&chart, 2).unwrap();
            let c = c_from_graphs(&ctx, &CBounds::new(2)).unwrap();
            assert!(s.c.agrees_with(&c, |_, _| true), "{:?}", s.c.first_difference(&c, |_, _| true));
        }
    }

    #[test]
    fn first_order_is_poisson() {
        let chart = fixtures::rich_scalar(1);
        let s = ScalarStar::new(&chart, 1).unwrap();
        let f = fixtures::poly(1, &[(&[2, 1], 1, 1), (&[0, 1], 3, 1)]);
        let g = fixtures::poly(1, &[(&[1, 0], 1, 1), (&[1, 2], -2, 1)]);
        let fg = s.star(&sec(f.clone()), &sec(g.clone())).unwrap().get(1).unwrap();
        let gf = s.star(&sec(g.clone()), &sec(f.clone())).unwrap().get(1).unwrap();
        let lhs = &fg - &gf;
        let rhs = MatrixJet::from_scalar(poisson_bracket(&f, &g, &chart).scale(&GaussianRational::i()));
        assert!(lhs.agrees_with(&rhs), "{lhs} vs {rhs}");
    }
}
