//! `∗ᵤ` from the graph formula `f ∗ᵤ g = (∇_L̄ f) C^{L̄K} (∇_K g)`.

use crate::coefficients::CoeffTable;
use crate::geometry::connection::nabla_hol_conjugated;
use crate::geometry::Chart;
use crate::graphs::GraphClass;
use crate::tensors::{c_from_graphs, c_from_table, CBounds, Form, IndexedTensor, TensorContext};

use super::scalar::antiholomorphic;
use super::{bidifferential, check_section, Section, StarError};

#[derive(Clone, Debug)]
pub struct GraphProduct {
    pub chart: Chart,
    /// `C^{L̄K}` through `ν^order`.
    pub c: IndexedTensor,
    pub order: i32,
}

impl GraphProduct {
    /// `C` summed over every class of `𝓜` through `ν^order`.
    pub fn new(chart: &Chart, order: i32) -> Result<Self, StarError> {
        let ctx = TensorContext::for_degree(chart, order)?;
        let c = c_from_graphs(&ctx, &CBounds::new(order))?;
        Ok(GraphProduct { chart: chart.clone(), c, order })
    }

    /// `C` from the given classes and coefficient table.
    pub fn from_table(chart: &Chart, order: i32, classes: &[GraphClass], table: &CoeffTable) -> Result<Self, StarError> {
        let ctx = TensorContext::for_degree(chart, order)?;
        let c = c_from_table(&ctx, classes, table, Form::Upper, order)?;
        Ok(GraphProduct { chart: chart.clone(), c, order })
    }

    /// `f ∗ᵤ g`.
    pub fn mul(&self, f: &Section, g: &Section) -> Result<Section, StarError> {
        let (d, n, m) = (self.chart.d(), self.chart.nvars(), self.chart.m());
        check_section(f, d, n)?;
        check_section(g, d, n)?;
        let chart = &self.chart;
        let left = |x: &crate::algebra::MatrixJet, l: &[u32]| x.derive_multi(&antiholomorphic(m, l));
        let right = |x: &crate::algebra::MatrixJet, k: &[u32]| nabla_hol_conjugated(x, k, chart);
        Ok(bidifferential(f, g, &self.c, left, right, None))
    }
}
