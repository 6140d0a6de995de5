//! `∗ᵤ` as the conjugate of the matrix star product:
//! `f ∗ᵤ g = ((f u) ∗ v ∗ (g u)) ũ` with `v` the `∗`-inverse of `u`.

use crate::algebra::MatrixJet;
use crate::geometry::Chart;

use super::{check_section, nu_mat_invert, right_mul, ScalarStar, Section, StarError};

#[derive(Clone, Debug)]
pub struct Oracle {
    pub chart: Chart,
    pub star: ScalarStar,
    pub order: i32,
    u: Section,
    /// `v = u⁻¹` in `Mat_d(𝒜)`.
    pub v: Section,
}

impl Oracle {
    pub fn new(chart: &Chart, order: i32) -> Result<Self, StarError> {
        let star = ScalarStar::new(chart, order)?;
        let u = Section::constant(chart.data.u.clone());
        let v = nu_mat_invert(&u, order, chart.accuracy(), |a, b| star.star(a, b))?;
        Ok(Oracle { chart: chart.clone(), star, order, u, v })
    }

    fn check(&self, f: &Section) -> Result<(), StarError> {
        check_section(f, self.chart.d(), self.chart.nvars())
    }

    /// `ψ = (f u) ∗ v`.
    pub fn psi(&self, f: &Section) -> Result<Section, StarError> {
        self.check(f)?;
        self.star.star(&right_mul(f, &self.chart.data.u), &self.v)
    }

    /// `f = (ψ ∗ u) ũ`.
    pub fn psi_inverse(&self, psi: &Section) -> Result<Section, StarError> {
        self.check(psi)?;
        Ok(right_mul(&self.star.star(psi, &self.u)?, &self.chart.u_inv))
    }

    /// `f ∗ᵤ g`.
    pub fn mul(&self, f: &Section, g: &Section) -> Result<Section, StarError> {
        self.check(f)?;
        self.check(g)?;
        let u: &MatrixJet = &self.chart.data.u;
        let left = self.star.star(&right_mul(f, u), &self.v)?;
        let p = self.star.star(&left, &right_mul(g, u))?;
        Ok(right_mul(&p, &self.chart.u_inv))
    }
}
