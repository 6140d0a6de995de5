//! Chart input data and its validation.

use std::collections::BTreeMap;

use crate::algebra::{GaussianRational, Jet, MatrixJet, NuSeries};

use super::GeometryError;

/// Raw chart description: potentials `Φ_r`, metric trivialization `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartData {
    /// Complex dimension.
    pub m: usize,
    /// Bundle rank.
    pub d: usize,
    /// Highest ν-order of interest.
    pub order: i32,
    /// `Φ_r` for `r ≥ −1`; missing weights are zero. Polynomials in `2m` variables.
    pub potentials: BTreeMap<i32, Jet>,
    /// Hermitian fiber metric in the fixed trivialization.
    pub u: MatrixJet,
    /// Bidegree truncation `(P, Q)` of the Calabi series.
    pub calabi_bidegree: (u32, u32),
    /// Truncation degree used for non-polynomial jets (`ũ`, `g^{-1}`, logs).
    pub jet_accuracy: i32,
}

impl ChartData {
    /// Chart with default Calabi bidegree `(2R+2, 2R+2)` and jet accuracy.
    pub fn new(m: usize, order: i32, potentials: BTreeMap<i32, Jet>, u: MatrixJet) -> Self {
        let b = (2 * order + 2).max(0) as u32;
        ChartData {
            m,
            d: u.dim(),
            order,
            potentials,
            u,
            calabi_bidegree: (b, b),
            jet_accuracy: default_accuracy(order),
        }
    }

    pub fn with_calabi_bidegree(mut self, p: u32, q: u32) -> Self {
        self.calabi_bidegree = (p, q);
        self
    }

    pub fn with_accuracy(mut self, a: i32) -> Self {
        self.jet_accuracy = a;
        self
    }

    pub fn nvars(&self) -> usize {
        2 * self.m
    }
}

/// Default truncation degree for an order-`R` chart.
pub fn default_accuracy(order: i32) -> i32 {
    3 * order.max(1) + 6
}

/// A validated chart with its metric tensors.
#[derive(Clone, Debug)]
pub struct Chart {
    pub data: ChartData,
    /// `g_{kl̄}` as an `m × m` matrix of exact polynomials, row `k`, column `l`.
    pub g_lower: MatrixJet,
    /// `g^{l̄k}` as an `m × m` matrix, row `l`, column `k`.
    pub g_upper: MatrixJet,
    /// Pointwise inverse `ũ` of `u`.
    pub u_inv: MatrixJet,
    /// `Φ = Σ_r ν^r Φ_r` (exact in ν).
    pub potential: NuSeries<Jet>,
}

impl Chart {
    pub fn new(data: ChartData) -> Result<Chart, GeometryError> {
        validate_chart(data)
    }

    pub fn m(&self) -> usize {
        self.data.m
    }

    pub fn d(&self) -> usize {
        self.data.d
    }

    pub fn nvars(&self) -> usize {
        2 * self.data.m
    }

    pub fn order(&self) -> i32 {
        self.data.order
    }

    pub fn accuracy(&self) -> i32 {
        self.data.jet_accuracy
    }

    /// `Φ_r`, zero when absent.
    pub fn phi(&self, r: i32) -> Jet {
        self.data.potentials.get(&r).cloned().unwrap_or_else(|| Jet::zero(self.nvars()))
    }

    /// `g^{l̄k}`.
    pub fn g_inv(&self, l: usize, k: usize) -> &Jet {
        self.g_upper.entry(l, k)
    }

    /// `g_{kl̄}`.
    pub fn g(&self, k: usize, l: usize) -> &Jet {
        self.g_lower.entry(k, l)
    }

    /// Variable index of `z^k`.
    pub fn hol(&self, k: usize) -> usize {
        k
    }

    /// Variable index of `z̄^l`.
    pub fn antihol(&self, l: usize) -> usize {
        self.data.m + l
    }

    /// Whether the bundle metric is constant.
    pub fn u_is_constant(&self) -> bool {
        self.data.u.entries().iter().all(|e| e.max_degree().unwrap_or(0) == 0)
    }

    pub fn identity(&self) -> MatrixJet {
        MatrixJet::identity(self.d(), self.nvars())
    }

    /// Same chart with the bundle replaced by the trivial line bundle.
    pub fn scalar_chart(&self) -> Result<Chart, GeometryError> {
        let mut data = self.data.clone();
        data.u = MatrixJet::identity(1, self.nvars());
        data.d = 1;
        Chart::new(data)
    }
}

/// Checks reality of potentials, hermiticity of `u`, and nondegeneracy;
/// computes `g_{kl̄}` and `g^{l̄k}`.
pub fn validate_chart(data: ChartData) -> Result<Chart, GeometryError> {
    let n = data.nvars();
    if data.m == 0 || n > crate::algebra::jet::MAX_VARS {
        return Err(GeometryError::Dimension(data.m));
    }
    if data.u.dim() != data.d || data.u.nvars() != n {
        return Err(GeometryError::Shape("u".into()));
    }
    let phi_m1 = data.potentials.get(&-1).ok_or(GeometryError::MissingPotential)?;
    for (&r, p) in &data.potentials {
        if r < -1 {
            return Err(GeometryError::BadWeight(r));
        }
        if p.nvars() != n {
            return Err(GeometryError::Shape(format!("potential[{r}]")));
        }
        if p.conj() != *p {
            return Err(GeometryError::NonRealPotential(r));
        }
    }
    if data.u.adjoint() != data.u {
        return Err(GeometryError::NonHermitian);
    }
    let acc = data.jet_accuracy;
    let u_inv = data.u.inverse(acc).map_err(|_| GeometryError::SingularBundleMetric)?;
    let m = data.m;
    let mut g = Vec::with_capacity(m * m);
    for k in 0..m {
        for l in 0..m {
            g.push(phi_m1.derive(k).derive(m + l));
        }
    }
    let g_lower = MatrixJet::from_entries(m, g);
    let g_upper = g_lower.inverse(acc).map_err(|_| GeometryError::DegenerateMetric)?;
    let top = data.potentials.keys().copied().max().unwrap_or(-1);
    let coeffs: Vec<Jet> = (-1..=top)
        .map(|r| data.potentials.get(&r).cloned().unwrap_or_else(|| Jet::zero(n)))
        .collect();
    let potential = NuSeries::from_coeffs(-1, coeffs, None, &Jet::zero(n));
    Ok(Chart { data, g_lower, g_upper, u_inv, potential })
}

/// The Kähler–Poisson bracket `i g^{l̄k}(∂_k f ∂_l̄ g − ∂_k g ∂_l̄ f)`.
pub fn poisson_bracket(f: &Jet, g: &Jet, chart: &Chart) -> Jet {
    let m = chart.m();
    let mut s = Jet::zero(chart.nvars());
    for k in 0..m {
        for l in 0..m {
            let t = &(&f.derive(k) * &g.derive(m + l)) - &(&g.derive(k) * &f.derive(m + l));
            s = &s + &(chart.g_inv(l, k) * &t);
        }
    }
    s.scale(&GaussianRational::i())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn flat_metric() {
        let c = fixtures::flat_chart(1, 3);
        assert_eq!(c.g(0, 0), &Jet::one(2));
        assert_eq!(c.g_inv(0, 0), &Jet::one(2));
    }

    #[test]
    fn curved_metric_inverse() {
        let zz = &Jet::z(1, 0) * &Jet::zbar(1, 0);
        let phi = &zz + &(&zz * &zz);
        let c = Chart::new(ChartData::new(1, 1, BTreeMap::from([(-1, phi)]), MatrixJet::identity(1, 2)))
            .unwrap();
        let g = &Jet::one(2) + &zz.scale(&GaussianRational::from_int(4));
        assert_eq!(c.g(0, 0), &g);
        let expect = Jet::from_terms(
            2,
            [
                (vec![0, 0], GaussianRational::from_int(1)),
                (vec![1, 1], GaussianRational::from_int(-4)),
                (vec![2, 2], GaussianRational::from_int(16)),
            ],
            None,
        );
        assert!(c.g_inv(0, 0).agrees_with(&expect.cap(4)));
        assert!((&g * c.g_inv(0, 0)).agrees_with(&Jet::one(2)));
    }

    #[test]
    fn degenerate_metric_rejected() {
        let phi = &Jet::z(1, 0) + &Jet::zbar(1, 0);
        let r = Chart::new(ChartData::new(1, 1, BTreeMap::from([(-1, phi)]), MatrixJet::identity(1, 2)));
        assert!(matches!(r, Err(GeometryError::DegenerateMetric)));
    }

    #[test]
    fn non_real_potential_rejected() {
        let phi = &(&Jet::z(1, 0) * &Jet::zbar(1, 0)) + &Jet::z(1, 0);
        let r = Chart::new(ChartData::new(1, 1, BTreeMap::from([(-1, phi)]), MatrixJet::identity(1, 2)));
        assert!(matches!(r, Err(GeometryError::NonRealPotential(-1))));
    }

    #[test]
    fn poisson_examples() {
        let c = fixtures::flat_chart(1, 1);
        let (z, zb) = (Jet::z(1, 0), Jet::zbar(1, 0));
        assert_eq!(poisson_bracket(&z, &zb, &c), Jet::constant(2, GaussianRational::i()));
        assert!(poisson_bracket(&zb, &zb, &c).is_zero());
        let z2 = &z * &z;
        assert!(poisson_bracket(&z, &z2, &c).is_zero());
    }
}
