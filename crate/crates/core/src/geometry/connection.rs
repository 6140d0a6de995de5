//! The canonical connection of the bundle metric and covariant derivatives
//! on `End(E*)`.

use crate::algebra::{GaussianRational, MatrixJet};

use super::chart::Chart;

/// Christoffel symbols and curvature of the canonical connection.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    /// `Γ_k = (∂_k u) ũ`.
    pub christoffel: Vec<MatrixJet>,
    /// `R_{kl̄} = i ∂_l̄ Γ_k`, indexed `[k][l]`.
    pub curvature: Vec<Vec<MatrixJet>>,
}

impl ConnectionData {
    pub fn new(chart: &Chart) -> Self {
        let m = chart.m();
        let christoffel: Vec<MatrixJet> =
            (0..m).map(|k| &chart.data.u.derive(chart.hol(k)) * &chart.u_inv).collect();
        // [∇_k, ∇_l̄] acts on E* by multiplication with ∂_l̄ Γ_k.
        let curvature = christoffel
            .iter()
            .map(|gk| (0..m).map(|l| gk.derive(chart.antihol(l)).scale(&GaussianRational::i())).collect())
            .collect();
        ConnectionData { christoffel, curvature }
    }
}

/// `∇_k f = ∂_k f + [f, Γ_k]`.
pub fn nabla_hol(f: &MatrixJet, k: usize, chart: &Chart, conn: &ConnectionData) -> MatrixJet {
    let d = f.derive(chart.hol(k));
    if chart.u_is_constant() {
        return d;
    }
    &d + &f.commutator(&conn.christoffel[k])
}

/// `∇_l̄ f = ∂_l̄ f`.
pub fn nabla_antihol(f: &MatrixJet, l: usize, chart: &Chart) -> MatrixJet {
    f.derive(chart.antihol(l))
}

/// `∇_K f` for a holomorphic multi-index given as multiplicities.
pub fn nabla_hol_multi(f: &MatrixJet, exps: &[u32], chart: &Chart, conn: &ConnectionData) -> MatrixJet {
    let mut g = f.clone();
    for (k, &e) in exps.iter().enumerate() {
        for _ in 0..e {
            g = nabla_hol(&g, k, chart, conn);
        }
    }
    g
}

/// `∇_L̄ f = ∂_L̄ f`.
pub fn nabla_antihol_multi(f: &MatrixJet, exps: &[u32], chart: &Chart) -> MatrixJet {
    let mut g = f.clone();
    for (l, &e) in exps.iter().enumerate() {
        for _ in 0..e {
            g = nabla_antihol(&g, l, chart);
        }
    }
    g
}

/// `u ∂_K(ũ f u) ũ`, the conjugated form of `∇_K`.
pub fn nabla_hol_conjugated(f: &MatrixJet, exps: &[u32], chart: &Chart) -> MatrixJet {
    let inner = &(&chart.u_inv * f) * &chart.data.u;
    let mut full = vec![0u32; chart.nvars()];
    full[..chart.m()].copy_from_slice(exps);
    &(&chart.data.u * &inner.derive_multi(&full)) * &chart.u_inv
}
