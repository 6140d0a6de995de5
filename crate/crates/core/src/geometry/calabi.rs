//! Formal Calabi functions `D`, `Q`, `H = log Q` and the nested-commutator
//! expansion of `H`.

use crate::algebra::biseries::BiSeries;
use crate::algebra::jet::unit_key;
use crate::algebra::{Coeff, GaussianRational, Jet, MatrixJet, NuSeries};

use super::chart::Chart;
use super::connection::{nabla_antihol, nabla_hol, ConnectionData};
use super::GeometryError;

pub type ScalarBi = BiSeries<NuSeries<Jet>>;
pub type MatrixBi = BiSeries<MatrixJet>;

/// `D(η,η̄) = Φ(z,z̄) − Φ(z+η,z̄) + Φ(z+η,z̄+η̄) − Φ(z,z̄+η̄)` for the full
/// ν-potential, truncated at `bidegree`.
pub fn calabi_d(chart: &Chart, bidegree: (u32, u32)) -> ScalarBi {
    let (p, q) = bidegree;
    let m = chart.m();
    let phi = &chart.potential;
    let base = BiSeries::constant(m, p, q, phi.clone());
    let hol = BiSeries::shifted(phi, m, p, q, true, false);
    let both = BiSeries::shifted(phi, m, p, q, true, true);
    let anti = BiSeries::shifted(phi, m, p, q, false, true);
    base.sub(&hol).add(&both).sub(&anti)
}

/// Same four-point sum for a single scalar jet (e.g. `log u`).
pub fn calabi_d_jet(f: &Jet, m: usize, bidegree: (u32, u32)) -> BiSeries<Jet> {
    let (p, q) = bidegree;
    let base = BiSeries::constant(m, p, q, f.clone());
    let hol = BiSeries::shifted(f, m, p, q, true, false);
    let both = BiSeries::shifted(f, m, p, q, true, true);
    let anti = BiSeries::shifted(f, m, p, q, false, true);
    base.sub(&hol).add(&both).sub(&anti)
}

/// `Q = u(z,z̄) ũ(z+η,z̄) u(z+η,z̄+η̄) ũ(z,z̄+η̄)` and `H = log Q`.
pub fn calabi_qh(chart: &Chart, bidegree: (u32, u32)) -> Result<(MatrixBi, MatrixBi), GeometryError> {
    let (p, q) = bidegree;
    let m = chart.m();
    let u = &chart.data.u;
    let ui = &chart.u_inv;
    let f1 = BiSeries::constant(m, p, q, u.clone());
    let f2 = BiSeries::shifted(ui, m, p, q, true, false);
    let f3 = BiSeries::shifted(u, m, p, q, true, true);
    let f4 = BiSeries::shifted(ui, m, p, q, false, true);
    let big_q = f1.mul(&f2).mul(&f3).mul(&f4);
    // u ũ u ũ is the identity; replace the truncated product by the exact one.
    let q0 = big_q.coeff(&vec![0; m], &vec![0; m])?;
    if !q0.agrees_with(&chart.identity()) {
        return Err(GeometryError::Calabi("Q(0,0) is not the identity".into()));
    }
    let fixed = big_q
        .sub(&BiSeries::constant(m, p, q, q0))
        .add(&BiSeries::constant(m, p, q, chart.identity()));
    let h = fixed.log()?;
    Ok((fixed, h))
}

/// `H` from the nested-commutator expansion with `x = η^k∇_k`,
/// `y = η̄^l∇_l̄`, through total degree `max_order + 1` (`max_order ≤ 3`).
pub fn bch_h(chart: &Chart, conn: &ConnectionData, max_order: u32) -> Result<MatrixBi, GeometryError> {
    if !(1..=3).contains(&max_order) {
        return Err(GeometryError::UnsupportedOrder(max_order));
    }
    let m = chart.m();
    let top = max_order + 1;
    let zero = MatrixJet::zero(chart.d(), chart.nvars());
    // Both bounds at `top`; terms are then filtered by total degree.
    let mut xy = BiSeries::zero(m, top, top, &zero);
    for k in 0..m {
        for l in 0..m {
            let c = conn.christoffel[k].derive(chart.antihol(l));
            xy.add_term(&unit(m, k), &unit(m, l), c);
        }
    }
    // [x, M] and [y, M] for a multiplication operator M.
    let ad_x = |a: &MatrixBi| shift_apply(a, m, 0, |c, k| nabla_hol(c, k, chart, conn));
    let ad_y = |a: &MatrixBi| shift_apply(a, m, m, |c, l| nabla_antihol(c, l, chart));
    let ad_sum = |a: &MatrixBi| ad_x(a).add(&ad_y(a));

    let half = GaussianRational::ratio(1, 2);
    let mut h = xy.clone();
    if max_order >= 2 {
        h = h.add(&ad_sum(&xy).scale(&half));
    }
    if max_order >= 3 {
        let yx = xy.neg();
        let t1 = ad_x(&ad_y(&yx)).scale(&half);
        let t2 = ad_sum(&ad_sum(&xy));
        h = h.add(&t1.add(&t2).scale(&GaussianRational::ratio(1, 6)));
    }
    Ok(filter_total_degree(&h, top))
}

fn unit(m: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; m];
    e[i] = 1;
    e
}

/// `Σ_i ζ^i · op_i(c)` applied termwise, where `ζ` are the displacement
/// variables starting at key position `offset`.
fn shift_apply(a: &MatrixBi, m: usize, offset: usize, op: impl Fn(&MatrixJet, usize) -> MatrixJet) -> MatrixBi {
    let (p, q) = a.bounds();
    let mut out = a.zero_like();
    for (key, c) in a.terms_raw() {
        for i in 0..m {
            let k = key + unit_key(offset + i);
            let (pp, qq) = a.bidegree_of(k);
            if pp > p || qq > q {
                continue;
            }
            let e = crate::algebra::jet::unpack(k, 2 * m);
            out.add_term(&e[..m], &e[m..], op(c, i));
        }
    }
    out
}

/// Keeps terms of total degree `≤ top`.
pub fn filter_total_degree<T: Coeff>(a: &BiSeries<T>, top: u32) -> BiSeries<T> {
    let mut out = a.zero_like();
    for ((al, be), c) in a.iter() {
        if al.iter().sum::<u32>() + be.iter().sum::<u32>() <= top {
            out.add_term(&al, &be, c.clone());
        }
    }
    out
}

/// First `(α, β)` (total degree `≤ top`) where the two series disagree
/// under `agree`.
pub fn first_bi_difference<T: Coeff>(
    a: &BiSeries<T>,
    b: &BiSeries<T>,
    top: u32,
    agree: impl Fn(&T, &T) -> bool,
) -> Option<(Vec<u32>, Vec<u32>)> {
    let keys: std::collections::BTreeSet<(Vec<u32>, Vec<u32>)> = a.iter().chain(b.iter()).map(|(k, _)| k).collect();
    keys.into_iter().find(|(al, be)| {
        if al.iter().sum::<u32>() + be.iter().sum::<u32>() > top {
            return false;
        }
        match (a.coeff(al, be), b.coeff(al, be)) {
            (Ok(x), Ok(y)) => !agree(&x, &y),
            _ => false,
        }
    })
}

/// `H_{KL̄}` at the base point for multiplicity vectors `α, β`.
pub fn h_component_at_origin(h: &MatrixBi, alpha: &[u32], beta: &[u32]) -> Result<crate::algebra::CMatrix, GeometryError> {
    Ok(h.tensor_component(alpha, beta)?.value_at_origin()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn flat_d_is_eta_etabar_over_nu() {
        let c = fixtures::flat_chart(1, 1);
        let d = calabi_d(&c, (3, 3));
        let one = NuSeries::monomial(-1, Jet::one(2));
        assert_eq!(d.coeff(&[1], &[1]).unwrap(), one);
        let nonzero: Vec<_> = d.iter().map(|(k, _)| k).collect();
        assert_eq!(nonzero, vec![(vec![1], vec![1])]);
    }

    #[test]
    fn constant_bundle_has_trivial_q() {
        let c = fixtures::flat_chart(1, 1);
        let (q, h) = calabi_qh(&c, (3, 3)).unwrap();
        assert_eq!(q, BiSeries::constant(1, 3, 3, c.identity()));
        assert!(h.is_zero());
        let conn = ConnectionData::new(&c);
        assert!(bch_h(&c, &conn, 3).unwrap().is_zero());
        assert!(bch_h(&c, &conn, 4).is_err());
    }

    #[test]
    fn d_is_invariant_under_pluriharmonic_shift() {
        let c = fixtures::rich_scalar(1);
        let mut data = c.data.clone();
        let shift = &(&Jet::z(1, 0) * &Jet::z(1, 0)) + &(&Jet::zbar(1, 0) * &Jet::zbar(1, 0));
        let p = data.potentials.get_mut(&0).unwrap();
        *p = &*p + &shift;
        let c2 = Chart::new(data).unwrap();
        assert_eq!(calabi_d(&c, (3, 3)), calabi_d(&c2, (3, 3)));
        let d = calabi_d(&c, (3, 3));
        for ((al, be), _) in d.iter() {
            assert!(al[0] > 0 && be[0] > 0);
        }
    }

    #[test]
    fn commutator_route_matches_logarithm() {
        for c in [fixtures::bundle_flat_base(2), fixtures::rich_bundle(2), fixtures::line_bundle(2)] {
            let conn = ConnectionData::new(&c);
            let (_, h) = calabi_qh(&c, (4, 4)).unwrap();
            let b = bch_h(&c, &conn, 3).unwrap();
            assert_eq!(first_bi_difference(&h, &b, 4, MatrixJet::agrees_with), None);
        }
    }

    #[test]
    fn curvature_matches_bidegree_one_one() {
        let c = fixtures::rich_bundle(2);
        let conn = ConnectionData::new(&c);
        let (_, h) = calabi_qh(&c, (2, 2)).unwrap();
        let got = h_component_at_origin(&h, &[1], &[1]).unwrap();
        let r = conn.curvature[0][0].scale(&GaussianRational::i().neg_c()).value_at_origin().unwrap();
        assert_eq!(got, r);
    }

    #[test]
    fn line_bundle_h_is_calabi_of_log() {
        let c = fixtures::line_bundle(2);
        let (_, h) = calabi_qh(&c, (3, 3)).unwrap();
        let log_u = c.data.u.entry(0, 0).log(c.accuracy()).unwrap();
        let d = calabi_d_jet(&log_u, 1, (3, 3));
        let hs = h.map(&Jet::zero(2), |x| x.entry(0, 0).clone());
        assert_eq!(first_bi_difference(&hs, &d, 6, Jet::agrees_with), None);
        // H_{11̄}(0) = ∂∂̄ log(1 + z z̄)|₀ = 1.
        assert_eq!(hs.tensor_component(&[1], &[1]).unwrap().value_at_origin().unwrap(), GaussianRational::one());
    }
}
