//! Standard charts used by tests, benchmarks and the acceptance suite.

use std::collections::BTreeMap;

use crate::algebra::{GaussianRational, Jet, MatrixJet};
use crate::geometry::{Chart, ChartData};

/// Polynomial in `2m` variables from `(exponents, numerator, denominator)`.
pub fn poly(m: usize, terms: &[(&[u32], i64, i64)]) -> Jet {
    Jet::from_terms(
        2 * m,
        terms.iter().map(|(e, n, d)| (e.to_vec(), GaussianRational::ratio(*n, *d))),
        None,
    )
}

/// `Σ_k z^k z̄^k`.
pub fn flat_potential(m: usize) -> Jet {
    let mut s = Jet::zero(2 * m);
    for k in 0..m {
        s = &s + &(&Jet::z(m, k) * &Jet::zbar(m, k));
    }
    s
}

fn build(data: ChartData) -> Chart {
    Chart::new(data).expect("fixture chart is valid")
}

/// `Φ₋₁ = Σ z^k z̄^k`, trivial line bundle.
pub fn flat_chart(m: usize, order: i32) -> Chart {
    let pots = BTreeMap::from([(-1, flat_potential(m))]);
    build(ChartData::new(m, order, pots, MatrixJet::identity(1, 2 * m)))
}

/// `u = [[1, z], [z̄, 1 + z z̄]]` (det ≡ 1).
pub fn example_bundle_metric() -> MatrixJet {
    let z = Jet::z(1, 0);
    let zb = Jet::zbar(1, 0);
    let one = Jet::one(2);
    let zz = &z * &zb;
    MatrixJet::from_rows(vec![vec![one.clone(), z], vec![zb, &one + &zz]])
}

/// Flat base `Φ₋₁ = z z̄` with the rank-2 example bundle.
pub fn bundle_flat_base(order: i32) -> Chart {
    let pots = BTreeMap::from([(-1, flat_potential(1))]);
    build(ChartData::new(1, order, pots, example_bundle_metric()))
}

/// Curved potentials of every weight up to 2.
pub fn rich_potentials() -> BTreeMap<i32, Jet> {
    BTreeMap::from([
        (-1, poly(1, &[(&[1, 1], 1, 1), (&[2, 2], 1, 2)])),
        (0, poly(1, &[(&[1, 1], 1, 1), (&[2, 1], 1, 2), (&[1, 2], 1, 2)])),
        (1, poly(1, &[(&[1, 1], 1, 1)])),
        (2, poly(1, &[(&[1, 1], 1, 1)])),
    ])
}

/// Curved base with all weights `−1..=2` and the rank-2 example bundle.
pub fn rich_bundle(order: i32) -> Chart {
    build(ChartData::new(1, order, rich_potentials(), example_bundle_metric()))
}

/// Same potentials as [`rich_bundle`] with the trivial line bundle.
pub fn rich_scalar(order: i32) -> Chart {
    build(ChartData::new(1, order, rich_potentials(), MatrixJet::identity(1, 2)))
}

/// `u = 1 + z z̄` over the flat base.
pub fn line_bundle(order: i32) -> Chart {
    let u = MatrixJet::from_scalar(poly(1, &[(&[0, 0], 1, 1), (&[1, 1], 1, 1)]));
    let pots = BTreeMap::from([(-1, flat_potential(1))]);
    build(ChartData::new(1, order, pots, u))
}

/// Flat base with `Φ₃ = z z̄² + z² z̄`, used for the single-vertex
/// `(1, 2, 3)` graph.
pub fn weight_three_chart() -> Chart {
    let pots = BTreeMap::from([
        (-1, flat_potential(1)),
        (3, poly(1, &[(&[1, 2], 1, 1), (&[2, 1], 1, 1)])),
    ]);
    build(ChartData::new(1, 3, pots, MatrixJet::identity(1, 2)))
}

/// A constant non-identity Hermitian metric of rank 2.
pub fn constant_bundle(order: i32) -> Chart {
    let c = |n| Jet::constant(2, GaussianRational::from_int(n));
    let u = MatrixJet::from_rows(vec![
        vec![c(2), Jet::constant(2, GaussianRational::i())],
        vec![Jet::constant(2, -GaussianRational::i()), c(1)],
    ]);
    build(ChartData::new(1, order, rich_potentials(), u))
}
