//! Star products on matrix-valued sections: the scalar engine and its
//! matrix lift, the conjugated product `∗ᵤ` built from it, the graph
//! formula for `∗ᵤ`, and the verifiers comparing them.

pub mod graph;
pub mod invert;
pub mod oracle;
pub mod random;
pub mod scalar;
pub mod verify;

pub use graph::GraphProduct;
pub use invert::nu_mat_invert;
pub use oracle::Oracle;
pub use random::{random_section, SectionSpec};
pub use scalar::ScalarStar;
pub use verify::{verify_left_mult, verify_suite, verify_twisted, SuiteOptions};

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::symmetrize::multiset_count;
use crate::algebra::{AlgebraError, GaussianRational, Jet, MatrixJet, NuSeries};
use crate::geometry::Chart;
use crate::geometry::GeometryError;
use crate::tensors::{IndexedTensor, MultiIndex, TensorError, Variance};

/// A ν-formal matrix-valued section over the chart.
pub type Section = NuSeries<MatrixJet>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StarError {
    #[error("section has dimension {0}, chart has {1}")]
    Dimension(usize, usize),
    #[error("section has {0} variables, chart has {1}")]
    Variables(usize, usize),
    #[error("requested ν-order {requested} exceeds the available order {available}")]
    Window { requested: i32, available: i32 },
    #[error("jet accuracy {accuracy} is below the required {required}")]
    Headroom { accuracy: i32, required: i32 },
    #[error("expected a bundle of rank 1, got {0}")]
    NotLineBundle(usize),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Checks that products through `ν^order` of inputs of polynomial degree
/// `≤ degree` are determined by the chart's jet accuracy.
pub fn check_headroom(chart: &Chart, order: i32, degree: u32) -> Result<(), StarError> {
    let required = 2 * order + degree as i32;
    if chart.accuracy() < required {
        return Err(StarError::Headroom { accuracy: chart.accuracy(), required });
    }
    Ok(())
}

/// Highest monomial degree in a section.
pub fn section_degree(f: &Section) -> u32 {
    f.iter().filter_map(|(_, a)| a.entries().iter().filter_map(Jet::max_degree).max()).max().unwrap_or(0)
}

/// A section that does not depend on ν.
pub fn constant_section(f: MatrixJet) -> Section {
    NuSeries::constant(f)
}

/// The pointwise product `f·g`.
pub fn pointwise(f: &Section, g: &Section) -> Section {
    f.mul(g)
}

/// `f·a` for a ν-independent `a`.
pub fn right_mul(f: &Section, a: &MatrixJet) -> Section {
    f.right_mul(a)
}

/// `Σ_{L,K} (D̄_L f) C^{L̄K} (D_K g)` summed over ordered index tuples,
/// with `C` stored by multisets. A scalar `C` (dimension 1) acts on matrix
/// sections entrywise.
///
/// The result is exact through the smallest order that all three factors
/// determine, further capped by `max_order`.
pub(crate) fn bidifferential(
    f: &Section,
    g: &Section,
    c: &IndexedTensor,
    left: impl Fn(&MatrixJet, &[u32]) -> MatrixJet + Sync,
    right: impl Fn(&MatrixJet, &[u32]) -> MatrixJet + Sync,
    max_order: Option<i32>,
) -> Section {
    debug_assert_eq!(c.variance, Variance::Upper);
    let template = f.template().clone();
    let c_low = c.iter().filter_map(|(_, v)| v.min_order()).min().or(c.max_order().map(|m| m + 1));
    let (Some(fl), Some(gl), Some(cl)) = (f.low_bound(), g.low_bound(), c_low) else {
        return Section::zero(&template).with_max(max_order);
    };
    let bounds = [
        f.max_order().map(|m| m + gl + cl),
        g.max_order().map(|m| m + fl + cl),
        c.max_order().map(|m| m + fl + gl),
        max_order,
    ];
    let top = bounds.into_iter().flatten().min();
    let entries: Vec<(&(MultiIndex, MultiIndex), &NuSeries<MatrixJet>)> = c.iter().collect();
    let mut left_cache: BTreeMap<(&MultiIndex, i32), MatrixJet> = BTreeMap::new();
    let mut right_cache: BTreeMap<(&MultiIndex, i32), MatrixJet> = BTreeMap::new();
    for ((l, k), _) in &entries {
        for (a, fa) in f.iter() {
            left_cache.entry((l, a)).or_insert_with(|| left(fa, l));
        }
        for (b, gb) in g.iter() {
            right_cache.entry((k, b)).or_insert_with(|| right(gb, k));
        }
    }
    let parts: Vec<BTreeMap<i32, MatrixJet>> = entries
        .par_iter()
        .map(|((l, k), cv)| {
            let w = GaussianRational::real(&multiset_count(l) * &multiset_count(k));
            let mut out: BTreeMap<i32, MatrixJet> = BTreeMap::new();
            for (s, cs) in cv.iter() {
                for (a, _) in f.iter() {
                    let df = &left_cache[&(l, a)];
                    if df.is_zero() {
                        continue;
                    }
                    let lhs = apply(df, cs);
                    for (b, _) in g.iter() {
                        let order = a + b + s;
                        if top.is_some_and(|t| order > t) {
                            continue;
                        }
                        let dg = &right_cache[&(k, b)];
                        if dg.is_zero() {
                            continue;
                        }
                        let term = (&lhs * dg).scale(&w);
                        match out.get_mut(&order) {
                            Some(x) => *x = &*x + &term,
                            None => {
                                out.insert(order, term);
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    let mut total: BTreeMap<i32, MatrixJet> = BTreeMap::new();
    for p in parts {
        for (s, v) in p {
            match total.get_mut(&s) {
                Some(x) => *x = &*x + &v,
                None => {
                    total.insert(s, v);
                }
            }
        }
    }
    Section::from_map(total, top, &template)
}

/// `x·c`, with a scalar `c` multiplying every entry.
fn apply(x: &MatrixJet, c: &MatrixJet) -> MatrixJet {
    if c.dim() == 1 && x.dim() != 1 {
        x.mul_jet(c.entry(0, 0))
    } else {
        x * c
    }
}

/// Checks that a section matches the chart's dimension and variables.
pub(crate) fn check_section(f: &Section, dim: usize, nvars: usize) -> Result<(), StarError> {
    let t = f.template();
    if t.dim() != dim {
        return Err(StarError::Dimension(t.dim(), dim));
    }
    if t.nvars() != nvars {
        return Err(StarError::Variables(t.nvars(), nvars));
    }
    Ok(())
}
