//! `E_{KL̄}` from the Calabi functions and from graphs, `C^{L̄K}` from
//! graphs, and their mixed lifts.

use rayon::prelude::*;

use crate::algebra::biseries::BiSeries;
use crate::algebra::{factorial, GaussianRational, MatrixJet, NuSeries, Rational};
use crate::coefficients::{c_triangular, CoeffTable};
use crate::geometry::calabi::{calabi_d, calabi_qh};
use crate::geometry::Chart;
use crate::graphs::ngraph::{keys_where, lambda_order, KeyBounds};
use crate::graphs::{enumerate::EnumBounds, enumerate_with, Family, GraphClass};

use super::eval::{eval_graph, Form, GraphTensor, TensorContext};
use super::{multi_indices, IndexedTensor, TensorError, Variance};

/// Ranks and ν window of an `E_{KL̄}` computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EBounds {
    pub max_k: u32,
    pub max_l: u32,
    pub max_order: i32,
}

/// Limits of a `C^{L̄K}` graph sum. `max_k` and `max_l` bound the sink and
/// source degrees of the graphs, so entries are complete only within them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CBounds {
    pub max_order: i32,
    pub max_l: Option<u32>,
    pub max_k: Option<u32>,
}

impl CBounds {
    pub fn new(max_order: i32) -> Self {
        CBounds { max_order, max_l: None, max_k: None }
    }
}

/// `E_{KL̄}` read off `e^{D} Q = e^{D+H}` through bidegree
/// `(max_k, max_l)`.
pub fn e_from_calabi(chart: &Chart, b: &EBounds) -> Result<IndexedTensor, TensorError> {
    let bideg = (b.max_k, b.max_l);
    let d = calabi_d(chart, bideg);
    let (q, _) = calabi_qh(chart, bideg)?;
    let zero = NuSeries::zero(&MatrixJet::zero(chart.d(), chart.nvars()));
    let dm = d.map(&zero, |s| s.map(&MatrixJet::zero(chart.d(), chart.nvars()), |j| MatrixJet::scalar(chart.d(), j)));
    let qm: BiSeries<NuSeries<MatrixJet>> = q.map(&zero, |c| NuSeries::constant(c.clone()));
    let e = dm.exp()?.mul(&qm);
    let mut t = IndexedTensor::for_chart(Variance::Lower, chart).with_max_order(Some(b.max_order));
    for k in multi_indices(chart.m(), b.max_k) {
        for l in multi_indices(chart.m(), b.max_l) {
            let v = e.tensor_component(&k, &l)?;
            t.add_entry(k.clone(), l, v);
        }
    }
    Ok(t)
}

/// `Σ w(Γ) Γ` over `graphs` in the given form, evaluated in parallel and
/// summed in input order.
pub fn graph_sum<'g>(
    ctx: &TensorContext,
    graphs: impl IntoParallelIterator<Item = (&'g crate::graphs::FGraph, GaussianRational)>,
    form: Form,
    max_order: i32,
) -> Result<IndexedTensor, TensorError> {
    let parts: Vec<(GraphTensor, GaussianRational)> = graphs
        .into_par_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(g, w)| eval_graph(g, ctx, form).map(|t| (t, w)))
        .collect::<Result<_, _>>()?;
    let mut t = IndexedTensor::for_chart(form.variance(), ctx.chart).with_max_order(Some(max_order));
    for (gt, w) in &parts {
        gt.add_into(&mut t, w);
    }
    Ok(t)
}

/// `E_{KL̄} = Σ_{Γ ∈ 𝓝} p! q! / (|Aut| s!) Γ_{KL̄}` for `|K| ≤ max_k`,
/// `|L| ≤ max_l` and ν-orders `≤ max_order`.
pub fn e_from_graphs(ctx: &TensorContext, b: &EBounds) -> Result<IndexedTensor, TensorError> {
    let keys = keys_where(&KeyBounds {
        max_source: b.max_k,
        max_sink: b.max_l,
        max_nu: None,
        lower_order: Some((-(b.max_k.min(b.max_l) as i32), b.max_order)),
    });
    let graphs: Vec<_> = keys
        .iter()
        .map(|key| {
            let g = key.realize();
            let num = &factorial(key.sink_degree() as usize) * &factorial(key.source_degree() as usize);
            let den = &Rational::from_int(lambda_order(key) as i64) * &factorial(key.k());
            (g, GaussianRational::real(&num / &den))
        })
        .collect();
    graph_sum(ctx, graphs.par_iter().map(|(g, w)| (g, w.clone())), Form::Lower, b.max_order)
}

/// The classes of `𝓜` entering a `C` sum with the given bounds.
pub fn c_classes(b: &CBounds) -> Vec<GraphClass> {
    enumerate_with(&EnumBounds { max_degree: b.max_order, family: Family::M, max_sink: b.max_k, max_source: b.max_l })
}

/// `Σ_{Γ ∈ classes} c(Γ) / |Aut(Γ)| Γ` in the given form.
pub fn c_from_table(
    ctx: &TensorContext,
    classes: &[GraphClass],
    table: &CoeffTable,
    form: Form,
    max_order: i32,
) -> Result<IndexedTensor, TensorError> {
    let weighted: Vec<_> = classes
        .iter()
        .filter(|c| c.nu_degree <= max_order)
        .map(|c| {
            let cv = table.get(&c.graph).cloned().unwrap_or_else(|| GaussianRational::real(c_triangular(&c.graph)));
            let w = &cv * &GaussianRational::real(Rational::from_int(c.aut_order as i64).recip().unwrap());
            (&c.graph, w)
        })
        .collect();
    graph_sum(ctx, weighted.into_par_iter(), form, max_order)
}

/// `C^{L̄K} = Σ_{Γ ∈ 𝓜} c(Γ) / |Aut(Γ)| Γ^{L̄K}` through `ν^{max_order}`.
pub fn c_from_graphs(ctx: &TensorContext, b: &CBounds) -> Result<IndexedTensor, TensorError> {
    let classes = c_classes(b);
    let table = CoeffTable::c_table(&classes);
    c_from_table(ctx, &classes, &table, Form::Upper, b.max_order)
}

/// `C_K^I = G_{KL̄} C^{L̄I}`.
pub fn lift_c(c: &IndexedTensor, g_lower: &IndexedTensor) -> Result<IndexedTensor, TensorError> {
    g_lower.contract(c)
}

/// `E_K^I = E_{KL̄} G^{L̄I}`.
pub fn lift_e(e: &IndexedTensor, g_upper: &IndexedTensor) -> Result<IndexedTensor, TensorError> {
    e.contract(g_upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tensors::{delta_tensor, g_tensors, rank};

    /// `C^{l̄₁…l̄_r k₁…k_r} = ν^r/(r!)² Σ_σ Π g^{l̄_i k_σ(i)}`, i.e. `G^{L̄K}/r!`.
    fn anti_wick(chart: &Chart, max: u32) -> IndexedTensor {
        let (_, gu) = g_tensors(chart, max);
        let mut t = IndexedTensor::for_chart(Variance::Upper, chart);
        for ((l, k), v) in gu.iter() {
            let r = rank(k) as usize;
            t.add_entry(l.clone(), k.clone(), v.scale(&GaussianRational::real(factorial(r).recip().unwrap())));
        }
        t
    }

    #[test]
    fn flat_chart_gives_anti_wick() {
        for m in [1, 2] {
            let chart = fixtures::flat_chart(m, 3);
            let top = if m == 1 { 3 } else { 2 };
            let ctx = TensorContext::for_degree(&chart, top).unwrap();
            let c = c_from_graphs(&ctx, &CBounds::new(top)).unwrap();
            assert_eq!(c.max_order(), Some(top));
            let want = anti_wick(&chart, top as u32).truncate(top);
            assert!(c.agrees_with(&want, |_, _| true), "m = {m}: {c:?}");
        }
    }

    #[test]
    fn e_routes_agree() {
        for chart in [fixtures::rich_bundle(2), fixtures::line_bundle(2), fixtures::flat_chart(1, 2)] {
            let b = EBounds { max_k: 3, max_l: 3, max_order: 2 };
            let ctx = TensorContext::new(&chart, (3, 3)).unwrap();
            let from_graphs = e_from_graphs(&ctx, &b).unwrap();
            let from_calabi = e_from_calabi(&chart, &b).unwrap();
            assert!(from_graphs.agrees_with(&from_calabi, |_, _| true), "{:?}", from_graphs.first_difference(&from_calabi, |_, _| true));
        }
    }

    #[test]
    fn flat_e_is_g_lower() {
        let chart = fixtures::flat_chart(2, 2);
        let b = EBounds { max_k: 2, max_l: 2, max_order: 3 };
        let e = e_from_calabi(&chart, &b).unwrap();
        // e^{ν⁻¹ Σ η^k η̄^k} gives |K|! G_{KL̄}.
        let (gl, _) = g_tensors(&chart, 2);
        let want = gl.iter().fold(IndexedTensor::for_chart(Variance::Lower, &chart), |mut t, ((k, l), v)| {
            t.add_entry(k.clone(), l.clone(), v.scale(&GaussianRational::real(factorial(rank(k) as usize))));
            t
        });
        assert!(e.agrees_with(&want.truncate(3), |_, _| true));
        assert!(e.get(&[1, 0], &[0, 0]).is_none());
    }

    #[test]
    fn line_bundle_e11_at_nu0() {
        let chart = fixtures::line_bundle(2);
        let e = e_from_calabi(&chart, &EBounds { max_k: 1, max_l: 1, max_order: 2 }).unwrap();
        let v = e.coeff(&[1], &[1], 0).unwrap().value_at_origin().unwrap();
        assert_eq!(v.get(0, 0), &GaussianRational::one());
    }

    #[test]
    fn c_is_natural_and_starts_with_identity() {
        let chart = fixtures::rich_bundle(2);
        let ctx = TensorContext::for_degree(&chart, 3).unwrap();
        let c = c_from_graphs(&ctx, &CBounds::new(3)).unwrap();
        for ((l, k), v) in c.iter() {
            for (s, _) in v.iter() {
                assert!(rank(l) as i32 <= s && rank(k) as i32 <= s, "{l:?} {k:?} at ν^{s}");
            }
        }
        let c0 = c.coeff(&[0], &[0], 0).unwrap();
        assert!(c0.agrees_with(&chart.identity()));
    }

    #[test]
    fn inversion_on_small_window() {
        // E_{KL̄} C^{L̄I} = Δ_K^I for |K|, |I| ≤ 1 through ν¹.
        let chart = fixtures::rich_bundle(1);
        let ctx = TensorContext::for_degree(&chart, 3).unwrap();
        let c = c_from_graphs(&ctx, &CBounds { max_order: 3, max_l: Some(3), max_k: Some(1) }).unwrap();
        let e = e_from_graphs(&ctx, &EBounds { max_k: 1, max_l: 3, max_order: 1 }).unwrap();
        let prod = e.contract(&c).unwrap().truncate(1);
        let delta = delta_tensor(Variance::Mixed, 1, 2, 2, 1);
        let keep = |a: &[u32], b: &[u32]| rank(a) <= 1 && rank(b) <= 1;
        assert!(prod.agrees_with(&delta, keep), "{:?}", prod.first_difference(&delta, keep));
    }
}
