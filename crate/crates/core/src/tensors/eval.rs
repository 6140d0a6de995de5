//! Evaluation of the upper, mixed and lower tensors of a graph on a chart.
//!
//! Every edge end that carries an index becomes an index variable ranging
//! over `0..m`. The graph is turned into a network of vertex factors
//! (derivatives of `Φ_r` or components of `H`), edge factors (`g^{l̄k}` or
//! `g_{kl̄}`) and two ordered lists of free variables. Summing the network
//! over all variable values and grouping by the multisets of the free
//! variables gives the symmetrized tensor.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::symmetrize::{multiset_count, tuple_to_exps};
use crate::algebra::{GaussianRational, Jet, MatrixJet, NuSeries};
use crate::geometry::calabi::{calabi_qh, MatrixBi};
use crate::geometry::Chart;
use crate::graphs::{FGraph, VertexKind, SINK, SOURCE};

use super::{IndexedTensor, MultiIndex, TensorError, Variance};

/// Which of the three tensors of a graph to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    /// `Γ^{L̄K}`.
    Upper,
    /// `Γ_K^I`.
    Mixed,
    /// `Γ_{KL̄}`, graphs without internal edges only.
    Lower,
}

impl Form {
    pub fn variance(self) -> Variance {
        match self {
            Form::Upper => Variance::Upper,
            Form::Mixed => Variance::Mixed,
            Form::Lower => Variance::Lower,
        }
    }
}

/// A chart together with the Calabi tensor `H` needed by special vertices.
pub struct TensorContext<'a> {
    pub chart: &'a Chart,
    h: MatrixBi,
}

impl<'a> TensorContext<'a> {
    /// Computes `H` through the given bidegree; special vertices of type
    /// `(p, q)` need `p, q` within it.
    pub fn new(chart: &'a Chart, bidegree: (u32, u32)) -> Result<Self, TensorError> {
        let (_, h) = calabi_qh(chart, bidegree)?;
        Ok(TensorContext { chart, h })
    }

    /// Context whose `H` covers every special vertex of a graph of ν-degree
    /// at most `max_degree`.
    pub fn for_degree(chart: &'a Chart, max_degree: i32) -> Result<Self, TensorError> {
        let n = max_degree.max(1) as u32;
        Self::new(chart, (n, n))
    }

    pub fn h(&self) -> &MatrixBi {
        &self.h
    }

    /// `H_{KL̄}` for multiplicity vectors `alpha`, `beta`.
    pub fn h_component(&self, alpha: &[u32], beta: &[u32]) -> Result<MatrixJet, TensorError> {
        Ok(self.h.tensor_component(alpha, beta)?)
    }

    /// `∂_K ∂_L̄ Φ_r`.
    pub fn phi_derivative(&self, r: i32, alpha: &[u32], beta: &[u32]) -> Jet {
        let exps: Vec<u32> = alpha.iter().chain(beta).copied().collect();
        self.chart.phi(r).derive_multi(&exps)
    }
}

#[derive(Clone, Copy, Debug)]
enum Metric {
    /// `g^{t̄h}` with `t` antiholomorphic, `h` holomorphic.
    Inverse,
    /// `g_{ht̄}`.
    Lower,
}

struct EdgeFactor {
    t: usize,
    h: usize,
    metric: Metric,
}

struct Vertex {
    kind: VertexKind,
    hol: Vec<usize>,
    antihol: Vec<usize>,
}

#[derive(Default)]
struct Network {
    nvars: usize,
    edges: Vec<EdgeFactor>,
    vertices: Vec<Vertex>,
    first: Vec<usize>,
    second: Vec<usize>,
}

impl Network {
    fn var(&mut self) -> usize {
        self.nvars += 1;
        self.nvars - 1
    }

    fn build(g: &FGraph, form: Form) -> Network {
        let mut net = Network::default();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for v in g.internal_nodes() {
            slot.insert(v, net.vertices.len());
            net.vertices.push(Vertex { kind: g.kind(v).expect("internal"), hol: vec![], antihol: vec![] });
        }
        for (u, v) in g.edge_list() {
            match form {
                Form::Upper => {
                    let (t, h) = (net.var(), net.var());
                    net.edges.push(EdgeFactor { t, h, metric: Metric::Inverse });
                    if u == SOURCE {
                        net.first.push(t);
                    } else {
                        net.vertices[slot[&u]].antihol.push(t);
                    }
                    if v == SINK {
                        net.second.push(h);
                    } else {
                        net.vertices[slot[&v]].hol.push(h);
                    }
                }
                Form::Mixed => {
                    if u == SOURCE {
                        let x = net.var();
                        net.first.push(x);
                        if v == SINK {
                            net.second.push(x);
                        } else {
                            net.vertices[slot[&v]].hol.push(x);
                        }
                    } else {
                        let (t, h) = (net.var(), net.var());
                        net.edges.push(EdgeFactor { t, h, metric: Metric::Inverse });
                        net.vertices[slot[&u]].antihol.push(t);
                        if v == SINK {
                            net.second.push(h);
                        } else {
                            net.vertices[slot[&v]].hol.push(h);
                        }
                    }
                }
                Form::Lower => match (u == SOURCE, v == SINK) {
                    (true, true) => {
                        let (h, t) = (net.var(), net.var());
                        net.edges.push(EdgeFactor { t, h, metric: Metric::Lower });
                        net.first.push(h);
                        net.second.push(t);
                    }
                    (true, false) => {
                        let h = net.var();
                        net.first.push(h);
                        net.vertices[slot[&v]].hol.push(h);
                    }
                    (false, true) => {
                        let t = net.var();
                        net.second.push(t);
                        net.vertices[slot[&u]].antihol.push(t);
                    }
                    (false, false) => unreachable!("checked by caller"),
                },
            }
        }
        net
    }
}

/// The symmetrized tensor of one graph: a single ν-order and, per index
/// pair, a matrix jet.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphTensor {
    pub form: Form,
    pub order: i32,
    pub values: BTreeMap<(MultiIndex, MultiIndex), MatrixJet>,
}

impl GraphTensor {
    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Adds `w · ν^order · values` into `t`.
    pub fn add_into(&self, t: &mut IndexedTensor, w: &GaussianRational) {
        assert_eq!(t.variance, self.form.variance(), "variance");
        for ((a, b), v) in &self.values {
            t.add_entry(a.clone(), b.clone(), NuSeries::monomial(self.order, v.scale(w)));
        }
    }

    pub fn to_tensor(&self, ctx: &TensorContext) -> IndexedTensor {
        let mut t = IndexedTensor::for_chart(self.form.variance(), ctx.chart);
        self.add_into(&mut t, &GaussianRational::one());
        t
    }
}

/// ν-order of the requested tensor of `g`.
pub fn form_order(g: &FGraph, form: Form) -> i32 {
    let nu = g.nu_degree();
    match form {
        Form::Upper => nu,
        Form::Mixed => nu - g.q() as i32,
        Form::Lower => nu - g.p() as i32 - g.q() as i32,
    }
}

struct Evaluator<'c, 'a> {
    ctx: &'c TensorContext<'a>,
    net: Network,
    m: usize,
    values: Vec<usize>,
    /// Vertices and edges whose last variable is `i`, for early pruning.
    vertices_at: Vec<Vec<usize>>,
    edges_at: Vec<Vec<usize>>,
    regular_cache: HashMap<(i32, Vec<u32>, Vec<u32>), Jet>,
    special_cache: HashMap<(Vec<u32>, Vec<u32>), MatrixJet>,
    sums: BTreeMap<(MultiIndex, MultiIndex), MatrixJet>,
    error: Option<TensorError>,
}

enum Factor {
    Scalar(Jet),
    Matrix(usize, MatrixJet),
}

impl Evaluator<'_, '_> {
    fn exps(&self, vars: &[usize]) -> Vec<u32> {
        let t: Vec<usize> = vars.iter().map(|&x| self.values[x]).collect();
        tuple_to_exps(&t, self.m)
    }

    fn vertex_factor(&mut self, i: usize) -> Result<Factor, TensorError> {
        let alpha = self.exps(&self.net.vertices[i].hol);
        let beta = self.exps(&self.net.vertices[i].antihol);
        match self.net.vertices[i].kind {
            VertexKind::Regular(r) => {
                let key = (r, alpha, beta);
                if let Some(j) = self.regular_cache.get(&key) {
                    return Ok(Factor::Scalar(j.clone()));
                }
                let j = self.ctx.phi_derivative(r, &key.1, &key.2);
                self.regular_cache.insert(key, j.clone());
                Ok(Factor::Scalar(j))
            }
            VertexKind::Special(label) => {
                let key = (alpha, beta);
                if let Some(h) = self.special_cache.get(&key) {
                    return Ok(Factor::Matrix(label, h.clone()));
                }
                let h = self.ctx.h_component(&key.0, &key.1)?;
                self.special_cache.insert(key, h.clone());
                Ok(Factor::Matrix(label, h))
            }
        }
    }

    fn edge_factor(&self, e: &EdgeFactor) -> Jet {
        let (t, h) = (self.values[e.t], self.values[e.h]);
        match e.metric {
            Metric::Inverse => self.ctx.chart.g_inv(t, h).clone(),
            Metric::Lower => self.ctx.chart.g(h, t).clone(),
        }
    }

    fn factor_is_zero(&mut self, i: usize) -> bool {
        match self.vertex_factor(i) {
            Ok(Factor::Scalar(j)) => j.is_zero(),
            Ok(Factor::Matrix(_, h)) => h.is_zero(),
            Err(e) => {
                self.error.get_or_insert(e);
                true
            }
        }
    }

    fn walk(&mut self, i: usize) {
        if self.error.is_some() {
            return;
        }
        if i == self.net.nvars {
            self.leaf();
            return;
        }
        for x in 0..self.m {
            self.values[i] = x;
            let dead = self.edges_at[i].iter().any(|&e| self.edge_factor(&self.net.edges[e]).is_zero())
                || self.vertices_at[i].clone().into_iter().any(|v| self.factor_is_zero(v));
            if !dead {
                self.walk(i + 1);
            }
        }
    }

    fn leaf(&mut self) {
        let d = self.ctx.chart.d();
        let mut scalar = Jet::one(self.ctx.chart.nvars());
        for e in &self.net.edges {
            scalar = &scalar * &self.edge_factor(e);
        }
        let mut matrices = Vec::new();
        for v in 0..self.net.vertices.len() {
            match self.vertex_factor(v) {
                Ok(Factor::Scalar(j)) => scalar = &scalar * &j,
                Ok(Factor::Matrix(label, h)) => matrices.push((label, h)),
                Err(e) => {
                    self.error.get_or_insert(e);
                    return;
                }
            }
        }
        // Largest label on the left.
        matrices.sort_by_key(|m| std::cmp::Reverse(m.0));
        let value = match matrices.into_iter().map(|(_, h)| h).reduce(|a, b| &a * &b) {
            Some(mat) => mat.mul_jet(&scalar),
            None => MatrixJet::scalar(d, &scalar),
        };
        let key = (self.exps(&self.net.first), self.exps(&self.net.second));
        match self.sums.get_mut(&key) {
            Some(acc) => *acc = &*acc + &value,
            None => {
                self.sums.insert(key, value);
            }
        }
    }
}

/// The symmetrized tensor of `g` in the requested form.
pub fn eval_graph(g: &FGraph, ctx: &TensorContext, form: Form) -> Result<GraphTensor, TensorError> {
    if form == Form::Lower && !g.is_n_graph() {
        return Err(TensorError::NotNGraph(g.to_string()));
    }
    let order = form_order(g, form);
    let empty = GraphTensor { form, order, values: BTreeMap::new() };
    // A regular vertex of a weight with vanishing potential kills the graph.
    if g.weights().iter().any(|&r| ctx.chart.phi(r).is_zero()) {
        return Ok(empty);
    }
    let net = Network::build(g, form);
    let mut vertices_at = vec![Vec::new(); net.nvars];
    for (i, v) in net.vertices.iter().enumerate() {
        if let Some(&last) = v.hol.iter().chain(&v.antihol).max() {
            vertices_at[last].push(i);
        }
    }
    let mut edges_at = vec![Vec::new(); net.nvars];
    for (i, e) in net.edges.iter().enumerate() {
        edges_at[e.t.max(e.h)].push(i);
    }
    let mut ev = Evaluator {
        ctx,
        values: vec![0; net.nvars],
        net,
        m: ctx.chart.m(),
        vertices_at,
        edges_at,
        regular_cache: HashMap::new(),
        special_cache: HashMap::new(),
        sums: BTreeMap::new(),
        error: None,
    };
    ev.walk(0);
    if let Some(e) = ev.error {
        return Err(e);
    }
    let mut values = BTreeMap::new();
    for ((a, b), v) in ev.sums {
        let count = &multiset_count(&a) * &multiset_count(&b);
        let v = v.scale(&GaussianRational::real(count.recip().expect("nonzero count")));
        if !v.is_zero() {
            values.insert((a, b), v);
        }
    }
    Ok(GraphTensor { order, values, ..empty })
}

pub fn eval_graph_upper(g: &FGraph, ctx: &TensorContext) -> Result<GraphTensor, TensorError> {
    eval_graph(g, ctx, Form::Upper)
}

pub fn eval_graph_mixed(g: &FGraph, ctx: &TensorContext) -> Result<GraphTensor, TensorError> {
    eval_graph(g, ctx, Form::Mixed)
}

pub fn eval_graph_lower(g: &FGraph, ctx: &TensorContext) -> Result<GraphTensor, TensorError> {
    eval_graph(g, ctx, Form::Lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graphs::{enumerate, Family};
    use crate::tensors::g_tensors;

    fn only_entry(t: &GraphTensor) -> (&(MultiIndex, MultiIndex), &MatrixJet) {
        assert_eq!(t.values.len(), 1, "{t:?}");
        t.values.iter().next().unwrap()
    }

    #[test]
    fn worked_example_three_forms() {
        let chart = fixtures::weight_three_chart();
        let ctx = TensorContext::for_degree(&chart, 6).unwrap();
        let g = FGraph::single_regular(3, 1, 2);
        // ∂_z ∂_z̄² Φ₃ with Φ₃ = z z̄² + z² z̄ is the constant 2; g^{1̄1} = 1.
        let d3 = chart.phi(3).derive_multi(&[1, 2]);
        let upper = eval_graph_upper(&g, &ctx).unwrap();
        assert_eq!(upper.order, 6);
        let (k, v) = only_entry(&upper);
        assert_eq!(k, &(vec![1], vec![2]));
        assert!(v.agrees_with(&MatrixJet::scalar(1, &d3)));
        let mixed = eval_graph_mixed(&g, &ctx).unwrap();
        assert_eq!(mixed.order, 5);
        assert_eq!(only_entry(&mixed).0, &(vec![1], vec![2]));
        let lower = eval_graph_lower(&g, &ctx).unwrap();
        assert_eq!(lower.order, 3);
        let (k, v) = only_entry(&lower);
        assert_eq!(k, &(vec![1], vec![2]));
        assert!(v.agrees_with(&MatrixJet::scalar(1, &d3)));
    }

    #[test]
    fn single_edge_rules() {
        let chart = fixtures::flat_chart(1, 2);
        let ctx = TensorContext::for_degree(&chart, 2).unwrap();
        let l1 = FGraph::lambda(1);
        let one = MatrixJet::identity(1, 2);
        for (form, order) in [(Form::Upper, 1), (Form::Mixed, 0), (Form::Lower, -1)] {
            let t = eval_graph(&l1, &ctx, form).unwrap();
            assert_eq!(t.order, order);
            let (k, v) = only_entry(&t);
            assert_eq!(k, &(vec![1], vec![1]));
            assert!(v.agrees_with(&one));
        }
    }

    #[test]
    fn vanishing_potential_gives_zero() {
        let chart = fixtures::flat_chart(1, 2);
        let ctx = TensorContext::for_degree(&chart, 8).unwrap();
        let t = eval_graph_upper(&FGraph::single_regular(5, 1, 1), &ctx).unwrap();
        assert!(t.is_zero());
        assert!(eval_graph_lower(&FGraph::empty(vec![], 0), &ctx).unwrap().values.len() == 1);
    }

    #[test]
    fn lower_form_rejects_internal_edges() {
        let chart = fixtures::flat_chart(1, 2);
        let ctx = TensorContext::for_degree(&chart, 3).unwrap();
        let mut g = FGraph::empty(vec![0, 0], 0);
        g.add_edges(SOURCE, 2, 1);
        g.add_edges(2, 3, 1);
        g.add_edges(3, SINK, 1);
        assert!(matches!(eval_graph_lower(&g, &ctx), Err(TensorError::NotNGraph(_))));
    }

    #[test]
    fn support_rule() {
        let chart = fixtures::rich_bundle(2);
        let ctx = TensorContext::for_degree(&chart, 3).unwrap();
        for c in enumerate(3, Family::M) {
            let g = &c.graph;
            for form in [Form::Upper, Form::Mixed] {
                let t = eval_graph(g, &ctx, form).unwrap();
                // First slot: source edges; second slot: sink edges.
                let want = (g.q(), g.p());
                for (a, b) in t.values.keys() {
                    assert_eq!((super::super::rank(a), super::super::rank(b)), want, "{g}");
                }
            }
        }
    }

    fn scalar_chart_m2() -> Chart {
        let pots = BTreeMap::from([
            (
                -1,
                fixtures::poly(
                    2,
                    &[(&[1, 0, 1, 0], 1, 1), (&[0, 1, 0, 1], 1, 1), (&[1, 0, 0, 1], 1, 2), (&[0, 1, 1, 0], 1, 2), (&[1, 1, 1, 1], 1, 1)],
                ),
            ),
            (0, fixtures::poly(2, &[(&[2, 0, 1, 0], 1, 1), (&[1, 0, 2, 0], 1, 1), (&[1, 1, 0, 1], 1, 1), (&[0, 1, 1, 1], 1, 1)])),
            (1, fixtures::poly(2, &[(&[1, 0, 1, 0], 1, 1), (&[0, 2, 0, 2], 1, 1)])),
        ]);
        let data = crate::geometry::ChartData::new(2, 1, pots, MatrixJet::identity(1, 4)).with_accuracy(4);
        Chart::new(data).unwrap()
    }

    /// `Γ_K^I = Γ_{KL̄} G^{L̄I} = G_{KL̄} Γ^{L̄I}` on every class without
    /// internal edges.
    #[test]
    fn three_forms_are_consistent() {
        for chart in [fixtures::rich_bundle(2), scalar_chart_m2()] {
            let ctx = TensorContext::for_degree(&chart, 3).unwrap();
            let (gl, gu) = g_tensors(&chart, 3);
            for c in enumerate(3, Family::N) {
                let g = &c.graph;
                let mixed = eval_graph_mixed(g, &ctx).unwrap().to_tensor(&ctx);
                let lower = eval_graph_lower(g, &ctx).unwrap().to_tensor(&ctx);
                let upper = eval_graph_upper(g, &ctx).unwrap().to_tensor(&ctx);
                assert!(lower.contract(&gu).unwrap().agrees_with(&mixed, |_, _| true), "{g}");
                assert!(gl.contract(&upper).unwrap().agrees_with(&mixed, |_, _| true), "{g}");
            }
        }
    }

    /// Mixed and upper forms agree after lowering for graphs with internal
    /// edges too.
    #[test]
    fn mixed_is_lowered_upper() {
        let chart = fixtures::rich_bundle(2);
        let ctx = TensorContext::for_degree(&chart, 3).unwrap();
        let (gl, _) = g_tensors(&chart, 3);
        for c in enumerate(3, Family::M) {
            let g = &c.graph;
            let mixed = eval_graph_mixed(g, &ctx).unwrap().to_tensor(&ctx);
            let upper = eval_graph_upper(g, &ctx).unwrap().to_tensor(&ctx);
            assert!(gl.contract(&upper).unwrap().agrees_with(&mixed, |_, _| true), "{g}");
        }
    }
}
