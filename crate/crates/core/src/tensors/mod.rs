//! Symmetric multi-index tensors with ν-series of matrix jets as values,
//! graph tensors, and operators on the formal Fock space.
//!
//! A symmetric index is stored by its multiplicity vector (length `m`).
//! Contracting over a symmetric index `P` sums over ordered tuples, so each
//! multiset `π` is weighted by its number of orderings `|π|! / π!`.

pub mod eval;
pub mod fock;
pub mod sums;

pub use eval::{eval_graph, eval_graph_lower, eval_graph_mixed, eval_graph_upper, Form, GraphTensor, TensorContext};
pub use fock::{fock_compose, fock_invert, FockOperator};
pub use sums::{
    c_classes, c_from_graphs, c_from_table, e_from_calabi, e_from_graphs, lift_c, lift_e, CBounds, EBounds,
};

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::biseries::exponents_of_degree;
use crate::algebra::symmetrize::{exps_to_sorted_tuple, multiset_count};
use crate::algebra::{AlgebraError, GaussianRational, Jet, MatrixJet, NuSeries};
use crate::geometry::{Chart, GeometryError};
use crate::graphs::GraphError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("cannot contract {0} with {1}")]
    Variance(Variance, Variance),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("lower form needs a graph without internal edges: {0}")]
    NotNGraph(String),
    #[error("leading term cannot be inverted: {0}")]
    LeadingTerm(String),
    #[error("operator bound violated at {0}")]
    Witness(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A symmetric index `K`, stored as its multiplicity vector.
pub type MultiIndex = Vec<u32>;

/// Rank `|K|` of a multiplicity vector.
pub fn rank(k: &[u32]) -> u32 {
    k.iter().sum()
}

/// Every multiplicity vector of length `m` with rank at most `max`.
pub fn multi_indices(m: usize, max: u32) -> Vec<MultiIndex> {
    (0..=max).flat_map(|n| exponents_of_degree(m, n).into_iter().rev()).collect()
}

/// Holomorphic or antiholomorphic, upper or lower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub holomorphic: bool,
    pub upper: bool,
}

/// Index placement of a two-slot tensor, written left to right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    /// `T_{KL̄}`.
    Lower,
    /// `T^{L̄K}`.
    Upper,
    /// `T_K^I`.
    Mixed,
    /// `T^{L̄}_{J̄}`.
    MixedBar,
}

impl Variance {
    pub fn slots(self) -> (Slot, Slot) {
        let s = |holomorphic, upper| Slot { holomorphic, upper };
        match self {
            Variance::Lower => (s(true, false), s(false, false)),
            Variance::Upper => (s(false, true), s(true, true)),
            Variance::Mixed => (s(true, false), s(true, true)),
            Variance::MixedBar => (s(false, true), s(false, false)),
        }
    }

    fn from_slots(a: Slot, b: Slot) -> Option<Variance> {
        [Variance::Lower, Variance::Upper, Variance::Mixed, Variance::MixedBar]
            .into_iter()
            .find(|v| v.slots() == (a, b))
    }

    /// Variance of `A·B` contracted over the inner slots.
    pub fn contract(self, o: Variance) -> Option<Variance> {
        let (a1, a2) = self.slots();
        let (b1, b2) = o.slots();
        if a2.holomorphic != b1.holomorphic || a2.upper == b1.upper {
            return None;
        }
        Variance::from_slots(a1, b2)
    }
}

impl fmt::Display for Variance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variance::Lower => "T_KL",
            Variance::Upper => "T^LK",
            Variance::Mixed => "T_K^I",
            Variance::MixedBar => "T^L_J",
        };
        f.write_str(s)
    }
}

pub type Entry = NuSeries<MatrixJet>;

/// Separately symmetric tensor with entries `(first, second) → Σ ν^s T_s`.
///
/// Keys follow the written order of the indices (`(K, L)` for `T_{KL̄}`,
/// `(L, K)` for `T^{L̄K}`). Absent keys are zero. Every entry shares the ν
/// window `max_order`.
#[derive(Clone, PartialEq)]
pub struct IndexedTensor {
    pub variance: Variance,
    m: usize,
    dim: usize,
    nvars: usize,
    max_order: Option<i32>,
    values: BTreeMap<(MultiIndex, MultiIndex), Entry>,
}

impl IndexedTensor {
    pub fn new(variance: Variance, m: usize, dim: usize, nvars: usize) -> Self {
        IndexedTensor { variance, m, dim, nvars, max_order: None, values: BTreeMap::new() }
    }

    /// An empty tensor shaped for `chart`.
    pub fn for_chart(variance: Variance, chart: &Chart) -> Self {
        Self::new(variance, chart.m(), chart.d(), chart.nvars())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> Option<i32> {
        self.max_order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn zero_matrix(&self) -> MatrixJet {
        MatrixJet::zero(self.dim, self.nvars)
    }

    /// The zero entry with this tensor's window.
    pub fn zero_entry(&self) -> Entry {
        let z = NuSeries::zero(&self.zero_matrix());
        match self.max_order {
            Some(mx) => z.truncate(mx),
            None => z,
        }
    }

    pub fn get(&self, a: &[u32], b: &[u32]) -> Option<&Entry> {
        self.values.get(&(a.to_vec(), b.to_vec()))
    }

    /// The entry, zero when absent.
    pub fn entry(&self, a: &[u32], b: &[u32]) -> Entry {
        self.get(a, b).cloned().unwrap_or_else(|| self.zero_entry())
    }

    /// Coefficient at `ν^order` (zero when absent).
    pub fn coeff(&self, a: &[u32], b: &[u32], order: i32) -> Result<MatrixJet, AlgebraError> {
        match self.get(a, b) {
            Some(e) => e.get(order),
            None => self.zero_entry().get(order),
        }
    }

    /// Adds `v` to the entry at `(a, b)`.
    pub fn add_entry(&mut self, a: MultiIndex, b: MultiIndex, v: Entry) {
        assert_eq!(a.len(), self.m, "index length");
        assert_eq!(b.len(), self.m, "index length");
        let v = match self.max_order {
            Some(mx) => v.truncate(mx),
            None => v,
        };
        let key = (a, b);
        let next = match self.values.remove(&key) {
            Some(old) => old.add(&v),
            None => v,
        };
        if !next.is_zero() {
            self.values.insert(key, next);
        }
    }

    /// Adds `c · ν^order · v` at `(a, b)`.
    pub fn add_term(&mut self, a: MultiIndex, b: MultiIndex, order: i32, v: MatrixJet) {
        self.add_entry(a, b, NuSeries::monomial(order, v));
    }

    /// Restricts every entry to ν-orders `≤ max`.
    pub fn truncate(&self, max: i32) -> Self {
        let mut out = self.clone();
        out.max_order = Some(self.max_order.map_or(max, |m| m.min(max)));
        out.values = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), v.truncate(max)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out
    }

    /// Keeps the entries whose ranks satisfy `keep(|first|, |second|)`.
    pub fn restrict(&self, keep: impl Fn(u32, u32) -> bool) -> Self {
        let mut out = self.clone();
        out.values.retain(|(a, b), _| keep(rank(a), rank(b)));
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Entry)> + '_ {
        self.values.iter()
    }

    /// An empty tensor with the same variance and shape.
    pub fn for_chart_like(t: &IndexedTensor) -> Self {
        Self::new(t.variance, t.m, t.dim, t.nvars)
    }

    /// Applies `f` to every entry; the window is unchanged.
    pub fn map_entries(&self, f: impl Fn(&Entry) -> Entry) -> Self {
        let mut out = self.clone();
        out.values = self.values.iter().map(|(k, v)| (k.clone(), f(v))).filter(|(_, v)| !v.is_zero()).collect();
        out
    }

    /// Applies `f` to every matrix coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&MatrixJet) -> MatrixJet) -> Self {
        let mut out = self.clone();
        out.values = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), v.map_same(&f)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        out
    }

    /// Truncates every matrix jet to total degree `< a`.
    pub fn cap(&self, a: i32) -> Self {
        self.map_coeffs(|c| c.cap(a))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        self.map_coeffs(|v| v.scale(c))
    }

    fn check_shape(&self, o: &Self) -> Result<(), TensorError> {
        if (self.m, self.dim, self.nvars) != (o.m, o.dim, o.nvars) {
            return Err(TensorError::Shape(format!(
                "(m, d, vars) = ({}, {}, {}) vs ({}, {}, {})",
                self.m, self.dim, self.nvars, o.m, o.dim, o.nvars
            )));
        }
        Ok(())
    }

    /// Entrywise sum; windows combine to the smaller one.
    pub fn add(&self, o: &Self) -> Result<Self, TensorError> {
        self.check_shape(o)?;
        if self.variance != o.variance {
            return Err(TensorError::Variance(self.variance, o.variance));
        }
        let mut out = self.clone();
        out.max_order = match (self.max_order, o.max_order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if let Some(mx) = out.max_order {
            out = out.truncate(mx);
        }
        for ((a, b), v) in &o.values {
            out.add_entry(a.clone(), b.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, TensorError> {
        self.add(&o.scale(&GaussianRational::from_int(-1)))
    }

    /// Sets the ν window without touching stored values.
    pub fn with_max_order(mut self, max: Option<i32>) -> Self {
        self.max_order = max;
        if let Some(mx) = max {
            self = self.truncate(mx);
        }
        self
    }

    /// `A_{·P} B_{P·}` summed over the symmetric index `P`, keeping orders
    /// `≤ cap` and output pairs accepted by `keep`.
    pub fn contract_with(
        &self,
        o: &Self,
        cap: Option<i32>,
        keep: impl Fn(&[u32], &[u32]) -> bool,
    ) -> Result<Self, TensorError> {
        self.check_shape(o)?;
        let variance = self.variance.contract(o.variance).ok_or(TensorError::Variance(self.variance, o.variance))?;
        let mut by_first: BTreeMap<&MultiIndex, Vec<(&MultiIndex, &Entry)>> = BTreeMap::new();
        for ((p, i), v) in &o.values {
            by_first.entry(p).or_default().push((i, v));
        }
        let window = [self.max_order, o.max_order, cap].into_iter().flatten().min();
        let mut out = IndexedTensor { variance, max_order: window, values: BTreeMap::new(), ..self.clone() };
        for ((k, p), a) in &self.values {
            let Some(row) = by_first.get(p) else { continue };
            let weight = GaussianRational::real(multiset_count(p));
            for (i, b) in row {
                if !keep(k, i) {
                    continue;
                }
                let prod = a.mul_capped(b, cap).scale(&weight);
                out.add_entry(k.clone(), (*i).clone(), prod);
            }
        }
        // Products whose factors have no stored entries still carry the
        // combined window.
        if let Some(mx) = window {
            out = out.truncate(mx);
        }
        Ok(out)
    }

    pub fn contract(&self, o: &Self) -> Result<Self, TensorError> {
        self.contract_with(o, None, |_, _| true)
    }

    /// First entry (in key order) and ν-order where two tensors differ
    /// within the common window, with the ranks limited by `keep`.
    pub fn first_difference(
        &self,
        o: &Self,
        keep: impl Fn(&[u32], &[u32]) -> bool,
    ) -> Option<((MultiIndex, MultiIndex), i32)> {
        let keys: Vec<&(MultiIndex, MultiIndex)> = self.values.keys().chain(o.values.keys()).sorted().dedup().collect();
        let window = [self.max_order, o.max_order].into_iter().flatten().min();
        for key in keys {
            if !keep(&key.0, &key.1) {
                continue;
            }
            let (mut a, mut b) = (self.entry(&key.0, &key.1), o.entry(&key.0, &key.1));
            if let Some(mx) = window {
                a = a.truncate(mx);
                b = b.truncate(mx);
            }
            if let Some(s) = a.first_difference(&b, MatrixJet::agrees_with) {
                return Some((key.clone(), s));
            }
        }
        None
    }

    /// Whether the tensors agree on every entry accepted by `keep`.
    pub fn agrees_with(&self, o: &Self, keep: impl Fn(&[u32], &[u32]) -> bool) -> bool {
        self.first_difference(o, keep).is_none()
    }
}

impl fmt::Debug for IndexedTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (m={}, d={}, window {:?})", self.variance, self.m, self.dim, self.max_order)?;
        for ((a, b), v) in &self.values {
            writeln!(f, "  {a:?} {b:?}: {v:?}")?;
        }
        Ok(())
    }
}

/// `Δ_K^I` (or `Δ^{L̄}_{J̄}` for [`Variance::MixedBar`]) up to `max_rank`:
/// `1 / (orderings of K)` on the diagonal.
pub fn delta_tensor(variance: Variance, m: usize, dim: usize, nvars: usize, max_rank: u32) -> IndexedTensor {
    assert!(matches!(variance, Variance::Mixed | Variance::MixedBar), "Δ is a mixed tensor");
    let mut t = IndexedTensor::new(variance, m, dim, nvars);
    let one = MatrixJet::identity(dim, nvars);
    for k in multi_indices(m, max_rank) {
        let w = GaussianRational::real(multiset_count(&k).recip().expect("nonzero count"));
        t.add_term(k.clone(), k, 0, one.scale(&w));
    }
    t
}

/// `Σ_σ Π_i f(a_i, b_σ(i))` for the multisets `a`, `b` of equal rank.
fn symmetric_permanent(a: &[u32], b: &[u32], f: impl Fn(usize, usize) -> Jet, nvars: usize) -> Jet {
    // The sum over σ is already symmetric in both tuples, so any ordering
    // of each multiset gives the symmetric value.
    let a0 = exps_to_sorted_tuple(a);
    let b0 = exps_to_sorted_tuple(b);
    let n = a0.len();
    let mut acc = Jet::zero(nvars);
    for sigma in (0..n).permutations(n) {
        let mut prod = Jet::one(nvars);
        for i in 0..n {
            prod = &prod * &f(a0[i], b0[sigma[i]]);
        }
        acc = &acc + &prod;
    }
    acc
}

/// `G_{KL̄} = ν^{−r}/r! Σ_σ Π g_{k_i l̄_σ(i)}` and
/// `G^{L̄K} = ν^r/r! Σ_σ Π g^{l̄_σ(i) k_i}` for ranks up to `max_rank`.
pub fn g_tensors(chart: &Chart, max_rank: u32) -> (IndexedTensor, IndexedTensor) {
    let (m, d, nv) = (chart.m(), chart.d(), chart.nvars());
    let mut lower = IndexedTensor::new(Variance::Lower, m, d, nv);
    let mut upper = IndexedTensor::new(Variance::Upper, m, d, nv);
    for r in 0..=max_rank {
        let inv_fact = GaussianRational::real(crate::algebra::factorial(r as usize).recip().unwrap());
        let idx = multi_indices(m, r).into_iter().filter(|k| rank(k) == r).collect::<Vec<_>>();
        for k in &idx {
            for l in &idx {
                let gl = symmetric_permanent(k, l, |a, b| chart.g(a, b).clone(), nv).scale(&inv_fact);
                if !gl.is_zero() {
                    lower.add_term(k.clone(), l.clone(), -(r as i32), MatrixJet::scalar(d, &gl));
                }
                let gu = symmetric_permanent(k, l, |a, b| chart.g_inv(b, a).clone(), nv).scale(&inv_fact);
                if !gu.is_zero() {
                    upper.add_term(l.clone(), k.clone(), r as i32, MatrixJet::scalar(d, &gu));
                }
            }
        }
    }
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(n: i64, d: i64) -> GaussianRational {
        GaussianRational::ratio(n, d)
    }

    fn scalar_at(t: &IndexedTensor, a: &[u32], b: &[u32], order: i32) -> GaussianRational {
        t.coeff(a, b, order).unwrap().entry(0, 0).value_at_origin().unwrap()
    }

    #[test]
    fn delta_values() {
        let d = delta_tensor(Variance::Mixed, 2, 1, 4, 3);
        assert_eq!(scalar_at(&d, &[1, 1], &[1, 1], 0), q(1, 2));
        assert_eq!(scalar_at(&d, &[2, 0], &[2, 0], 0), q(1, 1));
        assert_eq!(scalar_at(&d, &[1, 0], &[1, 0], 0), q(1, 1));
        assert!(d.get(&[1, 0], &[0, 1]).is_none());
        assert!(d.get(&[2, 0], &[1, 0]).is_none());
    }

    #[test]
    fn delta_is_identity_for_contraction() {
        let chart = fixtures::flat_chart(2, 2);
        let (gl, _) = g_tensors(&chart, 3);
        let d = delta_tensor(Variance::Mixed, 2, 1, 4, 3);
        assert!(d.contract(&gl).unwrap().agrees_with(&gl, |_, _| true));
    }

    #[test]
    fn variance_rules() {
        use Variance::*;
        assert_eq!(Lower.contract(Upper), Some(Mixed));
        assert_eq!(Upper.contract(Lower), Some(MixedBar));
        assert_eq!(Mixed.contract(Mixed), Some(Mixed));
        assert_eq!(Mixed.contract(Upper), None);
        assert_eq!(Lower.contract(Lower), None);
    }

    #[test]
    fn g_tensors_flat_m1() {
        let chart = fixtures::flat_chart(1, 2);
        let (gl, gu) = g_tensors(&chart, 3);
        assert_eq!(scalar_at(&gl, &[1], &[1], -1), q(1, 1));
        assert_eq!(scalar_at(&gu, &[1], &[1], 1), q(1, 1));
        assert_eq!(scalar_at(&gu, &[2], &[2], 2), q(1, 1));
        assert!(gl.get(&[2], &[1]).is_none());
        let delta = delta_tensor(Variance::Mixed, 1, 1, 2, 3);
        assert!(gl.contract(&gu).unwrap().agrees_with(&delta, |_, _| true));
    }

    #[test]
    fn g_tensors_invert_on_curved_m2() {
        let pots = std::collections::BTreeMap::from([(
            -1,
            fixtures::poly(2, &[(&[1, 0, 1, 0], 1, 1), (&[0, 1, 0, 1], 2, 1), (&[1, 0, 0, 1], 1, 3), (&[0, 1, 1, 0], 1, 3)]),
        )]);
        let data = crate::geometry::ChartData::new(2, 1, pots, MatrixJet::identity(1, 4));
        let chart = Chart::new(data).unwrap();
        let (gl, gu) = g_tensors(&chart, 3);
        let delta = delta_tensor(Variance::Mixed, 2, 1, 4, 3);
        let bar = delta_tensor(Variance::MixedBar, 2, 1, 4, 3);
        assert!(gl.contract(&gu).unwrap().agrees_with(&delta, |_, _| true));
        assert!(gu.contract(&gl).unwrap().agrees_with(&bar, |_, _| true));
        // m = 2, rank 2 on the flat chart: G^{1̄2̄ 12} = ν²/2 (g^{1̄1}g^{2̄2} + g^{1̄2}g^{2̄1}).
        let flat = fixtures::flat_chart(2, 1);
        let (_, gu) = g_tensors(&flat, 2);
        assert_eq!(scalar_at(&gu, &[1, 1], &[1, 1], 2), q(1, 2));
        assert_eq!(scalar_at(&gu, &[2, 0], &[2, 0], 2), q(1, 1));
    }
}
