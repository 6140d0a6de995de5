//! Concatenation of composable graphs and its inverse, the admissible
//! partitions.

use super::fgraph::{FGraph, SINK, SOURCE};
use super::GraphError;

/// Loose ends of the sink edges: tails in node order, repeated by
/// multiplicity.
pub fn outgoing_ends(g: &FGraph) -> Vec<usize> {
    let mut out = Vec::new();
    for u in 0..g.num_nodes() {
        for _ in 0..g.mult(u, SINK) {
            out.push(u);
        }
    }
    out
}

/// Loose ends of the source edges: heads in node order, repeated by
/// multiplicity.
pub fn incoming_ends(g: &FGraph) -> Vec<usize> {
    let mut out = Vec::new();
    for v in 0..g.num_nodes() {
        for _ in 0..g.mult(SOURCE, v) {
            out.push(v);
        }
    }
    out
}

/// `Γ₁ #_τ Γ₂`: the `i`-th sink edge of `g1` is spliced with the `tau[i]`-th
/// source edge of `g2`. Specials of `g1` rank above those of `g2`.
///
/// Node layout of the result: regular vertices of `g1`, then of `g2`, then
/// specials of `g2`, then of `g1`.
pub fn concatenate(g1: &FGraph, g2: &FGraph, tau: &[usize]) -> Result<FGraph, GraphError> {
    let (p1, q2) = (g1.p(), g2.q());
    if p1 != q2 {
        return Err(GraphError::Incomposable(p1, q2));
    }
    let mut seen = vec![false; tau.len()];
    if tau.len() != p1 as usize || tau.iter().any(|&j| j >= tau.len() || std::mem::replace(&mut seen[j], true)) {
        return Err(GraphError::BadSplice);
    }
    let (r1, r2) = (g1.r(), g2.r());
    let (k1, k2) = (g1.s(), g2.s());
    let mut weights = g1.weights().to_vec();
    weights.extend_from_slice(g2.weights());
    let mut g = FGraph::empty(weights, k1 + k2);
    let spec0 = 2 + r1 + r2;
    let map1 = |v: usize| -> usize {
        match v {
            SOURCE => SOURCE,
            SINK => SINK,
            _ if g1.is_regular(v) => v,
            _ => spec0 + k2 + (v - g1.first_special()),
        }
    };
    let map2 = |v: usize| -> usize {
        match v {
            SOURCE => SOURCE,
            SINK => SINK,
            _ if g2.is_regular(v) => v + r1,
            _ => spec0 + (v - g2.first_special()),
        }
    };
    for u in 0..g1.num_nodes() {
        for v in 0..g1.num_nodes() {
            if v != SINK {
                g.add_edges(map1(u), map1(v), g1.mult(u, v));
            }
        }
    }
    for u in 0..g2.num_nodes() {
        if u != SOURCE {
            for v in 0..g2.num_nodes() {
                g.add_edges(map2(u), map2(v), g2.mult(u, v));
            }
        }
    }
    let (o1, i2) = (outgoing_ends(g1), incoming_ends(g2));
    for (i, &j) in tau.iter().enumerate() {
        g.add_edges(map1(o1[i]), map2(i2[j]), 1);
    }
    Ok(g)
}

/// Split of the internal vertices into `V₁` and `V₂`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissiblePartition {
    /// `in_v2[i]` for internal node `2+i`.
    pub in_v2: Vec<bool>,
}

/// The two halves of a partition and the splice map that rejoins them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub first: FGraph,
    pub second: FGraph,
    pub tau: Vec<usize>,
}

impl AdmissiblePartition {
    fn side2(&self, v: usize) -> bool {
        match v {
            SOURCE => false,
            SINK => true,
            _ => self.in_v2[v - 2],
        }
    }

    pub fn is_admissible(&self, g: &FGraph) -> bool {
        let n = g.num_nodes();
        if self.in_v2.len() != n - 2 {
            return false;
        }
        // V₂ specials form an initial segment s_1..s_j.
        let labels: Vec<bool> = (1..=g.s()).map(|l| self.side2(g.special_node(l))).collect();
        if labels.windows(2).any(|w| !w[0] && w[1]) {
            return false;
        }
        (0..n).all(|u| (0..n).all(|v| g.mult(u, v) == 0 || !self.side2(u) || self.side2(v)))
    }

    pub fn v1(&self) -> Vec<usize> {
        (0..self.in_v2.len()).filter(|&i| !self.in_v2[i]).map(|i| i + 2).collect()
    }

    pub fn v2(&self) -> Vec<usize> {
        (0..self.in_v2.len()).filter(|&i| self.in_v2[i]).map(|i| i + 2).collect()
    }

    /// `(Γ₁^π, Γ₂^π, τ^π)`: crossing edges become sink edges of `Γ₁` and
    /// source edges of `Γ₂`.
    pub fn split(&self, g: &FGraph) -> Split {
        let n = g.num_nodes();
        let crossing: Vec<(usize, usize)> =
            g.edge_list().into_iter().filter(|&(u, v)| !self.side2(u) && self.side2(v)).collect();
        let first = g.induced(&self.v1(), |u, v| match (u, v) {
            (_, SINK) => (0..n).filter(|&w| self.side2(w)).map(|w| g.mult(u, w)).sum::<u32>() * (!self.side2(u)) as u32,
            _ if self.side2(u) || self.side2(v) => 0,
            _ => g.mult(u, v),
        });
        let second = g.induced(&self.v2(), |u, v| match (u, v) {
            (SOURCE, _) => (0..n).filter(|&w| !self.side2(w)).map(|w| g.mult(w, v)).sum::<u32>() * self.side2(v) as u32,
            _ if !self.side2(u) || !self.side2(v) => 0,
            _ => g.mult(u, v),
        });
        // Crossing edges sorted by tail take the sink slots of `Γ₁` in order;
        // each takes the next free source slot of its head in `Γ₂`.
        let v2_nodes: Vec<usize> = [SINK].into_iter().chain(self.v2()).collect();
        let renum2 = |v: usize| -> usize {
            let regs = self.v2().into_iter().filter(|&w| g.is_regular(w));
            let specs = self.v2().into_iter().filter(|&w| g.is_special(w));
            let order: Vec<usize> = [SOURCE, SINK].into_iter().chain(regs).chain(specs).collect();
            order.iter().position(|&w| w == v).unwrap()
        };
        let i2 = incoming_ends(&second);
        let mut next: Vec<usize> = vec![0; second.num_nodes()];
        for &v in &v2_nodes {
            let h = renum2(v);
            next[h] = i2.iter().position(|&x| x == h).unwrap_or(0);
        }
        let tau = crossing
            .iter()
            .map(|&(_, v)| {
                let h = renum2(v);
                let slot = next[h];
                next[h] += 1;
                slot
            })
            .collect();
        Split { first, second, tau }
    }
}

/// Every admissible partition, ordered by the `V₂` membership vector.
pub fn admissible_partitions(g: &FGraph) -> Vec<AdmissiblePartition> {
    let n = g.num_internal();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let p = AdmissiblePartition { in_v2: (0..n).map(|i| mask >> i & 1 == 1).collect() };
        if p.is_admissible(g) {
            out.push(p);
        }
    }
    out.sort();
    out
}

/// `σ_i`: `V₂` holds `s_1..s_i` and every regular vertex reachable from
/// them.
pub fn sigma_partition(g: &FGraph, i: usize) -> Result<AdmissiblePartition, GraphError> {
    if i > g.s() {
        return Err(GraphError::SpecialOutOfRange(i, g.s()));
    }
    let reach = g.reachability();
    let roots: Vec<usize> = (1..=i).map(|l| g.special_node(l)).collect();
    let in_v2 = g
        .internal_nodes()
        .map(|v| roots.contains(&v) || (g.is_regular(v) && roots.iter().any(|&s| reach[s][v])))
        .collect();
    Ok(AdmissiblePartition { in_v2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::canon::{canonicalize, isomorphic};
    use itertools::Itertools;

    fn chain() -> FGraph {
        // in → r0 → r1 → out, in → r1, r0 → out.
        let mut g = FGraph::empty(vec![0, -1], 0);
        g.add_edges(SOURCE, 2, 1);
        g.add_edges(2, 3, 1);
        g.add_edges(SOURCE, 3, 1);
        g.add_edges(3, SINK, 1);
        g.add_edges(2, SINK, 1);
        g.validate().unwrap();
        g
    }

    #[test]
    fn lambda_concatenation() {
        for n in 0..4u32 {
            for tau in (0..n as usize).permutations(n as usize) {
                let g = concatenate(&FGraph::lambda(n), &FGraph::lambda(n), &tau).unwrap();
                assert_eq!(g, FGraph::lambda(n));
            }
        }
        assert!(concatenate(&FGraph::lambda(1), &FGraph::lambda(2), &[0]).is_err());
    }

    #[test]
    fn concatenation_with_lambda_is_identity() {
        let ex = FGraph::single_regular(3, 1, 2);
        for tau in [[0, 1], [1, 0]] {
            let g = concatenate(&ex, &FGraph::lambda(2), &tau).unwrap();
            assert!(isomorphic(&g, &ex));
        }
        let v = FGraph::single_regular(0, 1, 1);
        assert_eq!(canonicalize(&concatenate(&FGraph::lambda(1), &v, &[0]).unwrap()), canonicalize(&v));
    }

    #[test]
    fn lambda_has_only_trivial_partition() {
        let g = FGraph::lambda(3);
        let ps = admissible_partitions(&g);
        assert_eq!(ps.len(), 1);
        let s = ps[0].split(&g);
        assert_eq!((s.first, s.second), (FGraph::lambda(3), FGraph::lambda(3)));
    }

    #[test]
    fn single_vertex_has_two_partitions() {
        let g = FGraph::single_regular(3, 1, 2);
        assert_eq!(admissible_partitions(&g).len(), 2);
    }

    #[test]
    fn edge_direction_is_enforced() {
        let g = chain();
        let ps = admissible_partitions(&g);
        // r0 ∈ V₂ with r1 ∈ V₁ is excluded.
        assert!(!ps.iter().any(|p| p.in_v2 == vec![true, false]));
        assert_eq!(ps.len(), 3);
    }

    #[test]
    fn split_rejoins_to_the_graph() {
        let mut two_specials = FGraph::empty(vec![-1], 2);
        two_specials.add_edges(SOURCE, 4, 1);
        two_specials.add_edges(4, 2, 1);
        two_specials.add_edges(SOURCE, 2, 1);
        two_specials.add_edges(2, 3, 1);
        two_specials.add_edges(3, SINK, 2);
        two_specials.add_edges(SOURCE, 3, 1);
        two_specials.validate().unwrap();
        for g in [chain(), FGraph::single_regular(3, 1, 2), two_specials] {
            for p in admissible_partitions(&g) {
                let s = p.split(&g);
                s.first.validate().unwrap();
                s.second.validate().unwrap();
                let back = concatenate(&s.first, &s.second, &s.tau).unwrap();
                assert!(isomorphic(&back, &g), "{g} via {:?}", p.in_v2);
            }
        }
    }

    #[test]
    fn sigma_partitions() {
        let g = FGraph::single_regular(3, 1, 2);
        assert_eq!(sigma_partition(&g, 0).unwrap().in_v2, vec![false]);
        assert!(sigma_partition(&g, 1).is_err());
        let mut h = FGraph::empty(vec![0], 2);
        // in → s2 → s1 → r0 → out
        h.add_edges(SOURCE, 4, 1);
        h.add_edges(4, 3, 1);
        h.add_edges(3, 2, 1);
        h.add_edges(2, SINK, 1);
        h.validate().unwrap();
        for i in 0..=2 {
            let p = sigma_partition(&h, i).unwrap();
            assert!(p.is_admissible(&h));
            let s = p.split(&h);
            assert!(s.second.frontal_regular().is_empty());
            assert_eq!(s.second.s(), i);
        }
        let s0 = sigma_partition(&h, 0).unwrap().split(&h);
        assert_eq!(s0.second, FGraph::lambda(1));
    }
}
