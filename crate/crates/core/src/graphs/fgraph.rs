//! Feynman graphs: a source, a sink, weighted regular vertices and linearly
//! ordered special vertices joined by directed multi-edges.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// Node index of the source.
pub const SOURCE: usize = 0;
/// Node index of the sink.
pub const SINK: usize = 1;

/// A graph with nodes `[source, sink, regular..., special...]`.
///
/// Special vertices are stored in ascending order: node `first_special()+i`
/// is `s_{i+1}`. Edges are an `n × n` multiplicity matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FGraph {
    weights: Vec<i32>,
    specials: usize,
    adj: Vec<u32>,
}

/// Kind of an internal vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    Regular(i32),
    /// Special vertex with its 1-based label in the linear order.
    Special(usize),
}

impl FGraph {
    /// Graph with no edges; use [`FGraph::add_edges`] to populate.
    pub fn empty(weights: Vec<i32>, specials: usize) -> FGraph {
        let n = 2 + weights.len() + specials;
        FGraph { weights, specials, adj: vec![0; n * n] }
    }

    /// `Λ_n`: `n` parallel source → sink edges.
    pub fn lambda(n: u32) -> FGraph {
        let mut g = FGraph::empty(Vec::new(), 0);
        g.add_edges(SOURCE, SINK, n);
        g
    }

    /// One regular vertex of weight `r` with `q_in` edges from the source
    /// and `p_out` edges to the sink.
    pub fn single_regular(r: i32, q_in: u32, p_out: u32) -> FGraph {
        let mut g = FGraph::empty(vec![r], 0);
        g.add_edges(SOURCE, 2, q_in);
        g.add_edges(2, SINK, p_out);
        g
    }

    /// One special vertex with `q_in` edges from the source and `p_out`
    /// edges to the sink.
    pub fn single_special(q_in: u32, p_out: u32) -> FGraph {
        let mut g = FGraph::empty(Vec::new(), 1);
        g.add_edges(SOURCE, 2, q_in);
        g.add_edges(2, SINK, p_out);
        g
    }

    pub fn from_parts(weights: Vec<i32>, specials: usize, adj: Vec<u32>) -> FGraph {
        let n = 2 + weights.len() + specials;
        assert_eq!(adj.len(), n * n);
        FGraph { weights, specials, adj }
    }

    pub fn add_edges(&mut self, from: usize, to: usize, mult: u32) {
        let n = self.num_nodes();
        self.adj[from * n + to] += mult;
    }

    pub fn num_nodes(&self) -> usize {
        2 + self.weights.len() + self.specials
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    pub fn adjacency(&self) -> &[u32] {
        &self.adj
    }

    pub fn first_special(&self) -> usize {
        2 + self.weights.len()
    }

    /// Node of `s_label` (1-based).
    pub fn special_node(&self, label: usize) -> usize {
        self.first_special() + label - 1
    }

    pub fn regular_node(&self, i: usize) -> usize {
        2 + i
    }

    pub fn internal_nodes(&self) -> std::ops::Range<usize> {
        2..self.num_nodes()
    }

    pub fn kind(&self, v: usize) -> Option<VertexKind> {
        if v < 2 {
            None
        } else if v < self.first_special() {
            Some(VertexKind::Regular(self.weights[v - 2]))
        } else {
            Some(VertexKind::Special(v - self.first_special() + 1))
        }
    }

    pub fn is_regular(&self, v: usize) -> bool {
        matches!(self.kind(v), Some(VertexKind::Regular(_)))
    }

    pub fn is_special(&self, v: usize) -> bool {
        matches!(self.kind(v), Some(VertexKind::Special(_)))
    }

    pub fn mult(&self, from: usize, to: usize) -> u32 {
        self.adj[from * self.num_nodes() + to]
    }

    pub fn in_degree(&self, v: usize) -> u32 {
        (0..self.num_nodes()).map(|u| self.mult(u, v)).sum()
    }

    pub fn out_degree(&self, v: usize) -> u32 {
        (0..self.num_nodes()).map(|w| self.mult(v, w)).sum()
    }

    pub fn num_edges(&self) -> u32 {
        self.adj.iter().sum()
    }

    /// `p(Γ)`: degree of the sink.
    pub fn p(&self) -> u32 {
        self.in_degree(SINK)
    }

    /// `q(Γ)`: degree of the source.
    pub fn q(&self) -> u32 {
        self.out_degree(SOURCE)
    }

    /// `s(Γ)`: number of special vertices.
    pub fn s(&self) -> usize {
        self.specials
    }

    /// `R(Γ)`: number of regular vertices.
    pub fn r(&self) -> usize {
        self.weights.len()
    }

    pub fn num_internal(&self) -> usize {
        self.weights.len() + self.specials
    }

    /// ν-order of the upper tensor: number of edges plus regular weights.
    pub fn nu_degree(&self) -> i32 {
        self.num_edges() as i32 + self.weights.iter().sum::<i32>()
    }

    /// Whether no edge joins two internal vertices.
    pub fn is_n_graph(&self) -> bool {
        let n = self.num_nodes();
        (2..n).all(|u| (2..n).all(|v| self.mult(u, v) == 0))
    }

    /// `reach[u][v]`: a directed path of length ≥ 1 from `u` to `v`.
    #[allow(clippy::needless_range_loop)]
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.num_nodes();
        let mut r = vec![vec![false; n]; n];
        for u in 0..n {
            for v in 0..n {
                r[u][v] = self.mult(u, v) > 0;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        r
    }

    /// Checks membership in the graph class.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.num_nodes();
        if let Some(&w) = self.weights.iter().find(|&&w| w < -1) {
            return Err(GraphError::BadWeight(w));
        }
        let reach = self.reachability();
        if (0..n).any(|v| reach[v][v]) {
            return Err(GraphError::Cycle);
        }
        if self.in_degree(SOURCE) > 0 {
            return Err(GraphError::SourceHasIncoming);
        }
        if self.out_degree(SINK) > 0 {
            return Err(GraphError::SinkHasOutgoing);
        }
        for v in self.internal_nodes() {
            let (i, o) = (self.in_degree(v), self.out_degree(v));
            if i == 0 || o == 0 {
                return Err(GraphError::Dangling(self.node_name(v)));
            }
            if self.kind(v) == Some(VertexKind::Regular(-1)) && i + o < 3 {
                return Err(GraphError::LowDegree(self.node_name(v)));
            }
        }
        for a in 1..=self.specials {
            for b in (a + 1)..=self.specials {
                if reach[self.special_node(a)][self.special_node(b)] {
                    return Err(GraphError::OrderConflict(a, b));
                }
            }
        }
        Ok(())
    }

    /// Frontal: every incoming edge leaves the source.
    pub fn is_frontal(&self, v: usize) -> bool {
        (1..self.num_nodes()).all(|u| self.mult(u, v) == 0)
    }

    /// `X(Γ)`: frontal regular vertices.
    pub fn frontal_regular(&self) -> Vec<usize> {
        (2..self.first_special()).filter(|&v| self.is_frontal(v)).collect()
    }

    /// `l(Γ)`: length of the chain `s_k > s_{k-1} > …` of frontal specials.
    pub fn frontal_chain(&self) -> usize {
        (1..=self.specials).rev().take_while(|&i| self.is_frontal(self.special_node(i))).count()
    }

    /// Stable name of a node: `in`, `out`, `r0`, `s1`, ….
    pub fn node_name(&self, v: usize) -> String {
        match v {
            SOURCE => "in".into(),
            SINK => "out".into(),
            _ => match self.kind(v).unwrap() {
                VertexKind::Regular(_) => format!("r{}", v - 2),
                VertexKind::Special(l) => format!("s{l}"),
            },
        }
    }

    fn parse_node(&self, name: &str) -> Result<usize, GraphError> {
        let bad = || GraphError::Parse(format!("unknown vertex '{name}'"));
        match name {
            "in" => Ok(SOURCE),
            "out" => Ok(SINK),
            _ if name.starts_with('r') => {
                let i: usize = name[1..].parse().map_err(|_| bad())?;
                if i < self.weights.len() {
                    Ok(2 + i)
                } else {
                    Err(bad())
                }
            }
            _ if name.starts_with('s') => {
                let l: usize = name[1..].parse().map_err(|_| bad())?;
                if (1..=self.specials).contains(&l) {
                    Ok(self.special_node(l))
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }

    /// Edge list in node order, repeated by multiplicity.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let n = self.num_nodes();
        let mut out = Vec::new();
        for u in 0..n {
            for v in 0..n {
                for _ in 0..self.mult(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn to_record(&self) -> GraphRecord {
        GraphRecord {
            regular: self.weights.clone(),
            special: self.specials,
            edges: self.edge_list().into_iter().map(|(u, v)| [self.node_name(u), self.node_name(v)]).collect(),
        }
    }

    pub fn from_record(rec: &GraphRecord) -> Result<FGraph, GraphError> {
        let mut g = FGraph::empty(rec.regular.clone(), rec.special);
        for [a, b] in &rec.edges {
            let (u, v) = (g.parse_node(a)?, g.parse_node(b)?);
            g.add_edges(u, v, 1);
        }
        g.validate()?;
        Ok(g)
    }

    /// Reindexes nodes: `perm[old] = new`; sources and sinks must stay put.
    pub fn permuted(&self, perm: &[usize]) -> FGraph {
        let n = self.num_nodes();
        let mut adj = vec![0; n * n];
        for u in 0..n {
            for v in 0..n {
                adj[perm[u] * n + perm[v]] = self.adj[u * n + v];
            }
        }
        let mut weights = self.weights.clone();
        for (i, &w) in self.weights.iter().enumerate() {
            weights[perm[2 + i] - 2] = w;
        }
        FGraph { weights, specials: self.specials, adj }
    }

    /// Subgraph on a subset of internal vertices, keeping their relative
    /// order; `keep` lists the retained internal nodes.
    pub(crate) fn induced(&self, keep: &[usize], adj_fn: impl Fn(usize, usize) -> u32) -> FGraph {
        let regs: Vec<usize> = keep.iter().copied().filter(|&v| self.is_regular(v)).collect();
        let specs: Vec<usize> = keep.iter().copied().filter(|&v| self.is_special(v)).collect();
        let weights = regs.iter().map(|&v| self.weights[v - 2]).collect();
        let mut g = FGraph::empty(weights, specs.len());
        let nodes: Vec<usize> = [SOURCE, SINK].into_iter().chain(regs).chain(specs).collect();
        for (i, &u) in nodes.iter().enumerate() {
            for (j, &v) in nodes.iter().enumerate() {
                let m = adj_fn(u, v);
                if m > 0 {
                    g.add_edges(i, j, m);
                }
            }
        }
        g
    }
}

/// Exchange form of a graph: regular weights, special count, edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub regular: Vec<i32>,
    pub special: usize,
    pub edges: Vec<[String; 2]>,
}

impl fmt::Display for FGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rec = self.to_record();
        write!(f, "[")?;
        for (i, w) in rec.regular.iter().enumerate() {
            write!(f, "{}r{i}:{w}", if i > 0 { " " } else { "" })?;
        }
        if rec.special > 0 {
            write!(f, "{}s:{}", if rec.regular.is_empty() { "" } else { " " }, rec.special)?;
        }
        write!(f, "|")?;
        let mut first = true;
        let n = self.num_nodes();
        for u in 0..n {
            for v in 0..n {
                let m = self.mult(u, v);
                if m > 0 {
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    write!(f, "{}>{}", self.node_name(u), self.node_name(v))?;
                    if m > 1 {
                        write!(f, "x{m}")?;
                    }
                }
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for FGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example() -> FGraph {
        FGraph::single_regular(3, 1, 2)
    }

    #[test]
    fn lambda_is_valid() {
        for n in 0..4 {
            let g = FGraph::lambda(n);
            g.validate().unwrap();
            assert_eq!(g.nu_degree(), n as i32);
            assert_eq!((g.p(), g.q()), (n, n));
        }
    }

    #[test]
    fn low_degree_vertex_rejected() {
        let mut g = FGraph::empty(vec![-1], 0);
        g.add_edges(SOURCE, 2, 1);
        g.add_edges(2, SINK, 1);
        assert!(matches!(g.validate(), Err(GraphError::LowDegree(_))));
    }

    #[test]
    fn special_order_violation_rejected() {
        let mut g = FGraph::empty(vec![], 2);
        g.add_edges(SOURCE, 2, 1);
        g.add_edges(2, 3, 1);
        g.add_edges(3, SINK, 1);
        // s1 → s2 contradicts s2 > s1.
        assert!(matches!(g.validate(), Err(GraphError::OrderConflict(1, 2))));
        let mut h = FGraph::empty(vec![], 2);
        h.add_edges(SOURCE, 3, 1);
        h.add_edges(3, 2, 1);
        h.add_edges(2, SINK, 1);
        h.validate().unwrap();
        assert_eq!(h.frontal_chain(), 1);
    }

    #[test]
    fn worked_example_stats() {
        let g = worked_example();
        g.validate().unwrap();
        assert_eq!((g.p(), g.q(), g.s()), (2, 1, 0));
        assert_eq!(g.nu_degree(), 6);
        assert!(g.is_n_graph());
        assert_eq!(g.frontal_regular(), vec![2]);
        assert_eq!(g.frontal_chain(), 0);
    }

    #[test]
    fn record_round_trip() {
        let g = worked_example();
        let rec = g.to_record();
        let text = toml::to_string(&rec).unwrap();
        let back: GraphRecord = toml::from_str(&text).unwrap();
        assert_eq!(FGraph::from_record(&back).unwrap(), g);
        assert_eq!(toml::to_string(&back).unwrap(), text);
    }
}
