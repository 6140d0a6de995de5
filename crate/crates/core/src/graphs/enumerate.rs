//! Enumeration of graph classes by ν-degree.
//!
//! Internal vertices are placed one at a time in a topological order and
//! receive their incoming edges from the source and earlier vertices; the
//! sink edges are chosen last. A vertex still owing edges (an outgoing edge,
//! or incident edges of a weight −1 vertex) forces at least one future edge
//! each, which gives a monotone lower bound on the final degree. Adjacent
//! vertices not joined by an edge must appear in non-decreasing order of
//! their (kind, incoming edges) key, which removes most reorderings; the
//! rest are merged by canonical form.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;

use super::canon::{canonicalize, GraphClass};
use super::fgraph::{FGraph, SINK, SOURCE};

/// Graph family to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// All graphs.
    M,
    /// Graphs without edges between internal vertices.
    N,
}

/// Bounds for [`enumerate_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBounds {
    pub max_degree: i32,
    pub family: Family,
    pub max_sink: Option<u32>,
    pub max_source: Option<u32>,
}

impl EnumBounds {
    pub fn new(max_degree: i32, family: Family) -> EnumBounds {
        EnumBounds { max_degree, family, max_sink: None, max_source: None }
    }
}

/// All classes with `nu_degree ≤ max_degree`, sorted by `(ν-degree, size,
/// canonical form)`.
pub fn enumerate(max_degree: i32, family: Family) -> Vec<GraphClass> {
    enumerate_with(&EnumBounds::new(max_degree, family))
}

const SPECIAL: i32 = i32::MAX;

#[derive(Clone)]
struct State {
    kinds: Vec<i32>,
    /// `ins[t]`: multiplicities from `[source, v_0, …, v_{t-1}]`.
    ins: Vec<Vec<u32>>,
    indeg: Vec<u32>,
    outdeg: Vec<u32>,
    cost: i32,
    source_deg: u32,
}

impl State {
    fn need(&self, t: usize) -> i32 {
        let (i, o) = (self.indeg[t] as i32, self.outdeg[t] as i32);
        let mut n = (1 - o).max(0);
        if self.kinds[t] == -1 {
            n = n.max(3 - i - o);
        }
        n
    }

    fn lower_bound(&self) -> i32 {
        self.cost + (0..self.kinds.len()).map(|t| self.need(t)).sum::<i32>()
    }

    fn push(&mut self, kind: i32, ins: Vec<u32>) {
        let t = self.kinds.len();
        for (j, &m) in ins.iter().enumerate().skip(1) {
            self.outdeg[j - 1] += m;
        }
        let a: u32 = ins.iter().sum();
        self.cost += a as i32 + if kind == SPECIAL { 0 } else { kind };
        self.source_deg += ins[0];
        self.kinds.push(kind);
        self.indeg.push(a);
        self.outdeg.push(0);
        self.ins.push(ins);
        debug_assert_eq!(self.kinds.len(), t + 1);
    }
}

pub fn enumerate_with(bounds: &EnumBounds) -> Vec<GraphClass> {
    let max = bounds.max_degree;
    if max < 0 {
        return Vec::new();
    }
    let root = State { kinds: vec![], ins: vec![], indeg: vec![], outdeg: vec![], cost: 0, source_deg: 0 };
    // Split the search over the first vertex so the branches run in parallel.
    let mut firsts = vec![None];
    firsts.extend(children(&root, bounds).into_iter().map(Some));
    let found: Vec<BTreeSet<GraphClass>> = firsts
        .into_par_iter()
        .map(|first| {
            let mut out = BTreeSet::new();
            match first {
                None => finish(&root, bounds, &mut out),
                Some(s) => search(&s, bounds, &mut out),
            }
            out
        })
        .collect();
    let all: BTreeSet<GraphClass> = found.into_iter().flatten().collect();
    let mut v: Vec<GraphClass> = all.into_iter().collect();
    v.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    v
}

fn search(s: &State, bounds: &EnumBounds, out: &mut BTreeSet<GraphClass>) {
    finish(s, bounds, out);
    for c in children(s, bounds) {
        search(&c, bounds, out);
    }
}

/// States with one more vertex whose lower bound stays within budget.
fn children(s: &State, bounds: &EnumBounds) -> Vec<State> {
    let max = bounds.max_degree;
    let t = s.kinds.len();
    let budget = max - s.lower_bound();
    if budget < 0 {
        return Vec::new();
    }
    let n_graph = bounds.family == Family::N;
    let width = if n_graph { 1 } else { t + 1 };
    let mut kinds: Vec<i32> = (-1..=max).collect();
    kinds.push(SPECIAL);
    let mut out = Vec::new();
    // A new vertex with `a` incoming edges, `b` of which settle owed edges,
    // raises the bound by at least `a − b − 1`.
    let owed: i32 = (0..t).map(|u| s.need(u)).sum();
    let max_in = (budget + owed + 1).max(1) as u32;
    for a in 1..=max_in {
        for ins in compositions(a, width) {
            let mut ins = ins;
            ins.resize(t + 1, 0);
            if let Some(cap) = bounds.max_source {
                if s.source_deg + ins[0] > cap {
                    continue;
                }
            }
            for &k in &kinds {
                // Not joined to the previous vertex: require key order.
                if t > 0 && ins[t] == 0 {
                    let prev = (s.kinds[t - 1], &s.ins[t - 1][..]);
                    if (prev.0, prev.1) > (k, &ins[..t]) {
                        continue;
                    }
                }
                let mut c = s.clone();
                c.push(k, ins.clone());
                if c.lower_bound() <= max {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Vectors of `len` non-negative entries summing to `total`.
fn compositions(total: u32, len: usize) -> Vec<Vec<u32>> {
    if len == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, len - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Closes the state with sink edges and direct edges, then records every
/// valid labelling of the specials.
fn finish(s: &State, bounds: &EnumBounds, out: &mut BTreeSet<GraphClass>) {
    let max = bounds.max_degree;
    let n = s.kinds.len();
    let needs: Vec<i32> = (0..n).map(|t| s.need(t)).collect();
    let base = s.cost + needs.iter().sum::<i32>();
    if base > max {
        return;
    }
    let slack = (max - base) as u32;
    // Extra sink edges beyond need, plus direct edges, share the slack.
    let mut extras: Vec<Vec<u32>> = Vec::new();
    for total in 0..=slack {
        extras.extend(compositions(total, n + 1));
    }
    for extra in extras {
        let sink: Vec<u32> = (0..n).map(|t| needs[t] as u32 + extra[t]).collect();
        let direct = extra[n];
        let p = direct + sink.iter().sum::<u32>();
        if bounds.max_sink.is_some_and(|cap| p > cap) {
            continue;
        }
        if bounds.max_source.is_some_and(|cap| s.source_deg + direct > cap) {
            continue;
        }
        for g in label_specials(s, &sink, direct) {
            if g.validate().is_ok() {
                out.insert(canonicalize(&g));
            }
        }
    }
}

/// The graph for every assignment of special labels to special positions.
fn label_specials(s: &State, sink: &[u32], direct: u32) -> Vec<FGraph> {
    let n = s.kinds.len();
    let regs: Vec<usize> = (0..n).filter(|&t| s.kinds[t] != SPECIAL).collect();
    let specs: Vec<usize> = (0..n).filter(|&t| s.kinds[t] == SPECIAL).collect();
    let weights: Vec<i32> = regs.iter().map(|&t| s.kinds[t]).collect();
    let k = specs.len();
    let mut out = Vec::new();
    for labels in (0..k).permutations(k) {
        let mut node = vec![0usize; n];
        for (i, &t) in regs.iter().enumerate() {
            node[t] = 2 + i;
        }
        for (j, &t) in specs.iter().enumerate() {
            node[t] = 2 + regs.len() + labels[j];
        }
        let mut g = FGraph::empty(weights.clone(), k);
        g.add_edges(SOURCE, SINK, direct);
        for t in 0..n {
            g.add_edges(SOURCE, node[t], s.ins[t][0]);
            for j in 0..t {
                g.add_edges(node[j], node[t], s.ins[t][j + 1]);
            }
            g.add_edges(node[t], SINK, sink[t]);
        }
        out.push(g);
    }
    out
}
