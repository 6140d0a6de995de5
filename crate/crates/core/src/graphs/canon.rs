//! Canonical forms and automorphism counts.
//!
//! Source, sink and special vertices are fixed by every isomorphism, so only
//! regular vertices are permuted. They are first split into blocks by
//! colour refinement; the canonical form is the smallest relabelling over
//! permutations within blocks.

use std::collections::BTreeMap;

use itertools::Itertools;

use super::fgraph::FGraph;
use crate::algebra::factorial_u64;

/// An isomorphism class: canonical representative, `|Aut|` and ν-degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphClass {
    pub graph: FGraph,
    pub aut_order: u64,
    pub nu_degree: i32,
}

impl GraphClass {
    /// Sort key used for deterministic output.
    pub fn sort_key(&self) -> (i32, usize, &FGraph) {
        (self.nu_degree, self.graph.num_internal(), &self.graph)
    }
}

/// Refined colour of every regular vertex (index `i` ↔ node `2+i`).
fn refine(g: &FGraph) -> Vec<usize> {
    let n = g.num_nodes();
    let regs: Vec<usize> = (2..g.first_special()).collect();
    let fixed: Vec<usize> = [0, 1].into_iter().chain(g.first_special()..n).collect();
    let base: Vec<Vec<i64>> = regs
        .iter()
        .map(|&v| {
            let mut sig = vec![g.weights()[v - 2] as i64];
            for &f in &fixed {
                sig.push(g.mult(f, v) as i64);
                sig.push(g.mult(v, f) as i64);
            }
            sig
        })
        .collect();
    let mut colours = ranks(&base);
    loop {
        let sigs: Vec<Vec<i64>> = regs
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut ins: Vec<(usize, u32)> =
                    regs.iter().enumerate().filter(|&(_, &u)| g.mult(u, v) > 0).map(|(j, &u)| (colours[j], g.mult(u, v))).collect();
                let mut outs: Vec<(usize, u32)> =
                    regs.iter().enumerate().filter(|&(_, &w)| g.mult(v, w) > 0).map(|(j, &w)| (colours[j], g.mult(v, w))).collect();
                ins.sort();
                outs.sort();
                let mut sig = vec![colours[i] as i64, -1];
                sig.extend(ins.iter().flat_map(|&(c, m)| [c as i64, m as i64]));
                sig.push(-2);
                sig.extend(outs.iter().flat_map(|&(c, m)| [c as i64, m as i64]));
                sig
            })
            .collect();
        let next = ranks(&sigs);
        let stable = next.iter().collect::<std::collections::BTreeSet<_>>().len()
            == colours.iter().collect::<std::collections::BTreeSet<_>>().len();
        colours = next;
        if stable {
            return colours;
        }
    }
}

fn ranks(sigs: &[Vec<i64>]) -> Vec<usize> {
    let sorted: BTreeMap<&Vec<i64>, usize> =
        sigs.iter().sorted().dedup().enumerate().map(|(i, s)| (s, i)).collect();
    sigs.iter().map(|s| sorted[s]).collect()
}

/// Calls `f` with every node permutation that sends each colour block onto
/// its canonical slot range.
fn for_each_block_perm(g: &FGraph, colours: &[usize], mut f: impl FnMut(&[usize])) {
    let n = g.num_nodes();
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in colours.iter().enumerate() {
        blocks.entry(c).or_default().push(2 + i);
    }
    let blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    let mut perm: Vec<usize> = (0..n).collect();
    fn rec(
        blocks: &[Vec<usize>],
        slot: usize,
        idx: usize,
        perm: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if idx == blocks.len() {
            f(perm);
            return;
        }
        let b = &blocks[idx];
        for p in b.iter().permutations(b.len()) {
            for (j, &&v) in p.iter().enumerate() {
                perm[v] = slot + j;
            }
            rec(blocks, slot + b.len(), idx + 1, perm, f);
        }
    }
    rec(&blocks, 2, 0, &mut perm, &mut f);
}

/// `Π (edge multiplicity)!` over ordered node pairs.
pub fn multiplicity_factor(g: &FGraph) -> u64 {
    g.adjacency().iter().map(|&m| factorial_u64(m as usize)).product()
}

/// Canonical representative and `|Aut|`.
pub fn canonicalize(g: &FGraph) -> GraphClass {
    let colours = refine(g);
    let mut best: Option<FGraph> = None;
    let mut ties = 0u64;
    for_each_block_perm(g, &colours, |perm| {
        let h = g.permuted(perm);
        match &best {
            Some(b) if h > *b => {}
            Some(b) if h == *b => ties += 1,
            _ => {
                best = Some(h);
                ties = 1;
            }
        }
    });
    let graph = best.unwrap();
    let aut_order = ties * multiplicity_factor(&graph);
    let nu_degree = graph.nu_degree();
    GraphClass { graph, aut_order, nu_degree }
}

/// `|Aut|` by trying every weight-preserving permutation of regular vertices.
pub fn brute_force_aut(g: &FGraph) -> u64 {
    let n = g.num_nodes();
    let regs: Vec<usize> = (2..g.first_special()).collect();
    let mut count = 0u64;
    for p in regs.iter().permutations(regs.len()) {
        let mut perm: Vec<usize> = (0..n).collect();
        for (j, &&v) in p.iter().enumerate() {
            perm[v] = 2 + j;
        }
        if g.permuted(&perm) == *g {
            count += 1;
        }
    }
    count * multiplicity_factor(g)
}

/// Whether two graphs are isomorphic.
pub fn isomorphic(a: &FGraph, b: &FGraph) -> bool {
    a.num_nodes() == b.num_nodes() && canonicalize(a).graph == canonicalize(b).graph
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::fgraph::{SINK, SOURCE};

    #[test]
    fn lambda_aut_is_factorial() {
        for n in 0..5 {
            assert_eq!(canonicalize(&FGraph::lambda(n)).aut_order, factorial_u64(n as usize));
        }
    }

    #[test]
    fn worked_example_aut() {
        assert_eq!(canonicalize(&FGraph::single_regular(3, 1, 2)).aut_order, 2);
        assert_eq!(canonicalize(&FGraph::single_special(2, 2)).aut_order, 4);
    }

    #[test]
    fn relabelling_gives_same_class() {
        // r0 → r1 → sink, in → r0, in → r1, plus a second weight.
        let mut g = FGraph::empty(vec![-1, -1, 0], 0);
        g.add_edges(SOURCE, 2, 1);
        g.add_edges(SOURCE, 3, 1);
        g.add_edges(2, 3, 1);
        g.add_edges(3, SINK, 2);
        g.add_edges(SOURCE, 4, 1);
        g.add_edges(4, SINK, 1);
        g.add_edges(2, SINK, 1);
        g.validate().unwrap();
        let c = canonicalize(&g);
        let h = g.permuted(&[0, 1, 3, 2, 4]);
        assert_eq!(canonicalize(&h), c);
        assert_eq!(c.aut_order, brute_force_aut(&g));
    }

    #[test]
    fn symmetric_pair_has_swap_automorphism() {
        let mut g = FGraph::empty(vec![0, 0], 0);
        for v in [2, 3] {
            g.add_edges(SOURCE, v, 1);
            g.add_edges(v, SINK, 1);
        }
        assert_eq!(canonicalize(&g).aut_order, 2);
        assert_eq!(brute_force_aut(&g), 2);
    }
}
