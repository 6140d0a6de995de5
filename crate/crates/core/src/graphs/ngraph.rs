//! Graphs without internal edges, described by their vertex-type data.
//!
//! A direct source → sink edge is counted as a regular vertex of type
//! `(1, 1, −1)`. Types are `(incoming, outgoing, weight)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fgraph::{FGraph, SINK, SOURCE};
use super::GraphError;
use crate::algebra::factorial_u64;

/// Multiplicities of regular types plus the ordered special types
/// (`specials[i]` is the `(incoming, outgoing)` pair of `s_{i+1}`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NGraphKey {
    pub regular: BTreeMap<(u32, u32, i32), u32>,
    pub specials: Vec<(u32, u32)>,
}

pub const DIRECT: (u32, u32, i32) = (1, 1, -1);

impl NGraphKey {
    pub fn k(&self) -> usize {
        self.specials.len()
    }

    /// `q(Γ)`: source degree.
    pub fn source_degree(&self) -> u32 {
        self.regular.iter().map(|(&(p, _, _), &n)| p * n).sum::<u32>() + self.specials.iter().map(|s| s.0).sum::<u32>()
    }

    /// `p(Γ)`: sink degree.
    pub fn sink_degree(&self) -> u32 {
        self.regular.iter().map(|(&(_, q, _), &n)| q * n).sum::<u32>() + self.specials.iter().map(|s| s.1).sum::<u32>()
    }

    pub fn nu_degree(&self) -> i32 {
        self.regular.iter().map(|(&(p, q, r), &n)| (p + q) as i32 * n as i32 + r * n as i32).sum::<i32>()
            + self.specials.iter().map(|&(p, q)| (p + q) as i32).sum::<i32>()
    }

    /// ν-order of the lower tensor: `Σ r` over regular types.
    pub fn lower_order(&self) -> i32 {
        self.regular.iter().map(|(&(_, _, r), &n)| r * n as i32).sum()
    }

    /// Key of a graph without internal edges.
    pub fn of_graph(g: &FGraph) -> Result<NGraphKey, GraphError> {
        if !g.is_n_graph() {
            return Err(GraphError::NotNGraph);
        }
        let mut regular = BTreeMap::new();
        let direct = g.mult(SOURCE, SINK);
        if direct > 0 {
            regular.insert(DIRECT, direct);
        }
        for (i, &w) in g.weights().iter().enumerate() {
            let v = g.regular_node(i);
            *regular.entry((g.mult(SOURCE, v), g.mult(v, SINK), w)).or_insert(0) += 1;
        }
        let specials = (1..=g.s()).map(|l| {
            let v = g.special_node(l);
            (g.mult(SOURCE, v), g.mult(v, SINK))
        });
        Ok(NGraphKey { regular, specials: specials.collect() })
    }

    /// The graph described by the key.
    pub fn realize(&self) -> FGraph {
        let mut weights = Vec::new();
        let mut types = Vec::new();
        for (&t, &n) in &self.regular {
            if t != DIRECT {
                for _ in 0..n {
                    weights.push(t.2);
                    types.push((t.0, t.1));
                }
            }
        }
        let mut g = FGraph::empty(weights, self.k());
        g.add_edges(SOURCE, SINK, self.regular.get(&DIRECT).copied().unwrap_or(0));
        for (i, &(a, b)) in types.iter().enumerate() {
            g.add_edges(SOURCE, 2 + i, a);
            g.add_edges(2 + i, SINK, b);
        }
        for (i, &(a, b)) in self.specials.iter().enumerate() {
            let v = g.special_node(i + 1);
            g.add_edges(SOURCE, v, a);
            g.add_edges(v, SINK, b);
        }
        g
    }
}

/// `λ = Π n(p,q,r)! (p! q!)^{n(p,q,r)} · Π P(i)! Q(i)!`.
pub fn lambda_order(key: &NGraphKey) -> u64 {
    let f = |n: u32| factorial_u64(n as usize);
    let regs: u64 = key.regular.iter().map(|(&(p, q, _), &n)| f(n) * (f(p) * f(q)).pow(n)).product();
    regs * key.specials.iter().map(|&(p, q)| f(p) * f(q)).product::<u64>()
}

/// Limits for [`keys_where`]; every limit is inclusive.
#[derive(Clone, Copy, Debug)]
pub struct KeyBounds {
    pub max_source: u32,
    pub max_sink: u32,
    pub max_nu: Option<i32>,
    /// Inclusive range of `Σ r`.
    pub lower_order: Option<(i32, i32)>,
}

/// All keys with `nu_degree ≤ max_degree`, sorted.
pub fn keys_up_to(max_degree: i32) -> Vec<NGraphKey> {
    if max_degree < 0 {
        return Vec::new();
    }
    let cap = (2 * max_degree).max(0) as u32;
    keys_where(&KeyBounds { max_source: cap, max_sink: cap, max_nu: Some(max_degree), lower_order: None })
}

/// All keys within the given limits, sorted.
pub fn keys_where(b: &KeyBounds) -> Vec<NGraphKey> {
    let cap_vertices = b.max_source.min(b.max_sink) as i32;
    let max_r = match (b.max_nu, b.lower_order) {
        (Some(nu), _) => nu,
        (None, Some((_, hi))) => hi + cap_vertices,
        (None, None) => panic!("keys_where needs a ν bound"),
    };
    let mut types = Vec::new();
    for p in 1..=b.max_source {
        for q in 1..=b.max_sink {
            for r in -1..=max_r {
                types.push((p, q, r));
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = NGraphKey { regular: BTreeMap::new(), specials: Vec::new() };
    regular_rec(&types, 0, &mut cur, b, &mut out);
    out.sort();
    out
}

fn within(key: &NGraphKey, b: &KeyBounds, complete: bool) -> bool {
    let (src, sink) = (key.source_degree(), key.sink_degree());
    if src > b.max_source || sink > b.max_sink {
        return false;
    }
    if b.max_nu.is_some_and(|nu| key.nu_degree() > nu) {
        return false;
    }
    if let Some((lo, hi)) = b.lower_order {
        let ord = key.lower_order();
        // Later vertices can lower `Σ r` by at most one each.
        let room = (b.max_source - src).min(b.max_sink - sink) as i32;
        if ord - room > hi || (complete && (ord < lo || ord > hi)) {
            return false;
        }
    }
    true
}

fn regular_rec(types: &[(u32, u32, i32)], i: usize, cur: &mut NGraphKey, b: &KeyBounds, out: &mut Vec<NGraphKey>) {
    if i == types.len() {
        special_rec(cur, b, out);
        return;
    }
    regular_rec(types, i + 1, cur, b, out);
    let t = types[i];
    let mut n = 0;
    loop {
        n += 1;
        cur.regular.insert(t, n);
        if !within(cur, b, false) {
            break;
        }
        regular_rec(types, i + 1, cur, b, out);
    }
    cur.regular.remove(&t);
}

fn special_rec(cur: &mut NGraphKey, b: &KeyBounds, out: &mut Vec<NGraphKey>) {
    if within(cur, b, true) {
        out.push(cur.clone());
    }
    for p in 1..=b.max_source {
        for q in 1..=b.max_sink {
            cur.specials.push((p, q));
            if within(cur, b, false) {
                special_rec(cur, b, out);
            }
            cur.specials.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::canon::{brute_force_aut, canonicalize};
    use crate::graphs::enumerate::{enumerate, Family};

    #[test]
    fn lambda_examples() {
        for n in 0..5u32 {
            let key = NGraphKey::of_graph(&FGraph::lambda(n)).unwrap();
            assert_eq!(lambda_order(&key), factorial_u64(n as usize));
        }
        let ex = NGraphKey::of_graph(&FGraph::single_regular(3, 1, 2)).unwrap();
        assert_eq!(ex.regular, BTreeMap::from([((1, 2, 3), 1)]));
        assert_eq!(lambda_order(&ex), 2);
        let sp = NGraphKey::of_graph(&FGraph::single_special(2, 2)).unwrap();
        assert_eq!(lambda_order(&sp), 4);
        assert_eq!(brute_force_aut(&sp.realize()), 4);
    }

    #[test]
    fn realize_round_trips() {
        for key in keys_up_to(3) {
            let g = key.realize();
            g.validate().unwrap();
            assert_eq!(NGraphKey::of_graph(&g).unwrap(), key);
            assert_eq!(g.nu_degree(), key.nu_degree());
        }
    }

    #[test]
    fn keys_match_enumeration() {
        for d in 0..=3 {
            let mut from_keys: Vec<FGraph> = keys_up_to(d).iter().map(|k| canonicalize(&k.realize()).graph).collect();
            from_keys.sort();
            let mut from_enum: Vec<FGraph> = enumerate(d, Family::N).into_iter().map(|c| c.graph).collect();
            from_enum.sort();
            assert_eq!(from_keys, from_enum, "degree {d}");
        }
    }

    #[test]
    fn lambda_matches_automorphisms() {
        for key in keys_up_to(3) {
            let g = key.realize();
            assert_eq!(lambda_order(&key), canonicalize(&g).aut_order, "{g}");
        }
    }

    #[test]
    fn box_bounds_filter() {
        let b = KeyBounds { max_source: 2, max_sink: 3, max_nu: None, lower_order: Some((-1, 1)) };
        let keys = keys_where(&b);
        assert!(!keys.is_empty());
        for k in &keys {
            assert!(k.source_degree() <= 2 && k.sink_degree() <= 3);
            assert!((-1..=1).contains(&k.lower_order()));
        }
        let direct_two = NGraphKey { regular: BTreeMap::from([(DIRECT, 2)]), specials: vec![] };
        assert!(!keys.contains(&direct_two));
        let direct_one = NGraphKey { regular: BTreeMap::from([(DIRECT, 1)]), specials: vec![] };
        assert!(keys.contains(&direct_one));
    }
}
