//! Scalar weights on graph classes: `d`, the `E`-weights and `c`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{factorial, GaussianRational, Rational};
use crate::graphs::{admissible_partitions, canonicalize, sigma_partition, FGraph, GraphClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("graph {0} has an edge between internal vertices")]
    NotNGraph(String),
}

fn sign(e: i64) -> Rational {
    Rational::from_int(if e.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `d(Λ_n) = n!`, zero on graphs with internal vertices.
pub fn d_weight(g: &FGraph) -> Rational {
    if g.num_internal() == 0 {
        factorial(g.q() as usize)
    } else {
        Rational::zero()
    }
}

/// `p! q! / (|Aut| s!)` on graphs without internal edges.
pub fn e_weight(c: &GraphClass) -> Result<Rational, CoeffError> {
    let g = &c.graph;
    if !g.is_n_graph() {
        return Err(CoeffError::NotNGraph(g.to_string()));
    }
    let num = &factorial(g.p() as usize) * &factorial(g.q() as usize);
    let den = &Rational::from_int(c.aut_order as i64) * &factorial(g.s());
    Ok(&num / &den)
}

/// `Γ₂^{σ_i}`.
fn sigma_tail(g: &FGraph, i: usize) -> FGraph {
    sigma_partition(g, i).expect("index within special count").split(g).second
}

/// `c` by reduction to the frontal-free graph `Γ̃ = Γ₂^{σ_k}` and the
/// unipotent triangular system over `Γ_i = Γ̃₂^{σ_i}`.
pub fn c_triangular(g: &FGraph) -> Rational {
    if g.num_internal() == 0 {
        return Rational::one();
    }
    let k = g.s();
    let reduced = sigma_tail(g, k);
    let outer = sign(g.r() as i64 - reduced.r() as i64);
    let chain: Vec<FGraph> = (0..=k).map(|i| sigma_tail(&reduced, i)).collect();
    let mut c = vec![Rational::one()];
    for i in 1..=k {
        let ri = chain[i].r() as i64;
        let li = chain[i].frontal_chain();
        let mut acc = Rational::zero();
        for j in (i - li)..i {
            let term = &(&sign(ri - chain[j].r() as i64) * &c[j]) / &factorial(i - j);
            acc = &acc + &term;
        }
        c.push(-acc);
    }
    &outer * &c[k]
}

/// `c` from the closed sum over descending chains
/// `k = k_0 > k_1 > … > k_{n+1} = 0` with steps `1 ≤ k_i − k_{i+1} ≤ l_{k_i}`.
pub fn c_closed(g: &FGraph) -> Rational {
    let k = g.s();
    let base = sign(g.r() as i64);
    if k == 0 {
        return base;
    }
    let l: Vec<usize> = (0..=k).map(|i| sigma_tail(g, i).frontal_chain()).collect();
    fn walk(at: usize, l: &[usize], steps: i64, weight: &Rational, acc: &mut Rational) {
        if at == 0 {
            *acc = &*acc + &(&sign(steps) * weight);
            return;
        }
        for step in 1..=l[at].min(at) {
            let w = weight / &factorial(step);
            walk(at - step, l, steps + 1, &w, acc);
        }
    }
    let mut acc = Rational::zero();
    walk(k, &l, 0, &Rational::one(), &mut acc);
    &base * &acc
}

/// `q(Γ)! Σ_π c(Γ₂^π) / s(Γ₁^π)!` over admissible partitions with `Γ₁^π`
/// free of internal edges.
pub fn dgamma_rhs(g: &FGraph, c: impl Fn(&FGraph) -> Rational) -> Rational {
    let mut acc = Rational::zero();
    for p in admissible_partitions(g) {
        let s = p.split(g);
        if s.first.is_n_graph() {
            acc = &acc + &(&c(&s.second) / &factorial(s.first.s()));
        }
    }
    &factorial(g.q() as usize) * &acc
}

/// Weight table keyed by canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoeffTable {
    values: BTreeMap<FGraph, GaussianRational>,
}

impl CoeffTable {
    pub fn from_fn<'a>(classes: impl IntoIterator<Item = &'a GraphClass>, f: impl Fn(&GraphClass) -> Rational) -> Self {
        let values = classes.into_iter().map(|c| (c.graph.clone(), GaussianRational::real(f(c)))).collect();
        CoeffTable { values }
    }

    /// `c` on every class.
    pub fn c_table<'a>(classes: impl IntoIterator<Item = &'a GraphClass>) -> Self {
        Self::from_fn(classes, |c| c_triangular(&c.graph))
    }

    /// Looks up any graph after canonicalizing it.
    pub fn get(&self, g: &FGraph) -> Option<&GaussianRational> {
        self.values.get(g).or_else(|| self.values.get(&canonicalize(g).graph))
    }

    pub fn set(&mut self, g: &FGraph, v: GaussianRational) {
        self.values.insert(canonicalize(g).graph, v);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FGraph, &GaussianRational)> {
        self.values.iter()
    }
}
