//! Truncated power series in formal displacements `η^k, η̄^l`.

use std::collections::BTreeMap;
use std::fmt;

use super::coeff::Coeff;
use super::jet::{exponent, key_degree, pack, unpack, Jet};
use super::matrix::MatrixJet;
use super::nu::NuSeries;
use super::rational::{factorial, GaussianRational, Rational};
use super::AlgebraError;

/// Coefficient types that can be differentiated in a chart variable.
pub trait Differentiable {
    fn derive_var(&self, var: usize) -> Self;
}

impl Differentiable for Jet {
    fn derive_var(&self, var: usize) -> Self {
        self.derive(var)
    }
}

impl Differentiable for MatrixJet {
    fn derive_var(&self, var: usize) -> Self {
        self.derive(var)
    }
}

impl<T: Coeff + Differentiable> Differentiable for NuSeries<T> {
    fn derive_var(&self, var: usize) -> Self {
        self.map_same(|c| c.derive_var(var))
    }
}

/// `Σ c_{αβ} η^α η̄^β` over `|α| ≤ p_max`, `|β| ≤ q_max`, with `m`
/// holomorphic and `m` antiholomorphic displacement variables.
#[derive(Clone, PartialEq)]
pub struct BiSeries<T: Coeff> {
    m: usize,
    p_max: u32,
    q_max: u32,
    terms: BTreeMap<u64, T>,
    zero: T,
}

/// `α!` for an exponent vector.
pub fn multi_factorial(exps: &[u32]) -> Rational {
    exps.iter().fold(Rational::one(), |acc, &e| &acc * &factorial(e as usize))
}

/// All exponent vectors of length `m` with total degree `n`, in
/// lexicographically decreasing order.
pub fn exponents_of_degree(m: usize, n: u32) -> Vec<Vec<u32>> {
    fn rec(m: usize, n: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == m {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=n).rev() {
            prefix.push(e);
            rec(m, n - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(m, n, &mut Vec::new(), &mut out);
    out
}

impl<T: Coeff> BiSeries<T> {
    pub fn zero(m: usize, p_max: u32, q_max: u32, template: &T) -> Self {
        BiSeries { m, p_max, q_max, terms: BTreeMap::new(), zero: template.zero_like() }
    }

    /// The constant series `c`.
    pub fn constant(m: usize, p_max: u32, q_max: u32, c: T) -> Self {
        let mut s = Self::zero(m, p_max, q_max, &c);
        s.insert(0, c);
        s
    }

    pub fn one(m: usize, p_max: u32, q_max: u32, template: &T) -> Self {
        Self::constant(m, p_max, q_max, template.one_like())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn bounds(&self) -> (u32, u32) {
        (self.p_max, self.q_max)
    }

    pub fn template(&self) -> &T {
        &self.zero
    }

    pub fn key(alpha: &[u32], beta: &[u32]) -> u64 {
        let mut e = alpha.to_vec();
        e.extend_from_slice(beta);
        pack(&e)
    }

    fn split(&self, key: u64) -> (u32, u32) {
        let p = (0..self.m).map(|v| exponent(key, v)).sum();
        (p, key_degree(key) - p)
    }

    pub fn bidegree_of(&self, key: u64) -> (u32, u32) {
        self.split(key)
    }

    fn within(&self, key: u64) -> bool {
        let (p, q) = self.split(key);
        p <= self.p_max && q <= self.q_max
    }

    fn insert(&mut self, key: u64, c: T) {
        if !self.within(key) || c.is_zero_c() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = v.add_c(&c);
                if v.is_zero_c() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// Adds `c · η^α η̄^β` (dropped if outside the bounds).
    pub fn add_term(&mut self, alpha: &[u32], beta: &[u32], c: T) {
        assert_eq!(alpha.len(), self.m);
        assert_eq!(beta.len(), self.m);
        self.insert(Self::key(alpha, beta), c);
    }

    /// Coefficient of `η^α η̄^β`.
    pub fn coeff(&self, alpha: &[u32], beta: &[u32]) -> Result<T, AlgebraError> {
        let p: u32 = alpha.iter().sum();
        let q: u32 = beta.iter().sum();
        if p > self.p_max || q > self.q_max {
            return Err(AlgebraError::Precondition(format!(
                "bidegree ({p},{q}) outside truncation ({},{})",
                self.p_max, self.q_max
            )));
        }
        Ok(self.terms.get(&Self::key(alpha, beta)).cloned().unwrap_or_else(|| self.zero.clone()))
    }

    /// The symmetric tensor component `T_{KL̄} = α! β! · [η^α η̄^β]`, where
    /// `α, β` are the multiplicity vectors of `K, L̄` (so that the series
    /// reads `Σ_{K,L} T_{KL̄} η^K η̄^L / (|K|! |L|!)` over ordered tuples).
    pub fn tensor_component(&self, alpha: &[u32], beta: &[u32]) -> Result<T, AlgebraError> {
        let f = &multi_factorial(alpha) * &multi_factorial(beta);
        Ok(self.coeff(alpha, beta)?.scale_c(&GaussianRational::real(f)))
    }

    /// `((α, β), coefficient)` for every stored term.
    pub fn iter(&self) -> impl Iterator<Item = ((Vec<u32>, Vec<u32>), &T)> + '_ {
        self.terms.iter().map(|(&k, c)| {
            let e = unpack(k, 2 * self.m);
            ((e[..self.m].to_vec(), e[self.m..].to_vec()), c)
        })
    }

    /// Terms of bidegree exactly `(p, q)`.
    pub fn homogeneous(&self, p: u32, q: u32) -> Self {
        let mut s = Self::zero(self.m, self.p_max, self.q_max, &self.zero);
        for (&k, c) in &self.terms {
            if self.split(k) == (p, q) {
                s.terms.insert(k, c.clone());
            }
        }
        s
    }

    /// Restricts to smaller bidegree bounds.
    pub fn truncate(&self, p_max: u32, q_max: u32) -> Self {
        let mut s = Self::zero(self.m, p_max.min(self.p_max), q_max.min(self.q_max), &self.zero);
        for (&k, c) in &self.terms {
            s.insert(k, c.clone());
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn map<U: Coeff>(&self, template: &U, f: impl Fn(&T) -> U) -> BiSeries<U> {
        let mut s = BiSeries::zero(self.m, self.p_max, self.q_max, template);
        for (&k, c) in &self.terms {
            s.insert(k, f(c));
        }
        s
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.m, o.m, "displacement variable mismatch");
    }

    fn combine_bounds(&self, o: &Self) -> (u32, u32) {
        (self.p_max.min(o.p_max), self.q_max.min(o.q_max))
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let (p, q) = self.combine_bounds(o);
        let mut s = self.truncate(p, q);
        for (&k, c) in &o.terms {
            s.insert(k, c.clone());
        }
        s
    }

    pub fn neg(&self) -> Self {
        self.map(&self.zero, Coeff::neg_c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        self.map(&self.zero, |x| x.scale_c(c))
    }

    /// Truncated product; coefficients multiply in `self · o` order.
    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let (p, q) = self.combine_bounds(o);
        let mut s = Self::zero(self.m, p, q, &self.zero);
        for (&ka, ca) in &self.terms {
            let (pa, qa) = self.split(ka);
            if pa > p || qa > q {
                continue;
            }
            for (&kb, cb) in &o.terms {
                let (pb, qb) = o.split(kb);
                if pa + pb > p || qa + qb > q {
                    continue;
                }
                s.insert(ka + kb, ca.mul_c(cb));
            }
        }
        s
    }

    fn constant_term(&self) -> T {
        self.terms.get(&0).cloned().unwrap_or_else(|| self.zero.clone())
    }

    fn series(&self, coeff: impl Fn(usize) -> GaussianRational) -> Self {
        let mut sum = Self::one(self.m, self.p_max, self.q_max, &self.zero).scale(&coeff(0));
        let mut pow = Self::one(self.m, self.p_max, self.q_max, &self.zero);
        for n in 1.. {
            pow = pow.mul(self);
            if pow.is_zero() {
                break;
            }
            sum = sum.add(&pow.scale(&coeff(n)));
        }
        sum
    }

    /// `exp(self)`; the constant term must vanish.
    pub fn exp(&self) -> Result<Self, AlgebraError> {
        if !self.constant_term().is_zero_c() {
            return Err(AlgebraError::Precondition("exp needs zero constant term".into()));
        }
        Ok(self.series(super::jet::exp_coeff))
    }

    /// `log(self)`; the constant term must be the identity.
    pub fn log(&self) -> Result<Self, AlgebraError> {
        let one = self.zero.one_like();
        if self.constant_term() != one {
            return Err(AlgebraError::Precondition("log needs identity constant term".into()));
        }
        let x = self.sub(&Self::constant(self.m, self.p_max, self.q_max, one));
        Ok(x.series(super::jet::log1p_coeff))
    }

    pub fn terms_raw(&self) -> impl Iterator<Item = (u64, &T)> + '_ {
        self.terms.iter().map(|(&k, c)| (k, c))
    }
}

impl<T: Coeff + Differentiable> BiSeries<T> {
    /// Taylor re-expansion of a function at shifted arguments,
    /// `f(z + η·[hol], z̄ + η̄·[antihol]) = Σ η^α η̄^β ∂^α ∂̄^β f / (α! β!)`.
    /// `chart_m` is the complex dimension; chart variables `0..m` are
    /// holomorphic and `m..2m` antiholomorphic.
    pub fn shifted(f: &T, m: usize, p_max: u32, q_max: u32, hol: bool, antihol: bool) -> Self {
        let mut s = Self::zero(m, p_max, q_max, f);
        let p_top = if hol { p_max } else { 0 };
        let q_top = if antihol { q_max } else { 0 };
        // Derivatives are built incrementally along each exponent vector.
        let mut hol_derivs: Vec<(Vec<u32>, T)> = Vec::new();
        for p in 0..=p_top {
            for alpha in exponents_of_degree(m, p) {
                let d = apply_derivs(f, &alpha, 0);
                hol_derivs.push((alpha, d));
            }
        }
        for (alpha, fa) in &hol_derivs {
            for q in 0..=q_top {
                for beta in exponents_of_degree(m, q) {
                    let d = apply_derivs(fa, &beta, m);
                    let w = &multi_factorial(alpha) * &multi_factorial(&beta);
                    s.add_term(alpha, &beta, d.scale_c(&GaussianRational::real(w.recip().unwrap())));
                }
            }
        }
        s
    }
}

fn apply_derivs<T: Differentiable + Clone>(f: &T, exps: &[u32], offset: usize) -> T {
    let mut g = f.clone();
    for (v, &e) in exps.iter().enumerate() {
        for _ in 0..e {
            g = g.derive_var(offset + v);
        }
    }
    g
}

impl<T: Coeff> fmt::Debug for BiSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((a, b), c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "η^{a:?}η̄^{b:?}·{c:?}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<T: Coeff> Coeff for BiSeries<T> {
    fn add_c(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn sub_c(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn mul_c(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn neg_c(&self) -> Self {
        self.neg()
    }
    fn scale_c(&self, c: &GaussianRational) -> Self {
        self.scale(c)
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.m, self.p_max, self.q_max, &self.zero)
    }
    fn one_like(&self) -> Self {
        Self::one(self.m, self.p_max, self.q_max, &self.zero)
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_enumeration() {
        assert_eq!(exponents_of_degree(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(exponents_of_degree(1, 3), vec![vec![3]]);
        assert_eq!(exponents_of_degree(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn shift_of_quadratic() {
        // zz̄ at (z+η, z̄+η̄) = zz̄ + ηz̄ + zη̄ + ηη̄.
        let f = &Jet::z(1, 0) * &Jet::zbar(1, 0);
        let s = BiSeries::shifted(&f, 1, 3, 3, true, true);
        assert_eq!(s.coeff(&[1], &[1]).unwrap(), Jet::one(2));
        assert_eq!(s.coeff(&[1], &[0]).unwrap(), Jet::zbar(1, 0));
        assert_eq!(s.coeff(&[0], &[0]).unwrap(), f);
        assert!(s.coeff(&[2], &[0]).unwrap().is_zero());
        let h = BiSeries::shifted(&f, 1, 3, 3, true, false);
        assert!(h.coeff(&[1], &[1]).unwrap().is_zero());
    }

    #[test]
    fn exp_log_round_trip() {
        let one = GaussianRational::one();
        let mut x = BiSeries::zero(1, 3, 3, &one);
        x.add_term(&[1], &[1], GaussianRational::from_int(2));
        x.add_term(&[2], &[1], GaussianRational::ratio(1, 3));
        let e = x.exp().unwrap();
        assert_eq!(e.coeff(&[2], &[2]).unwrap(), GaussianRational::from_int(2));
        assert_eq!(e.log().unwrap(), x);
    }

    #[test]
    fn tensor_component_factorials() {
        let mut x = BiSeries::zero(2, 3, 3, &GaussianRational::one());
        x.add_term(&[2, 0], &[1, 1], GaussianRational::one());
        assert_eq!(x.tensor_component(&[2, 0], &[1, 1]).unwrap(), GaussianRational::from_int(2));
    }
}
