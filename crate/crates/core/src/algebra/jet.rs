//! Truncated Taylor expansions at the chart origin.
//!
//! A jet in `2m` variables stores the coefficients of `z^a z̄^b` for all
//! monomials of total degree at most its accuracy. Variables `0..m` are the
//! holomorphic coordinates, `m..2m` the antiholomorphic ones.
//!
//! Monomials are packed into a `u64`, eight bits per variable with variable 0
//! in the most significant byte, so integer order is lexicographic order and
//! multiplying monomials is integer addition.

use std::collections::BTreeMap;
use std::fmt;

use super::coeff::Coeff;
use super::rational::{GaussianRational, Rational};
use super::AlgebraError;

/// Truncation degree of a jet; `None` means the jet is an exact polynomial.
pub type Accuracy = Option<i32>;

pub const MAX_VARS: usize = 8;
/// Largest exponent a single variable may carry.
pub const MAX_EXP: u32 = 255;

/// Minimum of two accuracies, treating `None` as infinity.
pub fn min_acc(a: Accuracy, b: Accuracy) -> Accuracy {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn shift(var: usize) -> u32 {
    8 * (MAX_VARS - 1 - var) as u32
}

pub fn pack(exps: &[u32]) -> u64 {
    assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
    exps.iter().enumerate().fold(0u64, |acc, (i, &e)| {
        assert!(e <= MAX_EXP, "exponent {e} too large");
        acc | ((e as u64) << shift(i))
    })
}

pub fn unpack(key: u64, nvars: usize) -> Vec<u32> {
    (0..nvars).map(|i| exponent(key, i)).collect()
}

#[inline]
pub fn exponent(key: u64, var: usize) -> u32 {
    ((key >> shift(var)) & 0xff) as u32
}

#[inline]
pub fn key_degree(key: u64) -> u32 {
    key.to_be_bytes().iter().map(|&b| b as u32).sum()
}

#[inline]
pub fn unit_key(var: usize) -> u64 {
    1u64 << shift(var)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Jet {
    nvars: usize,
    terms: BTreeMap<u64, GaussianRational>,
    acc: Accuracy,
}

impl Jet {
    /// The exact zero polynomial.
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        Jet { nvars, terms: BTreeMap::new(), acc: None }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut j = Self::zero(nvars);
        if !c.is_zero() {
            j.terms.insert(0, c);
        }
        j
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    pub fn monomial(nvars: usize, exps: &[u32], c: GaussianRational) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut j = Self::zero(nvars);
        if !c.is_zero() {
            j.terms.insert(pack(exps), c);
        }
        j
    }

    /// The coordinate function of variable `var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        assert!(var < nvars);
        let mut j = Self::zero(nvars);
        j.terms.insert(unit_key(var), GaussianRational::one());
        j
    }

    /// `z^k` on an `m`-dimensional chart.
    pub fn z(m: usize, k: usize) -> Self {
        Self::var(2 * m, k)
    }

    /// `z̄^l` on an `m`-dimensional chart.
    pub fn zbar(m: usize, l: usize) -> Self {
        Self::var(2 * m, m + l)
    }

    /// Builds a jet from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(nvars: usize, terms: I, acc: Accuracy) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, GaussianRational)>,
    {
        let mut j = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            j.add_term(pack(&e), c);
        }
        j.with_accuracy(acc)
    }

    #[allow(dead_code)]
    pub(crate) fn from_map(nvars: usize, terms: BTreeMap<u64, GaussianRational>, acc: Accuracy) -> Self {
        Jet { nvars, terms, acc }.with_accuracy(acc)
    }

    fn add_term(&mut self, key: u64, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn accuracy(&self) -> Accuracy {
        self.acc
    }

    pub fn is_exact(&self) -> bool {
        self.acc.is_none()
    }

    /// No stored coefficients (within whatever accuracy the jet has).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Lowers the accuracy to `min(self, acc)` and drops terms above it.
    pub fn with_accuracy(mut self, acc: Accuracy) -> Self {
        let acc = min_acc(self.acc, acc);
        if let Some(a) = acc {
            self.terms.retain(|&k, _| key_degree(k) as i32 <= a);
        }
        self.acc = acc;
        self
    }

    /// Truncates to degree `a`, returning a jet of accuracy at most `a`.
    pub fn cap(&self, a: i32) -> Self {
        self.clone().with_accuracy(Some(a))
    }

    /// Declares the jet exact. Only meaningful when the caller knows the
    /// stored polynomial is the whole function.
    pub fn into_exact(mut self) -> Self {
        self.acc = None;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &GaussianRational)> + '_ {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn monomials(&self) -> impl Iterator<Item = (Vec<u32>, &GaussianRational)> + '_ {
        self.terms.iter().map(|(&k, c)| (unpack(k, self.nvars), c))
    }

    fn check_read(&self, degree: i32) -> Result<(), AlgebraError> {
        match self.acc {
            Some(a) if degree > a => Err(AlgebraError::AccuracyUnderflow { degree, accuracy: a }),
            _ => Ok(()),
        }
    }

    /// Coefficient of a monomial; errors when its degree exceeds the accuracy.
    pub fn coeff(&self, exps: &[u32]) -> Result<GaussianRational, AlgebraError> {
        if exps.len() != self.nvars {
            return Err(AlgebraError::VarMismatch(exps.len(), self.nvars));
        }
        self.coeff_key(pack(exps))
    }

    pub fn coeff_key(&self, key: u64) -> Result<GaussianRational, AlgebraError> {
        self.check_read(key_degree(key) as i32)?;
        Ok(self.terms.get(&key).cloned().unwrap_or_default())
    }

    /// Value at the chart origin.
    pub fn value_at_origin(&self) -> Result<GaussianRational, AlgebraError> {
        self.coeff_key(0)
    }

    pub fn low_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&k| key_degree(k)).min()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&k| key_degree(k)).max()
    }

    fn check_vars(&self, o: &Jet) -> Result<(), AlgebraError> {
        if self.nvars == o.nvars {
            Ok(())
        } else {
            Err(AlgebraError::VarMismatch(self.nvars, o.nvars))
        }
    }

    pub fn checked_add(&self, o: &Jet) -> Result<Jet, AlgebraError> {
        self.check_vars(o)?;
        let acc = min_acc(self.acc, o.acc);
        let mut r = Jet { nvars: self.nvars, terms: self.terms.clone(), acc: None };
        for (&k, c) in &o.terms {
            r.add_term(k, c.clone());
        }
        Ok(r.with_accuracy(acc))
    }

    pub fn checked_sub(&self, o: &Jet) -> Result<Jet, AlgebraError> {
        self.checked_add(&o.neg())
    }

    pub fn checked_mul(&self, o: &Jet) -> Result<Jet, AlgebraError> {
        self.check_vars(o)?;
        let acc = min_acc(self.acc, o.acc);
        let bound = acc.unwrap_or(i32::MAX);
        let mut r = Jet { nvars: self.nvars, terms: BTreeMap::new(), acc };
        if bound < 0 {
            return Ok(r);
        }
        let rhs: Vec<(u64, i32, &GaussianRational)> =
            o.terms.iter().map(|(&k, c)| (k, key_degree(k) as i32, c)).collect();
        for (&ka, ca) in &self.terms {
            let da = key_degree(ka) as i32;
            for &(kb, db, cb) in &rhs {
                if da + db > bound {
                    continue;
                }
                debug_assert!((0..self.nvars).all(|v| exponent(ka, v) + exponent(kb, v) <= MAX_EXP));
                r.add_term(ka + kb, ca * cb);
            }
        }
        Ok(r)
    }

    pub fn neg(&self) -> Jet {
        Jet {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(&k, c)| (k, -c)).collect(),
            acc: self.acc,
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Jet {
        if c.is_zero() {
            return Jet { nvars: self.nvars, terms: BTreeMap::new(), acc: self.acc };
        }
        Jet {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(&k, v)| (k, v * c)).collect(),
            acc: self.acc,
        }
    }

    pub fn scale_q(&self, q: &Rational) -> Jet {
        self.scale(&GaussianRational::real(q.clone()))
    }

    /// Partial derivative in variable `var`; finite accuracy drops by one.
    pub fn derive(&self, var: usize) -> Jet {
        assert!(var < self.nvars, "variable index out of range");
        let unit = unit_key(var);
        let mut terms = BTreeMap::new();
        for (&k, c) in &self.terms {
            let e = exponent(k, var);
            if e > 0 {
                terms.insert(k - unit, c.scale(&Rational::from_int(e as i64)));
            }
        }
        Jet { nvars: self.nvars, terms, acc: self.acc.map(|a| a - 1) }
    }

    /// Applies `∂^exps` (one exponent per variable).
    pub fn derive_multi(&self, exps: &[u32]) -> Jet {
        assert_eq!(exps.len(), self.nvars);
        let mut j = self.clone();
        for (v, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                j = j.derive(v);
            }
        }
        j
    }

    /// Complex conjugate as a function: swaps `z^k ↔ z̄^k` and conjugates
    /// coefficients. A real function is fixed by this map.
    pub fn conj(&self) -> Jet {
        let m = self.nvars / 2;
        let mut terms = BTreeMap::new();
        for (&k, c) in &self.terms {
            let mut e = unpack(k, self.nvars);
            let (a, b) = e.split_at_mut(m);
            a.swap_with_slice(b);
            terms.insert(pack(&e), c.conj());
        }
        Jet { nvars: self.nvars, terms, acc: self.acc }
    }

    /// Drops every monomial that involves an antiholomorphic variable.
    pub fn holomorphic_part(&self) -> Jet {
        let m = self.nvars / 2;
        Jet {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(&k, _)| (m..self.nvars).all(|v| exponent(k, v) == 0))
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
            acc: self.acc,
        }
    }

    /// First monomial (within the common accuracy) on which two jets differ.
    pub fn first_difference(&self, o: &Jet) -> Option<(Vec<u32>, GaussianRational, GaussianRational)> {
        let acc = min_acc(self.acc, o.acc);
        let within = |k: u64| acc.is_none_or(|a| key_degree(k) as i32 <= a);
        let keys: std::collections::BTreeSet<u64> =
            self.terms.keys().chain(o.terms.keys()).copied().filter(|&k| within(k)).collect();
        for k in keys {
            let a = self.terms.get(&k).cloned().unwrap_or_default();
            let b = o.terms.get(&k).cloned().unwrap_or_default();
            if a != b {
                return Some((unpack(k, self.nvars), a, b));
            }
        }
        None
    }

    /// Equality of all coefficients up to the smaller of the two accuracies.
    pub fn agrees_with(&self, o: &Jet) -> bool {
        self.nvars == o.nvars && self.first_difference(o).is_none()
    }
}

/// Renders a monomial with variable names `z1.., zb1..`.
pub fn format_monomial(exps: &[u32]) -> String {
    let m = exps.len() / 2;
    let mut parts = Vec::new();
    for (v, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = if v < m { format!("z{}", v + 1) } else { format!("zb{}", v - m + 1) };
        parts.push(if e == 1 { name } else { format!("{name}^{e}") });
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.monomials().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{}", format_monomial(&e))?;
        }
        if let Some(a) = self.acc {
            write!(f, " + O({})", a + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! jet_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl std::ops::$tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                self.$checked(rhs).expect("jet variable-set mismatch")
            }
        }
        impl std::ops::$tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
    };
}
jet_op!(Add, add, checked_add);
jet_op!(Sub, sub, checked_sub);
jet_op!(Mul, mul, checked_mul);

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::neg(self)
    }
}

impl Coeff for Jet {
    fn add_c(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_c(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_c(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_c(&self) -> Self {
        Jet::neg(self)
    }
    fn scale_c(&self, c: &GaussianRational) -> Self {
        self.scale(c)
    }
    fn zero_like(&self) -> Self {
        Jet::zero(self.nvars)
    }
    fn one_like(&self) -> Self {
        Jet::one(self.nvars)
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
}

/// Operations needed by the truncated power-series helpers.
pub trait Graded: Coeff {
    fn accuracy(&self) -> Accuracy;
    fn cap(&self, a: i32) -> Self;
    /// Lowest degree of a stored term, `None` for zero.
    fn low_degree(&self) -> Option<u32>;
    fn into_exact(self) -> Self;
}

impl Graded for Jet {
    fn accuracy(&self) -> Accuracy {
        self.acc
    }
    fn cap(&self, a: i32) -> Self {
        Jet::cap(self, a)
    }
    fn low_degree(&self) -> Option<u32> {
        Jet::low_degree(self)
    }
    fn into_exact(self) -> Self {
        Jet::into_exact(self)
    }
}

pub(crate) fn exp_coeff(n: usize) -> GaussianRational {
    GaussianRational::real(super::rational::factorial(n).recip().unwrap())
}

pub(crate) fn log1p_coeff(n: usize) -> GaussianRational {
    if n == 0 {
        GaussianRational::zero()
    } else {
        let s = if n % 2 == 1 { 1 } else { -1 };
        GaussianRational::ratio(s, n as i64)
    }
}

impl Jet {
    /// `exp(self)` truncated at `target`; requires zero constant term.
    pub fn exp(&self, target: i32) -> Result<Jet, AlgebraError> {
        if !self.value_at_origin()?.is_zero() {
            return Err(AlgebraError::Precondition("exp needs zero constant term".into()));
        }
        Ok(series_with_exactness(self, target, exp_coeff))
    }

    /// `log(self)` truncated at `target`; requires constant term 1.
    pub fn log(&self, target: i32) -> Result<Jet, AlgebraError> {
        if !self.value_at_origin()?.is_one() {
            return Err(AlgebraError::Precondition("log needs constant term 1".into()));
        }
        let x = self - &Jet::one(self.nvars);
        Ok(series_with_exactness(&x, target, log1p_coeff))
    }

    /// Inverse of a jet with nonzero constant term. Exact inputs are inverted
    /// to degree `target`; the result is marked exact when it is a genuine
    /// polynomial inverse.
    pub fn inverse(&self, target: i32) -> Result<Jet, AlgebraError> {
        let m = super::matrix::MatrixJet::from_scalar(self.clone());
        Ok(m.inverse(target)?.entry(0, 0).clone())
    }
}

/// `Σ_n c_n x^n` for `x` without constant term, truncated at degree
/// `target`. An exact input whose powers vanish identically yields an exact
/// result; otherwise the result has accuracy `min(accuracy(x), target)`.
pub(crate) fn series_with_exactness<T: Graded>(
    x: &T,
    target: i32,
    coeff: impl Fn(usize) -> GaussianRational,
) -> T {
    let exact_in = Graded::accuracy(x).is_none();
    let work = min_acc(Graded::accuracy(x), Some(target)).unwrap();
    let mut sum = x.one_like().scale_c(&coeff(0));
    let mut pow = x.one_like();
    for n in 1.. {
        pow = pow.mul_c(x);
        if pow.is_zero_c() {
            return if exact_in { sum } else { sum.cap(work) };
        }
        if Graded::low_degree(&pow).unwrap_or(0) as i32 > work {
            break;
        }
        sum = sum.add_c(&pow.scale_c(&coeff(n)));
    }
    sum.cap(work)
}
