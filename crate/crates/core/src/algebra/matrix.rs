//! Constant matrices and matrices of jets.

use std::fmt;

use super::coeff::Coeff;
use super::jet::{min_acc, series_with_exactness, Accuracy, Graded, Jet};
use super::rational::GaussianRational;
use super::AlgebraError;

/// A square matrix of Gaussian rationals, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CMatrix {
    pub dim: usize,
    pub data: Vec<GaussianRational>,
}

impl CMatrix {
    pub fn zero(dim: usize) -> Self {
        CMatrix { dim, data: vec![GaussianRational::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.data[i * dim + i] = GaussianRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "square matrix expected");
        CMatrix { dim, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.data[i * self.dim + j]
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        let d = self.dim;
        let mut r = CMatrix::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    r.data[i * d + j] = &r.data[i * d + j] + &(a * o.get(k, j));
                }
            }
        }
        r
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<CMatrix, AlgebraError> {
        let d = self.dim;
        let mut a = self.data.clone();
        let mut inv = CMatrix::identity(d).data;
        for col in 0..d {
            let piv = (col..d).find(|&r| !a[r * d + col].is_zero()).ok_or(AlgebraError::Singular)?;
            if piv != col {
                for j in 0..d {
                    a.swap(piv * d + j, col * d + j);
                    inv.swap(piv * d + j, col * d + j);
                }
            }
            let p = a[col * d + col].recip()?;
            for j in 0..d {
                a[col * d + j] = &a[col * d + j] * &p;
                inv[col * d + j] = &inv[col * d + j] * &p;
            }
            for r in 0..d {
                if r == col || a[r * d + col].is_zero() {
                    continue;
                }
                let f = a[r * d + col].clone();
                for j in 0..d {
                    a[r * d + j] = &a[r * d + j] - &(&f * &a[col * d + j]);
                    inv[r * d + j] = &inv[r * d + j] - &(&f * &inv[col * d + j]);
                }
            }
        }
        Ok(CMatrix { dim: d, data: inv })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let d = self.dim;
        let mut r = CMatrix::zero(d);
        for i in 0..d {
            for j in 0..d {
                r.data[j * d + i] = self.get(i, j).conj();
            }
        }
        r
    }
}

/// A `d × d` matrix of jets over a common variable set, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixJet {
    dim: usize,
    nvars: usize,
    entries: Vec<Jet>,
}

impl MatrixJet {
    pub fn zero(dim: usize, nvars: usize) -> Self {
        MatrixJet { dim, nvars, entries: vec![Jet::zero(nvars); dim * dim] }
    }

    pub fn identity(dim: usize, nvars: usize) -> Self {
        Self::scalar(dim, &Jet::one(nvars))
    }

    /// `f · I`.
    pub fn scalar(dim: usize, f: &Jet) -> Self {
        let mut m = Self::zero(dim, f.nvars());
        for i in 0..dim {
            m.entries[i * dim + i] = f.clone();
        }
        // Off-diagonal zeros inherit the accuracy of f so the matrix accuracy
        // is uniform.
        if let Some(a) = f.accuracy() {
            m = m.with_accuracy(Some(a));
        }
        m
    }

    pub fn from_scalar(f: Jet) -> Self {
        MatrixJet { dim: 1, nvars: f.nvars(), entries: vec![f] }
    }

    pub fn from_entries(dim: usize, entries: Vec<Jet>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count");
        assert!(dim > 0);
        let nvars = entries[0].nvars();
        assert!(entries.iter().all(|e| e.nvars() == nvars), "variable-set mismatch");
        MatrixJet { dim, nvars, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Jet>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "square matrix expected");
        Self::from_entries(dim, rows.into_iter().flatten().collect())
    }

    pub fn constant(c: &CMatrix, nvars: usize) -> Self {
        MatrixJet {
            dim: c.dim,
            nvars,
            entries: c.data.iter().map(|v| Jet::constant(nvars, v.clone())).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn entry(&self, i: usize, j: usize) -> &Jet {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> MatrixJet {
        MatrixJet { dim: self.dim, nvars: self.nvars, entries: self.entries.iter().map(f).collect() }
    }

    fn zip(&self, o: &MatrixJet, f: impl Fn(&Jet, &Jet) -> Jet) -> Result<MatrixJet, AlgebraError> {
        self.check(o)?;
        Ok(MatrixJet {
            dim: self.dim,
            nvars: self.nvars,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    fn check(&self, o: &MatrixJet) -> Result<(), AlgebraError> {
        if self.dim != o.dim {
            return Err(AlgebraError::DimMismatch(self.dim, o.dim));
        }
        if self.nvars != o.nvars {
            return Err(AlgebraError::VarMismatch(self.nvars, o.nvars));
        }
        Ok(())
    }

    /// Minimum accuracy over all entries.
    pub fn accuracy(&self) -> Accuracy {
        self.entries.iter().fold(None, |a, e| min_acc(a, e.accuracy()))
    }

    pub fn is_exact(&self) -> bool {
        self.accuracy().is_none()
    }

    pub fn with_accuracy(&self, acc: Accuracy) -> MatrixJet {
        let acc = min_acc(self.accuracy(), acc);
        self.map(|e| e.clone().with_accuracy(acc))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Jet::is_zero)
    }

    pub fn checked_add(&self, o: &MatrixJet) -> Result<MatrixJet, AlgebraError> {
        self.zip(o, |a, b| a + b)
    }

    pub fn checked_sub(&self, o: &MatrixJet) -> Result<MatrixJet, AlgebraError> {
        self.zip(o, |a, b| a - b)
    }

    pub fn checked_mul(&self, o: &MatrixJet) -> Result<MatrixJet, AlgebraError> {
        self.check(o)?;
        let d = self.dim;
        let acc = min_acc(self.accuracy(), o.accuracy());
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut s = Jet::zero(self.nvars);
                for k in 0..d {
                    let (a, b) = (self.entry(i, k), o.entry(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    s = &s + &(a * b);
                }
                entries.push(s.with_accuracy(acc));
            }
        }
        Ok(MatrixJet { dim: d, nvars: self.nvars, entries })
    }

    pub fn neg(&self) -> MatrixJet {
        self.map(Jet::neg)
    }

    pub fn scale(&self, c: &GaussianRational) -> MatrixJet {
        self.map(|e| e.scale(c))
    }

    /// Multiplies every entry by the scalar jet `f`.
    pub fn mul_jet(&self, f: &Jet) -> MatrixJet {
        let acc = min_acc(self.accuracy(), f.accuracy());
        self.map(|e| (e * f).with_accuracy(acc))
    }

    pub fn commutator(&self, o: &MatrixJet) -> MatrixJet {
        &(self * o) - &(o * self)
    }

    pub fn derive(&self, var: usize) -> MatrixJet {
        self.map(|e| e.derive(var))
    }

    pub fn derive_multi(&self, exps: &[u32]) -> MatrixJet {
        self.map(|e| e.derive_multi(exps))
    }

    pub fn cap(&self, a: i32) -> MatrixJet {
        self.map(|e| e.cap(a))
    }

    pub fn into_exact(self) -> MatrixJet {
        MatrixJet { entries: self.entries.into_iter().map(Jet::into_exact).collect(), ..self }
    }

    /// Constant matrix at the chart origin.
    pub fn value_at_origin(&self) -> Result<CMatrix, AlgebraError> {
        Ok(CMatrix {
            dim: self.dim,
            data: self.entries.iter().map(Jet::value_at_origin).collect::<Result<_, _>>()?,
        })
    }

    /// Pointwise conjugate transpose (`z ↔ z̄`, conjugated coefficients).
    pub fn adjoint(&self) -> MatrixJet {
        let d = self.dim;
        let mut entries = vec![Jet::zero(self.nvars); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entry(i, j).conj();
            }
        }
        MatrixJet { dim: d, nvars: self.nvars, entries }
    }

    pub fn transpose(&self) -> MatrixJet {
        let d = self.dim;
        let mut entries = vec![Jet::zero(self.nvars); d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entry(i, j).clone();
            }
        }
        MatrixJet { dim: d, nvars: self.nvars, entries }
    }

    pub fn low_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(Jet::low_degree).min()
    }

    /// Pointwise inverse. An exact input is expanded to degree `target`; if the
    /// expansion is an exact polynomial inverse it is returned as exact.
    /// A finite-accuracy input keeps its accuracy.
    pub fn inverse(&self, target: i32) -> Result<MatrixJet, AlgebraError> {
        let d = self.dim;
        let c0 = self.value_at_origin()?;
        let c0inv = c0.inverse()?;
        let c0inv_j = MatrixJet::constant(&c0inv, self.nvars);
        let id = MatrixJet::identity(d, self.nvars);
        let work = min_acc(self.accuracy(), Some(target)).unwrap();
        // a = c0 (I − N) with N = I − c0⁻¹ a nilpotent modulo degree.
        let n = (&id - &(&c0inv_j * self)).cap(work);
        let mut sum = id.cap(work);
        let mut pow = id.cap(work);
        loop {
            pow = &pow * &n;
            if pow.is_zero() {
                break;
            }
            sum = &sum + &pow;
        }
        let inv = &sum * &c0inv_j;
        if self.is_exact() {
            let candidate = inv.clone().into_exact();
            if (self * &candidate) == MatrixJet::identity(d, self.nvars) {
                return Ok(candidate);
            }
        }
        Ok(inv)
    }

    /// `exp(self)` to degree `target`; needs zero constant term.
    pub fn exp(&self, target: i32) -> Result<MatrixJet, AlgebraError> {
        if !self.value_at_origin()?.data.iter().all(GaussianRational::is_zero) {
            return Err(AlgebraError::Precondition("exp needs zero constant term".into()));
        }
        Ok(series_with_exactness(self, target, super::jet::exp_coeff))
    }

    /// `log(self)` to degree `target`; needs identity constant term.
    pub fn log(&self, target: i32) -> Result<MatrixJet, AlgebraError> {
        if self.value_at_origin()? != CMatrix::identity(self.dim) {
            return Err(AlgebraError::Precondition("log needs identity constant term".into()));
        }
        let x = self - &MatrixJet::identity(self.dim, self.nvars);
        Ok(series_with_exactness(&x, target, super::jet::log1p_coeff))
    }

    /// First entry and monomial where two matrices disagree within the
    /// common accuracy: `(row, col, exponents, lhs, rhs)`.
    pub fn first_difference(
        &self,
        o: &MatrixJet,
    ) -> Option<(usize, usize, Vec<u32>, GaussianRational, GaussianRational)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if let Some((e, a, b)) = self.entry(i, j).first_difference(o.entry(i, j)) {
                    return Some((i, j, e, a, b));
                }
            }
        }
        None
    }

    pub fn agrees_with(&self, o: &MatrixJet) -> bool {
        self.dim == o.dim && self.nvars == o.nvars && self.first_difference(o).is_none()
    }
}

impl fmt::Display for MatrixJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Debug for MatrixJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! mat_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl std::ops::$tr<&MatrixJet> for &MatrixJet {
            type Output = MatrixJet;
            fn $m(self, rhs: &MatrixJet) -> MatrixJet {
                self.$checked(rhs).expect("matrix jet shape mismatch")
            }
        }
        impl std::ops::$tr<MatrixJet> for MatrixJet {
            type Output = MatrixJet;
            fn $m(self, rhs: MatrixJet) -> MatrixJet {
                (&self).$m(&rhs)
            }
        }
    };
}
mat_op!(Add, add, checked_add);
mat_op!(Sub, sub, checked_sub);
mat_op!(Mul, mul, checked_mul);

impl Coeff for MatrixJet {
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
        MatrixJet::neg(self)
    }
    fn scale_c(&self, c: &GaussianRational) -> Self {
        self.scale(c)
    }
    fn zero_like(&self) -> Self {
        MatrixJet::zero(self.dim, self.nvars)
    }
    fn one_like(&self) -> Self {
        MatrixJet::identity(self.dim, self.nvars)
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
}

impl Graded for MatrixJet {
    fn accuracy(&self) -> Accuracy {
        MatrixJet::accuracy(self)
    }
    fn cap(&self, a: i32) -> Self {
        MatrixJet::cap(self, a)
    }
    fn low_degree(&self) -> Option<u32> {
        MatrixJet::low_degree(self)
    }
    fn into_exact(self) -> Self {
        MatrixJet::into_exact(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(terms: &[(&[u32], i64)]) -> Jet {
        Jet::from_terms(2, terms.iter().map(|(e, c)| (e.to_vec(), GaussianRational::from_int(*c))), None)
    }

    fn example_u() -> MatrixJet {
        MatrixJet::from_rows(vec![
            vec![j(&[(&[0, 0], 1)]), j(&[(&[1, 0], 1)])],
            vec![j(&[(&[0, 1], 1)]), j(&[(&[0, 0], 1), (&[1, 1], 1)])],
        ])
    }

    #[test]
    fn exact_inverse_of_unimodular_metric() {
        let inv = example_u().inverse(6).unwrap();
        let expect = MatrixJet::from_rows(vec![
            vec![j(&[(&[0, 0], 1), (&[1, 1], 1)]), j(&[(&[1, 0], -1)])],
            vec![j(&[(&[0, 1], -1)]), j(&[(&[0, 0], 1)])],
        ]);
        assert_eq!(inv, expect);
        assert!(inv.is_exact());
    }

    #[test]
    fn identity_inverse() {
        let id = MatrixJet::identity(2, 2);
        assert_eq!(id.inverse(3).unwrap(), id);
    }

    #[test]
    fn non_polynomial_inverse_keeps_accuracy() {
        let u = MatrixJet::from_scalar(j(&[(&[0, 0], 1), (&[1, 1], 1)]));
        let inv = u.inverse(4).unwrap();
        assert_eq!(inv.accuracy(), Some(4));
        assert!((&u * &inv).agrees_with(&MatrixJet::identity(1, 2)));
    }

    #[test]
    fn singular_constant_rejected() {
        let u = MatrixJet::from_scalar(j(&[(&[1, 0], 1)]));
        assert_eq!(u.inverse(3), Err(AlgebraError::Singular));
    }

    #[test]
    fn matrix_exp_log_round_trip() {
        let x = &example_u() - &MatrixJet::identity(2, 2);
        let e = x.exp(5).unwrap();
        let l = e.log(5).unwrap();
        assert!(l.agrees_with(&x));
        assert_eq!(MatrixJet::identity(2, 2).log(4).unwrap(), MatrixJet::zero(2, 2));
    }

    #[test]
    fn constant_inverse_and_adjoint() {
        let c = CMatrix::from_rows(vec![
            vec![GaussianRational::from_int(2), GaussianRational::i()],
            vec![GaussianRational::zero(), GaussianRational::from_int(3)],
        ]);
        assert_eq!(c.mul(&c.inverse().unwrap()), CMatrix::identity(2));
        assert_eq!(c.adjoint().adjoint(), c);
        assert_eq!(example_u().adjoint(), example_u());
    }
}
