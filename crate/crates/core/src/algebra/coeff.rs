use std::fmt::Debug;

use super::rational::GaussianRational;

/// Ring operations shared by every coefficient type that can sit inside a
/// [`NuSeries`](super::NuSeries) or [`BiSeries`](super::BiSeries).
///
/// Multiplication need not be commutative (matrix jets).
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn add_c(&self, o: &Self) -> Self;
    fn sub_c(&self, o: &Self) -> Self;
    fn mul_c(&self, o: &Self) -> Self;
    fn neg_c(&self) -> Self;
    fn scale_c(&self, c: &GaussianRational) -> Self;
    /// The additive identity of the same shape (variables, dimension).
    fn zero_like(&self) -> Self;
    /// The multiplicative identity of the same shape.
    fn one_like(&self) -> Self;
    fn is_zero_c(&self) -> bool;
}

impl Coeff for GaussianRational {
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
        -self
    }
    fn scale_c(&self, c: &GaussianRational) -> Self {
        self * c
    }
    fn zero_like(&self) -> Self {
        GaussianRational::zero()
    }
    fn one_like(&self) -> Self {
        GaussianRational::one()
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
}
