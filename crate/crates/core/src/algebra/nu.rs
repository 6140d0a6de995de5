//! Laurent series in the formal parameter ν with a validity window.

use std::fmt;

use super::coeff::Coeff;
use super::rational::GaussianRational;
use super::AlgebraError;

/// `Σ_{s ≥ min} ν^s a_s`, known exactly for orders up to `max`.
///
/// Orders below `min` are zero. `max == None` means every order is known
/// (coefficients past the stored ones are zero). Reading an order above a
/// finite `max` is an error.
#[derive(Clone, PartialEq)]
pub struct NuSeries<T: Coeff> {
    min: i32,
    coeffs: Vec<T>,
    max: Option<i32>,
    zero: T,
}

fn min_max(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl<T: Coeff> NuSeries<T> {
    /// The zero series, exact at every order.
    pub fn zero(template: &T) -> Self {
        NuSeries { min: 0, coeffs: Vec::new(), max: None, zero: template.zero_like() }
    }

    /// `ν^order · c`, exact.
    pub fn monomial(order: i32, c: T) -> Self {
        let zero = c.zero_like();
        NuSeries { min: order, coeffs: vec![c], max: None, zero }.normalized()
    }

    /// A ν-independent value.
    pub fn constant(c: T) -> Self {
        Self::monomial(0, c)
    }

    /// Builds from consecutive coefficients starting at `min`.
    pub fn from_coeffs(min: i32, coeffs: Vec<T>, max: Option<i32>, template: &T) -> Self {
        NuSeries { min, coeffs, max, zero: template.zero_like() }.normalized()
    }

    /// Drops stored orders past `max` and trims zeros at both ends.
    fn normalized(mut self) -> Self {
        if let Some(mx) = self.max {
            let keep = (mx - self.min + 1).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last().is_some_and(Coeff::is_zero_c) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero_c()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min += lead as i32;
        }
        if self.coeffs.is_empty() {
            self.min = 0;
        }
        self
    }

    /// Builds from a sparse map of coefficients.
    pub fn from_map(coeffs: std::collections::BTreeMap<i32, T>, max: Option<i32>, template: &T) -> Self {
        let Some((&lo, _)) = coeffs.iter().next() else {
            return NuSeries { max, ..Self::zero(template) };
        };
        let hi = *coeffs.keys().next_back().unwrap();
        let hi = max.map_or(hi, |m| hi.min(m));
        let dense = (lo..=hi).map(|s| coeffs.get(&s).cloned().unwrap_or_else(|| template.zero_like())).collect();
        Self::from_coeffs(lo, dense, max, template)
    }

    /// Replaces the window, dropping orders beyond it.
    pub fn with_max(&self, max: Option<i32>) -> Self {
        match max {
            Some(m) => NuSeries { max: None, ..self.clone() }.truncate(m),
            None => NuSeries { max: None, ..self.clone() },
        }
    }

    pub fn max_order(&self) -> Option<i32> {
        self.max
    }

    /// Lowest order with a stored (nonzero) coefficient.
    pub fn min_order(&self) -> Option<i32> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.min)
        }
    }

    /// Highest stored order.
    pub fn top_order(&self) -> Option<i32> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.min + self.coeffs.len() as i32 - 1)
        }
    }

    pub fn template(&self) -> &T {
        &self.zero
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Restricts the window to orders `≤ max`.
    pub fn truncate(&self, max: i32) -> Self {
        NuSeries { max: min_max(self.max, Some(max)), ..self.clone() }.normalized()
    }

    /// Coefficient at `ν^order`.
    pub fn get(&self, order: i32) -> Result<T, AlgebraError> {
        if let Some(mx) = self.max {
            if order > mx {
                return Err(AlgebraError::WindowUnderflow { order, max: mx });
            }
        }
        Ok(self.get_unchecked(order).cloned().unwrap_or_else(|| self.zero.clone()))
    }

    fn get_unchecked(&self, order: i32) -> Option<&T> {
        if order < self.min {
            return None;
        }
        self.coeffs.get((order - self.min) as usize)
    }

    /// `(order, coefficient)` for every stored order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, &T)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.min + i as i32, c))
    }

    pub fn map<U: Coeff>(&self, template: &U, f: impl Fn(&T) -> U) -> NuSeries<U> {
        NuSeries {
            min: self.min,
            coeffs: self.coeffs.iter().map(f).collect(),
            max: self.max,
            zero: template.zero_like(),
        }
        .normalized()
    }

    pub fn add(&self, o: &Self) -> Self {
        let max = min_max(self.max, o.max);
        let (Some(lo), Some(hi)) = (
            [self.min_order(), o.min_order()].into_iter().flatten().min(),
            [self.top_order(), o.top_order()].into_iter().flatten().max(),
        ) else {
            return NuSeries { max, ..Self::zero(&self.zero) };
        };
        let hi = max.map_or(hi, |m| hi.min(m));
        let coeffs = (lo..=hi)
            .map(|s| match (self.get_unchecked(s), o.get_unchecked(s)) {
                (Some(a), Some(b)) => a.add_c(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => self.zero.clone(),
            })
            .collect();
        NuSeries { min: lo, coeffs, max, zero: self.zero.clone() }.normalized()
    }

    pub fn neg(&self) -> Self {
        NuSeries { coeffs: self.coeffs.iter().map(Coeff::neg_c).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        NuSeries { coeffs: self.coeffs.iter().map(|x| x.scale_c(c)).collect(), ..self.clone() }.normalized()
    }

    /// Multiplies every coefficient by `v` on the left.
    pub fn left_mul(&self, v: &T) -> Self {
        NuSeries { coeffs: self.coeffs.iter().map(|x| v.mul_c(x)).collect(), ..self.clone() }.normalized()
    }

    /// Multiplies every coefficient by `v` on the right.
    pub fn right_mul(&self, v: &T) -> Self {
        NuSeries { coeffs: self.coeffs.iter().map(|x| x.mul_c(v)).collect(), ..self.clone() }.normalized()
    }

    /// `ν^k · self`.
    pub fn shift(&self, k: i32) -> Self {
        NuSeries { min: self.min + k, max: self.max.map(|m| m + k), ..self.clone() }
    }

    /// Lowest order that may be nonzero, counting the unknown tail;
    /// `None` for the exact zero series.
    pub fn low_bound(&self) -> Option<i32> {
        self.min_order().or(self.max.map(|m| m + 1))
    }

    /// Highest order at which a product is fully determined: unknown terms
    /// of one factor start past its window and are shifted by the lowest
    /// possible order of the other.
    fn product_max(&self, o: &Self) -> Option<i32> {
        let a = self.max.zip(o.low_bound()).map(|(m, l)| m + l);
        let b = o.max.zip(self.low_bound()).map(|(m, l)| m + l);
        min_max(a, b)
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_capped(o, None)
    }

    /// Product restricted to orders `≤ cap` (when given).
    pub fn mul_capped(&self, o: &Self, cap: Option<i32>) -> Self {
        let max = min_max(self.product_max(o), cap);
        let (Some(a0), Some(b0)) = (self.min_order(), o.min_order()) else {
            return NuSeries { max, ..Self::zero(&self.zero) };
        };
        let lo = a0 + b0;
        let hi = self.top_order().unwrap() + o.top_order().unwrap();
        let hi = max.map_or(hi, |m| hi.min(m));
        let mut coeffs = Vec::new();
        for s in lo..=hi {
            let mut acc: Option<T> = None;
            for (i, a) in self.iter() {
                let Some(b) = o.get_unchecked(s - i) else { continue };
                if a.is_zero_c() || b.is_zero_c() {
                    continue;
                }
                let p = a.mul_c(b);
                acc = Some(match acc {
                    None => p,
                    Some(x) => x.add_c(&p),
                });
            }
            coeffs.push(acc.unwrap_or_else(|| self.zero.clone()));
        }
        NuSeries { min: lo, coeffs, max, zero: self.zero.clone() }.normalized()
    }

    /// Applies `f` to every coefficient; the window is unchanged.
    pub fn map_same(&self, f: impl Fn(&T) -> T) -> Self {
        NuSeries { coeffs: self.coeffs.iter().map(f).collect(), ..self.clone() }.normalized()
    }

    /// First order (within both windows) where two series differ.
    pub fn first_difference(&self, o: &Self, agree: impl Fn(&T, &T) -> bool) -> Option<i32> {
        let lo = [self.min_order(), o.min_order()].into_iter().flatten().min()?;
        let hi = [self.top_order(), o.top_order()].into_iter().flatten().max()?;
        let hi = min_max(min_max(self.max, o.max), Some(hi)).unwrap();
        (lo..=hi).find(|&s| {
            let a = self.get_unchecked(s).unwrap_or(&self.zero);
            let b = o.get_unchecked(s).unwrap_or(&o.zero);
            !agree(a, b)
        })
    }
}

impl<T: Coeff> fmt::Debug for NuSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "ν^{s}·{c:?}")?;
        }
        if first {
            write!(f, "0")?;
        }
        match self.max {
            Some(m) => write!(f, " + O(ν^{})", m + 1),
            None => Ok(()),
        }
    }
}

impl<T: Coeff> Coeff for NuSeries<T> {
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
        Self::zero(&self.zero)
    }
    fn one_like(&self) -> Self {
        Self::constant(self.zero.one_like())
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn series(min: i32, c: &[i64], max: Option<i32>) -> NuSeries<GaussianRational> {
        NuSeries::from_coeffs(min, c.iter().map(|&x| g(x)).collect(), max, &g(0))
    }

    #[test]
    fn window_reads() {
        let s = series(-1, &[1, 2, 3], Some(2));
        assert_eq!(s.get(-2).unwrap(), g(0));
        assert_eq!(s.get(1).unwrap(), g(3));
        assert_eq!(s.get(2).unwrap(), g(0));
        assert!(matches!(s.get(3), Err(AlgebraError::WindowUnderflow { .. })));
    }

    #[test]
    fn product_window() {
        // (ν⁻¹ + O(ν²)) · (1 + ν + O(ν³)): valid through min(-1+3, 0+2) = 2.
        let a = series(-1, &[1], Some(2));
        let b = series(0, &[1, 1], Some(3));
        let p = a.mul(&b);
        assert_eq!(p.max_order(), Some(2));
        assert_eq!(p.get(-1).unwrap(), g(1));
        assert_eq!(p.get(0).unwrap(), g(1));
        assert_eq!(p.get(1).unwrap(), g(0));
    }

    #[test]
    fn exact_series_product() {
        let a = series(0, &[1, 1], None);
        let p = a.mul(&a);
        assert_eq!(p, series(0, &[1, 2, 1], None));
        assert_eq!(p.max_order(), None);
    }

    #[test]
    fn truncation_matches_widened_operands() {
        let a = series(-1, &[2, 3, 5, 7], None);
        let b = series(0, &[1, -1, 4], None);
        let full = a.mul(&b);
        let cut = a.truncate(1).mul(&b.truncate(2));
        let max = cut.max_order().unwrap();
        for s in -2..=max {
            assert_eq!(cut.get(s).unwrap(), full.get(s).unwrap());
        }
    }
}
