//! Exact rationals and Gaussian rationals.
//!
//! [`Rational`] keeps small values in an `i128` ratio and promotes to a
//! big-integer ratio only when an operation would overflow. Values are
//! always stored in the narrowest representation that fits, so derived
//! equality and hashing are value-based.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

type Small = Ratio<i128>;

#[derive(Clone)]
enum Repr {
    Small(Small),
    Big(BigRational),
}

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone)]
pub struct Rational(Repr);

fn to_big(s: &Small) -> BigRational {
    BigRational::new_raw(BigInt::from(*s.numer()), BigInt::from(*s.denom()))
}

fn shrink(b: BigRational) -> Rational {
    match (b.numer().to_i128(), b.denom().to_i128()) {
        // i128::MIN cannot be negated safely inside Ratio arithmetic.
        (Some(n), Some(d)) if n != i128::MIN && d != i128::MIN => {
            Rational(Repr::Small(Small::new_raw(n, d)))
        }
        _ => Rational(Repr::Big(b)),
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(Small::new_raw(0, 1)))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Small(Small::new_raw(n as i128, 1)))
    }

    /// `n / d` reduced. Panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rational(Repr::Small(Small::new(n as i128, d as i128)))
    }

    pub fn from_big(n: BigInt, d: BigInt) -> Result<Self, AlgebraError> {
        if d.is_zero() {
            return Err(AlgebraError::Parse("zero denominator".into()));
        }
        Ok(shrink(BigRational::new(n, d)))
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_zero(),
            Repr::Big(b) => b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_one(),
            Repr::Big(b) => b.is_one(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_negative(),
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(s) => s.is_integer(),
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(s) => BigInt::from(*s.numer()),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(s) => BigInt::from(*s.denom()),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    fn big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(s) => to_big(s),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Small(s) if *s.numer() != i128::MIN => Rational(Repr::Small(s.recip())),
            _ => shrink(self.big().recip()),
        })
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Integer power (negative exponents allowed for nonzero values).
    pub fn pow(&self, e: i32) -> Result<Self, AlgebraError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = Rational::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    fn binop(
        &self,
        rhs: &Self,
        small: impl Fn(&Small, &Small) -> Option<Small>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(r) = small(a, b) {
                if *r.numer() != i128::MIN && *r.denom() != i128::MIN {
                    return Rational(Repr::Small(r));
                }
            }
        }
        shrink(big(self.big(), rhs.big()))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            // Canonical storage: a value that fits is never Big.
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(s) => {
                0u8.hash(state);
                s.numer().hash(state);
                s.denom().hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            _ => self.big().cmp(&other.big()),
        }
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        self.binop(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        if rhs.is_zero() {
            return self.clone();
        }
        self.binop(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        if self.is_zero() || rhs.is_zero() {
            return Rational::zero();
        }
        if rhs.is_one() {
            return self.clone();
        }
        if self.is_one() {
            return rhs.clone();
        }
        self.binop(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    /// Panics on division by zero; use [`Rational::recip`] for a checked form.
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        self.binop(rhs, |a, b| a.checked_div(b), |a, b| a / b)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(s) if *s.numer() != i128::MIN => Rational(Repr::Small(-*s)),
            _ => shrink(-self.big()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Rational, Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(s) if s.is_integer() => write!(f, "{}", s.numer()),
            Repr::Small(s) => write!(f, "{}/{}", s.numer(), s.denom()),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = AlgebraError;

    /// Accepts `p` or `p/q` with optional leading sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::Parse(format!("invalid rational '{s}'"));
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_negative() {
            return Err(bad());
        }
        Rational::from_big(n, d)
    }
}

/// A Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(Rational::from_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::real(Rational::new(n, d))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.im.is_zero() {
            return Ok(Self::real(self.re.recip()?));
        }
        let n = self.norm_sqr().recip()?;
        Ok(GaussianRational { re: &self.re * &n, im: -(&self.im * &n) })
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussianRational { re: &self.re * r, im: &self.im * r }
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        match (self.im.is_zero(), rhs.im.is_zero()) {
            (true, true) => GaussianRational::real(&self.re * &rhs.re),
            (true, false) => rhs.scale(&self.re),
            (false, true) => self.scale(&rhs.re),
            (false, false) => GaussianRational {
                re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
                im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
            },
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.recip().expect("division by zero")
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

forward_owned!(GaussianRational, Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for GaussianRational {
    /// Formats as `p/q`, `r/s*i`, or `p/q+r/s*i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) if self.im.is_negative() => {
                write!(f, "{}-{}*i", self.re, self.im.abs())
            }
            (false, false) => write!(f, "{}+{}*i", self.re, self.im),
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GaussianRational {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || AlgebraError::Parse(format!("invalid complex rational '{s}'"));
        if t.is_empty() {
            return Err(bad());
        }
        let Some(body) = t.strip_suffix("*i").or_else(|| t.strip_suffix('i')) else {
            return Ok(GaussianRational::real(t.parse()?));
        };
        // Split at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other.strip_prefix('+').unwrap_or(other),
        };
        Ok(GaussianRational { re: re.parse().map_err(|_| bad())?, im: im.parse().map_err(|_| bad())? })
    }
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Rational {
    let mut acc = Rational::one();
    for k in 2..=n {
        acc = &acc * &Rational::from_int(k as i64);
    }
    acc
}

/// `n!` as an integer.
pub fn factorial_u64(n: usize) -> u64 {
    (2..=n as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(q("-3/6").to_string(), "-1/2");
        assert_eq!(q("4/2").to_string(), "2");
        assert!("1/-2".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn overflow_promotes_and_shrinks_back() {
        let big = Rational::from_int(i64::MAX);
        let mut acc = Rational::one();
        for _ in 0..5 {
            acc = &acc * &big;
        }
        assert!(matches!(acc.0, Repr::Big(_)));
        let mut back = acc.clone();
        for _ in 0..5 {
            back = &back / &big;
        }
        assert!(back.is_one());
        assert!(matches!(back.0, Repr::Small(_)));
        assert_eq!(&(&acc + &Rational::one()) - &Rational::one(), acc);
    }

    #[test]
    fn complex_format_round_trip() {
        for s in ["0", "1/2", "-3", "1/2+1/3*i", "1/2-1/3*i", "-2*i", "7/5*i"] {
            let v: GaussianRational = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("i".parse::<GaussianRational>().unwrap(), GaussianRational::i());
        assert_eq!("1-i".parse::<GaussianRational>().unwrap().im, q("-1"));
    }

    #[test]
    fn gaussian_arith() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
        let z: GaussianRational = "1/2+3/4*i".parse().unwrap();
        assert_eq!(&z * &z.recip().unwrap(), GaussianRational::one());
        assert_eq!(&(&z + &i) - &i, z);
    }
}
