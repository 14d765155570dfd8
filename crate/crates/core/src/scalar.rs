//! Exact scalars: rationals with a machine-word fast path, and Gaussian
//! rationals ℚ(i) built on top of them.
//!
//! Every value is kept reduced (gcd 1, positive denominator). Small values
//! live in `i64` pairs and overflow transparently into `BigRational`, so the
//! common case of structure constants with tiny numerators never touches the
//! allocator while large intermediate values stay exact.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

/// An exact rational number.
#[derive(Clone, Debug)]
pub struct Rational(Repr);

fn reduce_i128(mut n: i128, mut d: i128) -> Rational {
    debug_assert!(d != 0);
    if d < 0 {
        n = -n;
        d = -d;
    }
    let g = n.gcd(&d);
    if g > 1 {
        n /= g;
        d /= g;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(n), Ok(d)) => Rational(Repr::Small(n, d)),
        _ => Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
    }
}

fn from_big(r: BigRational) -> Rational {
    // BigRational arithmetic keeps values reduced; demote when it fits.
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        Rational(Repr::Small(n, d))
    } else {
        Rational(Repr::Big(r))
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(Repr::Small(n, 1))
    }

    /// `n/d`, reduced. Panics on a zero denominator.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        reduce_i128(n as i128, d as i128)
    }

    pub fn from_bigs(n: BigInt, d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        from_big(BigRational::new(n, d))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    /// Nearest `f64` (lossy).
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// The value as `i64` when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            Repr::Small(..) => None,
            Repr::Big(b) if b.is_integer() => b.numer().to_i64(),
            Repr::Big(_) => None,
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Rational {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational::from_int(n.div_floor(d)),
            Repr::Big(b) => from_big(b.floor()),
        }
    }

    pub fn recip(&self) -> Rational {
        match &self.0 {
            Repr::Small(0, _) => panic!("division by zero"),
            Repr::Small(n, d) => reduce_i128(*d as i128, *n as i128),
            Repr::Big(b) => from_big(b.recip()),
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            // Reduced forms are canonical and demotion is eager, so a Big
            // value never equals a Small one.
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}
impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}
impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    reduce_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    reduce_i128(a * d + c * b, b * d)
                }
            }
            _ => from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                reduce_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        self * &rhs.recip()
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Rational(Repr::Small(m, *d)),
                None => from_big(-self.to_big()),
            },
            Repr::Big(b) => from_big(-b.clone()),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! owned_binops {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a $t> for $t {
            type Output = $t;
            fn $m(self, rhs: &'a $t) -> $t { (&self).$m(rhs) }
        }
        impl<'a> $tr<$t> for &'a $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t { self.$m(&rhs) }
        }
    )*};
}
owned_binops!(Rational, Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid rational `{s}`"));
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.trim_start_matches('+').parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::from_bigs(n, d))
    }
}

/// Ground field tag. Values are always stored as Gaussian rationals; the tag
/// records whether imaginary parts are permitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Field {
    #[serde(rename = "Q")]
    Q,
    #[serde(rename = "Qi")]
    Qi,
}

impl Field {
    pub fn admits(&self, x: &Scalar) -> bool {
        matches!(self, Field::Qi) || x.im.is_zero()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Q => "Q",
            Field::Qi => "Qi",
        })
    }
}

impl FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" => Ok(Field::Q),
            "Qi" => Ok(Field::Qi),
            _ => Err(Error::Parse(format!("unknown field `{s}` (expected Q or Qi)"))),
        }
    }
}

/// An element `re + im·i` of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub re: Rational,
    pub im: Rational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: Rational::zero(), im: Rational::zero() }
    }

    pub fn one() -> Self {
        Scalar { re: Rational::one(), im: Rational::zero() }
    }

    pub fn i() -> Self {
        Scalar { re: Rational::zero(), im: Rational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { re: Rational::from_int(n), im: Rational::zero() }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar { re: Rational::new(n, d), im: Rational::zero() }
    }

    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        Scalar { re, im: Rational::zero() }
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

    /// True when the value is a rational integer.
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.im.is_zero() {
            self.re.to_i64()
        } else {
            None
        }
    }

    pub fn conj(&self) -> Scalar {
        Scalar { re: self.re.clone(), im: -&self.im }
    }

    /// |x|² = re² + im², a rational.
    pub fn norm(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero");
        if self.im.is_zero() {
            return Scalar::from_rational(self.re.recip());
        }
        let n = self.norm().recip();
        Scalar { re: &self.re * &n, im: -(&self.im * &n) }
    }

    /// Representative of the class of `self` in ℚ(i)/ℤ: real part in [0,1).
    pub fn frac(&self) -> Scalar {
        Scalar { re: &self.re - &self.re.floor(), im: self.im.clone() }
    }

    /// Canonical orientation used to pick a sign: Re > 0, or Re = 0 and Im > 0.
    pub fn is_positive_oriented(&self) -> bool {
        self.re.signum() > 0 || (self.re.is_zero() && self.im.signum() > 0)
    }

    /// x^k for integer k (negative exponents require x ≠ 0).
    pub fn powi(&self, k: i64) -> Scalar {
        let mut base = if k < 0 { self.inv() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// An exact n-th root in ℚ(i), if one exists with moderately sized parts.
    ///
    /// Candidates are the floating-point roots rounded to nearby rationals;
    /// a candidate is only returned after an exact check w^n = x.
    pub fn nth_root(&self, n: u32) -> Option<Scalar> {
        if n == 1 || self.is_zero() || self.is_one() {
            return Some(self.clone());
        }
        let (re, im) = (self.re.to_f64(), self.im.to_f64());
        let (mag, theta) = (re.hypot(im).powf(1.0 / n as f64), im.atan2(re));
        // Best rational approximation by continued fractions, denominators
        // bounded well inside f64 precision.
        let near = |x: f64| -> Option<Rational> {
            if !x.is_finite() || x.abs() > 1e12 {
                return None;
            }
            let tol = 1e-9 * x.abs().max(1.0);
            let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
            let mut y = x;
            for _ in 0..40 {
                let a = y.floor();
                let (p2, q2) = ((a as i64).checked_mul(p1)?.checked_add(p0)?, (a as i64).checked_mul(q1)?.checked_add(q0)?);
                (p0, q0, p1, q1) = (p1, q1, p2, q2);
                if q1 > 1_000_000_000 {
                    return None;
                }
                if (x - p1 as f64 / q1 as f64).abs() <= tol {
                    return Some(Rational::new(p1, q1));
                }
                y = 1.0 / (y - a);
            }
            None
        };
        (0..n).find_map(|k| {
            let ang = (theta + std::f64::consts::TAU * k as f64) / n as f64;
            let w = Scalar::new(near(mag * ang.cos())?, near(mag * ang.sin())?);
            (w.powi(n as i64) == *self).then_some(w)
        })
    }

    /// Lexicographic total order on (re, im); used only for canonical sorting.
    pub fn lex_cmp(&self, other: &Scalar) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::from_rational(&self.re * &rhs.re);
        }
        Scalar {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        if rhs.im.is_zero() {
            let r = rhs.re.recip();
            return Scalar { re: &self.re * &r, im: &self.im * &r };
        }
        self * &rhs.inv()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -&self.re, im: -&self.im }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

owned_binops!(Scalar, Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}
impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = &*self + &rhs;
    }
}
impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}
impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = &*self - &rhs;
    }
}
impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}

/// Canonical text: `p`, `p/q`, `ri`, `p/q+r/si`, `p/q-r/si`. Unit imaginary
/// coefficients are written `i` / `-i`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn imag(f: &mut fmt::Formatter<'_>, im: &Rational) -> fmt::Result {
            if im.is_one() {
                write!(f, "i")
            } else if (-im).is_one() {
                write!(f, "-i")
            } else {
                write!(f, "{im}i")
            }
        }
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return imag(f, &self.im);
        }
        write!(f, "{}", self.re)?;
        if self.im.signum() > 0 {
            write!(f, "+")?;
        }
        imag(f, &self.im)
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(Scalar::from_rational(t.parse()?));
        };
        // Split "re±im" at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => other.parse()?,
        };
        Ok(Scalar { re: re.parse()?, im })
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Generalized binomial coefficient C(x, k) = x(x−1)…(x−k+1)/k!.
pub fn binomial(x: &Scalar, k: u32) -> Scalar {
    let mut acc = Scalar::one();
    for j in 0..k {
        acc = &acc * &(x - &Scalar::from_int(j as i64));
        acc = &acc / &Scalar::from_int(j as i64 + 1);
    }
    acc
}
