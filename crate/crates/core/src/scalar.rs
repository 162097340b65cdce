//! Numeric back-ends.
//!
//! Every geometric routine is generic over [`Scalar`]. Three implementations
//! exist:
//!
//! - `f64` for Monte Carlo work. Floors of values within [`BOUNDARY_EPS`] of an
//!   integer are refused rather than guessed.
//! - [`Rational`] (arbitrary precision) for exact floors, idf checks and
//!   reconstruction.
//! - [`QuadraticSurd`] for exact arithmetic in `Q(sqrt(D))`, used when grid
//!   offsets involve an irrational such as `sqrt(2) - 1`.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Values of a floating-point scalar closer than this to an integer have an
/// untrustworthy floor.
pub const BOUNDARY_EPS: f64 = 1e-9;

/// Quantum used to build hashable keys from doubles.
const F64_KEY_QUANTUM: f64 = 1e-10;

/// A coordinate as it appears in JSON files: a plain number (float mode) or a
/// `"num/den"` string (exact mode).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Float(f64),
    Exact(String),
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic and comparisons are exact.
    const EXACT: bool;

    /// Hashable, totally ordered identity used for deduplication.
    type Key: Ord + Hash + Clone + Debug + Send + Sync;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `num / den`; panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact conversion of a double (the binary value, not its decimal text).
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn floor_i64(&self) -> i64;
    fn key(&self) -> Self::Key;
    fn to_coord(&self) -> Coord;
    fn from_coord(c: &Coord) -> Result<Self>;

    /// Floor, or `None` when the value is too close to an integer to be
    /// trusted (never `None` for exact scalars).
    fn checked_floor(&self) -> Option<i64>;

    /// Integer test: exact for exact scalars, within [`BOUNDARY_EPS`] for doubles.
    fn is_integer(&self) -> bool;

    /// Sign with a dead zone of [`BOUNDARY_EPS`] for doubles.
    fn sign(&self) -> Ordering;

    /// Equality, relative tolerance `tol` for doubles, exact otherwise.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    fn is_finite(&self) -> bool {
        true
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `x - floor(x)`, in `[0, 1)`.
    fn fract(&self) -> Self {
        self.clone() - Self::from_i64(self.floor_i64())
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    type Key = i128;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }
    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
    fn key(&self) -> i128 {
        (self / F64_KEY_QUANTUM).round() as i128
    }
    fn to_coord(&self) -> Coord {
        Coord::Float(*self)
    }
    fn from_coord(c: &Coord) -> Result<Self> {
        match c {
            Coord::Float(v) => Ok(*v),
            Coord::Exact(s) => parse_rational(s).map(|r| ToPrimitive::to_f64(&r).unwrap_or(f64::NAN)),
        }
    }
    fn checked_floor(&self) -> Option<i64> {
        if (self - self.round()).abs() < BOUNDARY_EPS {
            None
        } else {
            Some(self.floor() as i64)
        }
    }
    fn is_integer(&self) -> bool {
        (self - self.round()).abs() < BOUNDARY_EPS
    }
    fn sign(&self) -> Ordering {
        if f64::abs(*self) < BOUNDARY_EPS {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        f64::abs(self - other) <= tol * 1f64.max(f64::abs(*self)).max(f64::abs(*other))
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Parses `"n"`, `"n/d"` or a decimal string into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Ok(r) = Rational::from_str(t) {
        return Ok(r);
    }
    let v: f64 = t
        .parse()
        .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))?;
    Rational::from_float(v).ok_or_else(|| Error::Parse(format!("non-finite number: {s:?}")))
}

fn rational_to_i64(r: &BigInt) -> i64 {
    r.to_i64().expect("integer part exceeds i64")
}

impl Scalar for Rational {
    const EXACT: bool = true;
    type Key = Rational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn floor_i64(&self) -> i64 {
        rational_to_i64(&self.floor().to_integer())
    }
    fn key(&self) -> Rational {
        self.clone()
    }
    fn to_coord(&self) -> Coord {
        Coord::Exact(self.to_string())
    }
    fn from_coord(c: &Coord) -> Result<Self> {
        match c {
            Coord::Float(v) => Rational::from_float(*v)
                .ok_or_else(|| Error::Parse(format!("non-finite coordinate {v}"))),
            Coord::Exact(s) => parse_rational(s),
        }
    }
    fn checked_floor(&self) -> Option<i64> {
        Some(self.floor_i64())
    }
    fn is_integer(&self) -> bool {
        Rational::is_integer(self)
    }
    fn sign(&self) -> Ordering {
        self.cmp(&<Rational as Zero>::zero())
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Exact element `a + b*sqrt(D)` of the quadratic field `Q(sqrt(D))`.
///
/// `D` must be a positive non-square integer; the representation is then
/// unique, so derived equality and hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticSurd<const D: i64> {
    pub rational: Rational,
    pub surd: Rational,
}

/// Elements of `Q(sqrt(2))`.
pub type Sqrt2 = QuadraticSurd<2>;

impl<const D: i64> QuadraticSurd<D> {
    pub fn new(rational: Rational, surd: Rational) -> Self {
        debug_assert!(D > 1 && !is_perfect_square(D), "D must be a non-square > 1");
        Self { rational, surd }
    }

    /// `sqrt(D)` itself.
    pub fn root() -> Self {
        Self::new(<Rational as Zero>::zero(), <Rational as One>::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::new(r, <Rational as Zero>::zero())
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.rational.clone(), -self.surd.clone())
    }

    /// `a^2 - D b^2`.
    pub fn field_norm(&self) -> Rational {
        &self.rational * &self.rational - Rational::from_i64(D) * &self.surd * &self.surd
    }

    pub fn signum(&self) -> Ordering {
        let zero = <Rational as Zero>::zero();
        let sa = self.rational.cmp(&zero);
        let sb = self.surd.cmp(&zero);
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
            (Ordering::Less, Ordering::Less) => Ordering::Less,
            (Ordering::Greater, Ordering::Less) => {
                let a2 = &self.rational * &self.rational;
                let db2 = Rational::from_i64(D) * &self.surd * &self.surd;
                a2.cmp(&db2)
            }
            (Ordering::Less, Ordering::Greater) => {
                let a2 = &self.rational * &self.rational;
                let db2 = Rational::from_i64(D) * &self.surd * &self.surd;
                db2.cmp(&a2)
            }
        }
    }
}

fn is_perfect_square(d: i64) -> bool {
    let r = (d as f64).sqrt().round() as i64;
    (r - 1..=r + 1).any(|c| c >= 0 && c * c == d)
}

impl<const D: i64> Debug for QuadraticSurd<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*sqrt({})", self.rational, self.surd, D)
    }
}

impl<const D: i64> Display for QuadraticSurd<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Debug::fmt(self, f)
    }
}

impl<const D: i64> Add for QuadraticSurd<D> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.rational + o.rational, self.surd + o.surd)
    }
}

impl<const D: i64> Sub for QuadraticSurd<D> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.rational - o.rational, self.surd - o.surd)
    }
}

impl<const D: i64> Mul for QuadraticSurd<D> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let d = Rational::from_i64(D);
        Self::new(
            &self.rational * &o.rational + d * &self.surd * &o.surd,
            &self.rational * &o.surd + &self.surd * &o.rational,
        )
    }
}

impl<const D: i64> Div for QuadraticSurd<D> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let n = o.field_norm();
        assert!(!Zero::is_zero(&n), "division by zero in Q(sqrt({D}))");
        let num = self * o.conjugate();
        Self::new(num.rational / &n, num.surd / &n)
    }
}

impl<const D: i64> Neg for QuadraticSurd<D> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rational, -self.surd)
    }
}

impl<const D: i64> PartialOrd for QuadraticSurd<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const D: i64> Ord for QuadraticSurd<D> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl<const D: i64> Scalar for QuadraticSurd<D> {
    const EXACT: bool = true;
    type Key = Self;

    fn zero() -> Self {
        Self::from_rational(<Rational as Zero>::zero())
    }
    fn one() -> Self {
        Self::from_rational(<Rational as One>::one())
    }
    fn from_i64(v: i64) -> Self {
        Self::from_rational(Rational::from_i64(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::from_ratio(num, den))
    }
    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v).map(Self::from_rational)
    }
    fn to_f64(&self) -> f64 {
        Scalar::to_f64(&self.rational) + Scalar::to_f64(&self.surd) * (D as f64).sqrt()
    }
    fn floor_i64(&self) -> i64 {
        let mut n = Scalar::to_f64(self).floor() as i64;
        while *self < Self::from_i64(n) {
            n -= 1;
        }
        while *self >= Self::from_i64(n + 1) {
            n += 1;
        }
        n
    }
    fn key(&self) -> Self {
        self.clone()
    }
    fn to_coord(&self) -> Coord {
        Coord::Exact(format!("{}+{}*sqrt({})", self.rational, self.surd, D))
    }
    fn from_coord(c: &Coord) -> Result<Self> {
        match c {
            Coord::Float(v) => Self::from_f64(*v)
                .ok_or_else(|| Error::Parse(format!("non-finite coordinate {v}"))),
            Coord::Exact(s) => {
                let suffix = format!("*sqrt({D})");
                match s.strip_suffix(&suffix) {
                    Some(body) => {
                        // split at the last '+' that is not a sign of the surd part
                        let split = body
                            .char_indices()
                            .rev()
                            .find(|&(i, ch)| ch == '+' && i > 0)
                            .map(|(i, _)| i)
                            .ok_or_else(|| Error::Parse(format!("bad surd literal {s:?}")))?;
                        let a = parse_rational(&body[..split])?;
                        let b = parse_rational(&body[split + 1..])?;
                        Ok(Self::new(a, b))
                    }
                    None => parse_rational(s).map(Self::from_rational),
                }
            }
        }
    }
    fn checked_floor(&self) -> Option<i64> {
        Some(self.floor_i64())
    }
    fn is_integer(&self) -> bool {
        Zero::is_zero(&self.surd) && self.rational.is_integer()
    }
    fn sign(&self) -> Ordering {
        self.signum()
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn float_floor_refuses_near_integers() {
        assert_eq!(2.5f64.checked_floor(), Some(2));
        assert_eq!(2.0f64.checked_floor(), None);
        assert_eq!((2.3f64 - 0.3).checked_floor(), None);
        assert_eq!((-0.5f64).checked_floor(), Some(-1));
    }

    #[test]
    fn rational_floor_is_exact() {
        assert_eq!(q(7, 2).checked_floor(), Some(3));
        assert_eq!(q(-7, 2).floor_i64(), -4);
        assert_eq!(q(4, 2).floor_i64(), 2);
        assert!(q(4, 2).is_integer());
        assert_eq!(Scalar::fract(&q(-1, 3)), q(2, 3));
    }

    #[test]
    fn rational_coord_round_trip() {
        let r = q(-22, 7);
        let c = r.to_coord();
        assert_eq!(c, Coord::Exact("-22/7".into()));
        assert_eq!(Rational::from_coord(&c).unwrap(), r);
        assert_eq!(Rational::from_coord(&Coord::Float(0.5)).unwrap(), q(1, 2));
        assert_eq!(f64::from_coord(&Coord::Exact("3/4".into())).unwrap(), 0.75);
    }

    #[test]
    fn surd_ordering_matches_floats() {
        let r2 = Sqrt2::root();
        let one = Sqrt2::one();
        let r = r2.clone() - one.clone(); // sqrt2 - 1 ~ 0.414
        assert!(r > Sqrt2::zero());
        assert!(r < Sqrt2::from_ratio(1, 2));
        assert!(Sqrt2::from_ratio(41, 100) < r);
        assert_eq!((r.clone() * Sqrt2::from_i64(5)).floor_i64(), 2);
        assert_eq!((-r.clone()).floor_i64(), -1);
        // (sqrt2 - 1)(sqrt2 + 1) = 1
        assert_eq!(r.clone() * (r2.clone() + one.clone()), one);
        assert_eq!(one.clone() / r.clone(), r2 + Sqrt2::one());
    }

    #[test]
    fn surd_coord_round_trip() {
        let v = Sqrt2::new(q(-3, 2), q(5, 7));
        let c = v.to_coord();
        assert_eq!(Sqrt2::from_coord(&c).unwrap(), v);
        let w = Sqrt2::new(q(1, 1), q(-2, 1));
        assert_eq!(Sqrt2::from_coord(&w.to_coord()).unwrap(), w);
    }

    #[test]
    fn perfect_squares_detected() {
        assert!(is_perfect_square(4));
        assert!(is_perfect_square(9));
        assert!(!is_perfect_square(2));
        assert!(!is_perfect_square(5));
    }
}
