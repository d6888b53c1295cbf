//! Exact arithmetic in the ring `Q(ω)`, ω = e^{2πi/3}.
//!
//! Every value is stored as `a + b·ω` with `a, b` reduced rationals, so two
//! values are equal iff their representations are equal. The reduction
//! `ω² = −1 − ω` keeps products in that form.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// `√3 / 2`, the imaginary part of ω.
const SQRT3_HALF: f64 = 0.866_025_403_784_438_6;

/// Exact value `a + b·ω`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CycloRational {
    a: Rational64,
    b: Rational64,
}

impl CycloRational {
    /// Callers must pass reduced ratios (anything produced by `Rational64`
    /// arithmetic is).
    pub(crate) const fn from_parts(a: Rational64, b: Rational64) -> Self {
        Self { a, b }
    }

    pub fn new(a: Rational64, b: Rational64) -> Self {
        // `Rational64` arithmetic always yields reduced, positive-denominator
        // values; `new` re-reduces in case a caller built one with `new_raw`.
        Self {
            a: Rational64::new(*a.numer(), *a.denom()),
            b: Rational64::new(*b.numer(), *b.denom()),
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::from_parts(Rational64::from_integer(n), Rational64::zero())
    }

    pub fn rational(numer: i64, denom: i64) -> Result<Self, Error> {
        if denom == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::from_parts(Rational64::new(numer, denom), Rational64::zero()))
    }

    /// The primitive cube root of unity ω.
    pub fn omega() -> Self {
        Self::from_parts(Rational64::zero(), Rational64::one())
    }

    /// ω² = −1 − ω.
    pub fn omega_sq() -> Self {
        Self::from_parts(-Rational64::one(), -Rational64::one())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn re_part(&self) -> Rational64 {
        self.a
    }

    pub fn omega_part(&self) -> Rational64 {
        self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `true` when the value is a rational number (no ω component).
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Complex conjugate: conj(ω) = ω² = −1 − ω, so `a + bω ↦ (a − b) − bω`.
    pub fn conj(&self) -> Self {
        Self::from_parts(self.a - self.b, -self.b)
    }

    /// `|x|² = x·conj(x) = a² − ab + b²`, always a nonnegative rational.
    pub fn norm_sqr(&self) -> Rational64 {
        self.a * self.a - self.a * self.b + self.b * self.b
    }

    pub fn to_complex(&self) -> Complex64 {
        let a = *self.a.numer() as f64 / *self.a.denom() as f64;
        let b = *self.b.numer() as f64 / *self.b.denom() as f64;
        Complex64::new(a - 0.5 * b, SQRT3_HALF * b)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self::from_parts(c.a / n, c.b / n))
    }

    pub fn scale(&self, r: Rational64) -> Self {
        Self::from_parts(self.a * r, self.b * r)
    }
}

impl From<i64> for CycloRational {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

impl From<Rational64> for CycloRational {
    fn from(r: Rational64) -> Self {
        Self::from_parts(r, Rational64::zero())
    }
}

impl Add for CycloRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_parts(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for CycloRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_parts(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for CycloRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_parts(-self.a, -self.b)
    }
}

impl Mul for CycloRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        // (a1 + b1ω)(a2 + b2ω) = a1a2 + (a1b2 + a2b1)ω + b1b2ω², ω² = −1 − ω
        let bb = self.b * rhs.b;
        Self::from_parts(
            self.a * rhs.a - bb,
            self.a * rhs.b + rhs.a * self.b - bb,
        )
    }
}

impl AddAssign for CycloRational {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for CycloRational {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for CycloRational {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Sum for CycloRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl Product for CycloRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |acc, x| acc * x)
    }
}

fn fmt_ratio(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Debug for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", fmt_ratio(&self.a)),
            (true, false) => write!(f, "{}w", fmt_ratio(&self.b)),
            (false, false) => {
                let sign = if self.b.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}w", fmt_ratio(&self.a), sign, fmt_ratio(&self.b.abs()))
            }
        }
    }
}

pub(crate) fn parse_ratio(s: &str) -> Result<Rational64, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational `{s}`"));
    match s.split_once('/') {
        None => s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::ZeroDenominator);
            }
            Ok(Rational64::new(n, d))
        }
    }
}

/// Wire form: `{"a":"p/q","b":"r/s"}`.
#[derive(Serialize, Deserialize)]
struct Wire {
    a: String,
    b: String,
}

impl Serialize for CycloRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let to_s = |r: &Rational64| format!("{}/{}", r.numer(), r.denom());
        Wire { a: to_s(&self.a), b: to_s(&self.b) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CycloRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(deserializer)?;
        let a = parse_ratio(&w.a).map_err(de::Error::custom)?;
        let b = parse_ratio(&w.b).map_err(de::Error::custom)?;
        Ok(Self::new(a, b))
    }
}

impl FromStr for CycloRational {
    type Err = Error;

    /// Accepts the `Display` form: `p/q`, `p/qw`, `p/q+r/sw`, `p/q-r/sw`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = s.strip_suffix('w') {
            let omega_coeff = |t: &str| match t {
                "" | "+" => Ok(Rational64::one()),
                "-" => Ok(-Rational64::one()),
                other => parse_ratio(other),
            };
            // split at the last sign that is not the leading one
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            match split {
                Some(i) => Ok(Self::new(parse_ratio(&body[..i])?, omega_coeff(&body[i..])?)),
                None => Ok(Self::new(Rational64::zero(), omega_coeff(body)?)),
            }
        } else {
            Ok(parse_ratio(&s)?.into())
        }
    }
}
