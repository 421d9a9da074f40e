//! Numeric backends.
//!
//! Every computation in the crate is generic over [`Scalar`]. Two backends
//! exist: exact rationals ([`Rational`]) and `f64`. Tie detection goes through
//! [`Scalar::ties`], which is literal equality for rationals and a relative
//! tolerance for floats.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Relative tolerance for float equality and tie grouping.
pub const FLOAT_REL_TOL: f64 = 1e-9;
/// Absolute tolerance for identity checks (e.g. hitting-time vs. direct solve).
pub const FLOAT_IDENTITY_TOL: f64 = 1e-10;
/// Tolerance on Σ η = 1 when parameters come from floating-point input.
pub const FLOAT_SUM_TOL: f64 = 1e-12;

pub trait Scalar:
    Clone + Debug + PartialOrd + Send + Sync + num_traits::Num + Signed + 'static
{
    /// True when arithmetic is exact and `ties` is literal equality.
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality for the purpose of best-response ties.
    fn ties(&self, other: &Self) -> bool;

    fn from_usize(k: usize) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(k)))
    }

    /// Exact values as `"p/q"` strings, floats as JSON numbers.
    fn to_json(&self) -> serde_json::Value;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        // Ratio::to_f64 handles huge numerators/denominators without overflow.
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn ties(&self, other: &Self) -> bool {
        self == other
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn ties(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs());
        (self - other).abs() <= FLOAT_REL_TOL * scale
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self).map_or(serde_json::Value::Null, Into::into)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Rational,
    Float,
}

impl Backend {
    /// Rational up to n = 16, float beyond.
    pub fn default_for(n: usize) -> Self {
        if n <= 16 {
            Backend::Rational
        } else {
            Backend::Float
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::Float => "float",
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Backend::Rational),
            "float" => Ok(Backend::Float),
            other => Err(Error::ParseNumber {
                input: other.to_string(),
                reason: "backend must be `rational` or `float`".into(),
            }),
        }
    }
}

/// Parses `p/q`, an integer, or a plain decimal (`0.85`, `1e-3`) into an exact
/// rational. Decimals are read digit by digit, so `0.1` is exactly 1/10.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let fail = |reason: &str| Error::ParseNumber {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(fail("empty string"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| fail("bad numerator"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| fail("bad denominator"))?;
        if q.is_zero() {
            return Err(fail("zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e = s[pos + 1..]
                .parse::<i32>()
                .map_err(|_| fail("bad exponent"))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(fail("no digits"));
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(fail("not a decimal or p/q rational"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(&all_digits).map_err(|_| fail("bad digits"))?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Canonical text form: `p/q`, or `p` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Number of m-subsets of a k-set, saturating at `u128::MAX`.
pub fn binomial(k: usize, m: usize) -> u128 {
    if m > k {
        return 0;
    }
    let m = m.min(k - m);
    let mut acc: u128 = 1;
    for i in 0..m {
        acc = match acc.checked_mul((k - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}
