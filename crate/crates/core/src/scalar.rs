//! Exact rational scalar used for every position, duration and threshold.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseScalarError;

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Scalar(BigRational::from_integer(v))
    }

    /// `numer / denom`. Panics if `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Scalar(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big_ratio(numer: BigInt, denom: BigInt) -> Result<Self, ParseScalarError> {
        if denom.is_zero() {
            return Err(ParseScalarError::ZeroDenominator);
        }
        Ok(Scalar(BigRational::new(numer, denom)))
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Scalar(BigRational::new(BigInt::one(), BigInt::one() << k as usize))
    }

    /// `2^k`.
    pub fn pow2(k: u32) -> Self {
        Scalar::from_bigint(BigInt::one() << k as usize)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Sign as an ordering against zero.
    pub fn signum(&self) -> Ordering {
        match self.0.numer().sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn square(&self) -> Self {
        Scalar(&self.0 * &self.0)
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Scalar) -> Scalar {
        Scalar((&self.0 + &other.0) / BigInt::from(2))
    }

    /// Nearest `f64`; for display and statistics only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.0.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Scalar)
    }

    /// Largest rational of the form `m / 2^bits` that does not exceed
    /// `sqrt(self)`. `self` must be non-negative.
    pub fn sqrt_floor(&self, bits: u32) -> Scalar {
        assert!(!self.is_negative(), "square root of a negative scalar");
        // floor(sqrt(self * 4^bits)) / 2^bits
        let scaled = &self.0 * BigRational::from_integer(BigInt::one() << (2 * bits as usize));
        let root = scaled.floor().to_integer().sqrt();
        Scalar(BigRational::new(root, BigInt::one() << bits as usize))
    }

    /// Decimal rendering rounded half away from zero to `digits` fractional
    /// digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        let negative = scaled.is_negative();
        let mag = scaled.abs();
        let (q, r) = mag.numer().div_rem(mag.denom());
        let rounded = if (r * 2u32) >= *mag.denom() {
            q + 1u32
        } else {
            q
        };
        let (int_part, frac_part) = rounded.div_rem(&scale);
        let sign = if negative && !rounded.is_zero() {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            return format!("{sign}{int_part}");
        }
        format!(
            "{sign}{int_part}.{:0>width$}",
            frac_part.to_string(),
            width = digits
        )
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::from_int(v)
    }
}

impl From<u64> for Scalar {
    fn from(v: u64) -> Self {
        Scalar::from_bigint(BigInt::from(v))
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($trait::$method(self.0, rhs.0))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($trait::$method(&self.0, rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl fmt::Display for Scalar {
    /// Canonical exact text: `p` or `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts `p/q` with integer `p` and positive integer `q`, a bare
    /// integer, or a finite decimal such as `-12.375`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        if let Some((n, d)) = s.split_once('/') {
            let numer = parse_int(n.trim(), s)?;
            let denom = parse_int(d.trim(), s)?;
            if denom.is_zero() {
                return Err(ParseScalarError::ZeroDenominator);
            }
            if denom.is_negative() {
                return Err(ParseScalarError::NegativeDenominator(s.to_string()));
            }
            return Ok(Scalar(BigRational::new(numer, denom)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let (negative, int_digits) = match int_part.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
            };
            let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
            if (int_digits.is_empty() && frac_part.is_empty())
                || !all_digits(int_digits)
                || !all_digits(frac_part)
            {
                return Err(ParseScalarError::Malformed(s.to_string()));
            }
            let digits = format!("{int_digits}{frac_part}");
            let mut numer: BigInt = digits
                .parse()
                .map_err(|_| ParseScalarError::Malformed(s.to_string()))?;
            if negative {
                numer = -numer;
            }
            let denom = num_traits::pow(BigInt::from(10), frac_part.len());
            return Ok(Scalar(BigRational::new(numer, denom)));
        }
        Ok(Scalar::from_bigint(parse_int(s, s)?))
    }
}

fn parse_int(t: &str, whole: &str) -> Result<BigInt, ParseScalarError> {
    let body = t.strip_prefix(['-', '+']).unwrap_or(t);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseScalarError::Malformed(whole.to_string()));
    }
    t.parse()
        .map_err(|_| ParseScalarError::Malformed(whole.to_string()))
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string such as \"3/4\" or \"-1.25\", or an integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar::from(v))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
                Err(E::custom(format!(
                    "floating-point literal {v} is not accepted; write it as a string"
                )))
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("3/4".parse::<Scalar>().unwrap(), Scalar::ratio(3, 4));
        assert_eq!("6/8".parse::<Scalar>().unwrap(), Scalar::ratio(3, 4));
        assert_eq!("-12.375".parse::<Scalar>().unwrap(), Scalar::ratio(-99, 8));
        assert_eq!(".5".parse::<Scalar>().unwrap(), Scalar::ratio(1, 2));
        assert_eq!("7".parse::<Scalar>().unwrap(), Scalar::from_int(7));
        assert_eq!("-3/9".parse::<Scalar>().unwrap(), Scalar::ratio(-1, 3));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(matches!(
            "3/0".parse::<Scalar>(),
            Err(ParseScalarError::ZeroDenominator)
        ));
        assert!(matches!(
            "3/-4".parse::<Scalar>(),
            Err(ParseScalarError::NegativeDenominator(_))
        ));
        assert!("1e5".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
        assert!("1.2.3".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!(".".parse::<Scalar>().is_err());
    }

    #[test]
    fn lowest_terms_and_display() {
        let s = Scalar::ratio(10, -4);
        assert_eq!(s.denom(), &BigInt::from(2));
        assert_eq!(s.to_string(), "-5/2");
        assert_eq!(Scalar::from_int(4).to_string(), "4");
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Scalar::ratio(1, 3).to_decimal(12), "0.333333333333");
        assert_eq!(Scalar::ratio(2, 3).to_decimal(3), "0.667");
        assert_eq!(Scalar::ratio(-1, 8).to_decimal(2), "-0.13");
        assert_eq!(Scalar::from_int(12).to_decimal(2), "12.00");
        assert_eq!(Scalar::ratio(-1, 1000).to_decimal(2), "0.00");
    }

    #[test]
    fn sqrt_floor_brackets_root() {
        let two = Scalar::from_int(2);
        let r = two.sqrt_floor(20);
        assert!(r.square() <= two);
        assert!((r + Scalar::pow2_neg(20)).square() > two);
        assert_eq!(Scalar::from_int(25).sqrt_floor(0), Scalar::from_int(5));
    }

    #[test]
    fn serde_uses_exact_strings() {
        let s: Scalar = serde_json::from_str("\"7/2\"").unwrap();
        assert_eq!(s, Scalar::ratio(7, 2));
        let i: Scalar = serde_json::from_str("-3").unwrap();
        assert_eq!(i, Scalar::from_int(-3));
        assert!(serde_json::from_str::<Scalar>("0.5").is_err());
        assert_eq!(
            serde_json::to_string(&Scalar::ratio(1, 2)).unwrap(),
            "\"1/2\""
        );
    }
}
