//! Exact non-negative money values with a distinguished infinity.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// An exact non-negative rational amount, or `Infinity`.
///
/// `Infinity` absorbs addition and compares greater than every finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Money {
    Finite(BigRational),
    Infinity,
}

impl Money {
    pub fn zero() -> Self {
        Money::Finite(BigRational::zero())
    }

    pub fn from_integer(n: u64) -> Self {
        Money::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics on a zero denominator or a negative result.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        assert!(!r.is_negative(), "money must be non-negative");
        Money::Finite(r)
    }

    pub fn from_rational(r: BigRational) -> Self {
        assert!(!r.is_negative(), "money must be non-negative");
        Money::Finite(r)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Money::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Money::Finite(r) if r.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Money::Finite(r) => Some(r),
            Money::Infinity => None,
        }
    }

    /// Multiplies a finite value by a non-negative integer.
    pub fn times(&self, k: u64) -> Money {
        match self {
            Money::Finite(r) => Money::Finite(r * BigRational::from_integer(BigInt::from(k))),
            Money::Infinity if k == 0 => Money::zero(),
            Money::Infinity => Money::Infinity,
        }
    }

    /// Divides a finite value by a positive integer.
    pub fn div_int(&self, k: u64) -> Money {
        assert!(k > 0);
        match self {
            Money::Finite(r) => Money::Finite(r / BigRational::from_integer(BigInt::from(k))),
            Money::Infinity => Money::Infinity,
        }
    }

    /// Exact ratio `self / unit` when both are finite and the quotient is a whole number.
    pub fn whole_multiple_of(&self, unit: &Money) -> Option<u64> {
        let (a, u) = (self.as_rational()?, unit.as_rational()?);
        if u.is_zero() {
            return None;
        }
        let q = a / u;
        if q.is_integer() {
            q.to_integer().to_u64()
        } else {
            None
        }
    }

    /// `floor(self / unit)`, saturating at `u64::MAX`; `Infinity` maps to `u64::MAX`.
    pub fn floor_div(&self, unit: &Money) -> u64 {
        match (self, unit.as_rational()) {
            (Money::Finite(a), Some(u)) if !u.is_zero() => {
                (a / u).floor().to_integer().to_u64().unwrap_or(u64::MAX)
            }
            _ => u64::MAX,
        }
    }

    /// Canonical `num/den` form in lowest terms, or `inf`.
    pub fn to_canonical_string(&self) -> String {
        match self {
            Money::Finite(r) => format!("{}/{}", r.numer(), r.denom()),
            Money::Infinity => "inf".to_string(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Money::Finite(r) => r.to_f64().unwrap_or(f64::INFINITY),
            Money::Infinity => f64::INFINITY,
        }
    }

    pub fn min_of<'a>(a: &'a Money, b: &'a Money) -> &'a Money {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl Default for Money {
    fn default() -> Self {
        Money::zero()
    }
}

impl Add for &Money {
    type Output = Money;

    fn add(self, rhs: &Money) -> Money {
        match (self, rhs) {
            (Money::Finite(a), Money::Finite(b)) => Money::Finite(a + b),
            _ => Money::Infinity,
        }
    }
}

impl Add for Money {
    type Output = Money;

    fn add(self, rhs: Money) -> Money {
        &self + &rhs
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), |acc, m| &acc + m)
    }
}

impl Sum<Money> for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), |acc, m| acc + m)
    }
}

impl From<u64> for Money {
    fn from(n: u64) -> Self {
        Money::from_integer(n)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Money::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Money::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Money::Infinity => f.write_str("inf"),
        }
    }
}

fn parse_uint(s: &str, whole: &str) -> Result<BigInt, ParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::Money(whole.to_string()));
    }
    BigInt::parse_bytes(s.as_bytes(), 10).ok_or_else(|| ParseError::Money(whole.to_string()))
}

impl FromStr for Money {
    type Err = ParseError;

    /// Accepts `inf`, `num/den`, integers and plain decimals (`12.375`).
    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let s = raw.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Money::Infinity);
        }
        if let Some((n, d)) = s.split_once('/') {
            let num = parse_uint(n.trim(), raw)?;
            let den = parse_uint(d.trim(), raw)?;
            if den.is_zero() {
                return Err(ParseError::Money(raw.to_string()));
            }
            return Ok(Money::Finite(BigRational::new(num, den)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int = if int.is_empty() { BigInt::zero() } else { parse_uint(int, raw)? };
            let digits = parse_uint(frac, raw)?;
            let den = num_traits::pow(BigInt::from(10u32), frac.len());
            return Ok(Money::Finite(BigRational::new(int * &den + digits, den)));
        }
        Ok(Money::Finite(BigRational::from_integer(parse_uint(s, raw)?)))
    }
}

/// Smallest `t` with `2^t >= n` (for `n >= 1`).
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Least common multiple of the denominators of the finite values.
pub(crate) fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Money>) -> BigInt {
    values
        .into_iter()
        .filter_map(Money::as_rational)
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub(crate) fn to_u64_checked(b: &BigInt) -> Option<u64> {
    if b.sign() == Sign::Minus {
        None
    } else {
        b.to_u64()
    }
}

impl PartialOrd<u64> for Money {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        Some(self.cmp(&Money::from_integer(*other)))
    }
}

impl PartialEq<u64> for Money {
    fn eq(&self, other: &u64) -> bool {
        *self == Money::from_integer(*other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_and_dominates() {
        let five = Money::from_integer(5);
        assert_eq!(&five + &Money::Infinity, Money::Infinity);
        assert!(Money::Infinity > Money::from_integer(u64::MAX));
        assert!(Money::zero() < five);
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!("3/6".parse::<Money>().unwrap(), Money::from_ratio(1, 2));
        assert_eq!("0.25".parse::<Money>().unwrap(), Money::from_ratio(1, 4));
        assert_eq!("12".parse::<Money>().unwrap(), Money::from_integer(12));
        assert_eq!(".5".parse::<Money>().unwrap(), Money::from_ratio(1, 2));
        assert_eq!("inf".parse::<Money>().unwrap(), Money::Infinity);
        assert!("-1".parse::<Money>().is_err());
        assert!("1/0".parse::<Money>().is_err());
        assert!("abc".parse::<Money>().is_err());
        assert!("1.2.3".parse::<Money>().is_err());
    }

    #[test]
    fn canonical_form_is_lowest_terms() {
        assert_eq!(Money::from_ratio(4, 8).to_canonical_string(), "1/2");
        assert_eq!(Money::from_integer(7).to_canonical_string(), "7/1");
        assert_eq!(Money::Infinity.to_canonical_string(), "inf");
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(36), 6);
    }

    #[test]
    fn floor_div_and_multiples() {
        let q = Money::from_ratio(1, 4);
        assert_eq!(Money::from_ratio(7, 8).floor_div(&q), 3);
        assert_eq!(Money::from_integer(2).whole_multiple_of(&q), Some(8));
        assert_eq!(Money::from_ratio(1, 3).whole_multiple_of(&q), None);
    }
}
