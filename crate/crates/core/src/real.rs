//! Exact real parameters.
//!
//! Critical values, diagram coordinates and distances are rationals, so every
//! comparison and every candidate bottleneck value is computed without
//! rounding. Inputs are written as decimals (`"0.25"`) or fractions (`"1/3"`);
//! output prefers a terminating decimal and falls back to a fraction.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Real(Ratio<i128>);

impl Real {
    pub fn new(numer: i128, denom: i128) -> Real {
        Real(Ratio::new(numer, denom))
    }

    pub fn zero() -> Real {
        Real(Ratio::zero())
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    pub fn half(&self) -> Real {
        Real(self.0 / 2)
    }

    pub fn midpoint(a: Real, b: Real) -> Real {
        (a + b).half()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl From<i64> for Real {
    fn from(v: i64) -> Real {
        Real(Ratio::from_integer(v as i128))
    }
}

impl From<i32> for Real {
    fn from(v: i32) -> Real {
        Real(Ratio::from_integer(v as i128))
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        Real(self.0 + rhs.0)
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        Real(self.0 - rhs.0)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.numer();
        let d = self.denom();
        if d == 1 {
            return write!(f, "{n}");
        }
        // d = 2^a 5^b has a terminating expansion with max(a, b) digits
        let (mut twos, mut fives, mut rest) = (0u32, 0u32, d);
        while rest % 2 == 0 {
            rest /= 2;
            twos += 1;
        }
        while rest % 5 == 0 {
            rest /= 5;
            fives += 1;
        }
        if rest != 1 {
            return write!(f, "{n}/{d}");
        }
        let digits = twos.max(fives);
        let scale = 10i128.pow(digits);
        let scaled = n * (scale / d);
        let sign = if scaled < 0 { "-" } else { "" };
        let (int, frac) = scaled.abs().div_rem(&scale);
        write!(f, "{sign}{int}.{frac:0width$}", width = digits as usize)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Real, Error> {
        let err = || Error::ParseReal(s.to_string());
        let t = s.trim();
        if let Some((num, den)) = t.split_once('/') {
            let num: i128 = num.trim().parse().map_err(|_| err())?;
            let den: i128 = den.trim().parse().map_err(|_| err())?;
            if den == 0 {
                return Err(err());
            }
            return Ok(Real::new(num, den));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || frac.len() > 30
        {
            return Err(err());
        }
        let digits = format!("{int}{frac}");
        let mantissa: i128 = if digits.is_empty() {
            0
        } else {
            digits.parse().map_err(|_| err())?
        };
        let denom = 10i128.pow(frac.len() as u32);
        let value = Real::new(mantissa, denom);
        Ok(if neg { -value } else { value })
    }
}

/// A real number or one of the two infinities.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtReal {
    NegInf,
    Finite(Real),
    PosInf,
}

impl ExtReal {
    pub fn finite(&self) -> Option<Real> {
        match self {
            ExtReal::Finite(r) => Some(*r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }
}

impl From<Real> for ExtReal {
    fn from(r: Real) -> ExtReal {
        ExtReal::Finite(r)
    }
}

impl From<i64> for ExtReal {
    fn from(v: i64) -> ExtReal {
        ExtReal::Finite(Real::from(v))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(r) => write!(f, "{r}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExtReal, Error> {
        match s.trim() {
            "-inf" => Ok(ExtReal::NegInf),
            "+inf" | "inf" => Ok(ExtReal::PosInf),
            other => other.parse().map(ExtReal::Finite),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Real {
        s.parse().unwrap()
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(r("0.1") + r("0.2"), r("0.3"));
        assert_eq!(r("-1.25"), Real::new(-5, 4));
        assert_eq!(r("3"), Real::from(3));
        assert_eq!(r("1/3"), Real::new(1, 3));
        assert_eq!(r(".5"), Real::new(1, 2));
        assert!("1.2.3".parse::<Real>().is_err());
        assert!("abc".parse::<Real>().is_err());
        assert!("1/0".parse::<Real>().is_err());
        assert!("".parse::<Real>().is_err());
    }

    #[test]
    fn display_prefers_decimals() {
        assert_eq!(Real::new(5, 4).to_string(), "1.25");
        assert_eq!(Real::new(-1, 2).to_string(), "-0.5");
        assert_eq!(Real::new(-1, 20).to_string(), "-0.05");
        assert_eq!(Real::from(7).to_string(), "7");
        assert_eq!(Real::new(1, 3).to_string(), "1/3");
        assert_eq!(Real::new(-7, 6).to_string(), "-7/6");
    }

    #[test]
    fn ext_order_and_tokens() {
        assert!(ExtReal::NegInf < ExtReal::from(-1000));
        assert!(ExtReal::from(1000) < ExtReal::PosInf);
        assert_eq!("-inf".parse::<ExtReal>().unwrap(), ExtReal::NegInf);
        assert_eq!("+inf".parse::<ExtReal>().unwrap(), ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.to_string(), "+inf");
    }

    proptest::proptest! {
        #[test]
        fn display_parse_roundtrip(n in -100_000i64..100_000, d in 1i64..2000) {
            let x = Real::new(n as i128, d as i128);
            proptest::prop_assert_eq!(x.to_string().parse::<Real>().unwrap(), x);
        }
    }
}
