//! Exact rationals, certified intervals, and directed-rounding fixed point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Closed interval `[lo, hi]` of exact rationals bracketing a real quantity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CertifiedInterval {
    lo: Rational,
    hi: Rational,
}

impl CertifiedInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return domain(format!("interval with lo {lo} > hi {hi}"));
        }
        Ok(CertifiedInterval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        CertifiedInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rat_int(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &CertifiedInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &CertifiedInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Every point of `self` is strictly smaller than every point of `other`.
    pub fn strictly_below(&self, other: &CertifiedInterval) -> bool {
        self.hi < other.lo
    }

    pub fn add(&self, other: &CertifiedInterval) -> Self {
        CertifiedInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &CertifiedInterval) -> Self {
        CertifiedInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn mul(&self, other: &CertifiedInterval) -> Self {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        CertifiedInterval { lo, hi }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_negative() {
            CertifiedInterval {
                lo: &self.hi * k,
                hi: &self.lo * k,
            }
        } else {
            CertifiedInterval {
                lo: &self.lo * k,
                hi: &self.hi * k,
            }
        }
    }

    pub fn div(&self, other: &CertifiedInterval) -> Result<Self> {
        if other.contains(&Rational::zero()) {
            return domain("interval division by an interval containing 0");
        }
        let inv = CertifiedInterval {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        Ok(self.mul(&inv))
    }

    pub fn hull(&self, other: &CertifiedInterval) -> Self {
        CertifiedInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn intersection(&self, other: &CertifiedInterval) -> Option<Self> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(CertifiedInterval { lo, hi })
    }

    /// Widen to dyadic endpoints with `bits` fractional bits.
    pub fn round_outward(&self, bits: u32) -> Self {
        let scale = BigInt::one() << bits;
        let lo = (&self.lo * rat_int(scale.clone())).floor().to_integer();
        let hi = (&self.hi * rat_int(scale.clone())).ceil().to_integer();
        CertifiedInterval {
            lo: Rational::new(lo, scale.clone()),
            hi: Rational::new(hi, scale),
        }
    }

    /// Lower endpoint rendered with `digits` decimals, rounded down.
    pub fn decimal_lo(&self, digits: u32) -> String {
        decimal_floor(&self.lo, digits)
    }

    /// Upper endpoint rendered with `digits` decimals, rounded up.
    pub fn decimal_hi(&self, digits: u32) -> String {
        decimal_ceil(&self.hi, digits)
    }

    /// Midpoint as a float, for exploratory output only.
    pub fn mid_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(12) as u32;
        write!(f, "[{}, {}]", self.decimal_lo(digits), self.decimal_hi(digits))
    }
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerators and denominators: shift both down first.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as usize;
    let shift_d = (db - 60).max(0) as usize;
    let n = (x.numer() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (x.denom() >> shift_d).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

fn render_scaled(v: BigInt, digits: u32) -> String {
    let neg = v.is_negative();
    let s = v.abs().to_string();
    let d = digits as usize;
    let body = if d == 0 {
        s
    } else if s.len() > d {
        format!("{}.{}", &s[..s.len() - d], &s[s.len() - d..])
    } else {
        format!("0.{}{}", "0".repeat(d - s.len()), s)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

pub fn decimal_floor(x: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let v = (x * rat_int(scale)).floor().to_integer();
    render_scaled(v, digits)
}

pub fn decimal_ceil(x: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let v = (x * rat_int(scale)).ceil().to_integer();
    render_scaled(v, digits)
}

/// Parse a decimal or fraction literal ("1e-6", "0.25", "3/7") exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad_number(s))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad_number(s))?;
        if d.is_zero() {
            return domain(format!("zero denominator in {s:?}"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad_number(s))?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad_number(s));
    }
    let n: BigInt = digits.parse().map_err(|_| bad_number(s))?;
    let e = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    Ok(if e >= 0 {
        rat_int(n * ten.pow(e as u32))
    } else {
        Rational::new(n, ten.pow((-e) as u32))
    })
}

fn bad_number(s: &str) -> crate::error::Error {
    crate::error::Error::Domain(format!("not a number: {s:?}"))
}

/// Fixed-point integers `x` standing for `x / 2^bits`, with explicit
/// rounding direction on every operation. Used for long products and sums
/// where exact rationals would carry megabit denominators.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Fixed {
    pub bits: u32,
}

impl Fixed {
    pub fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    #[cfg(test)]
    pub fn from_rational_floor(&self, x: &Rational) -> BigInt {
        (x.numer() << self.bits).div_floor(x.denom())
    }

    pub fn from_rational_ceil(&self, x: &Rational) -> BigInt {
        (x.numer() << self.bits).div_ceil(x.denom())
    }

    /// floor(x * num / den)
    pub fn mul_ratio_floor(&self, x: &BigInt, num: &BigInt, den: &BigInt) -> BigInt {
        (x * num).div_floor(den)
    }

    /// ceil(x * num / den)
    pub fn mul_ratio_ceil(&self, x: &BigInt, num: &BigInt, den: &BigInt) -> BigInt {
        (x * num).div_ceil(den)
    }

    pub fn mul_floor(&self, x: &BigInt, y: &BigInt) -> BigInt {
        (x * y).div_floor(&self.one())
    }

    pub fn mul_ceil(&self, x: &BigInt, y: &BigInt) -> BigInt {
        (x * y).div_ceil(&self.one())
    }

    pub fn to_rational(&self, x: &BigInt) -> Rational {
        Rational::new(x.clone(), self.one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_brackets() {
        let a = CertifiedInterval::new(rat(1, 3), rat(1, 2)).unwrap();
        let b = CertifiedInterval::new(rat(-1, 4), rat(1, 5)).unwrap();
        let p = a.mul(&b);
        assert_eq!(p.lo(), &rat(-1, 8));
        assert_eq!(p.hi(), &rat(1, 10));
        assert!(a.div(&b).is_err());
        let q = a.div(&a).unwrap();
        assert!(q.contains(&rat(1, 1)));
        assert!(CertifiedInterval::new(rat(1, 2), rat(1, 3)).is_err());
        assert!(b.strictly_below(&CertifiedInterval::point(rat(1, 4))));
    }

    #[test]
    fn decimals_round_outward() {
        let x = CertifiedInterval::new(rat(-2, 3), rat(2, 3)).unwrap();
        assert_eq!(x.decimal_lo(4), "-0.6667");
        assert_eq!(x.decimal_hi(4), "0.6667");
        assert_eq!(decimal_floor(&rat(2, 3), 4), "0.6666");
        assert_eq!(decimal_floor(&rat(1, 200), 2), "0.00");
        assert_eq!(decimal_ceil(&rat(1, 200), 2), "0.01");
        assert_eq!(decimal_floor(&rat(7, 1), 0), "7");
        let r = x.round_outward(3);
        assert!(r.contains_interval(&x));
        assert_eq!(r.lo(), &rat(-6, 8));
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_rational("1e-6").unwrap(), rat(1, 1_000_000));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-3/9").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("2.5E2").unwrap(), rat(250, 1));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn fixed_point_directions() {
        let f = Fixed { bits: 10 };
        let x = f.from_rational_floor(&rat(1, 3));
        let y = f.from_rational_ceil(&rat(1, 3));
        assert!(f.to_rational(&x) < rat(1, 3) && f.to_rational(&y) > rat(1, 3));
        let lo = f.mul_floor(&x, &x);
        let hi = f.mul_ceil(&y, &y);
        assert!(f.to_rational(&lo) <= rat(1, 9) && rat(1, 9) <= f.to_rational(&hi));
        assert!((rational_to_f64(&rat(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
    }
}
