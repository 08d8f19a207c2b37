//! Exact rational helpers: literal parsing, `p/q` formatting, certified square
//! root brackets and decimal presentation.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"-7"`, or a plain decimal such as `"0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::RationalSyntax(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let joined = format!("{}{}", if digits.is_empty() { "0" } else { digits }, frac);
        let mut numer: BigInt = joined.parse().map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(numer, denom));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Always `p/q`, even for integers (`4/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Floor of `r * 10^digits` rendered as a signed decimal with `digits` places.
pub fn decimal(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (r.abs() * Rational::from_integer(scale)).floor().to_integer();
    render_scaled(r.is_negative(), scaled, digits)
}

/// Decimal rendering of `sqrt(r)` truncated to `digits` places; `r` must be non-negative.
pub fn decimal_sqrt(r: &Rational, digits: usize) -> String {
    assert!(!r.is_negative(), "square root of a negative rational");
    let scale = num_traits::pow(BigInt::from(10), 2 * digits);
    let v = (r * Rational::from_integer(scale)).floor().to_integer();
    render_scaled(false, v.sqrt(), digits)
}

fn render_scaled(negative: bool, scaled: BigInt, digits: usize) -> String {
    let text = scaled.to_string();
    let (int_part, frac_part) = if digits == 0 {
        (text, String::new())
    } else if text.len() > digits {
        let (a, b) = text.split_at(text.len() - digits);
        (a.to_string(), b.to_string())
    } else {
        ("0".to_string(), format!("{text:0>digits$}"))
    };
    let sign = if negative && scaled_nonzero(&int_part, &frac_part) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

fn scaled_nonzero(a: &str, b: &str) -> bool {
    a.bytes().chain(b.bytes()).any(|c| c != b'0')
}

/// Exact square root when `r` is the square of a rational.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let p = r.numer().sqrt();
    let q = r.denom().sqrt();
    if &(&p * &p) == r.numer() && &(&q * &q) == r.denom() {
        Some(Rational::new(p, q))
    } else {
        None
    }
}

/// Rationals `(lo, hi)` with `lo <= sqrt(r) <= hi` and `hi - lo <= 2^-bits / denom(r)`.
/// Both ends coincide when `r` is a perfect square.
pub fn sqrt_bounds(r: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!r.is_negative(), "square root of a negative rational");
    if let Some(s) = exact_sqrt(r) {
        return (s.clone(), s);
    }
    // sqrt(p/q) = sqrt(p*q)/q; scale by 2^bits before taking the integer root.
    let q = r.denom().clone();
    let shift = BigInt::one() << (2 * bits as usize);
    let radicand = r.numer() * &q * shift;
    let root = radicand.sqrt();
    let denom = q << bits as usize;
    let lo = Rational::new(root.clone(), denom.clone());
    let hi = Rational::new(root + 1, denom);
    (lo, hi)
}

pub fn sqrt_upper(r: &Rational) -> Rational {
    sqrt_bounds(r, 64).1
}

pub fn sqrt_lower(r: &Rational) -> Rational {
    sqrt_bounds(r, 64).0
}

/// Rounds a finite float to the nearest multiple of `2^-bits`.
pub fn from_f64_grid(value: f64, bits: u32) -> Rational {
    assert!(value.is_finite(), "non-finite float");
    let scaled = (value * (bits as f64).exp2()).round();
    let n = BigInt::from(scaled as i128);
    Rational::new(n, BigInt::one() << bits as usize)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerators: fall back to a ratio of leading digits
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn is_power_of_two(n: &BigInt) -> bool {
    n.sign() == Sign::Plus && (n & (n - BigInt::one())).is_zero()
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// A closed rational interval `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational_serde")]
    pub lower: Rational,
    #[serde(with = "rational_serde")]
    pub upper: Rational,
}

impl Interval {
    pub fn point(v: Rational) -> Self {
        Interval {
            lower: v.clone(),
            upper: v,
        }
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lower <= v && v <= &self.upper
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lower: &self.lower + &other.lower,
            upper: &self.upper + &other.upper,
        }
    }

    /// Square of a non-negative interval.
    pub fn square(&self) -> Interval {
        Interval {
            lower: &self.lower * &self.lower,
            upper: &self.upper * &self.upper,
        }
    }
}

/// Serde adapter storing rationals as `"p/q"` strings.
pub mod rational_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Lit {
            Text(String),
            Int(i64),
        }
        match Lit::deserialize(d)? {
            Lit::Text(t) => parse_rational(&t).map_err(serde::de::Error::custom),
            Lit::Int(n) => Ok(int(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn formats_with_denominator() {
        assert_eq!(format_rational(&int(4)), "4/1");
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal(&ratio(1, 3), 4), "0.3333");
        assert_eq!(decimal(&ratio(-7, 2), 2), "-3.50");
        assert_eq!(decimal_sqrt(&int(2), 6), "1.414213");
        assert_eq!(decimal_sqrt(&int(4), 3), "2.000");
        assert_eq!(decimal(&ratio(1, 1000), 2), "0.00");
    }

    #[test]
    fn sqrt_brackets_are_certified() {
        for r in [int(2), ratio(5, 16), ratio(1, 3), ratio(12345, 7)] {
            let (lo, hi) = sqrt_bounds(&r, 40);
            assert!(&lo * &lo <= r && r <= &hi * &hi);
            assert!(lo < hi);
        }
        let (lo, hi) = sqrt_bounds(&ratio(9, 4), 40);
        assert_eq!(lo, ratio(3, 2));
        assert_eq!(hi, ratio(3, 2));
    }

    #[test]
    fn grid_rounding() {
        assert_eq!(from_f64_grid(0.5, 10), ratio(1, 2));
        assert_eq!(from_f64_grid(1.0 / 3.0, 2), ratio(1, 4));
    }
}
