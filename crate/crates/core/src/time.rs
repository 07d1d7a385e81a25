//! Exact simulation time.
//!
//! Master-side time never goes through floating point: step sizes and
//! communication points are non-negative rationals in reduced form, and the
//! conversion to `f64` only happens at the FMI boundary.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid time literal '{0}'")]
    InvalidLiteral(String),
    #[error("time literal '{0}' is negative")]
    Negative(String),
    #[error("time literal '{0}' is out of range")]
    OutOfRange(String),
}

/// A non-negative rational number of seconds, always kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RationalTime(Ratio<u64>);

impl RationalTime {
    pub const ZERO: RationalTime = RationalTime(Ratio::new_raw(0, 1));

    pub fn new(numerator: u64, denominator: u64) -> Result<Self, TimeError> {
        if denominator == 0 {
            return Err(TimeError::ZeroDenominator);
        }
        Ok(Self(Ratio::new(numerator, denominator)))
    }

    pub fn from_secs(secs: u64) -> Self {
        Self(Ratio::from_integer(secs))
    }

    pub fn numerator(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denominator(&self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a value that crossed the FMI boundary as `f64`.
    ///
    /// Uses the shortest round-tripping decimal representation, so `0.06`
    /// becomes exactly `3/50`.
    pub fn from_f64(value: f64) -> Result<Self, TimeError> {
        if !value.is_finite() {
            return Err(TimeError::InvalidLiteral(value.to_string()));
        }
        format!("{value}").parse()
    }

    /// Greatest common divisor of two rationals: `gcd(a/b, c/d) = gcd(a, c) / lcm(b, d)`.
    pub fn gcd(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let num = self.numerator().gcd(&other.numerator());
        let den = self.denominator().lcm(&other.denominator());
        Self(Ratio::new(num, den))
    }

    /// Returns `Some(k)` when `self == k * step` for an integer `k`.
    pub fn whole_multiple_of(self, step: Self) -> Option<u64> {
        if step.is_zero() {
            return None;
        }
        let q = self.0 / step.0;
        q.is_integer().then(|| q.to_integer())
    }

    /// Smallest `k` with `k * step >= self`.
    pub fn div_ceil(self, step: Self) -> u64 {
        assert!(!step.is_zero(), "division by zero step");
        let num = self.numerator() as u128 * step.denominator() as u128;
        let den = self.denominator() as u128 * step.numerator() as u128;
        u64::try_from(num.div_ceil(den)).expect("step count overflow")
    }

    pub fn checked_add(self, other: Self) -> Option<Self> {
        let (a, b) = (self.0, other.0);
        let den = a.denom().lcm(b.denom());
        let lhs = a.numer().checked_mul(den / a.denom())?;
        let rhs = b.numer().checked_mul(den / b.denom())?;
        Some(Self(Ratio::new(lhs.checked_add(rhs)?, den)))
    }

    pub fn checked_sub(self, other: Self) -> Option<Self> {
        if other > self {
            return None;
        }
        Some(Self(self.0 - other.0))
    }

    pub fn checked_mul(self, other: Self) -> Option<Self> {
        let g1 = self.numerator().gcd(&other.denominator());
        let g2 = other.numerator().gcd(&self.denominator());
        let (g1, g2) = (g1.max(1), g2.max(1));
        let num = (self.numerator() / g1).checked_mul(other.numerator() / g2)?;
        let den = (self.denominator() / g2).checked_mul(other.denominator() / g1)?;
        Some(Self(Ratio::new(num, den)))
    }

    pub fn checked_mul_int(self, k: u64) -> Option<Self> {
        let g = k.gcd(self.0.denom());
        let num = self.numerator().checked_mul(k / g)?;
        Some(Self(Ratio::new(num, self.denominator() / g)))
    }

    /// Exact decimal rendering when the denominator only has factors 2 and 5.
    pub fn to_decimal(&self) -> Option<String> {
        let mut den = self.denominator();
        let (mut twos, mut fives) = (0u32, 0u32);
        while den.is_multiple_of(2) {
            den /= 2;
            twos += 1;
        }
        while den.is_multiple_of(5) {
            den /= 5;
            fives += 1;
        }
        if den != 1 {
            return None;
        }
        let digits = twos.max(fives);
        let scale = 10u128.checked_pow(digits)?;
        let scaled = (self.numerator() as u128).checked_mul(scale / self.denominator() as u128)?;
        let int_part = scaled / scale;
        let frac_part = scaled % scale;
        if digits == 0 || frac_part == 0 {
            return Some(int_part.to_string());
        }
        let frac = format!("{:0width$}", frac_part, width = digits as usize);
        Some(format!("{int_part}.{}", frac.trim_end_matches('0')))
    }
}

impl fmt::Display for RationalTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_decimal() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}", self.to_f64()),
        }
    }
}

impl FromStr for RationalTime {
    type Err = TimeError;

    /// Accepts decimal literals (`0.1`, `35`, `1e-3`) and fractions (`1/10`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let invalid = || TimeError::InvalidLiteral(s.to_string());
        let overflow = || TimeError::OutOfRange(s.to_string());
        if text.starts_with('-') {
            return Err(TimeError::Negative(s.to_string()));
        }
        let text = text.strip_prefix('+').unwrap_or(text);
        if let Some((n, d)) = text.split_once('/') {
            let n: u64 = n.trim().parse().map_err(|_| invalid())?;
            let d: u64 = d.trim().parse().map_err(|_| invalid())?;
            return Self::new(n, d);
        }

        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(pos) => {
                let exp: i32 = text[pos + 1..].parse().map_err(|_| invalid())?;
                (&text[..pos], exp)
            }
            None => (text, 0),
        };
        let (int_digits, frac_digits) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(invalid());
        }
        if !int_digits.chars().chain(frac_digits.chars()).all(|c| c.is_ascii_digit()) {
            return Err(invalid());
        }
        let digits = format!("{int_digits}{frac_digits}");
        let digits = digits.trim_start_matches('0');
        let mut numer: u128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| overflow())? };
        let mut exp10 = exponent - frac_digits.len() as i32;
        let mut denom: u128 = 1;
        if numer == 0 {
            return Ok(Self::ZERO);
        }
        while exp10 > 0 {
            numer = numer.checked_mul(10).ok_or_else(overflow)?;
            exp10 -= 1;
        }
        while exp10 < 0 {
            denom = denom.checked_mul(10).ok_or_else(overflow)?;
            exp10 += 1;
        }
        let g = numer.gcd(&denom);
        let (numer, denom) = (numer / g, denom / g);
        let numer = u64::try_from(numer).map_err(|_| overflow())?;
        let denom = u64::try_from(denom).map_err(|_| overflow())?;
        Self::new(numer, denom)
    }
}

impl Add for RationalTime {
    type Output = RationalTime;

    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("rational time overflow")
    }
}

impl Sub for RationalTime {
    type Output = RationalTime;

    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("rational time underflow")
    }
}

impl Mul<u64> for RationalTime {
    type Output = RationalTime;

    fn mul(self, rhs: u64) -> Self {
        self.checked_mul_int(rhs).expect("rational time overflow")
    }
}

impl Mul for RationalTime {
    type Output = RationalTime;

    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("rational time overflow")
    }
}

impl Serialize for RationalTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.to_decimal() {
            Some(s) => serializer.serialize_str(&s),
            None => serializer.serialize_str(&format!("{}/{}", self.numerator(), self.denominator())),
        }
    }
}

impl<'de> Deserialize<'de> for RationalTime {
    /// Accepts a string (`"0.1"`, `"1/10"`) or a plain number.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(u64),
            Float(f64),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse(),
            Repr::Int(n) => Ok(RationalTime::from_secs(n)),
            Repr::Float(x) => RationalTime::from_f64(x),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}
