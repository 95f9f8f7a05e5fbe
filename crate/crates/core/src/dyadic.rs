//! Exact dyadic rationals `m / 2^e`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A dyadic rational `num / 2^exp`, kept in lowest terms.
///
/// Zero is always `0 / 2^0`; otherwise `num` is odd whenever `exp > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i64, exp: u32) -> Self {
        Self::normalized(num as i128, exp)
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n, exp: 0 }
    }

    /// `2^{-exp}`, the side length of a level-`exp` cell.
    pub fn pow2_neg(exp: u32) -> Self {
        Dyadic { num: 1, exp }
    }

    fn normalized(mut num: i128, mut exp: u32) -> Self {
        if num == 0 {
            return Dyadic::ZERO;
        }
        let tz = num.trailing_zeros().min(exp);
        num >>= tz;
        exp -= tz;
        let num = i64::try_from(num).expect("dyadic numerator overflow");
        Dyadic { num, exp }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn abs(self) -> Self {
        Dyadic { num: self.num.abs(), exp: self.exp }
    }

    pub fn half(self) -> Self {
        Self::normalized(self.num as i128, self.exp + 1)
    }

    /// Numerator over the common denominator `2^exp`; `exp` must be at least `self.exp`.
    pub fn scaled_to(&self, exp: u32) -> i128 {
        debug_assert!(exp >= self.exp);
        (self.num as i128) << (exp - self.exp)
    }

    pub fn mul_int(self, k: i64) -> Self {
        Self::normalized(self.num as i128 * k as i128, self.exp)
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (self.exp as f64).exp2()
    }

    /// Exact finite decimal expansion (every dyadic rational has one).
    pub fn to_decimal(&self) -> String {
        if self.exp == 0 {
            return self.num.to_string();
        }
        let neg = self.num < 0;
        let mag = self.num.unsigned_abs() as u128;
        let int_part = mag >> self.exp;
        let mut frac = mag & ((1u128 << self.exp) - 1);
        let mut digits = String::new();
        // Each step multiplies by 10 and peels one decimal digit; exp steps suffice.
        for _ in 0..self.exp {
            if frac == 0 {
                break;
            }
            frac *= 10;
            digits.push(char::from(b'0' + (frac >> self.exp) as u8));
            frac &= (1u128 << self.exp) - 1;
        }
        format!("{}{}.{}", if neg { "-" } else { "" }, int_part, digits)
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::ZERO
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.scaled_to(e).cmp(&other.scaled_to(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Self) -> Self {
        let e = self.exp.max(rhs.exp);
        Self::normalized(self.scaled_to(e) + rhs.scaled_to(e), e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Self) -> Self {
        let e = self.exp.max(rhs.exp);
        Self::normalized(self.scaled_to(e) - rhs.scaled_to(e), e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Self) -> Self {
        Self::normalized(self.num as i128 * rhs.num as i128, self.exp + rhs.exp)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Self {
        Dyadic { num: -self.num, exp: self.exp }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    /// Accepts `p`, `p/2^q` and `p/d` with `d` a power of two.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            None => s.parse::<i64>().map(Dyadic::from_int).map_err(|_| bad()),
            Some((p, d)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let d = d.trim();
                let exp = if let Some(q) = d.strip_prefix("2^") {
                    q.parse::<u32>().map_err(|_| bad())?
                } else {
                    let d: u64 = d.parse().map_err(|_| bad())?;
                    if d == 0 || !d.is_power_of_two() {
                        return Err(bad());
                    }
                    d.trailing_zeros()
                };
                if exp > 62 {
                    return Err(bad());
                }
                Ok(Dyadic::new(p, exp))
            }
        }
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
