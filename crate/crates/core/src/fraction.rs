//! Exact rational parameters (α, ε, γ) and the threshold comparisons built on them.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::RecolorError;

/// A non-negative rational number stored in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(Ratio<u64>);

impl Fraction {
    pub fn new(numer: u64, denom: u64) -> Result<Self, RecolorError> {
        if denom == 0 {
            return Err(RecolorError::InvalidParameter("zero denominator".into()));
        }
        Ok(Fraction(Ratio::new(numer, denom)))
    }

    pub const fn half() -> Self {
        Fraction(Ratio::new_raw(1, 2))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// `1 - self`; requires `self <= 1`.
    pub fn complement(&self) -> Self {
        Fraction(Ratio::new(self.denom() - self.numer(), self.denom()))
    }

    /// True iff `self` lies in the open interval (0, 1).
    pub fn is_proper(&self) -> bool {
        self.numer() > 0 && self.numer() < self.denom()
    }

    /// `a / b <= self`, evaluated exactly. `b` must be positive.
    pub fn ratio_le(&self, a: u64, b: u64) -> bool {
        (a as u128) * (self.denom() as u128) <= (self.numer() as u128) * (b as u128)
    }

    /// `count > self * scale`, evaluated exactly.
    pub fn exceeded_by(&self, count: u64, scale: u64) -> bool {
        (count as u128) * (self.denom() as u128) > (self.numer() as u128) * (scale as u128)
    }

    /// `count >= self * scale`, evaluated exactly.
    pub fn reached_by(&self, count: u64, scale: u64) -> bool {
        (count as u128) * (self.denom() as u128) >= (self.numer() as u128) * (scale as u128)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Accepts `"p/q"`, integers and finite decimals such as `"0.25"`.
impl FromStr for Fraction {
    type Err = RecolorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || RecolorError::InvalidParameter(format!("cannot parse {s:?} as a fraction"));
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            return Fraction::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
            let scale = 10u64.pow(frac.len() as u32);
            let frac: u64 = frac.parse().map_err(|_| bad())?;
            let numer = int.checked_mul(scale).and_then(|x| x.checked_add(frac)).ok_or_else(bad)?;
            return Fraction::new(numer, scale);
        }
        let p: u64 = s.parse().map_err(|_| bad())?;
        Fraction::new(p, 1)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(u64),
            Float(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(v) => Ok(Fraction(Ratio::from_integer(v))),
            Repr::Float(v) => format!("{v}").parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Largest integer `m >= 0` with `base^m <= n`, where `base = 1/gamma > 1`.
/// Exact: compares `denom^m <= n * numer^m` with 128-bit integers.
pub fn floor_log_inverse(n: u64, gamma: Fraction) -> u32 {
    assert!(gamma.numer() < gamma.denom() && gamma.numer() > 0, "gamma must lie in (0, 1)");
    let (a, b) = (gamma.numer() as u128, gamma.denom() as u128);
    let mut m = 0u32;
    let (mut pa, mut pb) = (1u128, 1u128);
    loop {
        let (na, nb) = match (pa.checked_mul(a), pb.checked_mul(b)) {
            (Some(x), Some(y)) => (x, y),
            _ => return m,
        };
        match (n as u128).checked_mul(na) {
            Some(rhs) if nb <= rhs => {
                m += 1;
                pa = na;
                pb = nb;
            }
            Some(_) => return m,
            None => {
                // n * a^m overflowed, so it certainly exceeds b^m
                m += 1;
                pa = na;
                pb = nb;
            }
        }
    }
}

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!("1/2".parse::<Fraction>().unwrap(), Fraction::half());
        assert_eq!("0.5".parse::<Fraction>().unwrap(), Fraction::half());
        assert_eq!("0.25".parse::<Fraction>().unwrap(), Fraction::new(1, 4).unwrap());
        assert_eq!("3".parse::<Fraction>().unwrap(), Fraction::new(3, 1).unwrap());
        assert!("1/0".parse::<Fraction>().is_err());
        assert!("abc".parse::<Fraction>().is_err());
    }

    #[test]
    fn boundary_comparisons_are_inclusive_where_stated() {
        let a = Fraction::half();
        assert!(a.ratio_le(4, 8));
        assert!(!a.ratio_le(5, 8));
        assert!(!a.exceeded_by(2, 4));
        assert!(a.exceeded_by(3, 4));
    }

    #[test]
    fn floor_log_inverse_matches_powers() {
        let quarter = Fraction::new(1, 4).unwrap();
        assert_eq!(floor_log_inverse(1, quarter), 0);
        assert_eq!(floor_log_inverse(3, quarter), 0);
        assert_eq!(floor_log_inverse(4, quarter), 1);
        assert_eq!(floor_log_inverse(4096, quarter), 6);
        assert_eq!(floor_log_inverse(4095, quarter), 5);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(256), 8);
    }
}
