//! Exact rational helpers on top of `num_rational::BigRational`.
//!
//! Parsing accepts `a/b`, integers, decimals and scientific notation so
//! that printed constants such as `15.093` or `1e-3` convert to their exact
//! rational value.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `a/b`, `-12`, `0.039`, `1.5e-3`.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| err())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{whole}{frac}");
    let mut num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| err())? };
    if neg {
        num = -num;
    }
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Canonical `n/d` or `n` string.
pub fn to_string(r: &Rational) -> String {
    r.to_string()
}

/// Always `n/d`, including `n/1`; used where the slash marks exactness.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    match r.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            // Huge numerators and denominators: scale both down.
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Exact value of a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite float")
}

/// Simplest rational (smallest denominator) within `|x - q| <= rel * max(|x|, 1)`.
pub fn approximate_f64(x: f64, rel: f64) -> Rational {
    let tol = rel * x.abs().max(1.0);
    let lo = from_f64(x - tol);
    let hi = from_f64(x + tol);
    simplest_between(&lo, &hi)
}

/// The rational with smallest denominator in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo <= hi, "empty interval");
    if lo.is_positive() {
        simplest_positive(lo, hi)
    } else if hi.is_negative() {
        -simplest_positive(&-hi, &-lo)
    } else {
        Rational::zero()
    }
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    // Continued fraction descent on 0 < lo <= hi.
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if fl + Rational::one() <= *hi {
        return lo.floor() + Rational::one();
    }
    let whole = lo.floor();
    let a = hi - &whole;
    let b = lo - &whole;
    // 1/a <= 1/(x - whole) <= 1/b
    let inner = simplest_positive(&a.recip(), &b.recip());
    whole + inner.recip()
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Lower and upper rational bounds on `sqrt(r)` whose gap is at most `2^-bits`.
pub fn sqrt_enclosure(r: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!r.is_negative(), "square root of a negative rational");
    if r.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    if let Some(s) = exact_sqrt(r) {
        return (s.clone(), s);
    }
    // sqrt(n/d) = sqrt(n d) / d; scale by 2^bits.
    let n = r.numer();
    let d = r.denom();
    let scale = BigInt::one() << (bits as usize);
    let radicand = n * d * &scale * &scale;
    let root = radicand.sqrt();
    let den = d * &scale;
    let lo = Rational::new(root.clone(), den.clone());
    let hi = Rational::new(root + BigInt::one(), den);
    (lo, hi)
}

/// `Some(s)` when `r = s^2` for a non-negative rational `s`.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Sign of a rational as -1, 0, 1.
pub fn sign(r: &Rational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn cmp_abs(a: &Rational, b: &Rational) -> Ordering {
    a.abs().cmp(&b.abs())
}

/// lcm of denominators; multiplying by it clears all fractions.
pub fn denominator_lcm<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Display wrapper printing a rational as a decimal with `digits` places.
pub struct Decimal<'a>(pub &'a Rational, pub usize);

impl fmt::Display for Decimal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = num_traits::pow(BigInt::from(10), self.1);
        let scaled = self.0 * Rational::from_integer(scale.clone());
        let rounded = scaled.round().to_integer();
        let neg = rounded.is_negative();
        let abs = rounded.abs();
        let (q, r) = abs.div_rem(&scale);
        if neg {
            write!(f, "-")?;
        }
        if self.1 == 0 {
            write!(f, "{q}")
        } else {
            write!(f, "{q}.{:0>width$}", r.to_string(), width = self.1)
        }
    }
}

/// Serde adapters: rationals travel as strings.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&to_string(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| parse(&s).map_err(serde::de::Error::custom)).transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&to_string(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| parse(s).map_err(serde::de::Error::custom)).collect()
        }
    }
}
