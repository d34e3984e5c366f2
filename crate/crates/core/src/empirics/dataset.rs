//! Prime-indexed eigenvalue datasets, CSV ingest/export, and the
//! multiplicative extension to all `n`.

use std::fmt;
use std::path::Path;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::primes;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: {value} is not prime")]
    NonPrimeIndex { line: usize, value: u64 },
    #[error("line {line}: prime {prime} appears twice")]
    DuplicatePrime { line: usize, prime: u64 },
    #[error("prime {0} is missing from the dataset")]
    MissingPrime(u64),
    #[error("window [{0}, {1}] contains no dataset primes")]
    EmptyWindow(u64, u64),
    #[error("window [{lo}, {hi}] is not covered by the dataset range [{min}, {max}]")]
    WindowNotCovered { lo: u64, hi: u64, min: u64, max: u64 },
    #[error("io error: {0}")]
    Io(String),
    #[error("{0}")]
    Sieve(#[from] primes::SieveCapExceeded),
}

/// One eigenvalue: binary float or exact rational.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Exact(Rational),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Float(x) => *x,
            Value::Exact(r) => rational::to_f64(r),
        }
    }

    pub fn signum(&self) -> i8 {
        match self {
            Value::Float(x) if *x > 0.0 => 1,
            Value::Float(x) if *x < 0.0 => -1,
            Value::Float(_) => 0,
            Value::Exact(r) => rational::sign(r),
        }
    }

    fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Float(self.to_f64() * other.to_f64()),
        }
    }

    fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Float(self.to_f64() - other.to_f64()),
        }
    }

    fn one_like(&self) -> Value {
        match self {
            Value::Exact(_) => Value::Exact(Rational::one()),
            Value::Float(_) => Value::Float(1.0),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x}"),
            Value::Exact(r) => f.write_str(&rational::to_fraction_string(r)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Float(Vec<f64>),
    Exact(Vec<Rational>),
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Sampled { seed: u64, generator: String },
    Ingested { digest: String },
    Transformed { transform: String, from: Box<Source> },
}

/// Primes, strictly increasing, with one value each.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueDataset {
    primes: Vec<u64>,
    values: Values,
    source: Source,
}

impl EigenvalueDataset {
    /// `primes` must be strictly increasing primes and match `values` in length.
    pub fn new(primes: Vec<u64>, values: Values, source: Source) -> Self {
        let n = match &values {
            Values::Float(v) => v.len(),
            Values::Exact(v) => v.len(),
        };
        assert_eq!(primes.len(), n, "one value per prime");
        assert!(primes.windows(2).all(|w| w[0] < w[1]), "primes strictly increasing");
        Self { primes, values, source }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.values, Values::Exact(_))
    }

    /// `[first prime, last prime]`.
    pub fn range(&self) -> Option<(u64, u64)> {
        Some((*self.primes.first()?, *self.primes.last()?))
    }

    pub fn value_at(&self, i: usize) -> Value {
        match &self.values {
            Values::Float(v) => Value::Float(v[i]),
            Values::Exact(v) => Value::Exact(v[i].clone()),
        }
    }

    pub fn f64_at(&self, i: usize) -> f64 {
        match &self.values {
            Values::Float(v) => v[i],
            Values::Exact(v) => rational::to_f64(&v[i]),
        }
    }

    pub fn get(&self, p: u64) -> Option<Value> {
        self.primes.binary_search(&p).ok().map(|i| self.value_at(i))
    }

    /// Index range of dataset primes in `[lo, hi]`.
    pub fn window(&self, lo: u64, hi: u64) -> std::ops::Range<usize> {
        let a = self.primes.partition_point(|&p| p < lo);
        let b = self.primes.partition_point(|&p| p <= hi);
        a..b.max(a)
    }

    /// Checks every prime of `[lo, hi]` lies inside the dataset range.
    pub fn check_covers(&self, lo: u64, hi: u64) -> Result<(), DataError> {
        let (min, max) = self.range().ok_or(DataError::EmptyWindow(lo, hi))?;
        let first = primes::next_prime(lo);
        let last = primes::prev_prime(hi);
        let ok = match last {
            Some(last) if first <= last => min <= first && last <= max,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(DataError::WindowNotCovered { lo, hi, min, max })
        }
    }

    /// Same primes, values `a(p)² − 1` (the symmetric-square eigenvalues).
    pub fn sym2(&self) -> EigenvalueDataset {
        let values = match &self.values {
            Values::Float(v) => Values::Float(v.iter().map(|a| a * a - 1.0).collect()),
            Values::Exact(v) => Values::Exact(v.iter().map(|a| a * a - Rational::one()).collect()),
        };
        EigenvalueDataset {
            primes: self.primes.clone(),
            values,
            source: Source::Transformed { transform: "sym2".into(), from: Box::new(self.source.clone()) },
        }
    }
}

/// `a(n)` by multiplicativity, with `u_{j+1} = a(p)·u_j − u_{j−1}` on prime powers.
pub fn coefficient_at(n: u64, d: &EigenvalueDataset) -> Result<Value, DataError> {
    assert!(n >= 1, "coefficients are indexed from 1");
    let unit = if d.is_exact() { Value::Exact(Rational::one()) } else { Value::Float(1.0) };
    let mut acc = unit;
    for (p, e) in primes::factorize(n) {
        let a = d.get(p).ok_or(DataError::MissingPrime(p))?;
        acc = acc.mul(&prime_power_value(&a, e));
    }
    Ok(acc)
}

/// `u_e` for `u_0 = 1`, `u_1 = a`.
pub fn prime_power_value(a: &Value, e: u32) -> Value {
    let mut prev = a.one_like();
    if e == 0 {
        return prev;
    }
    let mut cur = a.clone();
    for _ in 1..e {
        let next = a.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

fn parse_value(s: &str) -> Option<Result<Rational, f64>> {
    if s.contains('/') {
        let r = rational::parse(s).ok()?;
        return Some(Ok(r));
    }
    let x: f64 = s.parse().ok()?;
    x.is_finite().then_some(Err(x))
}

/// Parses the `p,value` records; all-rational files stay exact.
pub fn parse_csv(bytes: &[u8], digest: String) -> Result<EigenvalueDataset, DataError> {
    let text = std::str::from_utf8(bytes).map_err(|e| DataError::ParseError {
        line: 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count(),
        message: "not valid ASCII".into(),
    })?;
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut rows: Vec<(u64, Result<Rational, f64>, usize)> = Vec::new();
    if !body.is_empty() {
        for (i, raw) in body.split('\n').enumerate() {
            let line = i + 1;
            let bad = |message: &str| DataError::ParseError { line, message: message.to_string() };
            if !raw.is_ascii() {
                return Err(bad("not ASCII"));
            }
            let (p, v) = raw.split_once(',').ok_or_else(|| bad("expected `p,value`"))?;
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad(&format!("invalid index `{p}`")));
            }
            let p: u64 = p.parse().map_err(|_| bad(&format!("index `{p}` out of range")))?;
            let v = parse_value(v).ok_or_else(|| bad(&format!("invalid value `{v}`")))?;
            if !primes::is_prime(p) {
                return Err(DataError::NonPrimeIndex { line, value: p });
            }
            rows.push((p, v, line));
        }
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| (rows[i].0, rows[i].2));
    for w in order.windows(2) {
        if rows[w[0]].0 == rows[w[1]].0 {
            let later = rows[w[0]].2.max(rows[w[1]].2);
            return Err(DataError::DuplicatePrime { line: later, prime: rows[w[0]].0 });
        }
    }
    let exact = !rows.is_empty() && rows.iter().all(|r| r.1.is_ok());
    let primes: Vec<u64> = order.iter().map(|&i| rows[i].0).collect();
    let values = if exact {
        Values::Exact(order.iter().map(|&i| rows[i].1.clone().unwrap()).collect())
    } else {
        Values::Float(
            order
                .iter()
                .map(|&i| match &rows[i].1 {
                    Ok(r) => rational::to_f64(r),
                    Err(x) => *x,
                })
                .collect(),
        )
    };
    Ok(EigenvalueDataset::new(primes, values, Source::Ingested { digest }))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn ingest_csv(path: impl AsRef<Path>) -> Result<EigenvalueDataset, DataError> {
    let bytes = std::fs::read(path.as_ref()).map_err(|e| DataError::Io(format!("{}: {e}", path.as_ref().display())))?;
    let digest = sha256_hex(&bytes);
    parse_csv(&bytes, digest)
}

/// Inverse of `parse_csv`: shortest round-trip floats, exact values as `n/d`.
pub fn export_csv(d: &EigenvalueDataset) -> String {
    let mut out = String::with_capacity(d.len() * 24);
    for i in 0..d.len() {
        let v = match &d.values {
            Values::Float(v) => format!("{:?}", v[i]),
            Values::Exact(v) => rational::to_fraction_string(&v[i]),
        };
        out.push_str(&d.primes[i].to_string());
        out.push(',');
        out.push_str(&v);
        out.push('\n');
    }
    out
}

pub fn write_csv(d: &EigenvalueDataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    std::fs::write(path.as_ref(), export_csv(d)).map_err(|e| DataError::Io(e.to_string()))
}

impl Values {
    pub fn is_zero_at(&self, i: usize) -> bool {
        match self {
            Values::Float(v) => v[i] == 0.0,
            Values::Exact(v) => v[i].is_zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<EigenvalueDataset, DataError> {
        parse_csv(s.as_bytes(), sha256_hex(s.as_bytes()))
    }

    #[test]
    fn ingest_examples() {
        let d = parse("2,-0.5\n3,1.25\n").unwrap();
        assert_eq!(d.primes(), &[2, 3]);
        assert_eq!(d.get(2), Some(Value::Float(-0.5)));
        assert_eq!(d.get(3), Some(Value::Float(1.25)));
        assert_eq!(parse("4,1.0\n"), Err(DataError::NonPrimeIndex { line: 1, value: 4 }));
        assert_eq!(parse("2,1\n3,1\n2,0\n"), Err(DataError::DuplicatePrime { line: 3, prime: 2 }));
        assert!(matches!(parse("2,x\n"), Err(DataError::ParseError { line: 1, .. })));
        assert!(matches!(parse("2,1\n\n"), Err(DataError::ParseError { line: 2, .. })));
        assert!(matches!(parse("2,nan\n"), Err(DataError::ParseError { .. })));
        assert!(parse("2,1\n3,2").is_ok());
    }

    #[test]
    fn exact_files_stay_exact() {
        let d = parse("2,1/3\n5,-7/2\n3,0/1\n").unwrap();
        assert!(d.is_exact());
        assert_eq!(d.primes(), &[2, 3, 5]);
        assert_eq!(export_csv(&d), "2,1/3\n3,0/1\n5,-7/2\n");
        let mixed = parse("2,1/4\n3,0.5\n").unwrap();
        assert!(!mixed.is_exact());
        assert_eq!(mixed.get(2), Some(Value::Float(0.25)));
    }

    #[test]
    fn export_round_trip() {
        let d = parse("2,-0.5\n3,1.25\n7,0.1\n11,-1.9999999999999998\n").unwrap();
        let s = export_csv(&d);
        let back = parse(&s).unwrap();
        assert_eq!(back.values(), d.values());
        assert_eq!(back.primes(), d.primes());
    }

    #[test]
    fn hecke_relation_examples() {
        let d = EigenvalueDataset::new(
            vec![2, 3],
            Values::Exact(vec![rational::ratio(1, 2), rational::int(-1)]),
            Source::Ingested { digest: String::new() },
        );
        let a2 = rational::ratio(1, 2);
        assert_eq!(coefficient_at(4, &d).unwrap(), Value::Exact(&a2 * &a2 - rational::int(1)));
        assert_eq!(coefficient_at(8, &d).unwrap(), Value::Exact(&a2 * &a2 * &a2 - &a2 * rational::int(2)));
        assert_eq!(coefficient_at(6, &d).unwrap(), Value::Exact(rational::ratio(-1, 2)));
        assert_eq!(coefficient_at(1, &d).unwrap(), Value::Exact(rational::int(1)));
        assert_eq!(coefficient_at(10, &d), Err(DataError::MissingPrime(5)));
    }

    #[test]
    fn coverage() {
        let d = EigenvalueDataset::new(
            vec![2, 3, 5, 7],
            Values::Float(vec![0.0; 4]),
            Source::Ingested { digest: String::new() },
        );
        assert!(d.check_covers(1, 10).is_ok());
        assert!(d.check_covers(1, 11).is_err());
        assert_eq!(d.window(3, 6), 1..3);
    }
}
