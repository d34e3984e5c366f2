//! Window statistics over a dataset: region densities, sign scans and
//! empirical moments.

use serde::{Deserialize, Serialize};

use super::dataset::{DataError, EigenvalueDataset, Values};
use crate::rational;
use crate::region::Region;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub count: u64,
    pub total: u64,
    pub ratio: f64,
    pub std_error: f64,
}

fn window_range(d: &EigenvalueDataset, lo: u64, hi: u64) -> Result<std::ops::Range<usize>, DataError> {
    d.check_covers(lo, hi)?;
    let r = d.window(lo, hi);
    if r.is_empty() {
        return Err(DataError::EmptyWindow(lo, hi));
    }
    Ok(r)
}

/// Share of primes in `[lo, hi]` with eigenvalue in `region`; membership
/// is decided exactly, even at irrational endpoints.
pub fn empirical_density(
    d: &EigenvalueDataset,
    region: &Region,
    lo: u64,
    hi: u64,
) -> Result<DensityEstimate, DataError> {
    let r = window_range(d, lo, hi)?;
    let count = match d.values() {
        Values::Float(v) => v[r.clone()].iter().filter(|&&x| region.contains_f64(x)).count(),
        Values::Exact(v) => v[r.clone()].iter().filter(|x| region.contains_rational(x)).count(),
    } as u64;
    let total = r.len() as u64;
    let ratio = count as f64 / total as f64;
    Ok(DensityEstimate { count, total, ratio, std_error: (ratio * (1.0 - ratio) / total as f64).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Transform {
    Identity,
    /// `a(p)² − 1`.
    Sym2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignScan {
    pub first_negative_prime: Option<u64>,
    pub first_positive_prime: Option<u64>,
    /// Sign changes between consecutive nonzero values.
    pub change_count: u64,
    /// Smallest prime with `|a(p)| < 1` (of the untransformed value).
    pub first_small_prime: Option<u64>,
}

pub fn sign_change_scan(d: &EigenvalueDataset, transform: Transform, lo: u64, hi: u64) -> Result<SignScan, DataError> {
    let r = d.window(lo, hi);
    if r.is_empty() {
        return Err(DataError::EmptyWindow(lo, hi));
    }
    let mut scan =
        SignScan { first_negative_prime: None, first_positive_prime: None, change_count: 0, first_small_prime: None };
    let mut last = 0i8;
    for i in r {
        let p = d.primes()[i];
        let (sign, small) = match d.values() {
            Values::Float(v) => {
                let a = v[i];
                let t = match transform {
                    Transform::Identity => a,
                    Transform::Sym2 => a * a - 1.0,
                };
                (
                    if t > 0.0 {
                        1
                    } else if t < 0.0 {
                        -1
                    } else {
                        0
                    },
                    a.abs() < 1.0,
                )
            }
            Values::Exact(v) => {
                let a = &v[i];
                let t = match transform {
                    Transform::Identity => a.clone(),
                    Transform::Sym2 => a * a - rational::int(1),
                };
                (rational::sign(&t), a * a < rational::int(1))
            }
        };
        if small && scan.first_small_prime.is_none() {
            scan.first_small_prime = Some(p);
        }
        match sign {
            1 => {
                scan.first_positive_prime.get_or_insert(p);
            }
            -1 => {
                scan.first_negative_prime.get_or_insert(p);
            }
            _ => continue,
        }
        if last != 0 && sign != last {
            scan.change_count += 1;
        }
        last = sign;
    }
    Ok(scan)
}

/// Sample mean and standard error of `a(p)^k` over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: u32,
    pub count: u64,
    pub mean: f64,
    pub std_error: f64,
}

pub fn empirical_moment(d: &EigenvalueDataset, k: u32, lo: u64, hi: u64) -> Result<MomentEstimate, DataError> {
    let r = d.window(lo, hi);
    if r.is_empty() {
        return Err(DataError::EmptyWindow(lo, hi));
    }
    let n = r.len() as f64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for i in r.clone() {
        let x = d.f64_at(i).powi(k as i32);
        s1 += x;
        s2 += x * x;
    }
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok(MomentEstimate { k, count: r.len() as u64, mean, std_error: (var / n).sqrt() })
}
