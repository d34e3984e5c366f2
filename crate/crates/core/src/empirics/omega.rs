//! Large coefficients from many moderately large prime values.
//!
//! `N = ∏ p` over primes `p ∈ (x, 2x]` with `|a(p)| ≥ δ` gives
//! `|a(N)| = ∏ |a(p)| ≥ δ^T`. `N` is never formed; everything is carried
//! in log space.

use serde::{Deserialize, Serialize};

use super::dataset::{DataError, EigenvalueDataset, Values};
use super::scans;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OmegaError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("no prime in ({0}, {1}] has |a(p)| >= delta")]
    NoQualifyingPrimes(u64, u64),
    #[error("delta {delta} is invalid: {reason}")]
    InvalidDelta { delta: f64, reason: String },
    #[error("no prime with a(q) < 0 in the dataset")]
    NoNegativePrime,
    #[error("a({0}) = 0; the witness has no sign")]
    ZeroCoefficient(u64),
}

/// `2^{1/8}`.
pub fn default_delta() -> f64 {
    2f64.powf(0.125)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaWitness {
    pub x: u64,
    pub delta: f64,
    /// `T`, the number of selected primes.
    pub selected_primes: u64,
    pub primes: Vec<u64>,
    pub window_count: u64,
    pub log_n: f64,
    pub log_abs_an: f64,
    /// `log|a(N)| · log log N / log N`.
    pub realized_c: f64,
    /// Mean of `a(p)⁴` over the window and its standard error.
    pub fourth_moment: f64,
    pub fourth_moment_se: f64,
    /// Whether `δ⁴ < 2`, the stricter admissible range.
    pub delta_below_strict: bool,
    /// Primes `p` in the window with `|a(p)| > exp(c0·log p / log log p)`.
    pub direct_witnesses: Vec<u64>,
}

/// Builds the `N` of the window `(x, 2x]`. Requires `δ > 1` and
/// `δ⁴ <` the window's measured fourth moment.
pub fn omega_construct(
    d: &EigenvalueDataset,
    x: u64,
    delta: f64,
    c0_cap: Option<f64>,
) -> Result<OmegaWitness, OmegaError> {
    let (lo, hi) = (x + 1, 2 * x);
    d.check_covers(lo, hi)?;
    if delta.is_nan() || delta <= 1.0 {
        return Err(OmegaError::InvalidDelta { delta, reason: "must exceed 1".into() });
    }
    let range = d.window(lo, hi);
    let ln_delta = delta.ln();
    let mut chosen = Vec::new();
    let mut excess = 0.0;
    let mut log_n = 0.0;
    let mut direct = Vec::new();
    for i in range.clone() {
        let p = d.primes()[i];
        let a = match d.values() {
            Values::Float(v) => v[i].abs(),
            Values::Exact(_) => d.f64_at(i).abs(),
        };
        if let Some(c0) = c0_cap {
            let lp = (p as f64).ln();
            if lp.ln() > 0.0 && a > (c0 * lp / lp.ln()).exp() {
                direct.push(p);
            }
        }
        if a >= delta {
            // fl(a/δ) ≥ 1, so each excess term is ≥ 0.
            excess += (a / delta).ln();
            log_n += (p as f64).ln();
            chosen.push(p);
        }
    }
    let t = chosen.len() as u64;
    if t == 0 {
        return Err(OmegaError::NoQualifyingPrimes(x, hi));
    }
    let m4 = scans::empirical_moment(d, 4, lo, hi)?;
    let d4 = delta.powi(4);
    if d4 >= m4.mean {
        return Err(OmegaError::InvalidDelta {
            delta,
            reason: format!("delta^4 = {d4} is not below the measured fourth moment {}", m4.mean),
        });
    }
    let floor = t as f64 * ln_delta;
    let log_abs_an = floor + excess;
    debug_assert!(log_abs_an >= floor);
    Ok(OmegaWitness {
        x,
        delta,
        selected_primes: t,
        primes: chosen,
        window_count: range.len() as u64,
        log_n,
        log_abs_an,
        realized_c: log_abs_an * log_n.ln() / log_n,
        fourth_moment: m4.mean,
        fourth_moment_se: m4.std_error,
        delta_below_strict: d4 < 2.0,
        direct_witnesses: direct,
    })
}

/// A witness `m` and its sign-flipped partner `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedWitnessPair {
    pub q: u64,
    pub a_q: f64,
    pub m_sign: i8,
    pub log_abs_am: f64,
    /// `n = q·m` when `q ∤ m`, else `m/q`.
    pub n_primes: Vec<u64>,
    pub n_sign: i8,
    pub log_abs_an: f64,
    pub multiplied: bool,
    /// `log|a(n)| ≥ log|a(m)| − |log|a(q)||`.
    pub magnitude_ok: bool,
}

/// For square-free `m` (its prime list), flips the sign of `a(m)` using the
/// smallest prime `q` with `a(q) < 0`.
pub fn omega_pm_transform(m_primes: &[u64], d: &EigenvalueDataset) -> Result<SignedWitnessPair, OmegaError> {
    let qi = (0..d.len()).find(|&i| d.f64_at(i) < 0.0).ok_or(OmegaError::NoNegativePrime)?;
    let q = d.primes()[qi];
    let a_q = d.f64_at(qi);
    let mut sign = 1i8;
    let mut log_abs_am = 0.0;
    for &p in m_primes {
        let a = d.get(p).ok_or(DataError::MissingPrime(p))?.to_f64();
        if a == 0.0 {
            return Err(OmegaError::ZeroCoefficient(p));
        }
        if a < 0.0 {
            sign = -sign;
        }
        log_abs_am += a.abs().ln();
    }
    let lq = a_q.abs().ln();
    let multiplied = !m_primes.contains(&q);
    let (n_primes, log_abs_an) = if multiplied {
        let mut v = m_primes.to_vec();
        let at = v.partition_point(|&p| p < q);
        v.insert(at, q);
        (v, log_abs_am + lq)
    } else {
        (m_primes.iter().copied().filter(|&p| p != q).collect(), log_abs_am - lq)
    };
    Ok(SignedWitnessPair {
        q,
        a_q,
        m_sign: sign,
        log_abs_am,
        n_primes,
        n_sign: -sign,
        log_abs_an,
        multiplied,
        magnitude_ok: log_abs_an >= log_abs_am - lq.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirics::dataset::{coefficient_at, Source};
    use crate::empirics::primes;

    fn data(values: Vec<f64>) -> EigenvalueDataset {
        let ps = primes::first_primes(values.len()).unwrap();
        EigenvalueDataset::new(ps, Values::Float(values), Source::Ingested { digest: String::new() })
    }

    #[test]
    fn no_qualifying_primes() {
        let small = data(vec![0.5; 40]);
        assert!(matches!(omega_construct(&small, 20, default_delta(), None), Err(OmegaError::NoQualifyingPrimes(..))));
        let big = data(vec![2.0; 40]);
        let w = omega_construct(&big, 20, default_delta(), None).unwrap();
        assert_eq!(w.primes, vec![23, 29, 31, 37]);
        assert!(w.log_abs_an >= w.selected_primes as f64 * default_delta().ln());
        assert!(matches!(omega_construct(&big, 20, 1.0, None), Err(OmegaError::InvalidDelta { .. })));
        // δ⁴ equals the measured moment, so it is not below it.
        let flat = data(vec![1.5; 40]);
        assert!(matches!(omega_construct(&flat, 20, 1.5, None), Err(OmegaError::InvalidDelta { .. })));
    }

    #[test]
    fn sign_flip_cases() {
        let d = data(vec![1.5, -0.5, 1.25, -1.75, 1.1]);
        // q = 3 is the first negative prime.
        let coprime = omega_pm_transform(&[2, 5], &d).unwrap();
        assert_eq!(coprime.q, 3);
        assert!(coprime.multiplied && coprime.n_primes == vec![2, 3, 5]);
        let n: u64 = coprime.n_primes.iter().product();
        assert!(coefficient_at(n, &d).unwrap().to_f64() < 0.0);
        assert!(coprime.magnitude_ok);
        let divides = omega_pm_transform(&[2, 3, 5], &d).unwrap();
        assert!(!divides.multiplied && divides.n_primes == vec![2, 5]);
        assert_eq!(divides.m_sign, -1);
        assert_eq!(divides.n_sign, 1);
        assert!(divides.magnitude_ok);
        assert!(matches!(omega_pm_transform(&[2], &data(vec![1.0, 2.0])), Err(OmegaError::NoNegativePrime)));
    }
}
