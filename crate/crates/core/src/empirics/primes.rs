//! Prime enumeration: a segmented sieve of Eratosthenes plus a
//! deterministic Miller–Rabin test for single 64-bit values.

/// Largest bound the sieve accepts.
pub const SIEVE_CAP: u64 = 200_000_000;

const SEGMENT: u64 = 1 << 18;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("sieve bound {0} exceeds the cap {SIEVE_CAP}")]
pub struct SieveCapExceeded(pub u64);

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>, SieveCapExceeded> {
    if hi > SIEVE_CAP {
        return Err(SieveCapExceeded(hi));
    }
    let lo = lo.max(2);
    if hi < lo {
        return Ok(Vec::new());
    }
    let base = small_primes(hi.isqrt());
    let mut out = Vec::new();
    let mut start = lo;
    let mut marks = vec![false; SEGMENT as usize];
    while start <= hi {
        let end = (start + SEGMENT - 1).min(hi);
        let len = (end - start + 1) as usize;
        marks[..len].fill(false);
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut m = (start.div_ceil(p) * p).max(p * p);
            while m <= end {
                marks[(m - start) as usize] = true;
                m += p;
            }
        }
        out.extend((0..len).filter(|&i| !marks[i]).map(|i| start + i as u64));
        start = end + 1;
    }
    Ok(out)
}

pub fn primes_up_to(n: u64) -> Result<Vec<u64>, SieveCapExceeded> {
    primes_in(2, n)
}

/// The first `n` primes.
pub fn first_primes(n: usize) -> Result<Vec<u64>, SieveCapExceeded> {
    if n == 0 {
        return Ok(Vec::new());
    }
    // p_n < n(ln n + ln ln n) for n ≥ 6.
    let nf = n.max(6) as f64;
    let bound = (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 10;
    let mut ps = primes_up_to(bound.min(SIEVE_CAP))?;
    if ps.len() < n {
        return Err(SieveCapExceeded(bound));
    }
    ps.truncate(n);
    Ok(ps)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `≥ n`.
pub fn next_prime(n: u64) -> u64 {
    let mut k = n.max(2);
    while !is_prime(k) {
        k += 1;
    }
    k
}

/// Largest prime `≤ n`, if any.
pub fn prev_prime(n: u64) -> Option<u64> {
    (2..=n).rev().find(|&k| is_prime(k))
}

/// Prime factorization as `(p, e)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let ps = primes_in(1, 5000).unwrap();
        let naive: Vec<u64> =
            (2..=5000u64).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect();
        assert_eq!(ps, naive);
        let seg = primes_in(1_000_000, 1_300_000).unwrap();
        assert!(seg.iter().all(|&p| is_prime(p)));
        assert_eq!(primes_up_to(2_000_000).unwrap().len(), 148_933);
    }

    #[test]
    fn first_primes_and_neighbours() {
        assert_eq!(first_primes(5).unwrap(), vec![2, 3, 5, 7, 11]);
        assert_eq!(first_primes(1_000_000).unwrap().last(), Some(&15_485_863));
        assert_eq!(next_prime(1_000_000), 1_000_003);
        assert_eq!(prev_prime(1_000_000), Some(999_983));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
        assert!(primes_up_to(SIEVE_CAP + 1).is_err());
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
        assert!(factorize(1).is_empty());
    }
}
