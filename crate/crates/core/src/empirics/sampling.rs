//! Reproducible Sato-Tate samples.
//!
//! Generator: ChaCha8 seeded from the 64-bit seed, on stream `i` for the
//! `i`-th prime. A draw is a pair `(u, v)` uniform on `[−1, 1) × [0, 1)`,
//! accepted when `u² + v² ≤ 1` (rate π/4); the value is `2u`. No
//! transcendental functions are involved, so samples are bit-identical on
//! every IEEE-754 platform and independent of how indices are sharded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dataset::{DataError, EigenvalueDataset, Source, Values};
use super::primes;

pub const GENERATOR_ID: &str = "chacha8-stream-per-index/semicircle-rejection-v1";

/// The sample for prime index `i`.
pub fn semicircle_draw(seed: u64, i: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    loop {
        let u = 2.0 * rng.random::<f64>() - 1.0;
        let v = rng.random::<f64>();
        if u * u + v * v <= 1.0 {
            return 2.0 * u;
        }
    }
}

/// Draws for indices `0..n`, computed in `shards` contiguous pieces.
pub fn semicircle_values(n: usize, seed: u64, shards: usize) -> Vec<f64> {
    let shards = shards.max(1);
    let chunk = n.div_ceil(shards).max(1);
    let parts: Vec<Vec<f64>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let lo = (s * chunk).min(n);
            let hi = ((s + 1) * chunk).min(n);
            (lo..hi).map(|i| semicircle_draw(seed, i as u64)).collect()
        })
        .collect();
    parts.concat()
}

fn default_shards() -> usize {
    rayon::current_num_threads() * 4
}

/// Sato-Tate values on the first `n` primes.
pub fn sample_sato_tate(n: usize, seed: u64) -> Result<EigenvalueDataset, DataError> {
    let ps = primes::first_primes(n)?;
    let values = semicircle_values(n, seed, default_shards());
    Ok(EigenvalueDataset::new(ps, Values::Float(values), sampled(seed)))
}

/// Sato-Tate values on every prime `≤ x_max`; agrees with `sample_sato_tate` on shared primes.
pub fn sample_sato_tate_up_to(x_max: u64, seed: u64) -> Result<EigenvalueDataset, DataError> {
    let ps = primes::primes_up_to(x_max)?;
    let values = semicircle_values(ps.len(), seed, default_shards());
    Ok(EigenvalueDataset::new(ps, Values::Float(values), sampled(seed)))
}

fn sampled(seed: u64) -> Source {
    Source::Sampled { seed, generator: GENERATOR_ID.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shard_count_is_irrelevant() {
        let a = semicircle_values(5000, 11, 1);
        let b = semicircle_values(5000, 11, 7);
        let c = semicircle_values(5000, 11, 64);
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(b, c);
        assert!(a.iter().all(|x| (-2.0..=2.0).contains(x)));
        assert_ne!(semicircle_values(10, 12, 1), a[..10].to_vec());
    }

    #[test]
    fn single_sample() {
        let d = sample_sato_tate(1, 3).unwrap();
        assert_eq!(d.primes(), &[2]);
        assert!((-2.0..=2.0).contains(&d.f64_at(0)));
    }

    #[test]
    fn prefix_consistency() {
        let a = sample_sato_tate(100, 5).unwrap();
        let b = sample_sato_tate_up_to(541, 5).unwrap();
        assert_eq!(a, b);
    }
}
