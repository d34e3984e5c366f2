//! Benchmark inputs shared by the criterion targets.

use hecke_core::poly::{named, Poly};
use hecke_core::rational::int;
use hecke_core::region::Region;

/// `{1 ≤ |t| ≤ 2}`.
pub fn band() -> Region {
    Region::symmetric_rational(int(1), int(2))
}

/// `t^{2k}` for `k = 1..=4`.
pub fn even_powers() -> Vec<Poly> {
    (1..=4).map(|k| Poly::monomial(2 * k, int(1))).collect()
}

/// Zero-mean witness of the small-values shifted-square bound.
pub fn small_values() -> (Poly, Region) {
    (named::small_values_g(), Region::symmetric_rational(int(0), int(1)))
}
