//! The asymptotic-mean functional `μ(P) = lim (1/π(x)) Σ_{p≤x} P(λ_f(p))`.
//!
//! The ledger's axioms: `μ(h_0) = 1` and `μ(h_j) = 0` for `1 ≤ j ≤ 8`.
//! Beyond that horizon a mean is only known up to the range of the
//! residual on the Ramanujan support, or exactly under Sato-Tate.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{self, AnalysisError};
use crate::interval::RatInterval;
use crate::point::Point;
use crate::poly::{from_hecke_basis, to_hecke_basis, Poly};
use crate::rational::{self, Rational};
use crate::region::Region;

/// Largest `j` with `μ(h_j)` known unconditionally.
pub const HORIZON: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hypothesis {
    #[serde(rename = "horizon")]
    Horizon,
    #[serde(rename = "ramanujan")]
    Ramanujan,
    #[serde(rename = "sato-tate")]
    SatoTate,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 3] = [Hypothesis::Horizon, Hypothesis::Ramanujan, Hypothesis::SatoTate];

    pub fn cli_name(self) -> &'static str {
        match self {
            Hypothesis::Horizon => "horizon",
            Hypothesis::Ramanujan => "ramanujan",
            Hypothesis::SatoTate => "sato-tate",
        }
    }

    /// Where the eigenvalues may lie: `ℝ` unconditionally, `[−2, 2]` otherwise.
    pub fn support(self) -> Region {
        match self {
            Hypothesis::Horizon => Region::real_line(),
            Hypothesis::Ramanujan | Hypothesis::SatoTate => Region::ramanujan_support(),
        }
    }

    pub fn bounded_support(self) -> bool {
        !matches!(self, Hypothesis::Horizon)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::Horizon => "FUNCTORIALITY_HORIZON",
            Hypothesis::Ramanujan => "RAMANUJAN",
            Hypothesis::SatoTate => "SATO_TATE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown hypothesis `{0}` (expected horizon, ramanujan or sato-tate)")]
pub struct ParseHypothesisError(pub String);

impl FromStr for Hypothesis {
    type Err = ParseHypothesisError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "horizon" | "functoriality_horizon" => Ok(Hypothesis::Horizon),
            "ramanujan" => Ok(Hypothesis::Ramanujan),
            "sato-tate" | "sato_tate" | "satotate" => Ok(Hypothesis::SatoTate),
            _ => Err(ParseHypothesisError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MomentError {
    #[error("degree {0} exceeds the functoriality horizon (8); the mean is unknown without further hypotheses")]
    DegreeBeyondHorizon(usize),
    #[error("region exceeds the support [-2, 2]")]
    RegionOutOfSupport,
    #[error("tolerance must be positive")]
    NonpositiveTolerance,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// `lo ≤ μ(P) ≤ hi`; `exact ⟺ lo = hi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeanEnclosure {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    pub exact: bool,
    pub hypothesis: Hypothesis,
}

impl MeanEnclosure {
    pub fn exact(value: Rational, hypothesis: Hypothesis) -> Self {
        Self { lo: value.clone(), hi: value, exact: true, hypothesis }
    }

    pub fn from_interval(iv: RatInterval, hypothesis: Hypothesis) -> Self {
        let exact = iv.is_point();
        Self { lo: iv.lo, hi: iv.hi, exact, hypothesis }
    }

    pub fn interval(&self) -> RatInterval {
        RatInterval { lo: self.lo.clone(), hi: self.hi.clone() }
    }

    pub fn value(&self) -> Option<&Rational> {
        self.exact.then_some(&self.lo)
    }
}

impl fmt::Display for MeanEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{} (exact)", self.lo)
        } else {
            write!(f, "[{}, {}] (enclosure)", rational::Decimal(&self.lo, 10), rational::Decimal(&self.hi, 10))
        }
    }
}

/// `μ(P)` under the given hypothesis with the default tolerance.
pub fn asymptotic_mean(p: &Poly, h: Hypothesis) -> Result<MeanEnclosure, MomentError> {
    asymptotic_mean_tol(p, h, &analysis::default_tolerance())
}

pub fn asymptotic_mean_tol(p: &Poly, h: Hypothesis, tol: &Rational) -> Result<MeanEnclosure, MomentError> {
    let e = to_hecke_basis(p);
    match h {
        Hypothesis::Horizon => match p.degree() {
            Some(d) if d > HORIZON => Err(MomentError::DegreeBeyondHorizon(d)),
            _ => Ok(MeanEnclosure::exact(e.constant_term(), h)),
        },
        Hypothesis::SatoTate => Ok(MeanEnclosure::exact(e.constant_term(), h)),
        Hypothesis::Ramanujan => {
            let (low, high) = e.split_at(HORIZON);
            let known = low.constant_term();
            if high.degree().is_none() {
                return Ok(MeanEnclosure::exact(known, h));
            }
            // μ(R) lies in the range of R over [−2, 2], and likewise μ(P).
            let support = Region::ramanujan_support();
            let residual = from_hecke_basis(&high);
            let r = analysis::range_on_region(&residual, &support, tol)?.add_scalar(&known);
            let whole = analysis::range_on_region(p, &support, tol)?;
            let iv = r.intersect(&whole).unwrap_or(r);
            Ok(MeanEnclosure::from_interval(iv, h))
        }
    }
}

/// `∫ t^k dμ_ST`: the `h_0` coefficient of `t^k`.
pub fn sato_tate_moment(k: usize) -> Rational {
    to_hecke_basis(&Poly::monomial(k, Rational::one())).constant_term()
}

pub fn default_quadrature_tolerance() -> f64 {
    1e-9
}

// π to 25 digits, both ways.
fn pi_enclosure() -> (Rational, Rational) {
    let lo = rational::parse("3.1415926535897932384626433").unwrap();
    let hi = rational::parse("3.1415926535897932384626434").unwrap();
    (lo, hi)
}

// Rounding slack per cell value, in units of machine epsilon.
const CELL_SLACK: f64 = 16.0 * f64::EPSILON;

// √(4 − t²) as √((2 − t)(2 + t)): relative error a few ulps, even near ±2.
fn root_density(t: f64) -> f64 {
    let r = (2.0 - t) * (2.0 + t);
    if r <= 0.0 {
        0.0
    } else {
        r.sqrt()
    }
}

fn f64_at_least(r: &Rational) -> f64 {
    let x = rational::to_f64(r);
    if &rational::from_f64(x) < r {
        x.next_up()
    } else {
        x
    }
}

fn f64_at_most(r: &Rational) -> f64 {
    let x = rational::to_f64(r);
    if &rational::from_f64(x) > r {
        x.next_down()
    } else {
        x
    }
}

/// Encloses `∫_region (1/2π)√(4 − t²) dt` to width `≤ tol`.
///
/// `√(4 − t²)` is concave, so on each cell the trapezoid rule is a lower
/// bound and the midpoint rule an upper bound; cells are bisected until
/// their gap fits their share of the tolerance.
pub fn sato_tate_region_measure(region: &Region, tol: f64) -> Result<RatInterval, MomentError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(MomentError::NonpositiveTolerance);
    }
    if !region.is_subset_of(&Region::ramanujan_support()) {
        return Err(MomentError::RegionOutOfSupport);
    }
    // Half the budget for quadrature, the rest for endpoints, rounding and π.
    let quad_tol = tol / 2.0;
    let mut lo_sum = Rational::zero();
    let mut hi_sum = Rational::zero();
    let edge_bits = 64 + (1.0 / tol).log2().ceil().max(0.0) as u32;
    for piece in region.pieces() {
        let a = f64_at_least(&piece.lo.upper_rational(edge_bits));
        let b = f64_at_most(&piece.hi.lower_rational(edge_bits));
        let (a_r, b_r) = (rational::from_f64(a), rational::from_f64(b));
        // √(4 − t²) ≤ 2 on the slivers outside [a, b].
        let sliver = (&a_r - piece.lo.lower_rational(edge_bits)) + (piece.hi.upper_rational(edge_bits) - &b_r);
        hi_sum += sliver.max(Rational::zero()) * rational::int(2);
        if a < b {
            let (l, u) = integrate_cells(a, b, quad_tol);
            lo_sum += rational::from_f64(l);
            hi_sum += rational::from_f64(u);
        }
    }
    let (pi_lo, pi_hi) = pi_enclosure();
    let two = rational::int(2);
    let lo = lo_sum / (&two * pi_hi);
    let hi = hi_sum / (&two * pi_lo);
    Ok(RatInterval { lo: lo.max(Rational::zero()), hi: hi.min(Rational::one()) })
}

// Cells are dyadic so widths and midpoints are exact; each value carries
// `CELL_SLACK` and the running sums a further `n·ε` relative slack.
fn integrate_cells(a: f64, b: f64, tol: f64) -> (f64, f64) {
    let total_len = 4.0;
    let mut lo_sum = 0.0;
    let mut hi_sum = 0.0;
    let mut cells = 0u64;
    let mut stack = vec![(a, b, root_density(a), root_density(b))];
    while let Some((l, h, fl, fh)) = stack.pop() {
        let w = h - l;
        let m = 0.5 * (l + h);
        let fm = root_density(m);
        let trap = w * 0.5 * (fl + fh) * (1.0 - CELL_SLACK);
        let mid = w * fm * (1.0 + CELL_SLACK);
        if mid - trap <= tol * w / total_len || m <= l || m >= h {
            lo_sum += trap;
            hi_sum += mid;
            cells += 1;
        } else {
            stack.push((m, h, fm, fh));
            stack.push((l, m, fl, fm));
        }
    }
    let sum_slack = 2.0 * (cells as f64 + 2.0) * f64::EPSILON;
    (lo_sum * (1.0 - sum_slack), hi_sum * (1.0 + sum_slack))
}

/// `μ_ST` of the symmetric band `{lo ≤ |t| ≤ hi}`.
pub fn sato_tate_band(lo: Point, hi: Point, tol: f64) -> Result<RatInterval, MomentError> {
    sato_tate_region_measure(&Region::symmetric(lo, hi), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::named;
    use crate::rational::int;

    fn mean(p: &Poly, h: Hypothesis) -> MeanEnclosure {
        asymptotic_mean(p, h).unwrap()
    }

    // Closed form of ∫_0^t (1/2π)√(4−s²) ds; oracle only.
    fn st_cdf_from_zero(t: f64) -> f64 {
        (t * (4.0 - t * t).sqrt() + 4.0 * (t / 2.0).asin()) / (4.0 * std::f64::consts::PI)
    }

    #[test]
    fn moment_table() {
        for (k, want) in [(1, 1), (2, 2), (3, 5), (4, 14)] {
            let m = mean(&Poly::monomial(2 * k, int(1)), Hypothesis::Horizon);
            assert!(m.exact);
            assert_eq!(m.lo, int(want));
            assert_eq!(sato_tate_moment(2 * k), int(want));
        }
        assert_eq!(sato_tate_moment(0), int(1));
        assert_eq!(sato_tate_moment(3), int(0));
        let s4 = Poly::from_ints(&[-1, 0, 1]).pow(4);
        assert_eq!(mean(&s4, Hypothesis::Horizon).lo, int(3));
    }

    #[test]
    fn g_has_zero_mean() {
        assert_eq!(
            mean(&named::small_values_g(), Hypothesis::Horizon),
            MeanEnclosure::exact(int(0), Hypothesis::Horizon)
        );
        assert_eq!(mean(&named::mid_band_g(), Hypothesis::Horizon).lo, rational::ratio(147, 17442));
    }

    #[test]
    fn beyond_horizon() {
        let g = named::small_values_g();
        let g2 = &g * &g;
        assert_eq!(asymptotic_mean(&g2, Hypothesis::Horizon), Err(MomentError::DegreeBeyondHorizon(16)));
        let r = mean(&g2, Hypothesis::Ramanujan);
        assert!(!r.exact);
        assert!(r.lo >= int(0) && rational::to_f64(&r.hi) < 15.1);
        let st = mean(&g2, Hypothesis::SatoTate);
        assert!(st.exact && r.interval().contains(&st.lo));
    }

    #[test]
    fn quadrature_examples() {
        let full = sato_tate_region_measure(&Region::ramanujan_support(), 1e-9).unwrap();
        assert!(full.contains(&int(1)) && full.hi_f64() - full.lo_f64() <= 1e-9);
        let band = sato_tate_region_measure(&Region::symmetric_rational(int(1), int(2)), 1e-9).unwrap();
        let oracle = 1.0 - 2.0 * st_cdf_from_zero(1.0);
        assert!(band.lo_f64() <= oracle + 1e-15 && oracle <= band.hi_f64() + 1e-15);
        assert!((band.lo_f64() - 0.3910022).abs() < 1e-6);
        let inner = sato_tate_region_measure(&Region::symmetric_rational(int(0), int(1)), 1e-9).unwrap();
        assert!((inner.lo_f64() - 0.6089978).abs() < 1e-6);
        let surd = sato_tate_region_measure(&Region::symmetric(Point::sqrt(int(2)), Point::int(2)), 1e-9).unwrap();
        let oracle = 1.0 - 2.0 * st_cdf_from_zero(2f64.sqrt());
        assert!(surd.lo_f64() - 1e-15 <= oracle && oracle <= surd.hi_f64() + 1e-15);
        assert!(surd.hi_f64() - surd.lo_f64() <= 1e-9);
        assert_eq!(sato_tate_region_measure(&Region::real_line(), 1e-9), Err(MomentError::RegionOutOfSupport));
    }
}
