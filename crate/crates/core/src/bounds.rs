//! Bound engines: test polynomial + region + hypothesis ↦ certified
//! lower density bound or infinitude certificate.
//!
//! Sign conditions are certified here on the hypothesis support; callers
//! never assert them. Optional overrides replace individual constants with
//! externally supplied (e.g. rounded, printed) values and are tagged so.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{self, AnalysisError, Mode, SignClass};
use crate::interval::RatInterval;
use crate::moments::{self, Hypothesis, MeanEnclosure, MomentError};
use crate::point::Point;
use crate::poly::{self, Poly, PolyLiteral};
use crate::rational::{self, Rational};
use crate::region::{Piece, Region};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("sign condition violated: {0}")]
    SignConditionViolated(String),
    #[error("mean {0} is not positive; the method yields nothing")]
    NonpositiveMean(String),
    #[error("degree {0} exceeds the functoriality horizon (8)")]
    DegreeBeyondHorizon(usize),
    #[error("trivial bound: {0}")]
    TrivialBound(String),
    #[error("mean {0} is not exactly zero")]
    NonzeroMean(String),
    #[error("margin {0} is not positive")]
    NonpositiveMargin(String),
    #[error("second moment is zero")]
    ZeroSecondMoment,
    #[error("supremum is infinite on {0}")]
    UnboundedSupremum(String),
    #[error(transparent)]
    Moment(MomentError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl From<MomentError> for BoundError {
    fn from(e: MomentError) -> Self {
        match e {
            MomentError::DegreeBeyondHorizon(d) => BoundError::DegreeBeyondHorizon(d),
            other => BoundError::Moment(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    PositivePart,
    Complement,
    ShiftedSquare,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::PositivePart => "POSITIVE_PART",
            Pattern::Complement => "COMPLEMENT",
            Pattern::ShiftedSquare => "SHIFTED_SQUARE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "enclosure")]
    Enclosure,
    #[serde(rename = "paper-override")]
    PaperOverride,
}

/// A named constant entering a bound, `lo ≤ value ≤ hi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    pub provenance: Provenance,
}

impl Constant {
    fn new(name: &str, iv: RatInterval, overridden: bool) -> Self {
        let provenance = if overridden {
            Provenance::PaperOverride
        } else if iv.is_point() {
            Provenance::Exact
        } else {
            Provenance::Enclosure
        };
        Self { name: name.to_string(), lo: iv.lo, hi: iv.hi, provenance }
    }

    pub fn interval(&self) -> RatInterval {
        RatInterval { lo: self.lo.clone(), hi: self.hi.clone() }
    }
}

/// Replacement constants; each one supersedes the engine's own value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// `μ` of the witness.
    #[serde(default, with = "rational::serde_str::option", skip_serializing_if = "Option::is_none")]
    pub mean: Option<Rational>,
    /// Supremum: of `Q` on the region, or of `g²` on the support for shifts.
    #[serde(default, with = "rational::serde_str::option", skip_serializing_if = "Option::is_none")]
    pub sup: Option<Rational>,
    /// Infimum: of `V` off the region, or the margin `m` of `g` for shifts.
    #[serde(default, with = "rational::serde_str::option", skip_serializing_if = "Option::is_none")]
    pub inf: Option<Rational>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self.mean.is_none() && self.sup.is_none() && self.inf.is_none()
    }
}

/// Certified `liminf #{p ≤ x : λ_f(p) ∈ region}/π(x) ≥ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityBound {
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    /// Where the formula's exact value lies; `bound` is its lower end.
    pub value: RatInterval,
    pub region: Region,
    #[serde(with = "poly::serde_literal")]
    pub witness: Poly,
    pub hypothesis: Hypothesis,
    pub pattern: Pattern,
    pub constants: Vec<Constant>,
}

impl DensityBound {
    pub fn bound_f64(&self) -> f64 {
        rational::to_f64(&self.bound)
    }

    pub fn is_exact(&self) -> bool {
        self.value.is_point()
    }

    pub fn constant(&self, name: &str) -> Option<&Constant> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn uses_overrides(&self) -> bool {
        self.constants.iter().any(|c| c.provenance == Provenance::PaperOverride)
    }
}

impl fmt::Display for DensityBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{} = {}", rational::Decimal(&self.bound, 10), self.bound)
        } else {
            write!(f, "{}", rational::Decimal(&self.bound, 10))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateKind {
    Contradiction,
    CauchySchwarz,
}

/// Infinitely often, λ_f(p) leaves `region` (CONTRADICTION), or the witness
/// takes both signs (CAUCHY_SCHWARZ); `kappa > 0` is the per-window margin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinitudeCertificate {
    #[serde(with = "poly::serde_literal")]
    pub witness: Poly,
    pub region: Region,
    #[serde(with = "rational::serde_str")]
    pub kappa: Rational,
    pub kappa_enclosure: RatInterval,
    pub kind: CertificateKind,
    pub hypothesis: Hypothesis,
    pub constants: Vec<Constant>,
}

/// Source of the constant `C ≥ μ(g²)` in shifted-square bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondMomentSource {
    /// `sup g²` over the support.
    #[default]
    SupNorm,
    /// The ledger's enclosure of `μ(g²)`.
    Ledger,
}

fn tol() -> Rational {
    analysis::default_tolerance()
}

/// Bounded stand-in for a region when looking for an extremum of `p`:
/// rays on which `p` tends the favourable way are cut past every critical
/// point. `None` when the extremum is infinite.
fn clip_for_extremum(p: &Poly, region: &Region, mode: Mode) -> Option<Region> {
    if region.is_bounded() {
        return Some(region.clone());
    }
    // Max escapes along a ray where p → +∞, Min where p → −∞.
    let escape: i8 = if mode == Mode::Max { 1 } else { -1 };
    let d = p.derivative();
    let reach = if d.is_constant() { Rational::one() } else { d.root_bound() };
    let mut pieces = Vec::new();
    for piece in region.pieces() {
        let mut lo = piece.lo.clone();
        let mut hi = piece.hi.clone();
        for end in [Point::PosInfinity, Point::NegInfinity] {
            let touches = if end == Point::PosInfinity { hi == end } else { lo == end };
            if touches && !p.is_constant() && end.sign_of(p) == escape {
                return None;
            }
        }
        if hi == Point::PosInfinity {
            hi = Point::Rational(reach.clone()).max(lo.clone());
        }
        if lo == Point::NegInfinity {
            lo = Point::Rational(-reach.clone()).min(hi.clone());
        }
        pieces.push(Piece::new(lo, hi));
    }
    Region::new(pieces).ok()
}

fn extremum(p: &Poly, region: &Region, mode: Mode) -> Result<RatInterval, BoundError> {
    let clipped =
        clip_for_extremum(p, region, mode).ok_or_else(|| BoundError::UnboundedSupremum(region.to_string()))?;
    Ok(analysis::extremum_on_region(p, &clipped, mode, &tol())?.value())
}

fn override_or(computed: RatInterval, value: &Option<Rational>) -> (RatInterval, bool) {
    match value {
        Some(v) => (RatInterval::point(v.clone()), true),
        None => (computed, false),
    }
}

fn mean_of(p: &Poly, h: Hypothesis) -> Result<MeanEnclosure, BoundError> {
    Ok(moments::asymptotic_mean(p, h)?)
}

fn clamp_unit(x: Rational) -> Rational {
    x.max(Rational::zero()).min(Rational::one())
}

/// POSITIVE_PART: `Q ≤ 0` off `R` on the support and `μ(Q) > 0` give
/// density of `R` at least `μ(Q)/sup_R Q`.
pub fn positive_part_bound(q: &Poly, region: &Region, h: Hypothesis) -> Result<DensityBound, BoundError> {
    positive_part_bound_with(q, region, h, &Overrides::default())
}

pub fn positive_part_bound_with(
    q: &Poly,
    region: &Region,
    h: Hypothesis,
    ov: &Overrides,
) -> Result<DensityBound, BoundError> {
    let support = h.support();
    let (mean, mean_ov) = override_or(mean_of(q, h)?.interval(), &ov.mean);
    if !mean.lo.is_positive() {
        return Err(BoundError::NonpositiveMean(mean.to_string()));
    }
    if let Some(outside) = region.complement_within(&support) {
        let sign = analysis::sign_on_region(q, &outside, true)?;
        if !sign.is_nonpositive() {
            return Err(BoundError::SignConditionViolated(format!("witness is positive somewhere on {outside}")));
        }
    }
    let on = region
        .intersect(&support)
        .ok_or_else(|| BoundError::SignConditionViolated("region misses the support".into()))?;
    let (sup, sup_ov) = override_or(extremum(q, &on, Mode::Max)?, &ov.sup);
    if !sup.lo.is_positive() {
        return Err(BoundError::SignConditionViolated(format!("supremum {sup} on the region is not positive")));
    }
    let value = RatInterval { lo: &mean.lo / &sup.hi, hi: &mean.hi / &sup.lo };
    Ok(DensityBound {
        bound: clamp_unit(value.lo.clone()),
        value,
        region: on,
        witness: q.clone(),
        hypothesis: h,
        pattern: Pattern::PositivePart,
        constants: vec![Constant::new("mean", mean, mean_ov), Constant::new("sup", sup, sup_ov)],
    })
}

/// COMPLEMENT: `V ≥ 0` on the support, `V ≥ w` off `S` and `μ(V) ≤ U`
/// give density of `S` at least `1 − U/w`.
pub fn complement_bound(v: &Poly, s: &Region, h: Hypothesis) -> Result<DensityBound, BoundError> {
    complement_bound_with(v, s, h, &Overrides::default())
}

pub fn complement_bound_with(v: &Poly, s: &Region, h: Hypothesis, ov: &Overrides) -> Result<DensityBound, BoundError> {
    let support = h.support();
    let sign = analysis::sign_on_region(v, &support, true)?;
    if !sign.is_nonnegative() {
        return Err(BoundError::SignConditionViolated("witness is negative somewhere on the support".into()));
    }
    let outside = s
        .complement_within(&support)
        .ok_or_else(|| BoundError::TrivialBound("the region covers the support; nothing lies outside it".into()))?;
    let (w, w_ov) = override_or(extremum(v, &outside, Mode::Min)?, &ov.inf);
    if !w.lo.is_positive() {
        return Err(BoundError::TrivialBound(format!("infimum {w} off the region is not positive")));
    }
    let (u, u_ov) = override_or(mean_of(v, h)?.interval(), &ov.mean);
    let value = RatInterval { lo: Rational::one() - &u.hi / &w.lo, hi: Rational::one() - &u.lo / &w.hi };
    if !value.lo.is_positive() {
        return Err(BoundError::TrivialBound(format!(
            "1 - U/w = {} is not positive",
            rational::Decimal(&value.lo, 10)
        )));
    }
    let on = s.intersect(&support).unwrap_or_else(|| s.clone());
    Ok(DensityBound {
        bound: clamp_unit(value.lo.clone()),
        value,
        region: on,
        witness: v.clone(),
        hypothesis: h,
        pattern: Pattern::Complement,
        constants: vec![Constant::new("mean", u, u_ov), Constant::new("inf", w, w_ov)],
    })
}

/// Best shift `a` for the complement witness `(g + a)²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftResult {
    #[serde(with = "rational::serde_str")]
    pub a_star: Rational,
    pub bound: DensityBound,
}

/// Constants `(m, C)` for shifted-square bounds, with override flags.
pub struct ShiftConstants {
    pub m: RatInterval,
    pub m_overridden: bool,
    pub c: RatInterval,
    pub c_overridden: bool,
}

pub fn shift_constants(
    g: &Poly,
    s: &Region,
    h: Hypothesis,
    ov: &Overrides,
    source: SecondMomentSource,
) -> Result<ShiftConstants, BoundError> {
    let mean = mean_of(g, h)?;
    if !(mean.exact && mean.lo.is_zero()) && ov.mean.as_ref().is_none_or(|m| !m.is_zero()) {
        return Err(BoundError::NonzeroMean(mean.to_string()));
    }
    let support = h.support();
    let outside = s
        .complement_within(&support)
        .ok_or_else(|| BoundError::NonpositiveMargin("nothing lies outside the region".into()))?;
    let (m, m_ov) = match &ov.inf {
        Some(v) => (RatInterval::point(v.clone()), true),
        None => match extremum(g, &outside, Mode::Min) {
            Ok(iv) => (iv, false),
            Err(BoundError::UnboundedSupremum(r)) => return Err(BoundError::NonpositiveMargin(format!("-inf on {r}"))),
            Err(e) => return Err(e),
        },
    };
    if !m.lo.is_positive() {
        return Err(BoundError::NonpositiveMargin(m.to_string()));
    }
    let g2 = g * g;
    let (c, c_ov) = match &ov.sup {
        Some(v) => (RatInterval::point(v.clone()), true),
        None => match source {
            SecondMomentSource::SupNorm => (extremum(&g2, &support, Mode::Max)?, false),
            SecondMomentSource::Ledger => (moments::asymptotic_mean(&g2, h)?.interval(), false),
        },
    };
    if !c.hi.is_positive() {
        return Err(BoundError::ZeroSecondMoment);
    }
    Ok(ShiftConstants { m, m_overridden: m_ov, c, c_overridden: c_ov })
}

/// `1 − (a² + C)/(a + m)²`, the complement bound of `(g + a)²` in terms of
/// `C ≥ μ(g²)` and the margin `g ≥ m` off the region.
pub fn shift_objective(a: &Rational, c: &Rational, m: &Rational) -> Rational {
    let am = a + m;
    Rational::one() - (a * a + c) / (&am * &am)
}

pub fn shift_objective_f64(a: f64, c: f64, m: f64) -> f64 {
    1.0 - (a * a + c) / ((a + m) * (a + m))
}

/// Maximizes the shifted-square bound in closed form: `a* = C/m` and
/// `bound = m²/(C + m²)`.
pub fn optimal_shift(g: &Poly, s: &Region, h: Hypothesis) -> Result<ShiftResult, BoundError> {
    optimal_shift_with(g, s, h, &Overrides::default(), SecondMomentSource::SupNorm)
}

pub fn optimal_shift_with(
    g: &Poly,
    s: &Region,
    h: Hypothesis,
    ov: &Overrides,
    source: SecondMomentSource,
) -> Result<ShiftResult, BoundError> {
    let k = shift_constants(g, s, h, ov, source)?;
    // Smaller m and larger C only weaken the bound.
    let m = &k.m.lo;
    let c = &k.c.hi;
    let a_star = c / m;
    let bound = m * m / (c + m * m);
    let best = &k.c.lo.clone().max(Rational::zero());
    let m_hi = &k.m.hi;
    let value_hi = m_hi * m_hi / (best + m_hi * m_hi);
    let shifted = g + &Poly::constant(a_star.clone());
    let v = &shifted * &shifted;
    let support = h.support();
    let on = s.intersect(&support).unwrap_or_else(|| s.clone());
    let c_name = match source {
        SecondMomentSource::SupNorm => "sup_g2",
        SecondMomentSource::Ledger => "mean_g2",
    };
    Ok(ShiftResult {
        a_star: a_star.clone(),
        bound: DensityBound {
            bound: clamp_unit(bound.clone()),
            value: RatInterval { lo: bound.clone(), hi: value_hi.max(bound) },
            region: on,
            witness: v,
            hypothesis: h,
            pattern: Pattern::Complement,
            constants: vec![
                Constant::new(c_name, k.c, k.c_overridden),
                Constant::new("margin", k.m, k.m_overridden),
                Constant::new("a_star", RatInterval::point(a_star), k.c_overridden || k.m_overridden),
            ],
        },
    })
}

/// `μ(V) = 0` with `V ≥ κ > 0` on `R`: infinitely often, in every window,
/// some eigenvalue lies outside `R`.
pub fn infinitude_by_contradiction(
    v: &Poly,
    region: &Region,
    h: Hypothesis,
) -> Result<InfinitudeCertificate, BoundError> {
    let mean = mean_of(v, h)?;
    if !(mean.exact && mean.lo.is_zero()) {
        return Err(BoundError::NonzeroMean(mean.to_string()));
    }
    let on = region
        .intersect(&h.support())
        .ok_or_else(|| BoundError::NonpositiveMargin("region misses the support".into()))?;
    let kappa = match extremum(v, &on, Mode::Min) {
        Ok(iv) => iv,
        Err(BoundError::UnboundedSupremum(r)) => return Err(BoundError::NonpositiveMargin(format!("-inf on {r}"))),
        Err(e) => return Err(e),
    };
    if !kappa.lo.is_positive() {
        return Err(BoundError::NonpositiveMargin(kappa.to_string()));
    }
    Ok(InfinitudeCertificate {
        witness: v.clone(),
        region: on,
        kappa: kappa.lo.clone(),
        kappa_enclosure: kappa.clone(),
        kind: CertificateKind::Contradiction,
        hypothesis: h,
        constants: vec![Constant::new("mean", mean.interval(), false), Constant::new("inf", kappa, false)],
    })
}

const SQRT_BITS: u32 = 80;

/// Upper rational bound on `√x` for `x ≥ 0`.
fn sqrt_hi(x: &Rational) -> Rational {
    rational::sqrt_enclosure(x, SQRT_BITS).1
}

fn sqrt_lo(x: &Rational) -> Rational {
    rational::sqrt_enclosure(x, SQRT_BITS).0
}

/// `μ(s) = 0`, `μ(s²) > 0`: if `s ≥ 0` on a window then
/// `Σ s ≥ κ·(window mass)` with `κ = μ(s²)²/B` and `B ≥ μ(|s|³)`, which
/// contradicts `μ(s) = 0`; so `s` is negative infinitely often.
pub fn cauchy_schwarz_positivity(s: &Poly, h: Hypothesis) -> Result<InfinitudeCertificate, BoundError> {
    let mean = mean_of(s, h)?;
    if !(mean.exact && mean.lo.is_zero()) {
        return Err(BoundError::NonzeroMean(mean.to_string()));
    }
    let s2 = s * s;
    let m2 = mean_of(&s2, h)?.interval();
    if !m2.lo.is_positive() {
        return Err(BoundError::ZeroSecondMoment);
    }
    let s3 = &s2 * s;
    let s4 = &s2 * &s2;
    // Under positivity |s|³ = s³; Cauchy-Schwarz gives √(μ(s²)μ(s⁴)) regardless.
    let third = match mean_of(&s3, h) {
        Ok(m) if m.lo.is_positive() => Some(m.interval()),
        Ok(_) | Err(BoundError::DegreeBeyondHorizon(_)) => None,
        Err(e) => return Err(e),
    };
    let chain = match mean_of(&s4, h) {
        Ok(m4) => Some(RatInterval { lo: sqrt_lo(&(&m2.lo * &m4.interval().lo)), hi: sqrt_hi(&(&m2.hi * &m4.hi)) }),
        Err(BoundError::DegreeBeyondHorizon(d)) if third.is_none() => return Err(BoundError::DegreeBeyondHorizon(d)),
        Err(BoundError::DegreeBeyondHorizon(_)) => None,
        Err(e) => return Err(e),
    };
    let b = match (third, chain) {
        (Some(a), Some(b)) => {
            if a.hi <= b.hi {
                a
            } else {
                b
            }
        }
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(BoundError::DegreeBeyondHorizon(s3.degree().unwrap_or(0))),
    };
    let kappa = RatInterval { lo: &m2.lo * &m2.lo / &b.hi, hi: &m2.hi * &m2.hi / &b.lo };
    Ok(InfinitudeCertificate {
        witness: s.clone(),
        region: h.support(),
        kappa: kappa.lo.clone(),
        kappa_enclosure: kappa,
        kind: CertificateKind::CauchySchwarz,
        hypothesis: h,
        constants: vec![Constant::new("mean_s2", m2, false), Constant::new("abs_third_moment_bound", b, false)],
    })
}

/// `μ(t²)²/√(μ(t²)μ(t⁴))`, the constant in `Σ|λ_f(p)| ≫ x/log x`, to width ≤ 1e-9.
pub fn abs_first_moment_lower(h: Hypothesis) -> RatInterval {
    let m2 = moments::asymptotic_mean(&Poly::monomial(2, Rational::one()), h).expect("degree 2").interval();
    let m4 = moments::asymptotic_mean(&Poly::monomial(4, Rational::one()), h).expect("degree 4").interval();
    abs_first_moment_from(&m2, &m4)
}

pub fn abs_first_moment_from(m2: &RatInterval, m4: &RatInterval) -> RatInterval {
    let root_lo = sqrt_lo(&(&m2.lo * &m4.lo));
    let root_hi = sqrt_hi(&(&m2.hi * &m4.hi));
    RatInterval { lo: &m2.lo * &m2.lo / root_hi, hi: &m2.hi * &m2.hi / root_lo }
}

/// JSON bound request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundRequest {
    pub witness: PolyLiteral,
    pub region: Region,
    pub hypothesis: Hypothesis,
    pub pattern: Pattern,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<Overrides>,
}

/// Runs a request; SHIFTED_SQUARE treats the witness as the zero-mean `g`.
pub fn run_request(req: &BoundRequest) -> Result<DensityBound, RequestError> {
    let w = req.witness.to_poly().map_err(|e| RequestError::Witness(e.to_string()))?;
    let ov = req.overrides.clone().unwrap_or_default();
    Ok(match req.pattern {
        Pattern::PositivePart => positive_part_bound_with(&w, &req.region, req.hypothesis, &ov)?,
        Pattern::Complement => complement_bound_with(&w, &req.region, req.hypothesis, &ov)?,
        Pattern::ShiftedSquare => {
            optimal_shift_with(&w, &req.region, req.hypothesis, &ov, SecondMomentSource::SupNorm)?.bound
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RequestError {
    #[error("invalid witness: {0}")]
    Witness(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

/// Checks a sign class is what a POSITIVE_PART witness needs off its region.
pub fn off_region_sign(q: &Poly, region: &Region, h: Hypothesis) -> Result<Option<SignClass>, BoundError> {
    match region.complement_within(&h.support()) {
        Some(outside) => Ok(Some(analysis::sign_on_region(q, &outside, true)?)),
        None => Ok(None),
    }
}
