//! Certified real-root isolation, extrema and sign classification.
//!
//! Everything here is exact: Sturm chains over ℚ count distinct roots,
//! bisection runs on rational endpoints, and extremal values come out as
//! rational enclosures. Chains are built from the square-free part so that
//! multiple roots (e.g. the double root of `t²(1−t²)(t²−4)` at 0) do not
//! disturb the counts.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::interval::RatInterval;
use crate::point::Point;
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::region::{Piece, Region};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("interval [{0}, {1}] is unbounded")]
    Unbounded(String, String),
    #[error("interval endpoints out of order: [{0}, {1}]")]
    Reversed(String, String),
    #[error("tolerance must be positive")]
    NonpositiveTolerance,
}

/// Sturm chain `P, P', −rem(P, P'), ...`; remainders are reduced to their
/// primitive part (positive content removed), which keeps every sign.
pub fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    if p.is_zero() {
        return Vec::new();
    }
    let mut chain = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push((-r).primitive_part());
    }
    chain
}

/// Sign variations of a Sturm chain at a point, zeros skipped.
pub fn sign_variations(chain: &[Poly], x: &Point) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for q in chain {
        let s = x.sign_of(q);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Root counter for a square-free polynomial.
#[derive(Debug, Clone)]
pub struct RootCounter {
    poly: Poly,
    chain: Vec<Poly>,
}

impl RootCounter {
    /// Builds the chain of the square-free part of `p` (which must be nonzero).
    pub fn new(p: &Poly) -> Self {
        let poly = p.square_free();
        let chain = sturm_sequence(&poly);
        Self { poly, chain }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Distinct roots in the half-open interval `(a, b]`.
    pub fn count(&self, a: &Point, b: &Point) -> usize {
        if a >= b || self.poly.is_constant() {
            return 0;
        }
        let va = sign_variations(&self.chain, a);
        let vb = sign_variations(&self.chain, b);
        va.saturating_sub(vb)
    }

    /// Distinct roots in the open interval `(a, b)`.
    pub fn count_open(&self, a: &Point, b: &Point) -> usize {
        let n = self.count(a, b);
        if n > 0 && b.is_finite() && b.sign_of(&self.poly) == 0 {
            n - 1
        } else {
            n
        }
    }

    /// Distinct roots in the closed interval `[a, b]`.
    pub fn count_closed(&self, a: &Point, b: &Point) -> usize {
        let at_a = usize::from(a.is_finite() && a.sign_of(&self.poly) == 0);
        self.count(a, b) + at_a
    }

    fn sign(&self, x: &Rational) -> i8 {
        rational::sign(&self.poly.eval(x))
    }

    /// Isolating enclosures of all roots in the rational interval `[a, b]`, sorted.
    pub fn isolate(&self, a: &Rational, b: &Rational, width: &Rational) -> Vec<RatInterval> {
        let mut out = Vec::new();
        if self.poly.is_constant() || a > b {
            return out;
        }
        if self.sign(a) == 0 {
            out.push(RatInterval::point(a.clone()));
        }
        let mut stack = vec![(a.clone(), b.clone(), self.count(&a.clone().into(), &b.clone().into()))];
        while let Some((l, h, n)) = stack.pop() {
            match n {
                0 => {}
                1 => out.push(self.refine(RatInterval::new(l, h), width)),
                _ => {
                    let m = rational::midpoint(&l, &h);
                    let left = self.count(&l.clone().into(), &m.clone().into());
                    stack.push((m.clone(), h, n - left));
                    stack.push((l, m, left));
                }
            }
        }
        out.sort_by(|x, y| x.lo.cmp(&y.lo));
        out
    }

    /// Shrinks `(l, h]`, which holds exactly one root, to width `≤ width`.
    /// The result is closed and holds that root only.
    pub fn refine(&self, mut enc: RatInterval, width: &Rational) -> RatInterval {
        loop {
            if enc.is_point() {
                return enc;
            }
            let sh = self.sign(&enc.hi);
            if sh == 0 {
                return RatInterval::point(enc.hi);
            }
            let q = rational::simplest_between(&enc.lo, &enc.hi);
            if q > enc.lo && self.sign(&q) == 0 {
                return RatInterval::point(q);
            }
            if &enc.width() <= width && self.sign(&enc.lo) != 0 {
                return enc;
            }
            enc = self.bisect_once(enc, sh);
        }
    }

    /// One bisection step on an isolating enclosure.
    pub fn bisect_once(&self, enc: RatInterval, sign_hi: i8) -> RatInterval {
        let m = enc.mid();
        let sm = self.sign(&m);
        if sm == 0 {
            RatInterval::point(m)
        } else if sm != sign_hi {
            RatInterval { lo: m, hi: enc.hi }
        } else {
            RatInterval { lo: enc.lo, hi: m }
        }
    }

    /// Halves an isolating enclosure (closed, one root inside).
    pub fn halve(&self, enc: RatInterval) -> RatInterval {
        if enc.is_point() {
            return enc;
        }
        let sh = self.sign(&enc.hi);
        if sh == 0 {
            return RatInterval::point(enc.hi);
        }
        let sl = self.sign(&enc.lo);
        if sl == 0 {
            return RatInterval::point(enc.lo);
        }
        let q = rational::simplest_between(&enc.lo, &enc.hi);
        if self.sign(&q) == 0 {
            return RatInterval::point(q);
        }
        self.bisect_once(enc, sh)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootEnclosure {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
    pub multiplicity_hint: usize,
}

impl RootEnclosure {
    pub fn interval(&self) -> RatInterval {
        RatInterval { lo: self.lo.clone(), hi: self.hi.clone() }
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.interval().contains(&rational::from_f64(x))
    }
}

/// Every distinct real root of `p` in `[interval.lo, interval.hi]`, each
/// enclosed to width `≤ width`.
pub fn isolate_roots(p: &Poly, interval: &RatInterval, width: &Rational) -> Vec<RootEnclosure> {
    if p.is_zero() || p.is_constant() {
        return Vec::new();
    }
    let counter = RootCounter::new(p);
    let encs = counter.isolate(&interval.lo, &interval.hi, width);
    let (_, factors) = p.square_free_factors();
    let counters: Vec<RootCounter> = factors.iter().map(RootCounter::new).collect();
    encs.into_iter()
        .map(|e| {
            let lo = Point::Rational(e.lo.clone());
            let hi = Point::Rational(e.hi.clone());
            let multiplicity_hint = counters
                .iter()
                .position(|c| !c.poly().is_constant() && c.count_closed(&lo, &hi) > 0)
                .map_or(1, |i| i + 1);
            RootEnclosure { lo: e.lo, hi: e.hi, multiplicity_hint }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Endpoint(String),
    Critical(RootEnclosure),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremumEnclosure {
    #[serde(with = "rational::serde_str")]
    pub value_lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub value_hi: Rational,
    pub location: Location,
}

impl ExtremumEnclosure {
    pub fn is_exact(&self) -> bool {
        self.value_lo == self.value_hi
    }

    pub fn value(&self) -> RatInterval {
        RatInterval { lo: self.value_lo.clone(), hi: self.value_hi.clone() }
    }

    fn negate(self) -> Self {
        Self { value_lo: -self.value_hi, value_hi: -self.value_lo, location: self.location }
    }
}

pub fn default_tolerance() -> Rational {
    rational::ratio(1, 1_000_000_000)
}

enum Candidate {
    Endpoint { point: Point, bits: u32, value: RatInterval },
    Critical { root: RatInterval, value: RatInterval },
}

impl Candidate {
    fn value(&self) -> &RatInterval {
        match self {
            Candidate::Endpoint { value, .. } | Candidate::Critical { value, .. } => value,
        }
    }
}

/// Certified min or max of `p` over the closed interval `[a, b]`.
///
/// Candidates are the endpoints and the roots of `p'` inside; each root
/// enclosure is evaluated with a mean-value form and refined until the
/// answer is narrower than `tol`.
pub fn extremum_on_interval(
    p: &Poly,
    a: &Point,
    b: &Point,
    mode: Mode,
    tol: &Rational,
) -> Result<ExtremumEnclosure, AnalysisError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(AnalysisError::Unbounded(a.to_string(), b.to_string()));
    }
    if a > b {
        return Err(AnalysisError::Reversed(a.to_string(), b.to_string()));
    }
    if !tol.is_positive() {
        return Err(AnalysisError::NonpositiveTolerance);
    }
    Ok(match mode {
        Mode::Max => max_on_interval(p, a, b, tol),
        Mode::Min => max_on_interval(&-p, a, b, tol).negate(),
    })
}

fn max_on_interval(p: &Poly, a: &Point, b: &Point, tol: &Rational) -> ExtremumEnclosure {
    let start_bits = 40;
    let mut cands: Vec<Candidate> = Vec::new();
    for pt in [a, b] {
        if cands.iter().any(|c| matches!(c, Candidate::Endpoint { point, .. } if point == pt)) {
            continue;
        }
        cands.push(Candidate::Endpoint { point: pt.clone(), bits: start_bits, value: pt.eval(p, start_bits) });
    }
    let d = p.derivative();
    let counter = (!d.is_constant() && a < b).then(|| RootCounter::new(&d));
    if let Some(counter) = &counter {
        if counter.count_open(a, b) > 0 {
            let (lo, hi) = interior_rational_bounds(counter, a, b);
            let width = (&hi - &lo) / rational::int(1 << 10);
            for root in counter.isolate(&lo, &hi, &width) {
                let value = p.eval_interval_centered(&root);
                cands.push(Candidate::Critical { root, value });
            }
        }
    }
    loop {
        let best_lo = cands.iter().map(|c| c.value().lo.clone()).max().expect("candidates");
        let mut refined = false;
        for c in cands.iter_mut() {
            let v = c.value();
            if v.hi <= best_lo || &v.width() <= tol {
                continue;
            }
            refined = true;
            match c {
                Candidate::Endpoint { point, bits, value } => {
                    *bits *= 2;
                    *value = point.eval(p, *bits);
                }
                Candidate::Critical { root, value } => {
                    let counter = counter.as_ref().expect("critical points need a counter");
                    *root = counter.halve(root.clone());
                    let fresh = p.eval_interval_centered(root);
                    *value = fresh.intersect(value).unwrap_or(fresh);
                }
            }
        }
        if !refined {
            break;
        }
    }
    let value_lo = cands.iter().map(|c| c.value().lo.clone()).max().unwrap();
    let value_hi = cands.iter().map(|c| c.value().hi.clone()).max().unwrap();
    // Prefer an exact candidate attaining the answer, then the largest upper end.
    let winner = cands
        .iter()
        .find(|c| c.value().is_point() && c.value().hi == value_hi)
        .or_else(|| cands.iter().find(|c| c.value().hi == value_hi))
        .unwrap();
    let d_sf = counter.as_ref().map(|c| c.poly().clone());
    let location = match winner {
        Candidate::Endpoint { point, .. } => Location::Endpoint(point.to_string()),
        Candidate::Critical { root, .. } => {
            let mult = d_sf.as_ref().map(|_| isolate_multiplicity(&d, root)).unwrap_or(1);
            Location::Critical(RootEnclosure { lo: root.lo.clone(), hi: root.hi.clone(), multiplicity_hint: mult })
        }
    };
    ExtremumEnclosure { value_lo, value_hi, location }
}

fn isolate_multiplicity(d: &Poly, root: &RatInterval) -> usize {
    let (_, factors) = d.square_free_factors();
    let lo = Point::Rational(root.lo.clone());
    let hi = Point::Rational(root.hi.clone());
    factors.iter().position(|f| !f.is_constant() && RootCounter::new(f).count_closed(&lo, &hi) > 0).map_or(1, |i| i + 1)
}

/// Rational `lo ≤ hi` inside `[a, b]` so that every root in the open
/// interval `(a, b)` lies in `[lo, hi]`.
fn interior_rational_bounds(counter: &RootCounter, a: &Point, b: &Point) -> (Rational, Rational) {
    let lo = match a.as_rational() {
        Some(r) => r.clone(),
        None => {
            let mut bits = 20;
            loop {
                let cand = a.upper_rational(bits);
                let cp = Point::Rational(cand.clone());
                if &cp < b && counter.count(a, &cp) == 0 {
                    break cand;
                }
                bits *= 2;
            }
        }
    };
    let hi = match b.as_rational() {
        Some(r) => r.clone(),
        None => {
            let mut bits = 20;
            loop {
                let cand = b.lower_rational(bits);
                let cp = Point::Rational(cand.clone());
                if &cp > a && counter.count_open(&cp, b) == 0 && cp.sign_of(counter.poly()) != 0 {
                    break cand;
                }
                bits *= 2;
            }
        }
    };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignClass {
    /// `p ≡ 0` on the region.
    Zero,
    Nonnegative,
    Nonpositive,
    Mixed,
}

impl SignClass {
    fn combine(self, other: SignClass) -> SignClass {
        use SignClass::*;
        match (self, other) {
            (Zero, x) | (x, Zero) => x,
            (Mixed, _) | (_, Mixed) => Mixed,
            (a, b) if a == b => a,
            _ => Mixed,
        }
    }

    pub fn is_nonnegative(self) -> bool {
        matches!(self, SignClass::Zero | SignClass::Nonnegative)
    }

    pub fn is_nonpositive(self) -> bool {
        matches!(self, SignClass::Zero | SignClass::Nonpositive)
    }
}

/// Certified sign of `p` over a region. Unbounded pieces are accepted only
/// with `allow_unbounded`, and are decided by the leading term plus root counts.
pub fn sign_on_region(p: &Poly, region: &Region, allow_unbounded: bool) -> Result<SignClass, AnalysisError> {
    if !allow_unbounded {
        if let Some(piece) = region.pieces().iter().find(|q| !q.is_bounded()) {
            return Err(AnalysisError::Unbounded(piece.lo.to_string(), piece.hi.to_string()));
        }
    }
    if p.is_zero() {
        return Ok(SignClass::Zero);
    }
    let change = p.sign_change_part();
    let counter = (!change.is_constant()).then(|| RootCounter::new(&change));
    let mut acc = SignClass::Zero;
    for piece in region.pieces() {
        acc = acc.combine(sign_on_piece(p, counter.as_ref(), piece));
        if acc == SignClass::Mixed {
            break;
        }
    }
    Ok(acc)
}

fn sign_on_piece(p: &Poly, change: Option<&RootCounter>, piece: &Piece) -> SignClass {
    let classify = |s: i8| match s {
        0 => SignClass::Zero,
        s if s > 0 => SignClass::Nonnegative,
        _ => SignClass::Nonpositive,
    };
    if piece.lo == piece.hi {
        return classify(piece.lo.sign_of(p));
    }
    if let Some(c) = change {
        if c.count_open(&piece.lo, &piece.hi) > 0 {
            return SignClass::Mixed;
        }
    }
    // No sign change inside: any interior non-root decides.
    let mut hi = piece.hi.clone();
    loop {
        let x = piece.lo.rational_between(&hi);
        let s = rational::sign(&p.eval(&x));
        if s != 0 {
            return classify(s);
        }
        hi = Point::Rational(x);
    }
}

/// Closed region, with rational endpoints outside of `within`'s own, that
/// contains every point of `within` where `p > 0`. Root enclosures of the
/// sign changes are taken to `width` and rounded outward.
pub fn positive_hull(p: &Poly, within: &Region, width: &Rational) -> Option<Region> {
    if p.is_zero() {
        return None;
    }
    let change = p.sign_change_part();
    let bound = p.root_bound();
    let counter = (!change.is_constant()).then(|| RootCounter::new(&change));
    let mut pieces = Vec::new();
    for piece in within.pieces() {
        let lo_r = match &piece.lo {
            Point::NegInfinity => -bound.clone(),
            x => x.lower_rational(60).min(bound.clone()),
        };
        let hi_r = match &piece.hi {
            Point::PosInfinity => bound.clone(),
            x => x.upper_rational(60).max(-bound.clone()),
        };
        let roots = match &counter {
            Some(c) if lo_r < hi_r => c.isolate(&lo_r, &hi_r, width),
            _ => Vec::new(),
        };
        // Breakpoints: the piece ends and the root enclosures in between.
        let mut left = piece.lo.clone();
        let mut stops: Vec<(Point, Point)> =
            roots.iter().map(|r| (Point::Rational(r.lo.clone()), Point::Rational(r.hi.clone()))).collect();
        stops.push((piece.hi.clone(), piece.hi.clone()));
        let mut gap_start = piece.lo.clone();
        for (enc_lo, enc_hi) in stops {
            if gap_start < enc_lo {
                let probe = sample_nonroot(p, &gap_start, &enc_lo);
                if probe > 0 {
                    pieces.push(Piece::new(left.clone(), enc_hi.clone()));
                }
            }
            left = enc_lo.clone().min(enc_hi.clone());
            gap_start = enc_hi;
        }
    }
    Region::new(pieces).ok().and_then(|r| r.intersect(within).or(Some(r)))
}

fn sample_nonroot(p: &Poly, lo: &Point, hi: &Point) -> i8 {
    let mut hi = hi.clone();
    loop {
        let x = lo.rational_between(&hi);
        let s = rational::sign(&p.eval(&x));
        if s != 0 {
            return s;
        }
        hi = Point::Rational(x);
    }
}

/// Range enclosure `[min, max]` of `p` over a bounded region.
pub fn range_on_region(p: &Poly, region: &Region, tol: &Rational) -> Result<RatInterval, AnalysisError> {
    let mut out: Option<RatInterval> = None;
    for piece in region.pieces() {
        let lo = extremum_on_interval(p, &piece.lo, &piece.hi, Mode::Min, tol)?;
        let hi = extremum_on_interval(p, &piece.lo, &piece.hi, Mode::Max, tol)?;
        let r = RatInterval { lo: lo.value_lo, hi: hi.value_hi };
        out = Some(match out {
            Some(o) => o.hull(&r),
            None => r,
        });
    }
    Ok(out.expect("regions are non-empty"))
}

/// Extremum over a bounded region: the best over its pieces.
pub fn extremum_on_region(
    p: &Poly,
    region: &Region,
    mode: Mode,
    tol: &Rational,
) -> Result<ExtremumEnclosure, AnalysisError> {
    let mut best: Option<ExtremumEnclosure> = None;
    for piece in region.pieces() {
        let e = extremum_on_interval(p, &piece.lo, &piece.hi, mode, tol)?;
        best = Some(match best {
            None => e,
            Some(b) => {
                let better = match mode {
                    Mode::Max => e.value_hi > b.value_hi,
                    Mode::Min => e.value_lo < b.value_lo,
                };
                let merged_lo;
                let merged_hi;
                match mode {
                    Mode::Max => {
                        merged_lo = b.value_lo.clone().max(e.value_lo.clone());
                        merged_hi = b.value_hi.clone().max(e.value_hi.clone());
                    }
                    Mode::Min => {
                        merged_lo = b.value_lo.clone().min(e.value_lo.clone());
                        merged_hi = b.value_hi.clone().min(e.value_hi.clone());
                    }
                }
                let location = if better { e.location } else { b.location };
                ExtremumEnclosure { value_lo: merged_lo, value_hi: merged_hi, location }
            }
        });
    }
    Ok(best.expect("regions are non-empty"))
}
