//! Finite unions of closed intervals of the real line.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::point::{ParsePointError, Point};
use crate::rational::{self, Rational};

/// Closed interval `[lo, hi]`; infinite endpoints mean a ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub lo: Point,
    pub hi: Point,
}

impl Piece {
    pub fn new(lo: Point, hi: Point) -> Self {
        assert!(lo <= hi, "piece endpoints out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn rational(lo: Rational, hi: Rational) -> Self {
        Self::new(Point::Rational(lo), Point::Rational(hi))
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, x: &Point) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let p = Point::Rational(rational::from_f64(x));
        // Cheap float screen before the exact comparison.
        let (lo, hi) = (self.lo.to_f64(), self.hi.to_f64());
        if x < lo - 1e-9 * lo.abs().max(1.0) || x > hi + 1e-9 * hi.abs().max(1.0) {
            return false;
        }
        if x > lo + 1e-9 * lo.abs().max(1.0) && x < hi - 1e-9 * hi.abs().max(1.0) {
            return true;
        }
        self.contains(&p)
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegionError {
    #[error("region is empty")]
    Empty,
    #[error(transparent)]
    Point(#[from] ParsePointError),
    #[error("interval [{0}, {1}] has endpoints out of order")]
    Reversed(String, String),
    #[error("malformed region `{0}`")]
    Syntax(String),
}

/// Sorted, disjoint closed pieces; pieces that touch or overlap are merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pieces: Vec<Piece>,
}

impl Region {
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self, RegionError> {
        if pieces.is_empty() {
            return Err(RegionError::Empty);
        }
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if p.lo <= last.hi => {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                    }
                }
                _ => merged.push(p),
            }
        }
        Ok(Self { pieces: merged })
    }

    pub fn interval(lo: Point, hi: Point) -> Self {
        Self { pieces: vec![Piece::new(lo, hi)] }
    }

    pub fn real_line() -> Self {
        Self::interval(Point::NegInfinity, Point::PosInfinity)
    }

    /// `[−2, 2]`.
    pub fn ramanujan_support() -> Self {
        Self::interval(Point::int(-2), Point::int(2))
    }

    /// `{t : lo ≤ |t| ≤ hi}` for `0 ≤ lo ≤ hi`.
    pub fn symmetric(lo: Point, hi: Point) -> Self {
        assert!(lo >= Point::int(0) && lo <= hi, "symmetric region needs 0 <= lo <= hi");
        let zero = Point::int(0);
        if lo == zero {
            return Self::interval(hi.neg(), hi);
        }
        Self::new(vec![Piece::new(hi.neg(), lo.neg()), Piece::new(lo, hi)]).expect("non-empty")
    }

    pub fn symmetric_rational(lo: Rational, hi: Rational) -> Self {
        Self::symmetric(Point::Rational(lo), Point::Rational(hi))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_bounded(&self) -> bool {
        self.pieces.iter().all(Piece::is_bounded)
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.pieces.iter().any(|p| p.contains_f64(x))
    }

    pub fn contains_rational(&self, x: &Rational) -> bool {
        self.contains(&Point::Rational(x.clone()))
    }

    pub fn is_subset_of(&self, other: &Region) -> bool {
        self.pieces.iter().all(|p| other.pieces.iter().any(|q| q.lo <= p.lo && p.hi <= q.hi))
    }

    /// Intersection with a single closed interval; `None` if empty.
    pub fn intersect_piece(&self, with: &Piece) -> Option<Region> {
        let out: Vec<Piece> = self
            .pieces
            .iter()
            .filter_map(|p| {
                let lo = p.lo.clone().max(with.lo.clone());
                let hi = p.hi.clone().min(with.hi.clone());
                (lo <= hi).then(|| Piece::new(lo, hi))
            })
            .collect();
        Region::new(out).ok()
    }

    pub fn intersect(&self, other: &Region) -> Option<Region> {
        let mut out = Vec::new();
        for q in &other.pieces {
            if let Some(r) = self.intersect_piece(q) {
                out.extend(r.pieces);
            }
        }
        Region::new(out).ok()
    }

    /// Closure of `within ∖ self`; `None` when that set has empty interior.
    pub fn complement_within(&self, within: &Region) -> Option<Region> {
        let mut out = Vec::new();
        for w in &within.pieces {
            let mut cursor = w.lo.clone();
            for p in &self.pieces {
                if p.hi < w.lo || p.lo > w.hi {
                    continue;
                }
                if p.lo > cursor {
                    out.push(Piece::new(cursor.clone(), p.lo.clone()));
                }
                if p.hi > cursor {
                    cursor = p.hi.clone();
                }
            }
            if cursor < w.hi {
                out.push(Piece::new(cursor, w.hi.clone()));
            }
        }
        Region::new(out).ok()
    }

    /// `Σ (hi − lo)` in floating point, infinite if unbounded.
    pub fn length_f64(&self) -> f64 {
        self.pieces.iter().map(|p| p.hi.to_f64() - p.lo.to_f64()).sum()
    }

    /// Parses the CLI syntax: `a,b` is `{a ≤ |t| ≤ b}`; `[a,b];[c,d]` lists pieces.
    pub fn parse_cli(s: &str) -> Result<Region, RegionError> {
        let t = s.trim();
        if t.starts_with('[') {
            let mut pieces = Vec::new();
            for part in t.split(';') {
                let part = part.trim();
                let inner = part
                    .strip_prefix('[')
                    .and_then(|x| x.strip_suffix(']'))
                    .ok_or_else(|| RegionError::Syntax(s.to_string()))?;
                let (a, b) = inner.split_once(',').ok_or_else(|| RegionError::Syntax(s.to_string()))?;
                pieces.push(parse_piece(a, b)?);
            }
            return Region::new(pieces);
        }
        let (a, b) = t.split_once(',').ok_or_else(|| RegionError::Syntax(s.to_string()))?;
        let lo: Point = a.parse()?;
        let hi: Point = b.parse()?;
        if lo < Point::int(0) || lo > hi {
            return Err(RegionError::Reversed(a.trim().into(), b.trim().into()));
        }
        Ok(Region::symmetric(lo, hi))
    }

    pub fn from_pairs(pairs: &[[String; 2]]) -> Result<Region, RegionError> {
        let pieces = pairs.iter().map(|[a, b]| parse_piece(a, b)).collect::<Result<Vec<_>, _>>()?;
        Region::new(pieces)
    }

    pub fn to_pairs(&self) -> Vec<[String; 2]> {
        self.pieces.iter().map(|p| [p.lo.to_string(), p.hi.to_string()]).collect()
    }
}

fn parse_piece(a: &str, b: &str) -> Result<Piece, RegionError> {
    let lo: Point = a.parse()?;
    let hi: Point = b.parse()?;
    if lo > hi {
        return Err(RegionError::Reversed(a.trim().into(), b.trim().into()));
    }
    Ok(Piece::new(lo, hi))
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

// JSON form: [["1","2"],["-2","-1"]].
impl Serialize for Region {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Region {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[String; 2]>::deserialize(d)?;
        Region::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}
