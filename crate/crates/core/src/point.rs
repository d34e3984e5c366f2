//! Exact real endpoints: rationals, `±√q`, and `±∞`.
//!
//! Thresholds such as `√2` or `√a` appear as region endpoints. Comparing
//! them with rationals and reading off polynomial signs there reduces to
//! rational arithmetic: `P(s√q) = A(q) + s√q·B(q)` with `A`, `B` the even
//! and odd parts of `P`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::interval::RatInterval;
use crate::poly::Poly;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    NegInfinity,
    Rational(Rational),
    /// `±√radicand`; the radicand is positive and not a rational square.
    Sqrt {
        negative: bool,
        radicand: Rational,
    },
    PosInfinity,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid point literal `{0}` (expected a rational, `sqrt(q)`, `-sqrt(q)`, `inf` or `-inf`)")]
pub struct ParsePointError(pub String);

impl Point {
    pub fn rational(r: Rational) -> Self {
        Point::Rational(r)
    }

    pub fn int(n: i64) -> Self {
        Point::Rational(rational::int(n))
    }

    /// `√q`, collapsing to a rational when `q` is a perfect square.
    pub fn sqrt(q: Rational) -> Self {
        Self::signed_sqrt(false, q)
    }

    pub fn neg_sqrt(q: Rational) -> Self {
        Self::signed_sqrt(true, q)
    }

    fn signed_sqrt(negative: bool, q: Rational) -> Self {
        assert!(!q.is_negative(), "square root of a negative rational");
        match rational::exact_sqrt(&q) {
            Some(s) => Point::Rational(if negative { -s } else { s }),
            None => Point::Sqrt { negative, radicand: q },
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Point::NegInfinity | Point::PosInfinity)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Point::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn neg(&self) -> Point {
        match self {
            Point::NegInfinity => Point::PosInfinity,
            Point::PosInfinity => Point::NegInfinity,
            Point::Rational(r) => Point::Rational(-r),
            Point::Sqrt { negative, radicand } => Point::Sqrt { negative: !negative, radicand: radicand.clone() },
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Point::NegInfinity => f64::NEG_INFINITY,
            Point::PosInfinity => f64::INFINITY,
            Point::Rational(r) => rational::to_f64(r),
            Point::Sqrt { negative, radicand } => {
                let v = rational::to_f64(radicand).sqrt();
                if *negative {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// Rational enclosure of a finite point of width at most `2^-bits`.
    pub fn enclosure(&self, bits: u32) -> RatInterval {
        match self {
            Point::Rational(r) => RatInterval::point(r.clone()),
            Point::Sqrt { negative, radicand } => {
                let (lo, hi) = rational::sqrt_enclosure(radicand, bits);
                if *negative {
                    RatInterval::new(-hi, -lo)
                } else {
                    RatInterval::new(lo, hi)
                }
            }
            _ => panic!("enclosure of an infinite point"),
        }
    }

    /// Exact sign of `p` at this point (limits at infinities).
    pub fn sign_of(&self, p: &Poly) -> i8 {
        if p.is_zero() {
            return 0;
        }
        match self {
            Point::PosInfinity => rational::sign(&p.leading()),
            Point::NegInfinity => {
                let s = rational::sign(&p.leading());
                if p.degree().unwrap() % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
            Point::Rational(r) => rational::sign(&p.eval(r)),
            Point::Sqrt { negative, radicand } => {
                let (a, b) = p.even_odd_split();
                let x = a.eval(radicand);
                let mut y = b.eval(radicand);
                if *negative {
                    y = -y;
                }
                // sign(x + y·√q)
                let sx = rational::sign(&x);
                let sy = rational::sign(&y);
                if sy == 0 || sx == sy {
                    return if sx == 0 { sy } else { sx };
                }
                if sx == 0 {
                    return sy;
                }
                let lhs = &x * &x;
                let rhs = &y * &y * radicand;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sx,
                    Ordering::Less => sy,
                    Ordering::Equal => 0,
                }
            }
        }
    }

    /// Value of `p` here: exact when it lands in ℚ, else an enclosure of
    /// width roughly `|B(q)|·2^-bits`.
    pub fn eval(&self, p: &Poly, bits: u32) -> RatInterval {
        match self {
            Point::Rational(r) => RatInterval::point(p.eval(r)),
            Point::Sqrt { negative, radicand } => {
                let (a, b) = p.even_odd_split();
                let x = a.eval(radicand);
                let y = b.eval(radicand);
                if y.is_zero() {
                    return RatInterval::point(x);
                }
                let root = Point::Sqrt { negative: *negative, radicand: radicand.clone() }.enclosure(bits);
                root.scale(&y).add_scalar(&x)
            }
            _ => panic!("evaluation at an infinite point"),
        }
    }

    /// A rational strictly between `self < other`.
    pub fn rational_between(&self, other: &Point) -> Rational {
        assert!(self < other, "rational_between needs a < b");
        match (self, other) {
            (Point::NegInfinity, Point::PosInfinity) => Rational::zero(),
            (Point::NegInfinity, b) => b.lower_rational(8) - Rational::one(),
            (a, Point::PosInfinity) => a.upper_rational(8) + Rational::one(),
            (a, b) => {
                let mut bits = 16;
                loop {
                    let ea = a.enclosure(bits);
                    let eb = b.enclosure(bits);
                    if ea.hi < eb.lo {
                        let quarter = (&eb.lo - &ea.hi) / rational::int(4);
                        return rational::simplest_between(&(&ea.hi + &quarter), &(&eb.lo - &quarter));
                    }
                    bits *= 2;
                }
            }
        }
    }

    /// A rational `≤ self` within `2^-bits`.
    pub fn lower_rational(&self, bits: u32) -> Rational {
        self.enclosure(bits).lo
    }

    /// A rational `≥ self` within `2^-bits`.
    pub fn upper_rational(&self, bits: u32) -> Rational {
        self.enclosure(bits).hi
    }
}

impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        use Point::*;
        match (self, other) {
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (_, NegInfinity) | (PosInfinity, _) => Ordering::Greater,
            (Rational(a), Rational(b)) => a.cmp(b),
            (Rational(a), s @ Sqrt { .. }) => cmp_rational_sqrt(a, s),
            (s @ Sqrt { .. }, Rational(b)) => cmp_rational_sqrt(b, s).reverse(),
            (Sqrt { negative: na, radicand: qa }, Sqrt { negative: nb, radicand: qb }) => match (na, nb) {
                (false, true) => Ordering::Greater,
                (true, false) => Ordering::Less,
                (false, false) => qa.cmp(qb),
                (true, true) => qb.cmp(qa),
            },
        }
    }
}

fn cmp_rational_sqrt(a: &Rational, s: &Point) -> Ordering {
    let Point::Sqrt { negative, radicand } = s else { unreachable!() };
    let a2 = a * a;
    if *negative {
        if !a.is_negative() {
            Ordering::Greater
        } else {
            radicand.cmp(&a2)
        }
    } else if !a.is_positive() {
        Ordering::Less
    } else {
        a2.cmp(radicand)
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Rational> for Point {
    fn from(r: Rational) -> Self {
        Point::Rational(r)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::NegInfinity => write!(f, "-inf"),
            Point::PosInfinity => write!(f, "inf"),
            Point::Rational(r) => write!(f, "{r}"),
            Point::Sqrt { negative, radicand } => write!(f, "{}sqrt({radicand})", if *negative { "-" } else { "" }),
        }
    }
}

impl FromStr for Point {
    type Err = ParsePointError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParsePointError(s.to_string());
        match t {
            "inf" | "+inf" | "infinity" => return Ok(Point::PosInfinity),
            "-inf" | "-infinity" => return Ok(Point::NegInfinity),
            _ => {}
        }
        let (negative, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, t),
        };
        if let Some(inner) = body.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let q = rational::parse(inner).map_err(|_| err())?;
            if q.is_negative() {
                return Err(err());
            }
            return Ok(if negative { Point::neg_sqrt(q) } else { Point::sqrt(q) });
        }
        rational::parse(t).map(Point::Rational).map_err(|_| err())
    }
}
