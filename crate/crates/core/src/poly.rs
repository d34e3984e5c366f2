//! Exact polynomials in `t = λ_f(p)` and the Hecke basis `h_j = λ_f(p^j)`.
//!
//! The Hecke basis satisfies `h_0 = 1`, `h_1 = t` and
//! `h_{j+1} = t·h_j − h_{j−1}`, so `h_j(2 cos θ) = sin((j+1)θ)/sin θ`.
//! Conversions between bases reduce the leading monomial one degree at a
//! time and stay exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::interval::RatInterval;
use crate::rational::{self, Rational};

/// Largest degree accepted from configuration input.
pub const MAX_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("degree {0} exceeds the supported maximum of {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("unknown basis `{0}` (expected `monomial` or `hecke`)")]
    UnknownBasis(String),
    #[error(transparent)]
    Rational(#[from] rational::ParseRationalError),
    #[error("malformed polynomial literal: {0}")]
    Json(String),
}

/// Dense polynomial with exact rational coefficients; `coeffs[k]` multiplies `t^k`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rational::int(x)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn monomial(k: usize, c: Rational) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(Zero::is_zero)
    }

    pub fn check_degree(&self) -> Result<(), PolyError> {
        match self.degree() {
            Some(d) if d > MAX_DEGREE => Err(PolyError::DegreeTooLarge(d)),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.to_f64_coeffs().iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational::to_f64).collect()
    }

    /// Naive Horner enclosure of the range over `x`.
    pub fn eval_interval(&self, x: &RatInterval) -> RatInterval {
        let mut acc = RatInterval::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add_scalar(c);
        }
        acc
    }

    /// Mean-value enclosure `P(m) + P'(X)(X − m)`, intersected with Horner.
    pub fn eval_interval_centered(&self, x: &RatInterval) -> RatInterval {
        if x.is_point() {
            return RatInterval::point(self.eval(&x.lo));
        }
        let m = x.mid();
        let d = self.derivative().eval_interval(x);
        let offset = RatInterval::new(&x.lo - &m, &x.hi - &m);
        let centered = d.mul(&offset).add_scalar(&self.eval(&m));
        let horner = self.eval_interval(x);
        centered.intersect(&horner).unwrap_or(centered)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * rational::int(k as i64)).collect())
    }

    /// `self(inner(t))`.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `P(−t)`.
    pub fn reflect(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() }).collect())
    }

    /// Even and odd parts split as `P(t) = A(t²) + t·B(t²)`.
    pub fn even_odd_split(&self) -> (Poly, Poly) {
        let a = self.coeffs.iter().step_by(2).cloned().collect();
        let b = self.coeffs.iter().skip(1).step_by(2).cloned().collect();
        (Poly::new(a), Poly::new(b))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Positive rescaling to coprime integer coefficients; sign is preserved.
    pub fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let l = rational::denominator_lcm(&self.coeffs);
        let ints: Vec<BigInt> =
            self.coeffs.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        Poly::new(ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut x = a.primitive_part();
        let mut y = b.primitive_part();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.primitive_part();
        }
        x.monic()
    }

    /// Square-free part `P / gcd(P, P')`, sign of leading coefficient kept.
    pub fn square_free(&self) -> Poly {
        if self.is_constant() {
            return self.clone();
        }
        let g = Poly::gcd(self, &self.derivative());
        let (q, _) = self.div_rem(&g);
        q.primitive_part()
    }

    /// Yun's square-free factorization: `P = c · Π a_i^i` with each `a_i`
    /// square-free and pairwise coprime. Returns `(c, [a_1, a_2, ...])`.
    pub fn square_free_factors(&self) -> (Rational, Vec<Poly>) {
        if self.is_constant() {
            return (self.leading(), Vec::new());
        }
        let c = self.leading();
        let f = self.monic();
        let d = f.derivative();
        let mut a = Poly::gcd(&f, &d);
        let mut b = f.div_rem(&a).0;
        let mut cc = d.div_rem(&a).0;
        let mut out = Vec::new();
        loop {
            let bd = &cc - &b.derivative();
            if b.is_constant() {
                break;
            }
            a = Poly::gcd(&b, &bd);
            out.push(a.clone());
            let nb = b.div_rem(&a).0;
            cc = bd.div_rem(&a).0;
            b = nb;
        }
        (c, out)
    }

    /// Product of the odd-multiplicity square-free factors: the points where `P` changes sign.
    pub fn sign_change_part(&self) -> Poly {
        let (_, factors) = self.square_free_factors();
        factors.iter().enumerate().filter(|(i, _)| i % 2 == 0).fold(Poly::one(), |acc, (_, f)| &acc * f)
    }

    /// Cauchy bound: every real root has absolute value strictly below it.
    pub fn root_bound(&self) -> Rational {
        let lead = self.leading().abs();
        let m = self.coeffs.iter().rev().skip(1).map(|c| c.abs() / &lead).max().unwrap_or_else(Rational::zero);
        m + Rational::one()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = k == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}t", if show_coeff { "·" } else { "" })?,
                _ => write!(f, "{}t^{k}", if show_coeff { "·" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// A polynomial written as `Σ c_j h_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeExpansion {
    coeffs: Vec<Rational>,
}

impl HeckeExpansion {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `h_0`.
    pub fn constant_term(&self) -> Rational {
        self.coeff(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Splits into the part spanned by `h_0..=h_cap` and the rest.
    pub fn split_at(&self, cap: usize) -> (HeckeExpansion, HeckeExpansion) {
        let low = self.coeffs.iter().take(cap + 1).cloned().collect();
        let high =
            self.coeffs.iter().enumerate().map(|(j, c)| if j <= cap { Rational::zero() } else { c.clone() }).collect();
        (HeckeExpansion::new(low), HeckeExpansion::new(high))
    }
}

/// `h_0, ..., h_n` by the three-term recurrence.
pub fn hecke_basis_table(n: usize) -> Vec<Poly> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(Poly::one());
    if n >= 1 {
        out.push(Poly::t());
    }
    let t = Poly::t();
    for j in 2..=n {
        let next = &(&t * &out[j - 1]) - &out[j - 2];
        out.push(next);
    }
    out
}

/// `h_j`, the monic degree-`j` polynomial with `h_j(λ_f(p)) = λ_f(p^j)`.
pub fn hecke_basis_poly(j: usize) -> Poly {
    hecke_basis_table(j).pop().expect("non-empty table")
}

pub fn to_hecke_basis(p: &Poly) -> HeckeExpansion {
    let Some(deg) = p.degree() else {
        return HeckeExpansion::new(Vec::new());
    };
    let basis = hecke_basis_table(deg);
    let mut rest = p.coeffs().to_vec();
    let mut out = vec![Rational::zero(); deg + 1];
    for d in (0..=deg).rev() {
        let c = rest[d].clone();
        if c.is_zero() {
            continue;
        }
        // h_d is monic, so subtracting c·h_d clears t^d.
        for (k, bk) in basis[d].coeffs().iter().enumerate() {
            rest[k] -= &c * bk;
        }
        out[d] = c;
    }
    HeckeExpansion::new(out)
}

pub fn from_hecke_basis(e: &HeckeExpansion) -> Poly {
    let Some(deg) = e.degree() else {
        return Poly::zero();
    };
    let basis = hecke_basis_table(deg);
    let mut out = vec![Rational::zero(); deg + 1];
    for (j, c) in e.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (k, bk) in basis[j].coeffs().iter().enumerate() {
            out[k] += c * bk;
        }
    }
    Poly::new(out)
}

/// `Q(t² − 1)`: a polynomial in `λ_{sym² f}(p)` rewritten in `λ_f(p)`.
pub fn sym2_pullback(q: &Poly) -> Poly {
    let s = Poly::from_ints(&[-1, 0, 1]);
    q.compose(&s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Hecke,
}

/// JSON literal `{"basis": "monomial"|"hecke", "coeffs": ["-1/14", "0", ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyLiteral {
    pub basis: Basis,
    #[serde(with = "rational::serde_str::vec")]
    pub coeffs: Vec<Rational>,
}

impl PolyLiteral {
    pub fn monomial(p: &Poly) -> Self {
        Self { basis: Basis::Monomial, coeffs: p.coeffs().to_vec() }
    }

    pub fn hecke(p: &Poly) -> Self {
        Self { basis: Basis::Hecke, coeffs: to_hecke_basis(p).coeffs().to_vec() }
    }

    pub fn to_poly(&self) -> Result<Poly, PolyError> {
        if self.coeffs.len() > MAX_DEGREE + 1 {
            return Err(PolyError::DegreeTooLarge(self.coeffs.len() - 1));
        }
        let p = match self.basis {
            Basis::Monomial => Poly::new(self.coeffs.clone()),
            Basis::Hecke => from_hecke_basis(&HeckeExpansion::new(self.coeffs.clone())),
        };
        p.check_degree()?;
        Ok(p)
    }

    pub fn parse(json: &str) -> Result<Poly, PolyError> {
        let lit: PolyLiteral = serde_json::from_str(json).map_err(|e| {
            let msg = e.to_string();
            if msg.contains("unknown variant") {
                PolyError::UnknownBasis(msg)
            } else {
                PolyError::Json(msg)
            }
        })?;
        lit.to_poly()
    }
}

/// Serde adapter storing a `Poly` as a monomial-basis literal.
pub mod serde_literal {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Poly, s: S) -> Result<S::Ok, S::Error> {
        PolyLiteral::monomial(p).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Poly, D::Error> {
        PolyLiteral::deserialize(d)?.to_poly().map_err(serde::de::Error::custom)
    }
}

/// Polynomials that recur throughout the engine.
pub mod named {
    use super::*;
    use crate::rational::ratio;

    /// `−t⁸/14 + 2t⁶/9 + 17t²/9 − 2`, the zero-mean witness for `|λ_f(p)| < 1`.
    pub fn small_values_g() -> Poly {
        Poly::new(vec![
            rational::int(-2),
            Rational::zero(),
            ratio(17, 9),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            ratio(2, 9),
            Rational::zero(),
            ratio(-1, 14),
        ])
    }

    /// `−t⁶/5.7 + 4t⁴/8.5 + 17t²/18 − 1`.
    pub fn mid_band_g() -> Poly {
        Poly::new(vec![
            rational::int(-1),
            Rational::zero(),
            ratio(17, 18),
            Rational::zero(),
            ratio(8, 17),
            Rational::zero(),
            ratio(-10, 57),
        ])
    }

    /// `t²(1 − t²)(t² − 4) = −t⁶ + 5t⁴ − 4t²`.
    pub fn g_alpha() -> Poly {
        Poly::from_ints(&[0, 0, -4, 0, 5, 0, -1])
    }

    /// `−t²(t² − a)(t² − 4)`.
    pub fn banded(a: &Rational) -> Poly {
        let t2 = Poly::monomial(2, Rational::one());
        let f1 = &t2 - &Poly::constant(a.clone());
        let f2 = &t2 - &Poly::constant(rational::int(4));
        -(&(&t2 * &f1) * &f2)
    }

    /// `t⁴(t² − 2)`.
    pub fn large_values_q() -> Poly {
        Poly::from_ints(&[0, 0, 0, 0, -2, 0, 1])
    }

    /// `−t⁶ + 2t⁴ + 1`.
    pub fn large_values_v() -> Poly {
        Poly::from_ints(&[1, 0, 0, 0, 2, 0, -1])
    }

    /// `a − t²`.
    pub fn small_values_family(a: &Rational) -> Poly {
        Poly::new(vec![a.clone(), Rational::zero(), rational::int(-1)])
    }
}
