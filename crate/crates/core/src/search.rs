//! Derivative-free search for better test polynomials.
//!
//! Candidates are even polynomials written in the Hecke basis with the
//! `h_0` coefficient fixed, so the mean constraint holds at every iterate.
//! The hot loop scores candidates with a float surrogate; the winner is
//! snapped to nearby simple rationals and recomputed by the exact engines,
//! and the start is kept whenever nothing verified beats it.

use std::cmp::Ordering;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundError, DensityBound, Overrides, Pattern, SecondMomentSource};
use crate::moments::Hypothesis;
use crate::poly::{from_hecke_basis, hecke_basis_table, to_hecke_basis, HeckeExpansion, Poly};
use crate::rational::{self, Rational};
use crate::region::Region;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("start polynomial is invalid: {0}")]
    StartInvalid(String),
    #[error("search configuration is invalid: {0}")]
    Config(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Largest Hecke index searched; even, at most 8.
    pub degree_cap: usize,
    /// Simplex iterations per restart.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Per free coefficient `(lo, hi)` for `h_2, h_4, ...`; default is a
    /// band of half-width `2·max(|c|, 1)` around the start.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r#box: Option<Vec<(f64, f64)>>,
    /// Restart offsets as a fraction of each box width.
    pub perturbation: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { degree_cap: 8, budget: 2000, restarts: 8, seed: 0, r#box: None, perturbation: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    #[serde(with = "crate::poly::serde_literal")]
    pub best_witness: Poly,
    pub best_bound: DensityBound,
    pub start_bound: DensityBound,
    /// Best surrogate objective after each iteration, restarts in order.
    pub trace: Vec<f64>,
    /// The final bound was recomputed exactly and the surrogate agreed to 1e-6.
    pub verified: bool,
    pub surrogate_objective: f64,
    pub improved: bool,
}

/// Gap allowed between surrogate and exact objective at the final point.
pub const VERIFY_GAP: f64 = 1e-6;

// Dense float representation of the Hecke basis up to `cap`.
struct Basis {
    table: Vec<Vec<f64>>,
}

impl Basis {
    fn new(cap: usize) -> Self {
        Self { table: hecke_basis_table(cap).iter().map(Poly::to_f64_coeffs).collect() }
    }

    /// Monomial coefficients of `c0·h_0 + Σ x_i h_{2i+2}`.
    fn monomial(&self, c0: f64, x: &[f64]) -> Vec<f64> {
        let deg = 2 * x.len();
        let mut out = vec![0.0; deg + 1];
        out[0] = c0;
        for (i, &xi) in x.iter().enumerate() {
            for (k, b) in self.table[2 * i + 2].iter().enumerate() {
                out[k] += xi * b;
            }
        }
        out
    }
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

fn deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

const GRID: usize = 256;

// Max of `c` on `[lo, hi]`: endpoints plus bisected sign changes of `c'` on a grid.
fn float_max(c: &[f64], d: &[f64], lo: f64, hi: f64) -> f64 {
    let mut best = horner(c, lo).max(horner(c, hi));
    if hi <= lo {
        return best;
    }
    let step = (hi - lo) / GRID as f64;
    let mut prev_t = lo;
    let mut prev_d = horner(d, lo);
    for i in 1..=GRID {
        let t = if i == GRID { hi } else { lo + step * i as f64 };
        let dt = horner(d, t);
        if prev_d > 0.0 && dt <= 0.0 {
            let (mut a, mut b) = (prev_t, t);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if horner(d, m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            best = best.max(horner(c, 0.5 * (a + b)));
        }
        prev_t = t;
        prev_d = dt;
    }
    best
}

// Max over a ray `[a, ∞)` (or `(−∞, a]` when `left`): fine grid near `a`,
// geometric samples beyond; `+∞` if the polynomial grows there.
fn float_ray_max(c: &[f64], d: &[f64], a: f64, left: bool) -> f64 {
    let deg = c.len() - 1;
    let lead = c[deg];
    let lead_sign = if left && deg % 2 == 1 { -lead } else { lead };
    if lead_sign > 0.0 {
        return f64::INFINITY;
    }
    let (lo, hi) = if left { (a - 4.0, a) } else { (a, a + 4.0) };
    let mut best = float_max(c, d, lo, hi);
    for k in 0..64 {
        let off = 4.0 * 2f64.powi(k);
        let t = if left { a - off } else { a + off };
        best = best.max(horner(c, t));
    }
    best
}

#[derive(Debug, Clone)]
struct FloatPiece {
    lo: f64,
    hi: f64,
}

fn float_pieces(r: &Region) -> Vec<FloatPiece> {
    r.pieces().iter().map(|p| FloatPiece { lo: p.lo.to_f64(), hi: p.hi.to_f64() }).collect()
}

fn region_max(c: &[f64], d: &[f64], pieces: &[FloatPiece]) -> f64 {
    pieces
        .iter()
        .map(|p| match (p.lo.is_finite(), p.hi.is_finite()) {
            (true, true) => float_max(c, d, p.lo, p.hi),
            (true, false) => float_ray_max(c, d, p.lo, false),
            (false, true) => float_ray_max(c, d, p.hi, true),
            (false, false) => float_ray_max(c, d, 0.0, false).max(float_ray_max(c, d, 0.0, true)),
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Float surrogate of a pattern's bound; negative while infeasible.
struct Surrogate {
    pattern: Pattern,
    basis: Basis,
    c0: f64,
    on: Vec<FloatPiece>,
    off: Vec<FloatPiece>,
    support: Vec<FloatPiece>,
}

impl Surrogate {
    fn objective(&self, x: &[f64]) -> f64 {
        let c = self.basis.monomial(self.c0, x);
        let d = deriv(&c);
        match self.pattern {
            Pattern::PositivePart => {
                let viol = region_max(&c, &d, &self.off);
                if viol > 1e-12 {
                    return -viol.min(1e6);
                }
                let sup = region_max(&c, &d, &self.on);
                if sup <= 0.0 || !sup.is_finite() {
                    return -1.0;
                }
                self.c0 / sup
            }
            Pattern::ShiftedSquare | Pattern::Complement => {
                let neg: Vec<f64> = c.iter().map(|v| -v).collect();
                let nd = deriv(&neg);
                let m = -region_max(&neg, &nd, &self.off);
                if m <= 0.0 || !m.is_finite() {
                    return if m.is_finite() { m.max(-1e6) } else { -1e6 };
                }
                let sq = square(&c);
                let big_c = region_max(&sq, &deriv(&sq), &self.support);
                if !big_c.is_finite() {
                    return -1e6;
                }
                m * m / (big_c + m * m)
            }
        }
    }
}

fn square(c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * c.len() - 1];
    for (i, a) in c.iter().enumerate() {
        for (j, b) in c.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn exact_bound(p: &Poly, region: &Region, h: Hypothesis, pattern: Pattern) -> Result<DensityBound, BoundError> {
    match pattern {
        Pattern::PositivePart => bounds::positive_part_bound(p, region, h),
        Pattern::Complement => bounds::complement_bound(p, region, h),
        Pattern::ShiftedSquare => {
            Ok(bounds::optimal_shift_with(p, region, h, &Overrides::default(), SecondMomentSource::SupNorm)?.bound)
        }
    }
}

struct RestartOutcome {
    x: Vec<f64>,
    value: f64,
    trace: Vec<f64>,
}

fn clamp(x: &mut [f64], bx: &[(f64, f64)]) {
    for (v, (lo, hi)) in x.iter_mut().zip(bx) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Nelder–Mead maximization inside a box (iterates are projected).
fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, start: &[f64], bx: &[(f64, f64)], budget: usize) -> RestartOutcome {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut v = start.to_vec();
        let w = bx[i].1 - bx[i].0;
        v[i] += if v[i] + 0.1 * w <= bx[i].1 { 0.1 * w } else { -0.1 * w };
        clamp(&mut v, bx);
        simplex.push(v);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut trace = Vec::with_capacity(budget);
    let by_value = |a: &f64, b: &f64| b.partial_cmp(a).unwrap_or(Ordering::Equal);
    for _ in 0..budget {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| by_value(&vals[a], &vals[b]).then(a.cmp(&b)));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        trace.push(vals[0]);
        let spread = simplex
            .iter()
            .skip(1)
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread < 1e-13 {
            continue;
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64).collect();
        let toward = |coef: f64| -> Vec<f64> {
            let mut p: Vec<f64> = (0..n).map(|k| centroid[k] + coef * (simplex[n][k] - centroid[k])).collect();
            clamp(&mut p, bx);
            p
        };
        let refl = toward(-1.0);
        let fr = f(&refl);
        if fr > vals[0] {
            let exp = toward(-2.0);
            let fe = f(&exp);
            if fe > fr {
                simplex[n] = exp;
                vals[n] = fe;
            } else {
                simplex[n] = refl;
                vals[n] = fr;
            }
        } else if fr > vals[n - 1] {
            simplex[n] = refl;
            vals[n] = fr;
        } else {
            let (con, fc) = if fr > vals[n] {
                let c = toward(-0.5);
                let v = f(&c);
                (c, v)
            } else {
                let c = toward(0.5);
                let v = f(&c);
                (c, v)
            };
            if fc > vals[n].max(fr) {
                simplex[n] = con;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let mut p: Vec<f64> =
                        (0..n).map(|k| simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k])).collect();
                    clamp(&mut p, bx);
                    vals[i] = f(&p);
                    simplex[i] = p;
                }
            }
        }
    }
    let best =
        (0..=n).max_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(Ordering::Equal).then(b.cmp(&a))).unwrap();
    RestartOutcome { x: simplex[best].clone(), value: vals[best], trace }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Simple rationals near `x` at decreasing tolerances, then `x` itself.
fn snaps(x: &[f64]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for k in 2..=14 {
        let rel = 10f64.powi(-k);
        let v: Vec<Rational> = x.iter().map(|&xi| rational::approximate_f64(xi, rel)).collect();
        if !out.contains(&v) {
            out.push(v);
        }
    }
    let raw: Vec<Rational> = x.iter().map(|&xi| rational::from_f64(xi)).collect();
    if !out.contains(&raw) {
        out.push(raw);
    }
    out
}

fn poly_from(c0: &Rational, x: &[Rational]) -> Poly {
    let mut coeffs = vec![c0.clone()];
    for xi in x {
        coeffs.push(Rational::zero());
        coeffs.push(xi.clone());
    }
    from_hecke_basis(&HeckeExpansion::new(coeffs))
}

/// Local search from `start`, never returning anything worse than it.
pub fn improve_bound(
    start: &Poly,
    region: &Region,
    h: Hypothesis,
    pattern: Pattern,
    cfg: &SearchConfig,
) -> Result<SearchResult, SearchError> {
    if !cfg.degree_cap.is_multiple_of(2) || cfg.degree_cap < 2 || cfg.degree_cap > 8 {
        return Err(SearchError::Config(format!("degree_cap must be even in 2..=8, got {}", cfg.degree_cap)));
    }
    if pattern == Pattern::Complement {
        return Err(SearchError::Config("search supports positive_part and shifted_square".into()));
    }
    if !start.is_even() {
        return Err(SearchError::StartInvalid("start must be an even polynomial".into()));
    }
    if start.degree().unwrap_or(0) > cfg.degree_cap {
        return Err(SearchError::StartInvalid(format!("degree exceeds cap {}", cfg.degree_cap)));
    }
    let start_bound = exact_bound(start, region, h, pattern).map_err(|e| SearchError::StartInvalid(e.to_string()))?;
    let e = to_hecke_basis(start);
    let c0 = e.constant_term();
    let free = cfg.degree_cap / 2;
    let x0: Vec<f64> = (1..=free).map(|i| rational::to_f64(&e.coeff(2 * i))).collect();
    let bx: Vec<(f64, f64)> = match &cfg.r#box {
        Some(b) if b.len() == free => b.clone(),
        Some(b) => return Err(SearchError::Config(format!("box has {} entries, expected {free}", b.len()))),
        None => x0.iter().map(|&c| (c - 2.0 * c.abs().max(1.0), c + 2.0 * c.abs().max(1.0))).collect(),
    };
    let support = h.support();
    let (on, off) = match pattern {
        Pattern::PositivePart => (region.intersect(&support), region.complement_within(&support)),
        _ => (None, region.complement_within(&support)),
    };
    let surrogate = Surrogate {
        pattern,
        basis: Basis::new(cfg.degree_cap),
        c0: rational::to_f64(&c0),
        on: on.as_ref().map(float_pieces).unwrap_or_default(),
        off: off.as_ref().map(float_pieces).unwrap_or_default(),
        support: float_pieces(&support),
    };
    let f = |x: &[f64]| surrogate.objective(x);
    let restarts = cfg.restarts.max(1);
    let outcomes: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut s = x0.clone();
            if r > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(r as u64);
                for (v, (lo, hi)) in s.iter_mut().zip(&bx) {
                    *v += cfg.perturbation * (hi - lo) * (2.0 * rng.random::<f64>() - 1.0);
                }
                clamp(&mut s, &bx);
            }
            nelder_mead(&f, &s, &bx, cfg.budget)
        })
        .collect();
    let trace: Vec<f64> = outcomes.iter().flat_map(|o| o.trace.iter().copied()).collect();
    let best = outcomes
        .iter()
        .max_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal).then_with(|| lex_cmp(&b.x, &a.x)))
        .expect("at least one restart");

    let mut chosen: Option<(Poly, DensityBound, f64)> = None;
    if best.value > 0.0 {
        for cand in snaps(&best.x) {
            let p = poly_from(&c0, &cand);
            let Ok(b) = exact_bound(&p, region, h, pattern) else { continue };
            if b.bound <= start_bound.bound {
                continue;
            }
            let x: Vec<f64> = cand.iter().map(rational::to_f64).collect();
            let surr = f(&x);
            if chosen.as_ref().is_none_or(|(_, cb, _)| b.bound > cb.bound) {
                chosen = Some((p, b, surr));
            }
        }
    }
    let (best_witness, best_bound, surrogate_objective, improved) = match chosen {
        Some((p, b, s)) => (p, b, s, true),
        None => (start.clone(), start_bound.clone(), f(&x0), false),
    };
    let verified = (surrogate_objective - best_bound.bound_f64()).abs() < VERIFY_GAP;
    Ok(SearchResult { best_witness, best_bound, start_bound, trace, verified, surrogate_objective, improved })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftScanRow {
    pub a: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftScan {
    pub rows: Vec<ShiftScanRow>,
    pub argmax: f64,
    pub max: f64,
    pub a_star: f64,
    pub closed_form: f64,
}

/// `n` points log-spaced over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp()).collect()
}

/// Default scan grid: 4001 points over `[1, 10⁴]`.
pub fn default_shift_grid() -> Vec<f64> {
    log_grid(1.0, 1e4, 4001)
}

/// Tabulates `1 − (a² + C)/(a + m)²` against the closed-form optimum.
pub fn grid_scan_shift(
    g: &Poly,
    s: &Region,
    h: Hypothesis,
    grid: &[f64],
    ov: &Overrides,
) -> Result<ShiftScan, BoundError> {
    let k = bounds::shift_constants(g, s, h, ov, SecondMomentSource::SupNorm)?;
    Ok(scan_constants(rational::to_f64(&k.c.hi), rational::to_f64(&k.m.lo), grid))
}

pub fn scan_constants(c: f64, m: f64, grid: &[f64]) -> ShiftScan {
    let rows: Vec<ShiftScanRow> =
        grid.iter().map(|&a| ShiftScanRow { a, bound: bounds::shift_objective_f64(a, c, m) }).collect();
    let best = rows.iter().max_by(|x, y| x.bound.total_cmp(&y.bound)).expect("non-empty grid");
    ShiftScan { argmax: best.a, max: best.bound, a_star: c / m, closed_form: m * m / (c + m * m), rows }
}
