//! Strategies and per-case checks shared by the property and acceptance targets.
#![allow(dead_code)]

use hecke_core::analysis::{extremum_on_interval, isolate_roots, Mode, RootCounter};
use hecke_core::bounds::positive_part_bound;
use hecke_core::empirics::dataset::{coefficient_at, Source, Value, Values};
use hecke_core::empirics::primes::first_primes;
use hecke_core::empirics::sampling::semicircle_values;
use hecke_core::empirics::EigenvalueDataset;
use hecke_core::interval::RatInterval;
use hecke_core::moments::{asymptotic_mean, Hypothesis};
use hecke_core::point::Point;
use hecke_core::poly::{from_hecke_basis, named, to_hecke_basis, Poly};
use hecke_core::rational::{int, ratio, Rational};
use hecke_core::region::Region;
use hecke_core::search::{improve_bound, SearchConfig};
use hecke_core::Pattern;
use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 1000;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
}

pub fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rational(), 1..=max_deg + 1).prop_map(Poly::new)
}

fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    poly(max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

// --- basis round-trip -------------------------------------------------------

pub fn basis_round_trip_strategy() -> impl Strategy<Value = Poly> {
    poly(16)
}

/// Direct evaluation of `Σ c_j h_j(t)` by the three-term recurrence.
fn hecke_eval(coeffs: &[Rational], t: &Rational) -> Rational {
    let (mut prev, mut cur) = (Rational::from_integer(0.into()), int(1));
    let mut acc = int(0);
    for c in coeffs {
        acc += c * &cur;
        let next = t * &cur - &prev;
        prev = cur;
        cur = next;
    }
    acc
}

pub fn basis_round_trip(p: &Poly) -> Result<(), TestCaseError> {
    let e = to_hecke_basis(p);
    prop_assert_eq!(&from_hecke_basis(&e), p);
    for t in [ratio(-7, 3), int(0), ratio(1, 2), int(2), ratio(5, 2)] {
        prop_assert_eq!(hecke_eval(e.coeffs(), &t), p.eval(&t));
    }
    Ok(())
}

// --- Sturm soundness ---------------------------------------------------------

/// Distinct rational roots, a positive irreducible-over-ℝ factor and a window.
pub fn sturm_strategy() -> impl Strategy<Value = (Vec<Rational>, Rational, Rational, Rational)> {
    (
        prop::collection::btree_set((-60i64..=60, 1i64..=6).prop_map(|(n, d)| ratio(n, d)), 1..=6),
        (1i64..=9, 1i64..=4).prop_map(|(n, d)| ratio(n, d)),
        small_rational(),
        small_rational(),
    )
        .prop_map(|(roots, q, a, b)| {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (roots.into_iter().collect(), q, a, b)
        })
}

pub fn sturm_soundness(roots: &[Rational], q: &Rational, a: &Rational, b: &Rational) -> Result<(), TestCaseError> {
    let mut p = Poly::monomial(2, int(1)) + Poly::constant(q.clone());
    for r in roots {
        p = &p * &(Poly::t() - Poly::constant(r.clone()));
    }
    // repeat one root to exercise the square-free reduction
    p = &p * &(Poly::t() - Poly::constant(roots[0].clone()));
    let c = RootCounter::new(&p);
    let expect_half_open = roots.iter().filter(|r| *r > a && *r <= b).count();
    let expect_closed = roots.iter().filter(|r| *r >= a && *r <= b).count();
    let (pa, pb) = (Point::Rational(a.clone()), Point::Rational(b.clone()));
    prop_assert_eq!(c.count(&pa, &pb), if a == b { 0 } else { expect_half_open });
    prop_assert_eq!(c.count_closed(&pa, &pb), expect_closed);
    let iso = isolate_roots(&p, &RatInterval::new(a.clone(), b.clone()), &ratio(1, 1000));
    prop_assert_eq!(iso.len(), expect_closed);
    let inside: Vec<&Rational> = roots.iter().filter(|r| *r >= a && *r <= b).collect();
    for (enc, r) in iso.iter().zip(inside) {
        prop_assert!(enc.lo <= *r && *r <= enc.hi);
        prop_assert!(&enc.hi - &enc.lo <= ratio(1, 1000));
    }
    Ok(())
}

// --- extremum soundness --------------------------------------------------------

pub fn extremum_strategy() -> impl Strategy<Value = (Poly, Rational, Rational, bool)> {
    (nonzero_poly(7), small_rational(), (1i64..=40, 1i64..=8), any::<bool>()).prop_map(|(p, a, (w, d), max)| {
        let a = &a / int(8);
        let b = &a + ratio(w, d) / int(4);
        (p, a, b, max)
    })
}

pub fn extremum_soundness(p: &Poly, a: &Rational, b: &Rational, max: bool) -> Result<(), TestCaseError> {
    let mode = if max { Mode::Max } else { Mode::Min };
    let e =
        extremum_on_interval(p, &Point::Rational(a.clone()), &Point::Rational(b.clone()), mode, &ratio(1, 1_000_000))
            .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(e.value_lo <= e.value_hi);
    // Every exactly evaluated grid value respects the enclosure's outer side,
    // and the enclosure's inner side is attained up to a Lipschitz slack.
    let n = 64;
    let width = b - a;
    let d = p.derivative();
    let lip: Rational = d
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let m = a.abs().max(b.abs());
            c.abs() * num_traits::pow(m, k)
        })
        .fold(int(0), |s, x| s + x);
    let slack = &lip * &width / int(n as i64);
    let mut best: Option<Rational> = None;
    for i in 0..=n {
        let t = a + &width * ratio(i as i64, n as i64);
        let v = p.eval(&t);
        if max {
            prop_assert!(v <= e.value_hi);
        } else {
            prop_assert!(v >= e.value_lo);
        }
        best = Some(match best {
            None => v,
            Some(bv) if (max && v > bv) || (!max && v < bv) => v,
            Some(bv) => bv,
        });
    }
    let best = best.unwrap();
    if max {
        prop_assert!(e.value_lo <= &best + &slack);
    } else {
        prop_assert!(e.value_hi >= &best - &slack);
    }
    Ok(())
}

// --- prime-power recurrence consistency -----------------------------------------

pub const HR_PRIMES: usize = 12;

/// Eigenvalues for the first primes and an index `n` built from them.
pub fn hr_strategy() -> impl Strategy<Value = (Vec<Rational>, Vec<u32>)> {
    (
        prop::collection::vec((-16i64..=16, 1i64..=8).prop_map(|(n, d)| ratio(n, d)), HR_PRIMES),
        prop::collection::vec(0u32..=3, HR_PRIMES).prop_map(|mut e| {
            // keep n well inside u64
            let ps = first_primes(HR_PRIMES).unwrap();
            let mut budget = 40.0;
            for (k, p) in e.iter_mut().zip(ps) {
                while *k > 0 && (p as f64).ln() * *k as f64 > budget {
                    *k -= 1;
                }
                budget -= (p as f64).ln() * *k as f64;
            }
            e
        }),
    )
}

pub fn hr_consistency(values: &[Rational], exps: &[u32]) -> Result<(), TestCaseError> {
    let ps = first_primes(HR_PRIMES).unwrap();
    let d =
        EigenvalueDataset::new(ps.clone(), Values::Exact(values.to_vec()), Source::Ingested { digest: String::new() });
    let mut n: u64 = 1;
    let mut expect = int(1);
    for ((&p, a), &e) in ps.iter().zip(values).zip(exps) {
        n *= p.pow(e);
        // λ(p^e) as the coefficient of x^e in 1/(1 − a x + x²)
        let mut series = vec![int(1), a.clone()];
        for k in 2..=e as usize {
            let next = a * &series[k - 1] - &series[k - 2];
            series.push(next);
        }
        expect *= &series[e as usize];
    }
    match coefficient_at(n, &d).map_err(|e| TestCaseError::fail(e.to_string()))? {
        Value::Exact(v) => prop_assert_eq!(v, expect),
        Value::Float(_) => return Err(TestCaseError::fail("exact dataset produced a float")),
    }
    // The float branch agrees with sin((e+1)θ)/sin θ at a = 2cos θ.
    let fl: Vec<f64> = values.iter().map(|v| hecke_core::rational::to_f64(v).clamp(-1.99, 1.99)).collect();
    let df = EigenvalueDataset::new(ps.clone(), Values::Float(fl.clone()), Source::Ingested { digest: String::new() });
    let mut want = 1.0;
    for (a, &e) in fl.iter().zip(exps) {
        let th = (a / 2.0).acos();
        want *= ((e as f64 + 1.0) * th).sin() / th.sin();
    }
    let got = coefficient_at(n, &df).map_err(|e| TestCaseError::fail(e.to_string()))?.to_f64();
    prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {}", got, want);
    Ok(())
}

// --- seed reproducibility --------------------------------------------------------

pub fn seed_strategy() -> impl Strategy<Value = (u64, usize, usize, usize)> {
    (any::<u64>(), 1usize..=600, 1usize..=17, 1usize..=17)
}

pub fn seed_reproducibility(seed: u64, n: usize, s1: usize, s2: usize) -> Result<(), TestCaseError> {
    let a = semicircle_values(n, seed, s1);
    let b = semicircle_values(n, seed, s2);
    prop_assert_eq!(&a, &b);
    prop_assert!(a.iter().all(|x| (-2.0..=2.0).contains(x)));
    let prefix = semicircle_values(n / 2, seed, s2);
    prop_assert_eq!(&a[..n / 2], &prefix[..]);
    Ok(())
}

// --- search no-regression ---------------------------------------------------------

/// Valid starts: `a − t²` on `|t| ≤ 2`, or a positive multiple of `g_α` on `1 ≤ |t| ≤ 2`.
pub fn search_strategy() -> impl Strategy<Value = (Poly, Region, usize, u64)> {
    prop_oneof![
        (5i64..=16, 0u64..1000).prop_map(|(a4, seed)| {
            (named::small_values_family(&ratio(a4, 4)), Region::symmetric_rational(int(0), int(2)), 2usize, seed)
        }),
        (1i64..=20, 1i64..=5, 0u64..1000).prop_map(|(n, d, seed)| {
            (named::g_alpha().scale(&ratio(n, d)), Region::symmetric_rational(int(1), int(2)), 6usize, seed)
        }),
    ]
}

pub fn search_no_regression(start: &Poly, region: &Region, cap: usize, seed: u64) -> Result<(), TestCaseError> {
    let cfg = SearchConfig { degree_cap: cap, budget: 25, restarts: 2, seed, ..Default::default() };
    let r = improve_bound(start, region, Hypothesis::Horizon, Pattern::PositivePart, &cfg)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let s = positive_part_bound(start, region, Hypothesis::Horizon).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&r.start_bound.bound, &s.bound);
    prop_assert!(r.best_bound.bound >= s.bound);
    // the reported bound is exactly what the engine certifies for the witness
    let again = positive_part_bound(&r.best_witness, region, Hypothesis::Horizon)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(again.bound, r.best_bound.bound);
    Ok(())
}

// --- linearity and scale invariance ------------------------------------------------

pub fn linearity(p: &Poly, q: &Poly, c: &Rational) -> Result<(), TestCaseError> {
    let m = |x: &Poly| asymptotic_mean(x, Hypothesis::Horizon).unwrap().lo;
    let combo = p + &q.scale(c);
    prop_assert_eq!(m(&combo), m(p) + c * m(q));
    Ok(())
}
