//! Exact engine for the polynomial-moment method on Hecke eigenvalues.
//!
//! Polynomials in `t = λ_f(p)` are manipulated over ℚ, their asymptotic
//! means come from the moment ledger, and bound engines turn a test
//! polynomial plus a region into a certified lower density bound.

pub mod analysis;
pub mod bounds;
pub mod empirics;
pub mod interval;
pub mod moments;
pub mod point;
pub mod poly;
pub mod rational;
pub mod region;
pub mod repro;
pub mod search;

pub use analysis::{
    extremum_on_interval, isolate_roots, sign_on_region, sturm_sequence, ExtremumEnclosure, Mode, RootEnclosure,
    SignClass,
};
pub use bounds::{
    abs_first_moment_lower, cauchy_schwarz_positivity, complement_bound, infinitude_by_contradiction, optimal_shift,
    positive_part_bound, BoundError, DensityBound, InfinitudeCertificate, Overrides, Pattern,
};
pub use interval::RatInterval;
pub use moments::{asymptotic_mean, sato_tate_moment, sato_tate_region_measure, Hypothesis, MeanEnclosure};
pub use point::Point;
pub use poly::{from_hecke_basis, hecke_basis_poly, sym2_pullback, to_hecke_basis, HeckeExpansion, Poly, PolyLiteral};
pub use rational::Rational;
pub use region::{Piece, Region};
pub use repro::{reproduce, ReproReport, ReproRow, Status};
pub use search::{grid_scan_shift, improve_bound, SearchConfig, SearchError, SearchResult};
