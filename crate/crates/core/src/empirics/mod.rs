//! Empirical side: sampled and ingested eigenvalue data, window scans and
//! the large-coefficient (Ω, Ω±) constructions.

pub mod dataset;
pub mod omega;
pub mod primes;
pub mod sampling;
pub mod scans;

pub use dataset::{
    coefficient_at, export_csv, ingest_csv, parse_csv, DataError, EigenvalueDataset, Source, Value, Values,
};
pub use omega::{omega_construct, omega_pm_transform, OmegaError, OmegaWitness, SignedWitnessPair};
pub use sampling::{sample_sato_tate, sample_sato_tate_up_to};
pub use scans::{empirical_density, empirical_moment, sign_change_scan, DensityEstimate, SignScan, Transform};
