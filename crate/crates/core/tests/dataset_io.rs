use std::fs;

use hecke_core::empirics::dataset::{export_csv, ingest_csv, sha256_hex, write_csv, DataError, Source, Values};
use hecke_core::empirics::{sample_sato_tate, EigenvalueDataset};
use hecke_core::rational::ratio;

#[test]
fn float_sample_round_trips_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("st.csv");
    let d = sample_sato_tate(5000, 99).unwrap();
    write_csv(&d, &path).unwrap();
    let back = ingest_csv(&path).unwrap();
    assert_eq!(back.primes(), d.primes());
    assert_eq!(back.values(), d.values());
    let bytes = fs::read(&path).unwrap();
    assert_eq!(back.source(), &Source::Ingested { digest: sha256_hex(&bytes) });
    assert_eq!(export_csv(&back).as_bytes(), &bytes[..]);
}

#[test]
fn exact_values_stay_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exact.csv");
    let d = EigenvalueDataset::new(
        vec![2, 3, 5],
        Values::Exact(vec![ratio(1, 2), ratio(-3, 1), ratio(7, 4)]),
        Source::Ingested { digest: String::new() },
    );
    write_csv(&d, &path).unwrap();
    assert_eq!(fs::read_to_string(&path).unwrap(), "2,1/2\n3,-3/1\n5,7/4\n");
    let back = ingest_csv(&path).unwrap();
    assert!(back.is_exact());
    assert_eq!(back.values(), d.values());
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(ingest_csv(dir.path().join("absent.csv")), Err(DataError::Io(_))));
}
