//! Bundled reference datasets, one per canonical agreement scenario.
//!
//! `pefr` is the classic peak-expiratory-flow comparison (Bland & Altman,
//! 1986): 17 subjects, each measured twice with a large Wright meter (the
//! reference, x) and twice with a Mini Wright meter (the candidate, y).
//! The other four are synthetic method-comparison samples, each built to
//! show one canonical signature: a constant bias that translation forgives
//! (`syst-bp`), a proportional bias removable by rescaling (`plasma-volume`),
//! a precision loss with no bias (`fat-milk`), and a joint accuracy-plus-
//! precision failure where the error-variance ratio masks the slope test
//! (`blocking-drugs`).

use crate::error::{Error, Result};
use crate::io::{parse_csv, ColumnMap};
use crate::sample::PairedSample;

pub const FIXTURE_NAMES: [&str; 5] = [
    "pefr",
    "syst-bp",
    "plasma-volume",
    "fat-milk",
    "blocking-drugs",
];

/// Raw CSV text of a bundled dataset.
pub fn fixture_csv(name: &str) -> Result<&'static str> {
    match name {
        "pefr" => Ok(include_str!("fixtures/pefr.csv")),
        "syst-bp" => Ok(include_str!("fixtures/syst_bp.csv")),
        "plasma-volume" => Ok(include_str!("fixtures/plasma_volume.csv")),
        "fat-milk" => Ok(include_str!("fixtures/fat_milk.csv")),
        "blocking-drugs" => Ok(include_str!("fixtures/blocking_drugs.csv")),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

pub fn load_fixture(name: &str) -> Result<PairedSample> {
    match name {
        "pefr" => load_pefr(),
        "syst-bp" => simple(name, "observer_mmhg", "machine_mmhg", "mmHg"),
        "plasma-volume" => simple(name, "nadler_pct", "hurley_pct", "% of expected"),
        "fat-milk" => simple(name, "gerber_gpct", "electrical_gpct", "g/100 mL"),
        "blocking-drugs" => simple(name, "peer_score", "self_score", "score"),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

fn simple(name: &str, x: &str, y: &str, unit: &str) -> Result<PairedSample> {
    let map = ColumnMap {
        x: x.into(),
        y: y.into(),
        id: Some("id".into()),
    };
    Ok(parse_csv(fixture_csv(name)?.as_bytes(), &map)?.with_unit_label(unit))
}

fn load_pefr() -> Result<PairedSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(fixture_csv("pefr")?.as_bytes());
    let mut ids = Vec::new();
    let mut x_reps = Vec::new();
    let mut y_reps = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|_| Error::RowLengthMismatch {
            row: k + 1,
            got: 0,
            expected: 5,
        })?;
        let num = |i: usize| -> Result<f64> {
            record
                .get(i)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::NonNumericCell {
                    row: k + 1,
                    column: i.to_string(),
                    cell: record.get(i).unwrap_or("").to_string(),
                })
        };
        ids.push(record.get(0).unwrap_or("").to_string());
        x_reps.push(vec![num(1)?, num(2)?]);
        y_reps.push(vec![num(3)?, num(4)?]);
    }
    Ok(PairedSample::with_replicates(ids, x_reps, y_reps)?.with_unit_label("L/min"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn documented_sample_sizes() {
        for (name, n) in [
            ("pefr", 17),
            ("syst-bp", 85),
            ("plasma-volume", 99),
            ("fat-milk", 45),
            ("blocking-drugs", 88),
        ] {
            assert_eq!(load_fixture(name).unwrap().n(), n, "{name}");
        }
    }

    #[test]
    fn unknown_name_rejected() {
        assert_eq!(
            load_fixture("peff").unwrap_err(),
            Error::UnknownFixture("peff".into())
        );
        assert!(fixture_csv("nope").is_err());
    }

    #[test]
    fn pefr_collapses_duplicate_readings_to_means() {
        let s = load_fixture("pefr").unwrap();
        assert!(s.replicates.is_some());
        assert_relative_eq!(s.x[0], (494.0 + 490.0) / 2.0);
        assert_relative_eq!(s.y[0], (512.0 + 525.0) / 2.0);
        assert_eq!(s.unit_label.as_deref(), Some("L/min"));
        let reps = s.replicates.as_ref().unwrap();
        assert!(reps.x.iter().chain(&reps.y).all(|r| r.len() == 2));
    }

    #[test]
    fn plasma_volume_scale_near_documented_value() {
        let s = load_fixture("plasma-volume").unwrap();
        let c = crate::structural::calibration_scale(&s).unwrap();
        assert!((c - 1.1038).abs() < 2e-3, "scale {c}");
    }

    #[test]
    fn fixtures_reparse_identically() {
        for name in FIXTURE_NAMES {
            let s = load_fixture(name).unwrap();
            assert!(s.x.iter().chain(&s.y).all(|v| v.is_finite()));
            let text = crate::io::to_csv(&s);
            let again = parse_csv(
                text.as_bytes(),
                &ColumnMap {
                    x: "x".into(),
                    y: "y".into(),
                    id: Some("id".into()),
                },
            )
            .unwrap();
            assert_eq!(again.x, s.x);
            assert_eq!(again.y, s.y);
            assert_eq!(again.subject_ids, s.subject_ids);
        }
    }
}
