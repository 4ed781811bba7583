//! CSV ingestion with strict validation, CSV serialization, and the value
//! transforms (logarithm, axis scaling) used to chase bias structure.

use std::io::Read;

use crate::error::{Error, Result};
use crate::sample::PairedSample;

/// Which header names hold the reference (x), candidate (y), and optional
/// subject-id columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMap {
    pub x: String,
    pub y: String,
    pub id: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            x: "x".into(),
            y: "y".into(),
            id: None,
        }
    }
}

/// Parses a headered, comma-separated, decimal-point CSV into a sample.
/// Missing values, extra commas, and locale decimals are hard errors.
pub fn parse_csv(source: impl Read, map: &ColumnMap) -> Result<PairedSample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|_| Error::EmptyInput)?
        .clone();
    let expected = headers.len();
    if expected == 0 {
        return Err(Error::EmptyInput);
    }
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let xi = col(&map.x)?;
    let yi = col(&map.y)?;
    let idi = map.id.as_deref().map(col).transpose()?;

    let mut ids = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|_| Error::RowLengthMismatch {
            row,
            got: 0,
            expected,
        })?;
        if record.len() != expected {
            return Err(Error::RowLengthMismatch {
                row,
                got: record.len(),
                expected,
            });
        }
        let cell = |i: usize, column: &str| -> Result<f64> {
            let raw = record.get(i).unwrap_or("").trim();
            raw.parse::<f64>().map_err(|_| Error::NonNumericCell {
                row,
                column: column.to_string(),
                cell: raw.to_string(),
            })
        };
        x.push(cell(xi, &map.x)?);
        y.push(cell(yi, &map.y)?);
        ids.push(match idi {
            Some(i) => record.get(i).unwrap_or("").trim().to_string(),
            None => row.to_string(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    PairedSample::new(ids, x, y)
}

/// Serializes the collapsed sample back to `id,x,y` CSV (shortest exact
/// decimal representation, so parse → serialize → parse is lossless).
pub fn to_csv(sample: &PairedSample) -> String {
    let mut out = String::from("id,x,y\n");
    for i in 0..sample.n() {
        out.push_str(&format!(
            "{},{},{}\n",
            sample.subject_ids[i], sample.x[i], sample.y[i]
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Log,
    ScaleY(f64),
    ScaleX(f64),
}

impl Transform {
    fn label(&self) -> String {
        match self {
            Transform::Log => "log".into(),
            Transform::ScaleY(c) => format!("y scaled by {c}"),
            Transform::ScaleX(c) => format!("x scaled by {c}"),
        }
    }
}

/// Applies a value transform, annotating the unit label with what was done.
pub fn transform(sample: &PairedSample, op: Transform) -> Result<PairedSample> {
    let apply = |values: &[f64], f: &dyn Fn(f64) -> f64| values.iter().map(|&v| f(v)).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = match op {
        Transform::Log => {
            for (row, v) in sample.x.iter().chain(&sample.y).enumerate() {
                if *v <= 0.0 {
                    return Err(Error::NonPositiveForLog { row: row % sample.n() });
                }
            }
            (apply(&sample.x, &f64::ln), apply(&sample.y, &f64::ln))
        }
        Transform::ScaleY(c) => {
            if c == 0.0 {
                return Err(Error::ZeroScale);
            }
            (sample.x.clone(), apply(&sample.y, &|v| c * v))
        }
        Transform::ScaleX(c) => {
            if c == 0.0 {
                return Err(Error::ZeroScale);
            }
            (apply(&sample.x, &|v| c * v), sample.y.clone())
        }
    };
    let mut out = PairedSample::new(sample.subject_ids.clone(), x, y)?;
    out.unit_label = Some(match &sample.unit_label {
        Some(u) => format!("{u}, {}", op.label()),
        None => op.label(),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn map() -> ColumnMap {
        ColumnMap {
            x: "x".into(),
            y: "y".into(),
            id: Some("id".into()),
        }
    }

    #[test]
    fn parses_minimal_csv() {
        let s = parse_csv(
            "id,x,y\n1,2.0,2.1\n2,3.0,2.9\n3,4.0,4.2\n".as_bytes(),
            &map(),
        )
        .unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.subject_ids, vec!["1", "2", "3"]);
        assert_eq!(s.x, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn reports_non_numeric_cell_with_position() {
        let err = parse_csv(
            "id,x,y\n1,2.0,2.1\n2,3.0,abc\n3,4.0,4.2\n".as_bytes(),
            &map(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::NonNumericCell {
                row: 2,
                column: "y".into(),
                cell: "abc".into()
            }
        );
    }

    #[test]
    fn rejects_comma_decimals() {
        let err = parse_csv(
            "id,x,y\n1,\"2,5\",2.1\n2,3.0,2.9\n3,4.0,4.2\n".as_bytes(),
            &map(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonNumericCell { row: 1, .. }));
    }

    #[test]
    fn missing_column_and_empty_input() {
        assert_eq!(
            parse_csv("id,x,z\n1,2,3\n".as_bytes(), &map()).unwrap_err(),
            Error::MissingColumn("y".into())
        );
        assert_eq!(
            parse_csv("id,x,y\n".as_bytes(), &map()).unwrap_err(),
            Error::EmptyInput
        );
    }

    #[test]
    fn short_row_is_an_error() {
        let err = parse_csv(
            "id,x,y\n1,2.0,2.1\n2,3.0\n3,4.0,4.2\n".as_bytes(),
            &map(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::RowLengthMismatch {
                row: 2,
                got: 2,
                expected: 3
            }
        );
    }

    #[test]
    fn generates_ids_when_unmapped() {
        let s = parse_csv(
            "x,y\n2.0,2.1\n3.0,2.9\n4.0,4.2\n".as_bytes(),
            &ColumnMap::default(),
        )
        .unwrap();
        assert_eq!(s.subject_ids, vec!["1", "2", "3"]);
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let text = "id,x,y\na,2.25,2.1\nb,3.5,2.9\nc,0.1,4.2\n";
        let first = parse_csv(text.as_bytes(), &map()).unwrap();
        let second = parse_csv(to_csv(&first).as_bytes(), &map()).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn scale_by_one_is_identity() {
        let s = parse_csv("x,y\n2.0,2.1\n3.0,2.9\n4.0,4.2\n".as_bytes(), &ColumnMap::default())
            .unwrap();
        let t = transform(&s, Transform::ScaleY(1.0)).unwrap();
        assert_eq!(t.x, s.x);
        assert_eq!(t.y, s.y);
        assert_eq!(t.unit_label.as_deref(), Some("y scaled by 1"));
    }

    #[test]
    fn scale_round_trip() {
        let s = parse_csv("x,y\n2.0,2.1\n3.0,2.9\n4.0,4.2\n".as_bytes(), &ColumnMap::default())
            .unwrap();
        let back = transform(&transform(&s, Transform::ScaleX(3.7)).unwrap(), Transform::ScaleX(1.0 / 3.7))
            .unwrap();
        for (a, b) in back.x.iter().zip(&s.x) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn log_of_ones_is_zero_and_rejects_nonpositive() {
        let s = parse_csv("x,y\n1,1\n1,1\n1,1\n".as_bytes(), &ColumnMap::default()).unwrap();
        let t = transform(&s, Transform::Log).unwrap();
        assert!(t.x.iter().chain(&t.y).all(|&v| v == 0.0));

        let s = parse_csv("x,y\n1,1\n-2,1\n1,1\n".as_bytes(), &ColumnMap::default()).unwrap();
        assert_eq!(
            transform(&s, Transform::Log).unwrap_err(),
            Error::NonPositiveForLog { row: 1 }
        );
    }

    #[test]
    fn zero_scale_rejected() {
        let s = parse_csv("x,y\n1,1\n2,1\n3,1\n".as_bytes(), &ColumnMap::default()).unwrap();
        assert_eq!(transform(&s, Transform::ScaleY(0.0)).unwrap_err(), Error::ZeroScale);
    }
}
