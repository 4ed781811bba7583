use thiserror::Error;

/// Everything that can go wrong between raw CSV text and a finished verdict.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("too few subjects: need at least {min}, got {got}")]
    TooFewSubjects { min: usize, got: usize },

    #[error("non-finite value at row {row}")]
    NonFiniteInput { row: usize },

    #[error("length mismatch: x has {x_len} values, y has {y_len}")]
    LengthMismatch { x_len: usize, y_len: usize },

    #[error("degenerate predictor: zero variance, regression undefined")]
    DegeneratePredictor,

    #[error("zero residual variance with a nonzero statistic: exact data, p-value undefined")]
    DegenerateZeroResidual,

    #[error("invalid degrees of freedom: {0}")]
    InvalidDf(usize),

    #[error("lambda indeterminate: Grubbs variance components must both be positive (delta: {v_delta}, epsilon: {v_epsilon})")]
    LambdaIndeterminate { v_delta: f64, v_epsilon: f64 },

    #[error("subject {subject} has fewer than 2 replicates")]
    NoReplicates { subject: usize },

    #[error("Deming fit degenerate: zero covariance between techniques")]
    DemingDegenerate,

    #[error("candidate technique has zero mean: calibration scale undefined")]
    ZeroMeanCandidate,

    #[error("bad bootstrap config: {0}")]
    BadBootstrapConfig(String),

    #[error("bootstrap unstable: {degenerate} of {total} resamples were degenerate (limit 10%)")]
    BootstrapUnstable { degenerate: usize, total: usize },

    #[error("ellipse degenerate: bootstrap estimates are collinear")]
    EllipseDegenerate,

    #[error("missing column: {0}")]
    MissingColumn(String),

    #[error("non-numeric cell at row {row}, column {column}: {cell:?}")]
    NonNumericCell { row: usize, column: String, cell: String },

    #[error("row {row} has {got} fields, expected {expected}")]
    RowLengthMismatch { row: usize, got: usize, expected: usize },

    #[error("empty input: no data rows")]
    EmptyInput,

    #[error("unknown fixture: {0}")]
    UnknownFixture(String),

    #[error("non-positive value at row {row}: logarithm undefined")]
    NonPositiveForLog { row: usize },

    #[error("zero scale factor")]
    ZeroScale,

    #[error("figure rendering needs bands and ellipse: {0}")]
    IncompleteGraphics(String),
}

impl Error {
    /// Stable machine-readable code for each failure class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::TooFewSubjects { .. } => "too-few-subjects",
            Error::NonFiniteInput { .. } => "non-finite-input",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::DegeneratePredictor => "degenerate-predictor",
            Error::DegenerateZeroResidual => "degenerate-zero-residual",
            Error::InvalidDf(_) => "invalid-df",
            Error::LambdaIndeterminate { .. } => "lambda-indeterminate",
            Error::NoReplicates { .. } => "no-replicates",
            Error::DemingDegenerate => "deming-degenerate",
            Error::ZeroMeanCandidate => "zero-mean-candidate",
            Error::BadBootstrapConfig(_) => "bad-bootstrap-config",
            Error::BootstrapUnstable { .. } => "bootstrap-unstable",
            Error::EllipseDegenerate => "ellipse-degenerate",
            Error::MissingColumn(_) => "missing-column",
            Error::NonNumericCell { .. } => "non-numeric-cell",
            Error::RowLengthMismatch { .. } => "row-length-mismatch",
            Error::EmptyInput => "empty-input",
            Error::UnknownFixture(_) => "unknown-fixture",
            Error::NonPositiveForLog { .. } => "non-positive-for-log",
            Error::ZeroScale => "zero-scale",
            Error::IncompleteGraphics(_) => "incomplete-graphics",
        }
    }

    /// True for failures of the input data itself (as opposed to numerical breakdown).
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::TooFewSubjects { .. }
                | Error::NonFiniteInput { .. }
                | Error::LengthMismatch { .. }
                | Error::NoReplicates { .. }
                | Error::MissingColumn(_)
                | Error::NonNumericCell { .. }
                | Error::RowLengthMismatch { .. }
                | Error::EmptyInput
                | Error::UnknownFixture(_)
                | Error::NonPositiveForLog { .. }
                | Error::ZeroScale
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_kebab_case() {
        let e = Error::LambdaIndeterminate { v_delta: -1.0, v_epsilon: 2.0 };
        assert_eq!(e.code(), "lambda-indeterminate");
        assert!(e.code().chars().all(|c| c.is_ascii_lowercase() || c == '-'));
    }

    #[test]
    fn data_vs_numerical_split() {
        assert!(Error::EmptyInput.is_data_error());
        assert!(!Error::DemingDegenerate.is_data_error());
        assert!(!Error::BootstrapUnstable { degenerate: 300, total: 2000 }.is_data_error());
    }
}
