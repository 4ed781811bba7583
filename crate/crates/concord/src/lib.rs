//! Equivalence testing for paired measurement techniques.
//!
//! Two techniques measuring the same quantity are compared through three
//! nested hypothesis tests — accuracy (no structural bias), precision (equal
//! error variances), and bisector agreement (identity line in an
//! errors-in-variables fit) — backed by percentile-bootstrap confidence
//! graphics, classic limits of agreement, and bundled reference datasets.
//!
//! ```
//! use concord::{accuracy_test, load_fixture};
//!
//! let sample = load_fixture("pefr").unwrap();
//! let accuracy = accuracy_test(&sample, 0.05).unwrap();
//! assert!(!accuracy.decision.is_reject());
//! ```

pub mod agreement;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod resample;
pub mod sample;
pub mod special;
pub mod stats;
pub mod structural;

pub use agreement::{limits_of_agreement, LimitsOfAgreement};
pub use error::{Error, Result};
pub use fixtures::{fixture_csv, load_fixture, FIXTURE_NAMES};
pub use io::{parse_csv, to_csv, transform, ColumnMap, Transform};
pub use resample::{
    band_admits_horizontal, band_admits_unit_slope, boot_band, boot_bias_ci, boot_ellipse,
    make_plan, BandKind, BootstrapBand, ConfidenceEllipse, GraphicalDecisions, Interval,
    LambdaMode, ResamplePlan, DEFAULT_BOOT, DEFAULT_GRID,
};
pub use sample::{PairedSample, Replicates};
pub use special::{chi2_quantile_2df, t_quantile, t_tail};
pub use stats::{moments, ols_fit, Moments, OlsFit};
pub use structural::{
    accuracy_test, bisector_test, calibration_scale, deming_fit, lambda_grubbs,
    lambda_replicates, nested_verdict, precision_test, Decision, DemingFit, EquivalenceVerdict,
    TestKind, TestResult, TestStats, Verdict,
};
