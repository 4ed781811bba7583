//! Classic limits of agreement, the baseline the three structural tests
//! refine: bias ± 1.96·sd of the differences, with confidence intervals
//! around each limit.

use crate::error::{Error, Result};
use crate::resample::Interval;
use crate::sample::{PairedSample, MIN_SUBJECTS};
use crate::special::t_quantile;

const LOA_MULTIPLIER: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitsOfAgreement {
    pub bias: f64,
    pub sd_diff: f64,
    pub loa_lower: f64,
    pub loa_upper: f64,
    pub ci_lower_limit: Interval,
    pub ci_upper_limit: Interval,
    pub n: usize,
}

pub fn limits_of_agreement(sample: &PairedSample, level: f64) -> Result<LimitsOfAgreement> {
    if sample.n() < MIN_SUBJECTS {
        return Err(Error::TooFewSubjects {
            min: MIN_SUBJECTS,
            got: sample.n(),
        });
    }
    from_differences(&sample.differences(), level)
}

fn from_differences(d: &[f64], level: f64) -> Result<LimitsOfAgreement> {
    let n = d.len();
    let bias = d.iter().sum::<f64>() / n as f64;
    let sd_diff =
        (d.iter().map(|v| (v - bias).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let loa_lower = bias - LOA_MULTIPLIER * sd_diff;
    let loa_upper = bias + LOA_MULTIPLIER * sd_diff;
    // each limit's variance is approximately 3·sd²/n
    let half = t_quantile(level, n - 1)? * sd_diff * (3.0 / n as f64).sqrt();
    Ok(LimitsOfAgreement {
        bias,
        sd_diff,
        loa_lower,
        loa_upper,
        ci_lower_limit: Interval {
            lower: loa_lower - half,
            upper: loa_lower + half,
        },
        ci_upper_limit: Interval {
            lower: loa_upper - half,
            upper: loa_upper + half,
        },
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_differences_collapse_the_limits() {
        let s = PairedSample::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![1.0, 2.0, 3.0],
            vec![3.5, 4.5, 5.5],
        )
        .unwrap();
        let loa = limits_of_agreement(&s, 0.95).unwrap();
        assert_eq!(loa.bias, 2.5);
        assert_eq!(loa.sd_diff, 0.0);
        assert_eq!((loa.loa_lower, loa.loa_upper), (2.5, 2.5));
        assert_eq!(loa.ci_lower_limit, loa.ci_upper_limit);
        assert_eq!(loa.ci_lower_limit.lower, 2.5);
    }

    #[test]
    fn two_point_arithmetic() {
        let loa = from_differences(&[-1.0, 1.0], 0.95).unwrap();
        assert_eq!(loa.bias, 0.0);
        assert_relative_eq!(loa.sd_diff, 2.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(loa.loa_upper, 1.96 * 2.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(loa.loa_lower, -loa.loa_upper, epsilon = 1e-14);
    }

    #[test]
    fn structural_identities() {
        let d = [0.4, -1.1, 2.3, 0.9, -0.6, 1.5, 0.2];
        let loa = from_differences(&d, 0.95).unwrap();
        assert_relative_eq!(
            loa.loa_upper - loa.loa_lower,
            2.0 * 1.96 * loa.sd_diff,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            loa.bias,
            (loa.loa_upper + loa.loa_lower) / 2.0,
            epsilon = 1e-12
        );
        assert!(loa.ci_upper_limit.contains(loa.loa_upper));
        assert!(loa.ci_upper_limit.lower < loa.loa_upper);
    }

    #[test]
    fn limit_ci_uses_t_quantile_and_3_over_n() {
        let d: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin() * 2.0 + 0.3).collect();
        let loa = from_differences(&d, 0.95).unwrap();
        let half = crate::special::t_quantile(0.95, 29).unwrap()
            * loa.sd_diff
            * (3.0 / 30.0f64).sqrt();
        assert_relative_eq!(loa.ci_upper_limit.upper, loa.loa_upper + half, epsilon = 1e-12);
        assert_relative_eq!(loa.ci_lower_limit.lower, loa.loa_lower - half, epsilon = 1e-12);
    }
}
