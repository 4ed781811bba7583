//! Sample moments and ordinary least squares with exact-fit handling.

use crate::error::{Error, Result};
use crate::sample::{PairedSample, MIN_SUBJECTS};
use crate::special::t_tail;

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    for (row, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteInput { row });
        }
    }
    Ok(())
}

/// Unbiased second-order moments of a paired sample (n - 1 divisor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean_x: f64,
    pub mean_y: f64,
    pub s_xx: f64,
    pub s_yy: f64,
    pub s_xy: f64,
}

pub fn moments(sample: &PairedSample) -> Result<Moments> {
    moments_xy(&sample.x, &sample.y)
}

pub(crate) fn moments_xy(x: &[f64], y: &[f64]) -> Result<Moments> {
    let s = paired_sums(x, y)?;
    if s.n < MIN_SUBJECTS {
        return Err(Error::TooFewSubjects {
            min: MIN_SUBJECTS,
            got: s.n,
        });
    }
    let denom = (s.n - 1) as f64;
    Ok(Moments {
        n: s.n,
        mean_x: s.mean_x,
        mean_y: s.mean_y,
        s_xx: s.sxx / denom,
        s_yy: s.syy / denom,
        s_xy: s.sxy / denom,
    })
}

/// Centered sums of squares and cross-products (two-pass).
struct PairedSums {
    n: usize,
    mean_x: f64,
    mean_y: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

fn paired_sums(x: &[f64], y: &[f64]) -> Result<PairedSums> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            x_len: x.len(),
            y_len: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_finite(x)?;
    check_finite(y)?;
    let n = x.len();
    let mean_x = x.iter().sum::<f64>() / n as f64;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    Ok(PairedSums {
        n,
        mean_x,
        mean_y,
        sxx,
        syy,
        sxy,
    })
}

/// Simple linear regression of a response on one predictor, with t inference.
///
/// An exact (zero-residual) fit is legal data, not an error: coefficients and
/// `residual_sd = 0` are still returned and `exact` is set. The stored
/// p-values then take their limiting values; use `try_p_slope` /
/// `try_p_intercept` to surface the exactness as `degenerate-zero-residual`
/// instead when inference on a nonzero coefficient is what's being asked for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub se_slope: f64,
    pub se_intercept: f64,
    pub t_slope: f64,
    pub t_intercept: f64,
    pub p_slope: f64,
    pub p_intercept: f64,
    pub residual_sd: f64,
    pub df: usize,
    pub exact: bool,
}

impl OlsFit {
    pub fn try_p_slope(&self) -> Result<f64> {
        if self.exact && self.slope != 0.0 {
            return Err(Error::DegenerateZeroResidual);
        }
        Ok(self.p_slope)
    }

    pub fn try_p_intercept(&self) -> Result<f64> {
        if self.exact && self.intercept != 0.0 {
            return Err(Error::DegenerateZeroResidual);
        }
        Ok(self.p_intercept)
    }
}

/// Least-squares fit of `response = intercept + slope * predictor`, n - 2 df.
pub fn ols_fit(predictor: &[f64], response: &[f64]) -> Result<OlsFit> {
    let s = paired_sums(predictor, response)?;
    if s.n < MIN_SUBJECTS {
        return Err(Error::TooFewSubjects {
            min: MIN_SUBJECTS,
            got: s.n,
        });
    }
    if s.sxx <= 0.0 {
        return Err(Error::DegeneratePredictor);
    }
    let slope = s.sxy / s.sxx;
    let intercept = s.mean_y - slope * s.mean_x;
    let df = s.n - 2;
    let rss: f64 = predictor
        .iter()
        .zip(response)
        .map(|(&xi, &yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let scale = response.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
    let exact = rss.sqrt() <= 1e-12 * scale * (s.n as f64).sqrt();
    let residual_sd = if exact { 0.0 } else { (rss / df as f64).sqrt() };

    let (se_slope, se_intercept) = if exact {
        (0.0, 0.0)
    } else {
        (
            residual_sd / s.sxx.sqrt(),
            residual_sd * (1.0 / s.n as f64 + s.mean_x * s.mean_x / s.sxx).sqrt(),
        )
    };
    let (t_slope, p_slope) = coefficient_inference(slope, se_slope, df, exact)?;
    let (t_intercept, p_intercept) = coefficient_inference(intercept, se_intercept, df, exact)?;

    Ok(OlsFit {
        slope,
        intercept,
        se_slope,
        se_intercept,
        t_slope,
        t_intercept,
        p_slope,
        p_intercept,
        residual_sd,
        df,
        exact,
    })
}

fn coefficient_inference(coef: f64, se: f64, df: usize, exact: bool) -> Result<(f64, f64)> {
    if exact {
        if coef == 0.0 {
            Ok((0.0, 1.0))
        } else {
            Ok((coef.signum() * f64::INFINITY, 0.0))
        }
    } else {
        let t = coef / se;
        Ok((t, t_tail(t, df)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(x: Vec<f64>, y: Vec<f64>) -> PairedSample {
        let ids = (1..=x.len()).map(|i| i.to_string()).collect();
        PairedSample::new(ids, x, y).unwrap()
    }

    #[test]
    fn moments_identical_series() {
        let m = moments(&sample(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!((m.mean_x, m.mean_y), (2.0, 2.0));
        assert_relative_eq!(m.s_xx, 1.0);
        assert_relative_eq!(m.s_yy, 1.0);
        assert_relative_eq!(m.s_xy, 1.0);
    }

    #[test]
    fn moments_constant_x() {
        let m = moments(&sample(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0])).unwrap();
        assert_eq!(m.s_xx, 0.0);
        assert_eq!(m.s_xy, 0.0);
        assert_relative_eq!(m.s_yy, 1.0);
    }

    #[test]
    fn moments_match_two_pass_oracle() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let y = [2.0, 1.0, 5.0, 9.0];
        let m = moments_xy(&x, &y).unwrap();
        let mx = x.iter().sum::<f64>() / 4.0;
        let my = y.iter().sum::<f64>() / 4.0;
        let sxy: f64 = x.iter().zip(&y).map(|(&a, &b)| (a - mx) * (b - my)).sum::<f64>() / 3.0;
        assert_relative_eq!(m.s_xy, sxy, epsilon = 1e-14);
        assert!(m.s_xy * m.s_xy <= m.s_xx * m.s_yy * (1.0 + 1e-9));
    }

    #[test]
    fn moments_rejects_nan() {
        assert_eq!(
            moments_xy(&[1.0, f64::NAN, 2.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            Error::NonFiniteInput { row: 1 }
        );
    }

    #[test]
    fn ols_exact_line() {
        let fit = ols_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_relative_eq!(fit.slope, 2.0);
        assert_relative_eq!(fit.intercept, 1.0);
        assert_eq!(fit.residual_sd, 0.0);
        assert!(fit.exact);
        assert_eq!(fit.try_p_slope().unwrap_err(), Error::DegenerateZeroResidual);
        assert_eq!(fit.try_p_intercept().unwrap_err(), Error::DegenerateZeroResidual);
    }

    #[test]
    fn ols_symmetric_points_force_zero_slope() {
        let fit = ols_fit(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(fit.slope, 0.0);
        assert_relative_eq!(fit.intercept, 1.0 / 3.0, epsilon = 1e-14);
        assert!(!fit.exact);
    }

    #[test]
    fn ols_exact_flat_line_keeps_null_p() {
        let fit = ols_fit(&[0.0, 1.0, 2.0, 3.0], &[4.0, 4.0, 4.0, 4.0]).unwrap();
        assert!(fit.exact);
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.try_p_slope().unwrap(), 1.0);
        assert_eq!(fit.try_p_intercept().unwrap_err(), Error::DegenerateZeroResidual);
    }

    #[test]
    fn ols_hand_worked_fit() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.1, 3.9, 6.2, 7.8];
        let fit = ols_fit(&x, &y).unwrap();
        assert_relative_eq!(fit.slope, 1.94, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 0.15, epsilon = 1e-12);
        assert_relative_eq!(fit.residual_sd, (0.082f64 / 2.0).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(fit.se_slope, fit.residual_sd / 5.0f64.sqrt(), epsilon = 1e-12);
        assert_eq!(fit.df, 2);
        assert!(!fit.exact);
        assert_relative_eq!(
            fit.p_slope,
            crate::special::t_tail(fit.t_slope, 2).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn ols_residuals_sum_to_zero() {
        let x = [1.0, 2.0, 4.0, 4.5, 7.0, 9.0];
        let y = [0.3, 1.1, 0.9, 2.4, 3.3, 2.9];
        let fit = ols_fit(&x, &y).unwrap();
        let sum_r: f64 = x
            .iter()
            .zip(&y)
            .map(|(&xi, &yi)| yi - fit.intercept - fit.slope * xi)
            .sum();
        assert!(sum_r.abs() < 1e-12);
    }

    #[test]
    fn ols_degenerate_predictor() {
        assert_eq!(
            ols_fit(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            Error::DegeneratePredictor
        );
    }

    #[test]
    fn ols_needs_three_points() {
        assert_eq!(
            ols_fit(&[1.0, 2.0], &[1.0, 2.0]).unwrap_err(),
            Error::TooFewSubjects { min: 3, got: 2 }
        );
    }

    #[test]
    fn ols_length_mismatch() {
        assert_eq!(
            ols_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0]).unwrap_err(),
            Error::LengthMismatch { x_len: 3, y_len: 2 }
        );
    }
}
