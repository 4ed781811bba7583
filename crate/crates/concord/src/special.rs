//! Student-t tail probabilities via the regularized incomplete beta function.
//!
//! Self-contained on purpose: the two-sided p-value of every analytical test
//! flows through `t_tail`, so its accuracy budget (absolute error <= 1e-8)
//! is pinned by a continued-fraction evaluation rather than a dependency.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for positive arguments (Lanczos, g = 7).
pub fn ln_gamma(z: f64) -> f64 {
    if z < 0.5 {
        // reflection keeps the small-argument branch accurate
        return (std::f64::consts::PI / (std::f64::consts::PI * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 400;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn beta_inc_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // the continued fraction converges fast only below the mean of the distribution
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Two-sided tail probability P(|T| >= |t|) for Student t with `df` degrees of freedom.
pub fn t_tail(t: f64, df: usize) -> Result<f64> {
    if df < 1 {
        return Err(Error::InvalidDf(df));
    }
    if !t.is_finite() {
        return Ok(0.0);
    }
    let dff = df as f64;
    let x = dff / (dff + t * t);
    Ok(beta_inc_reg(dff / 2.0, 0.5, x).clamp(0.0, 1.0))
}

/// Two-sided t quantile: the value q >= 0 with P(|T| <= q) = `level`.
pub fn t_quantile(level: f64, df: usize) -> Result<f64> {
    if df < 1 {
        return Err(Error::InvalidDf(df));
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::BadBootstrapConfig(format!(
            "confidence level {level} outside [0, 1)"
        )));
    }
    let target = 1.0 - level;
    let mut hi = 2.0;
    while t_tail(hi, df)? > target {
        hi *= 2.0;
        if hi > 1e12 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_tail(mid, df)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Chi-square quantile with 2 degrees of freedom (closed form: -2 ln(1 - level)).
pub fn chi2_quantile_2df(level: f64) -> f64 {
    -2.0 * (1.0 - level).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(ln_gamma(0.5), std::f64::consts::PI.sqrt().ln(), epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(5.0), 24f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(ln_gamma(10.5), 1_133_278.388_947_940_6_f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn beta_inc_symmetry() {
        for &(a, b, x) in &[(2.0, 3.0, 0.3), (7.5, 0.5, 0.9), (0.5, 0.5, 0.1)] {
            let lhs = beta_inc_reg(a, b, x);
            let rhs = 1.0 - beta_inc_reg(b, a, 1.0 - x);
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn t_tail_at_zero_is_one() {
        assert_eq!(t_tail(0.0, 15).unwrap(), 1.0);
    }

    #[test]
    fn t_tail_is_even() {
        for &t in &[0.3, 1.0, 2.131, 7.7] {
            assert_eq!(t_tail(t, 9).unwrap(), t_tail(-t, 9).unwrap());
        }
    }

    #[test]
    fn t_tail_critical_value_df15() {
        // 2.131 is the familiar 5% two-sided critical value at 15 df
        let p = t_tail(2.131, 15).unwrap();
        assert!((p - 0.0500).abs() < 2e-4, "p = {p}");
    }

    #[test]
    fn t_tail_monotone_in_abs_t() {
        let mut last = 1.0;
        for i in 1..60 {
            let p = t_tail(i as f64 * 0.25, 7).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn t_tail_rejects_zero_df() {
        assert_eq!(t_tail(1.0, 0).unwrap_err(), Error::InvalidDf(0));
    }

    #[test]
    fn t_quantile_inverts_tail() {
        for &df in &[1usize, 5, 16, 84, 1000] {
            for &level in &[0.5, 0.9, 0.95, 0.99] {
                let q = t_quantile(level, df).unwrap();
                assert_relative_eq!(t_tail(q, df).unwrap(), 1.0 - level, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn chi2_2df_95() {
        assert_relative_eq!(chi2_quantile_2df(0.95), 5.991_464_547_107_979, epsilon = 1e-12);
    }
}
