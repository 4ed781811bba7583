//! The three nested method-comparison tests — accuracy (zero structural
//! bias), precision (equal error variances), and bisector agreement (Deming
//! slope 1, intercept 0) — plus the error-variance-ratio estimators and the
//! combined verdict.

use crate::error::{Error, Result};
use crate::resample::GraphicalDecisions;
use crate::sample::PairedSample;
use crate::special::t_tail;
use crate::stats::{moments, moments_xy, ols_fit, Moments};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Accuracy,
    Precision,
    Bisector,
}

impl TestKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestKind::Accuracy => "accuracy",
            TestKind::Precision => "precision",
            TestKind::Bisector => "bisector",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Reject,
    NotReject,
}

impl Decision {
    pub fn is_reject(&self) -> bool {
        *self == Decision::Reject
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Decision::Reject => "reject",
            Decision::NotReject => "not-reject",
        }
    }
}

/// Statistics backing a decision: one governed coefficient for accuracy and
/// precision, the Bonferroni-governed pair for the bisector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestStats {
    Single {
        estimate: f64,
        t: f64,
        p: f64,
    },
    Joint {
        slope: f64,
        intercept: f64,
        t_slope: f64,
        t_intercept: f64,
        p_slope: f64,
        p_intercept: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub kind: TestKind,
    pub alpha_used: f64,
    pub decision: Decision,
    /// Set when the fit had zero residual variance; p-values are then limits.
    pub exact: bool,
    pub stats: TestStats,
}

/// Bias test: regression of d = y - x on the centered reference value.
/// Centering makes the intercept equal mean(d) exactly; the slope is
/// estimated but does not govern the decision.
pub fn accuracy_test(sample: &PairedSample, alpha: f64) -> Result<TestResult> {
    let centered: Vec<f64> = {
        let n = sample.n() as f64;
        let mean_x = sample.x.iter().sum::<f64>() / n;
        let mut c: Vec<f64> = sample.x.iter().map(|&v| v - mean_x).collect();
        // second pass scrubs the rounding residue so the regression intercept
        // lands on mean(d) to the last bit
        let residue = c.iter().sum::<f64>() / n;
        for v in &mut c {
            *v -= residue;
        }
        c
    };
    let fit = ols_fit(&centered, &sample.differences())?;
    Ok(single_result(
        TestKind::Accuracy,
        fit.intercept,
        fit.t_intercept,
        fit.try_p_intercept(),
        fit.exact,
        alpha,
    ))
}

/// Error-variance test: regression of d = y - x on s = x + y. A nonzero
/// slope means the two techniques' error variances differ.
pub fn precision_test(sample: &PairedSample, alpha: f64) -> Result<TestResult> {
    let sums = sample.sums();
    let d = sample.differences();
    let fit = ols_fit(&sums, &d)?;
    debug_assert!(
        {
            let m = moments(sample).unwrap();
            let cov_ds = moments_xy(&sums, &d).unwrap().s_xy;
            let scale = cov_ds.abs().max(m.s_yy.abs()).max(m.s_xx.abs()).max(1e-300);
            (cov_ds - (m.s_yy - m.s_xx)).abs() <= 1e-9 * scale
        },
        "cov(d, s) must equal s_yy - s_xx"
    );
    Ok(single_result(
        TestKind::Precision,
        fit.slope,
        fit.t_slope,
        fit.try_p_slope(),
        fit.exact,
        alpha,
    ))
}

fn single_result(
    kind: TestKind,
    estimate: f64,
    t: f64,
    p: Result<f64>,
    exact: bool,
    alpha: f64,
) -> TestResult {
    // A zero-residual fit with a nonzero coefficient has no finite p; the
    // decision is still obvious, so reject and flag the p as a limit.
    let (p, exact) = match p {
        Ok(p) => (p, exact),
        Err(Error::DegenerateZeroResidual) => (0.0, true),
        Err(_) => unreachable!("p access only fails on exact fits"),
    };
    TestResult {
        kind,
        alpha_used: alpha,
        decision: if p < alpha {
            Decision::Reject
        } else {
            Decision::NotReject
        },
        exact,
        stats: TestStats::Single { estimate, t, p },
    }
}

/// Grubbs moment estimator of λ = V[δ]/V[ε] from single paired measurements:
/// s_yy - s_xy estimates the candidate error variance, s_xx - s_xy the
/// reference error variance.
pub fn lambda_grubbs(sample: &PairedSample) -> Result<f64> {
    grubbs_from_moments(&moments(sample)?)
}

pub(crate) fn grubbs_from_moments(m: &Moments) -> Result<f64> {
    let v_delta = m.s_yy - m.s_xy;
    let v_epsilon = m.s_xx - m.s_xy;
    if v_delta <= 0.0 || v_epsilon <= 0.0 {
        return Err(Error::LambdaIndeterminate { v_delta, v_epsilon });
    }
    Ok(v_delta / v_epsilon)
}

/// λ from replicated measurements: ratio of pooled within-subject variances
/// (candidate over reference).
pub fn lambda_replicates(sample: &PairedSample) -> Result<f64> {
    let reps = sample
        .replicates
        .as_ref()
        .ok_or(Error::NoReplicates { subject: 0 })?;
    let xg: Vec<&[f64]> = reps.x.iter().map(|v| v.as_slice()).collect();
    let yg: Vec<&[f64]> = reps.y.iter().map(|v| v.as_slice()).collect();
    lambda_from_replicate_refs(&xg, &yg)
}

pub(crate) fn lambda_from_replicate_refs(xg: &[&[f64]], yg: &[&[f64]]) -> Result<f64> {
    for (subject, (xr, yr)) in xg.iter().zip(yg).enumerate() {
        if xr.len() < 2 || yr.len() < 2 {
            return Err(Error::NoReplicates { subject });
        }
    }
    let v_epsilon = pooled_within(xg);
    let v_delta = pooled_within(yg);
    if v_delta <= 0.0 || v_epsilon <= 0.0 {
        return Err(Error::LambdaIndeterminate { v_delta, v_epsilon });
    }
    Ok(v_delta / v_epsilon)
}

fn pooled_within(groups: &[&[f64]]) -> f64 {
    let mut ss = 0.0;
    let mut df = 0usize;
    for g in groups {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        ss += g.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        df += g.len() - 1;
    }
    ss / df as f64
}

/// Errors-in-variables line fit with known error-variance ratio λ, with
/// leave-one-out jackknife standard errors (λ held fixed across refits).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemingFit {
    pub slope: f64,
    pub intercept: f64,
    pub lambda: f64,
    pub se_slope: f64,
    pub se_intercept: f64,
    pub p_slope_eq_1: f64,
    pub p_intercept_eq_0: f64,
    pub df: usize,
}

pub(crate) fn deming_point(m: &Moments, lambda: f64) -> Result<(f64, f64)> {
    if m.s_xy == 0.0 {
        return Err(Error::DemingDegenerate);
    }
    let q = m.s_yy - lambda * m.s_xx;
    let slope = (q + (q * q + 4.0 * lambda * m.s_xy * m.s_xy).sqrt()) / (2.0 * m.s_xy);
    let intercept = m.mean_y - slope * m.mean_x;
    Ok((slope, intercept))
}

pub fn deming_fit(sample: &PairedSample, lambda: f64) -> Result<DemingFit> {
    assert!(lambda > 0.0, "error-variance ratio must be positive");
    let x = &sample.x;
    let y = &sample.y;
    let n = x.len();
    if n < 4 {
        return Err(Error::TooFewSubjects { min: 4, got: n });
    }
    let m = moments_xy(x, y)?;
    let (slope, intercept) = deming_point(&m, lambda)?;

    let mut jack_slopes = Vec::with_capacity(n);
    let mut jack_intercepts = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n - 1);
    let mut ys = Vec::with_capacity(n - 1);
    for leave in 0..n {
        xs.clear();
        ys.clear();
        for i in 0..n {
            if i != leave {
                xs.push(x[i]);
                ys.push(y[i]);
            }
        }
        let (s, a) = deming_point(&moments_xy(&xs, &ys)?, lambda)?;
        jack_slopes.push(s);
        jack_intercepts.push(a);
    }
    let se_slope = jackknife_se(&jack_slopes);
    let se_intercept = jackknife_se(&jack_intercepts);
    let df = n - 2;

    Ok(DemingFit {
        slope,
        intercept,
        lambda,
        se_slope,
        se_intercept,
        p_slope_eq_1: p_against(slope - 1.0, se_slope, df)?,
        p_intercept_eq_0: p_against(intercept, se_intercept, df)?,
        df,
    })
}

fn jackknife_se(estimates: &[f64]) -> f64 {
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let ss: f64 = estimates.iter().map(|e| (e - mean).powi(2)).sum();
    ((n - 1.0) / n * ss).sqrt()
}

fn p_against(delta: f64, se: f64, df: usize) -> Result<f64> {
    if se == 0.0 {
        return Ok(if delta == 0.0 { 1.0 } else { 0.0 });
    }
    t_tail(delta / se, df)
}

/// Joint slope-1/intercept-0 decision on a Deming fit, Bonferroni-split so
/// each parameter is tested at alpha/2.
pub fn bisector_test(fit: &DemingFit, alpha: f64) -> TestResult {
    let alpha_used = alpha / 2.0;
    let reject = fit.p_slope_eq_1 < alpha_used || fit.p_intercept_eq_0 < alpha_used;
    TestResult {
        kind: TestKind::Bisector,
        alpha_used,
        decision: if reject {
            Decision::Reject
        } else {
            Decision::NotReject
        },
        exact: false,
        stats: TestStats::Joint {
            slope: fit.slope,
            intercept: fit.intercept,
            t_slope: ratio_or_zero(fit.slope - 1.0, fit.se_slope),
            t_intercept: ratio_or_zero(fit.intercept, fit.se_intercept),
            p_slope: fit.p_slope_eq_1,
            p_intercept: fit.p_intercept_eq_0,
        },
    }
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            num.signum() * f64::INFINITY
        }
    } else {
        num / den
    }
}

/// Multiplier on the candidate values that zeroes the estimated bias.
pub fn calibration_scale(sample: &PairedSample) -> Result<f64> {
    let n = sample.n() as f64;
    let mean_x = sample.x.iter().sum::<f64>() / n;
    let mean_y = sample.y.iter().sum::<f64>() / n;
    if mean_y == 0.0 {
        return Err(Error::ZeroMeanCandidate);
    }
    Ok(mean_x / mean_y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    StrictEquivalence,
    BiasedButConcordant,
    NotEquivalent,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::StrictEquivalence => "strict-equivalence",
            Verdict::BiasedButConcordant => "biased-but-concordant",
            Verdict::NotEquivalent => "not-equivalent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceVerdict {
    pub verdict: Verdict,
    /// Set when precision rejected: unequal error variances distort the
    /// λ estimate, so a non-rejected bisector may be an artifact of λ
    /// compensation rather than real agreement.
    pub bisector_unreliable_lambda: bool,
    pub lambda: f64,
}

/// Combines the three analytical decisions with the translated graphical
/// checks. A pure bias (accuracy rejection) is forgiven when, after shifting
/// by the bias interval, both bands still admit their null lines; the
/// bisector's own analytical rejection may merely echo that bias, so it does
/// not veto the concordant verdict.
pub fn nested_verdict(
    acc: &TestResult,
    prec: &TestResult,
    bis: &TestResult,
    lambda: f64,
    graphical: &GraphicalDecisions,
) -> EquivalenceVerdict {
    let verdict = if !acc.decision.is_reject()
        && !prec.decision.is_reject()
        && !bis.decision.is_reject()
    {
        Verdict::StrictEquivalence
    } else if acc.decision.is_reject()
        && !prec.decision.is_reject()
        && graphical.precision_admits_horizontal
        && graphical.bisector_admits_unit_slope
    {
        Verdict::BiasedButConcordant
    } else {
        Verdict::NotEquivalent
    };
    EquivalenceVerdict {
        verdict,
        bisector_unreliable_lambda: prec.decision.is_reject(),
        lambda,
    }
}
