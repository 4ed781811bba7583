//! Analysis pipeline and the JSON equivalence report.

use concord::{
    accuracy_test, band_admits_horizontal, band_admits_unit_slope, bisector_test, boot_band,
    boot_bias_ci, boot_ellipse, deming_fit, lambda_grubbs, lambda_replicates,
    limits_of_agreement, make_plan, nested_verdict, precision_test, BandKind, BootstrapBand,
    ConfidenceEllipse, Error, GraphicalDecisions, Interval, LambdaMode, PairedSample, TestResult,
    TestStats,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to six significant digits so reports stay diff-stable across
/// platforms without drowning readers in noise digits.
pub fn sig6(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor();
    let scale = 10f64.powi(5 - magnitude as i32);
    (v * scale).round() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaSource {
    Grubbs,
    Replicates,
    #[serde(rename = "fallback-1")]
    Fallback1,
    Override,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputInfo {
    pub source: String,
    pub n: usize,
    pub unit: Option<String>,
    pub transform: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalInfo {
    pub lower: f64,
    pub upper: f64,
}

impl From<Interval> for IntervalInfo {
    fn from(iv: Interval) -> Self {
        IntervalInfo {
            lower: sig6(iv.lower),
            upper: sig6(iv.upper),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingleTestInfo {
    pub decision: String,
    pub alpha_used: f64,
    pub estimate: f64,
    pub t: f64,
    pub p: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BisectorTestInfo {
    pub decision: String,
    pub alpha_used: f64,
    pub slope: f64,
    pub intercept: f64,
    pub t_slope: f64,
    pub t_intercept: f64,
    pub p_slope: f64,
    pub p_intercept: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestsInfo {
    pub accuracy: SingleTestInfo,
    pub precision: SingleTestInfo,
    pub bisector: BisectorTestInfo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemingInfo {
    pub slope: f64,
    pub intercept: f64,
    pub se_slope: f64,
    pub se_intercept: f64,
    pub df: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphicalInfo {
    pub accuracy_origin_inside: bool,
    pub precision_admits_horizontal: bool,
    pub bisector_admits_unit_slope: bool,
    pub bias_ci: IntervalInfo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoaInfo {
    pub bias: f64,
    pub sd_diff: f64,
    pub lower: f64,
    pub upper: f64,
    pub ci_lower_limit: IntervalInfo,
    pub ci_upper_limit: IntervalInfo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub input: InputInfo,
    pub alpha: f64,
    pub seed: u64,
    pub boot: usize,
    pub grid: usize,
    pub lambda: f64,
    pub lambda_source: LambdaSource,
    pub tests: TestsInfo,
    pub deming: DemingInfo,
    pub graphical: GraphicalInfo,
    pub limits_of_agreement: LoaInfo,
    pub verdict: String,
    pub bisector_unreliable_lambda: bool,
    pub warnings: Vec<String>,
}

/// Everything produced by one analysis: the report plus the graphical
/// objects the figure is drawn from.
pub struct Analysis {
    pub report: Report,
    pub sample: PairedSample,
    pub precision_band: BootstrapBand,
    pub bisector_band: BootstrapBand,
    pub ellipse: ConfidenceEllipse,
}

pub struct AnalyzeConfig {
    pub source: String,
    pub alpha: f64,
    pub boot: usize,
    pub grid: usize,
    pub seed: u64,
    pub lambda_override: Option<f64>,
    pub transform_label: Option<String>,
}

fn single_info(r: &TestResult) -> SingleTestInfo {
    match r.stats {
        TestStats::Single { estimate, t, p } => SingleTestInfo {
            decision: r.decision.as_str().into(),
            alpha_used: sig6(r.alpha_used),
            estimate: sig6(estimate),
            t: sig6(t),
            p: sig6(p),
            exact: r.exact,
        },
        TestStats::Joint { .. } => unreachable!("accuracy/precision carry a single coefficient"),
    }
}

fn bisector_info(r: &TestResult) -> BisectorTestInfo {
    match r.stats {
        TestStats::Joint {
            slope,
            intercept,
            t_slope,
            t_intercept,
            p_slope,
            p_intercept,
        } => BisectorTestInfo {
            decision: r.decision.as_str().into(),
            alpha_used: sig6(r.alpha_used),
            slope: sig6(slope),
            intercept: sig6(intercept),
            t_slope: sig6(t_slope),
            t_intercept: sig6(t_intercept),
            p_slope: sig6(p_slope),
            p_intercept: sig6(p_intercept),
        },
        TestStats::Single { .. } => unreachable!("bisector carries two coefficients"),
    }
}

/// Resolves the error-variance ratio: explicit override, then replicate
/// pooling, then the paired-moments estimator, then 1 with a warning.
fn resolve_lambda(
    sample: &PairedSample,
    lambda_override: Option<f64>,
    warnings: &mut Vec<String>,
) -> concord::Result<(f64, LambdaSource)> {
    if let Some(l) = lambda_override {
        return Ok((l, LambdaSource::Override));
    }
    if sample.replicates.is_some() {
        return Ok((lambda_replicates(sample)?, LambdaSource::Replicates));
    }
    match lambda_grubbs(sample) {
        Ok(l) => Ok((l, LambdaSource::Grubbs)),
        Err(Error::LambdaIndeterminate { v_delta, v_epsilon }) => {
            warnings.push(format!(
                "lambda-fallback: moment estimate indeterminate \
                 (error-variance terms {:.4} and {:.4}); using lambda = 1",
                v_delta, v_epsilon
            ));
            Ok((1.0, LambdaSource::Fallback1))
        }
        Err(e) => Err(e),
    }
}

pub fn analyze(sample: PairedSample, config: &AnalyzeConfig) -> concord::Result<Analysis> {
    let n = sample.n();
    let mut warnings = Vec::new();
    if n < 40 {
        warnings.push(format!(
            "small-sample: n = {n} is below 40; band and ellipse geometry is unstable"
        ));
    }
    if n < 100 {
        warnings.push(format!(
            "sample-size-advisory: n = {n} is below the commonly advised 100 observations"
        ));
    }
    if config.boot < 500 {
        warnings.push(format!(
            "few-resamples: B = {} is below 500; ellipse quantiles are noisy",
            config.boot
        ));
    }

    let (lambda, lambda_source) = resolve_lambda(&sample, config.lambda_override, &mut warnings)?;
    let acc = accuracy_test(&sample, config.alpha)?;
    let prec = precision_test(&sample, config.alpha)?;
    let dem = deming_fit(&sample, lambda)?;
    let bis = bisector_test(&dem, config.alpha);
    let loa = limits_of_agreement(&sample, 0.95)?;

    let plan = make_plan(n, config.boot, config.seed)?;
    let bias_ci = boot_bias_ci(&sample, &plan)?;
    // a fixed ratio (override or fallback) leaves nothing to re-estimate
    // inside resamples; estimated ratios propagate their uncertainty
    let band_mode = match lambda_source {
        LambdaSource::Override | LambdaSource::Fallback1 => LambdaMode::Frozen(lambda),
        LambdaSource::Grubbs | LambdaSource::Replicates => LambdaMode::Reestimate,
    };
    let precision_band = boot_band(&sample, BandKind::Precision, &plan, config.grid)?;
    let bisector_band = boot_band(&sample, BandKind::Bisector(band_mode), &plan, config.grid)?;
    let ellipse = boot_ellipse(&sample, &plan, lambda)?;

    let graphical = GraphicalDecisions {
        accuracy_origin_inside: bias_ci.contains(0.0),
        precision_admits_horizontal: band_admits_horizontal(&precision_band, Some(bias_ci)),
        bisector_admits_unit_slope: band_admits_unit_slope(&bisector_band, bias_ci),
        bias_ci,
    };
    let verdict = nested_verdict(&acc, &prec, &bis, lambda, &graphical);

    let report = Report {
        schema_version: SCHEMA_VERSION,
        input: InputInfo {
            source: config.source.clone(),
            n,
            unit: sample.unit_label.clone(),
            transform: config.transform_label.clone(),
        },
        alpha: sig6(config.alpha),
        seed: config.seed,
        boot: config.boot,
        grid: config.grid,
        lambda: sig6(lambda),
        lambda_source,
        tests: TestsInfo {
            accuracy: single_info(&acc),
            precision: single_info(&prec),
            bisector: bisector_info(&bis),
        },
        deming: DemingInfo {
            slope: sig6(dem.slope),
            intercept: sig6(dem.intercept),
            se_slope: sig6(dem.se_slope),
            se_intercept: sig6(dem.se_intercept),
            df: dem.df,
        },
        graphical: GraphicalInfo {
            accuracy_origin_inside: graphical.accuracy_origin_inside,
            precision_admits_horizontal: graphical.precision_admits_horizontal,
            bisector_admits_unit_slope: graphical.bisector_admits_unit_slope,
            bias_ci: graphical.bias_ci.into(),
        },
        limits_of_agreement: LoaInfo {
            bias: sig6(loa.bias),
            sd_diff: sig6(loa.sd_diff),
            lower: sig6(loa.loa_lower),
            upper: sig6(loa.loa_upper),
            ci_lower_limit: loa.ci_lower_limit.into(),
            ci_upper_limit: loa.ci_upper_limit.into(),
        },
        verdict: verdict.verdict.as_str().into(),
        bisector_unreliable_lambda: verdict.bisector_unreliable_lambda,
        warnings,
    };
    Ok(Analysis {
        report,
        sample,
        precision_band,
        bisector_band,
        ellipse,
    })
}

pub fn render_report(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use concord::load_fixture;

    #[test]
    fn sig6_rounds_to_six_significant_digits() {
        assert_eq!(sig6(1.6920664), 1.69207);
        assert_eq!(sig6(-0.00012345678), -0.000123457);
        assert_eq!(sig6(123456789.0), 123457000.0);
        assert_eq!(sig6(0.0), 0.0);
    }

    fn pefr_analysis() -> Analysis {
        let sample = load_fixture("pefr").unwrap();
        analyze(
            sample,
            &AnalyzeConfig {
                source: "fixture:pefr".into(),
                alpha: 0.05,
                boot: 600,
                grid: 40,
                seed: 42,
                lambda_override: None,
                transform_label: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn report_round_trips_through_json() {
        let analysis = pefr_analysis();
        let text = render_report(&analysis.report);
        let parsed: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(render_report(&parsed), text);
    }

    #[test]
    fn verdict_recomputable_from_contained_results() {
        let r = pefr_analysis().report;
        let all_pass = r.tests.accuracy.decision == "not-reject"
            && r.tests.precision.decision == "not-reject"
            && r.tests.bisector.decision == "not-reject";
        let concordant = r.tests.accuracy.decision == "reject"
            && r.tests.precision.decision == "not-reject"
            && r.graphical.precision_admits_horizontal
            && r.graphical.bisector_admits_unit_slope;
        let expected = if all_pass {
            "strict-equivalence"
        } else if concordant {
            "biased-but-concordant"
        } else {
            "not-equivalent"
        };
        assert_eq!(r.verdict, expected);
        assert_eq!(
            r.bisector_unreliable_lambda,
            r.tests.precision.decision == "reject"
        );
    }

    #[test]
    fn small_sample_warning_below_40() {
        let r = pefr_analysis().report;
        assert!(r.warnings.iter().any(|w| w.starts_with("small-sample")));
        assert!(r.lambda_source == LambdaSource::Replicates);
    }

    #[test]
    fn override_freezes_lambda() {
        let sample = load_fixture("syst-bp").unwrap();
        let a = analyze(
            sample,
            &AnalyzeConfig {
                source: "fixture:syst-bp".into(),
                alpha: 0.05,
                boot: 600,
                grid: 40,
                seed: 1,
                lambda_override: Some(2.5),
                transform_label: None,
            },
        )
        .unwrap();
        assert_eq!(a.report.lambda, 2.5);
        assert_eq!(a.report.lambda_source, LambdaSource::Override);
    }
}
