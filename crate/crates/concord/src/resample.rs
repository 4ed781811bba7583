//! Percentile-bootstrap machinery: seeded resampling plans, the bias
//! confidence interval, pointwise confidence bands for the precision and
//! bisector lines, the joint (intercept, slope) confidence ellipse, and the
//! translated band-admission checks.
//!
//! Determinism contract: all indices (including the reserve used to redraw
//! degenerate resamples) are generated up front from the seed, and envelopes
//! aggregate per grid column, so results are bit-identical for identical
//! (sample, seed, B, grid) regardless of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sample::PairedSample;
use crate::special::chi2_quantile_2df;
use crate::stats::{moments_xy, ols_fit};
use crate::structural::{deming_point, grubbs_from_moments, lambda_from_replicate_refs};

pub const DEFAULT_BOOT: usize = 2000;
pub const DEFAULT_GRID: usize = 100;
const LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Pre-generated subject indices: `b` rows of `n` draws, plus a reserve
/// stream consumed when a resample turns out degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct ResamplePlan {
    pub n: usize,
    pub b: usize,
    pub seed: u64,
    pub indices: Vec<u32>,
    reserve: Vec<u32>,
}

impl ResamplePlan {
    pub fn row(&self, r: usize) -> &[u32] {
        &self.indices[r * self.n..(r + 1) * self.n]
    }

    fn reserve_row(&self, k: usize) -> Option<&[u32]> {
        let start = k * self.n;
        let end = start + self.n;
        if end <= self.reserve.len() {
            Some(&self.reserve[start..end])
        } else {
            None
        }
    }
}

pub fn make_plan(n: usize, b: usize, seed: u64) -> Result<ResamplePlan> {
    if n < 3 {
        return Err(Error::BadBootstrapConfig(format!(
            "need at least 3 subjects to resample, got {n}"
        )));
    }
    if b < 100 {
        return Err(Error::BadBootstrapConfig(format!(
            "need at least 100 bootstrap replicates, got {b}"
        )));
    }
    let fill = |stream: u64, rows: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        (0..rows * n).map(|_| rng.gen_range(0..n as u32)).collect::<Vec<u32>>()
    };
    // reserve sized for the 10% degeneracy budget plus the final failing draw
    Ok(ResamplePlan {
        n,
        b,
        seed,
        indices: fill(0, b),
        reserve: fill(1, b / 10 + 2),
    })
}

fn is_degenerate(e: &Error) -> bool {
    matches!(
        e,
        Error::DegeneratePredictor | Error::DemingDegenerate | Error::LambdaIndeterminate { .. }
    )
}

/// Runs `fit` over every planned resample, redrawing degenerate draws from
/// the reserve; fails once degenerate draws exceed 10% of B.
fn for_each_resample<T>(
    sample: &PairedSample,
    plan: &ResamplePlan,
    mut fit: impl FnMut(&[f64], &[f64], &[u32]) -> Result<T>,
) -> Result<Vec<T>> {
    let limit = plan.b / 10;
    let mut degenerate = 0usize;
    let mut cursor = 0usize;
    let mut out = Vec::with_capacity(plan.b);
    let mut xs = vec![0.0; plan.n];
    let mut ys = vec![0.0; plan.n];
    for r in 0..plan.b {
        let mut row = plan.row(r);
        loop {
            for (k, &i) in row.iter().enumerate() {
                xs[k] = sample.x[i as usize];
                ys[k] = sample.y[i as usize];
            }
            match fit(&xs, &ys, row) {
                Ok(v) => {
                    out.push(v);
                    break;
                }
                Err(e) if is_degenerate(&e) => {
                    degenerate += 1;
                    if degenerate > limit {
                        return Err(Error::BootstrapUnstable {
                            degenerate,
                            total: plan.b,
                        });
                    }
                    row = plan.reserve_row(cursor).ok_or(Error::BootstrapUnstable {
                        degenerate,
                        total: plan.b,
                    })?;
                    cursor += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Linear-interpolation percentile of a sorted slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

fn percentile_interval(values: &mut [f64]) -> Interval {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Interval {
        lower: percentile(values, (1.0 - LEVEL) / 2.0),
        upper: percentile(values, 1.0 - (1.0 - LEVEL) / 2.0),
    }
}

/// 95% percentile interval of the accuracy intercept (the bias) over
/// resampled fits.
pub fn boot_bias_ci(sample: &PairedSample, plan: &ResamplePlan) -> Result<Interval> {
    let mut vals = for_each_resample(sample, plan, |xs, ys, _| {
        let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
        let centered: Vec<f64> = xs.iter().map(|&v| v - mean_x).collect();
        let d: Vec<f64> = xs.iter().zip(ys).map(|(&x, &y)| y - x).collect();
        Ok(ols_fit(&centered, &d)?.intercept)
    })?;
    Ok(percentile_interval(&mut vals))
}

/// How λ is obtained inside each bisector resample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    /// Re-estimate per resample (replicate-pooled when the sample carries
    /// replicates, Grubbs otherwise), propagating λ uncertainty into the band.
    Reestimate,
    /// Hold a caller-supplied λ fixed (used when λ itself was overridden or
    /// fell back to 1, so there is nothing to re-estimate).
    Frozen(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandKind {
    Precision,
    Bisector(LambdaMode),
}

/// Pointwise 2.5%/97.5% envelopes of resampled regression lines, evaluated
/// on a fixed grid in difference space (for the bisector, predicted y minus
/// x, so both kinds share admission geometry).
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapBand {
    pub grid: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
}

pub fn boot_band(
    sample: &PairedSample,
    kind: BandKind,
    plan: &ResamplePlan,
    grid_size: usize,
) -> Result<BootstrapBand> {
    if grid_size < 20 {
        return Err(Error::BadBootstrapConfig(format!(
            "need at least 20 grid points, got {grid_size}"
        )));
    }
    let abscissa: Vec<f64> = match kind {
        BandKind::Precision => sample.sums(),
        BandKind::Bisector(_) => sample.x.clone(),
    };
    let (min, max) = abscissa
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(max > min) {
        return Err(Error::DegeneratePredictor);
    }
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| min + (max - min) * i as f64 / (grid_size - 1) as f64)
        .collect();

    // each resample reduces to an (intercept, slope) pair in difference space
    let lines: Vec<(f64, f64)> = for_each_resample(sample, plan, |xs, ys, row| match kind {
        BandKind::Precision => {
            let s: Vec<f64> = xs.iter().zip(ys).map(|(&x, &y)| x + y).collect();
            let d: Vec<f64> = xs.iter().zip(ys).map(|(&x, &y)| y - x).collect();
            let fit = ols_fit(&s, &d)?;
            Ok((fit.intercept, fit.slope))
        }
        BandKind::Bisector(mode) => {
            let m = moments_xy(xs, ys)?;
            let lambda = match mode {
                LambdaMode::Frozen(v) => v,
                LambdaMode::Reestimate => match &sample.replicates {
                    Some(reps) => {
                        let xg: Vec<&[f64]> =
                            row.iter().map(|&i| reps.x[i as usize].as_slice()).collect();
                        let yg: Vec<&[f64]> =
                            row.iter().map(|&i| reps.y[i as usize].as_slice()).collect();
                        lambda_from_replicate_refs(&xg, &yg)?
                    }
                    None => grubbs_from_moments(&m)?,
                },
            };
            let (slope, intercept) = deming_point(&m, lambda)?;
            Ok((intercept, slope - 1.0))
        }
    })?;

    let mut lower = Vec::with_capacity(grid_size);
    let mut upper = Vec::with_capacity(grid_size);
    let mut column = vec![0.0; lines.len()];
    for &g in &grid {
        for (k, &(a, b)) in lines.iter().enumerate() {
            column[k] = a + b * g;
        }
        let iv = percentile_interval(&mut column);
        lower.push(iv.lower);
        upper.push(iv.upper);
    }
    Ok(BootstrapBand {
        grid,
        lower,
        upper,
        level: LEVEL,
    })
}

/// True when some horizontal line fits inside the band; with a translation
/// interval, the admissible constants must also meet that interval.
pub fn band_admits_horizontal(band: &BootstrapBand, translation: Option<Interval>) -> bool {
    let max_lower = band.lower.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_upper = band.upper.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_lower > min_upper {
        return false;
    }
    match translation {
        None => true,
        Some(ci) => max_lower <= ci.upper && ci.lower <= min_upper,
    }
}

/// True when a line of unit slope, shifted by some constant in `bias_ci`,
/// fits inside a difference-space band.
pub fn band_admits_unit_slope(band: &BootstrapBand, bias_ci: Interval) -> bool {
    band_admits_horizontal(band, Some(bias_ci))
}

/// Joint sampling distribution of the Deming (intercept, slope) pair,
/// summarized by its mean and covariance; membership at the chi-square
/// 2-df quantile.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceEllipse {
    pub center: (f64, f64),
    pub cov: [[f64; 2]; 2],
    pub level: f64,
}

impl ConfidenceEllipse {
    pub fn mahalanobis2(&self, intercept: f64, slope: f64) -> f64 {
        let da = intercept - self.center.0;
        let db = slope - self.center.1;
        let det = self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0];
        (self.cov[1][1] * da * da - 2.0 * self.cov[0][1] * da * db + self.cov[0][0] * db * db)
            / det
    }

    pub fn contains(&self, intercept: f64, slope: f64) -> bool {
        self.mahalanobis2(intercept, slope) <= chi2_quantile_2df(self.level)
    }
}

/// Bootstrap confidence ellipse of the Deming (intercept, slope) pair at a
/// fixed λ. λ is deliberately not re-estimated per resample here: the
/// Grubbs ratio pins every resampled slope to exactly 1, which would
/// collapse the slope variance and make the ellipse singular.
pub fn boot_ellipse(
    sample: &PairedSample,
    plan: &ResamplePlan,
    lambda: f64,
) -> Result<ConfidenceEllipse> {
    let pairs = for_each_resample(sample, plan, |xs, ys, _| {
        let (slope, intercept) = deming_point(&moments_xy(xs, ys)?, lambda)?;
        Ok((intercept, slope))
    })?;
    let nb = pairs.len() as f64;
    let mean_a = pairs.iter().map(|p| p.0).sum::<f64>() / nb;
    let mean_b = pairs.iter().map(|p| p.1).sum::<f64>() / nb;
    let mut s_aa = 0.0;
    let mut s_ab = 0.0;
    let mut s_bb = 0.0;
    for &(a, b) in &pairs {
        let da = a - mean_a;
        let db = b - mean_b;
        s_aa += da * da;
        s_ab += da * db;
        s_bb += db * db;
    }
    s_aa /= nb - 1.0;
    s_ab /= nb - 1.0;
    s_bb /= nb - 1.0;
    // a point-mass or line-mass bootstrap distribution has no usable ellipse;
    // the absolute floors catch float-noise covariances from exact data
    let floor_a = (1e-12 * mean_a.abs().max(1.0)).powi(2);
    let floor_b = (1e-12 * mean_b.abs().max(1.0)).powi(2);
    let det = s_aa * s_bb - s_ab * s_ab;
    if s_aa <= floor_a || s_bb <= floor_b || det <= 1e-12 * s_aa * s_bb {
        return Err(Error::EllipseDegenerate);
    }
    Ok(ConfidenceEllipse {
        center: (mean_a, mean_b),
        cov: [[s_aa, s_ab], [s_ab, s_bb]],
        level: LEVEL,
    })
}

/// The four graphical admissions feeding the verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphicalDecisions {
    pub accuracy_origin_inside: bool,
    pub precision_admits_horizontal: bool,
    pub bisector_admits_unit_slope: bool,
    pub bias_ci: Interval,
}
