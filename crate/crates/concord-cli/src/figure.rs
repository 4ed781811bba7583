//! Three-panel SVG figure: bias interval, difference-vs-sum band, and the
//! agreement plot with its confidence-ellipse inset.

use crate::report::Report;
use concord::{chi2_quantile_2df, BootstrapBand, ConfidenceEllipse, Error, PairedSample};
use std::fmt::Write as _;

const WIDTH: f64 = 1180.0;
const HEIGHT: f64 = 440.0;
const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 300.0;
const PANEL_Y: f64 = 80.0;
const PANEL_X: [f64; 3] = [60.0, 450.0, 840.0];

const BAND_FILL: &str = "#b5cde3";
const ACCENT: &str = "#1f4e79";
const POINT_FILL: &str = "#40484f";
const NULL_COLOR: &str = "#c23b22";

struct Frame {
    x0: f64,
    y0: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn new(x0: f64, (xmin, xmax): (f64, f64), (ymin, ymax): (f64, f64)) -> Frame {
        Frame {
            x0,
            y0: PANEL_Y,
            xmin,
            xmax,
            ymin,
            ymax,
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xmin) / (self.xmax - self.xmin) * PANEL_W
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + PANEL_H - (y - self.ymin) / (self.ymax - self.ymin) * PANEL_H
    }
}

fn pad((lo, hi): (f64, f64), frac: f64) -> (f64, f64) {
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    (lo - frac * span, hi + frac * span)
}

fn extent(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

fn fx(v: f64) -> String {
    format!("{:.2}", v)
}

/// Tick label: four significant digits, shortest decimal form.
fn tick_label(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor();
    let scale = 10f64.powi(3 - magnitude as i32);
    format!("{}", (v * scale).round() / scale)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn axes(svg: &mut String, f: &Frame, panel: &str, x_label: &str, y_label: &str) {
    let bottom = f.y0 + PANEL_H;
    let _ = write!(
        svg,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#606060" stroke-width="1"/>"##,
        fx(f.x0),
        fx(f.y0),
        fx(PANEL_W),
        fx(PANEL_H)
    );
    for i in 0..5 {
        let t = i as f64 / 4.0;
        let xv = f.xmin + t * (f.xmax - f.xmin);
        let yv = f.ymin + t * (f.ymax - f.ymin);
        let xp = f.px(xv);
        let yp = f.py(yv);
        let _ = write!(
            svg,
            r##"<line x1="{x}" y1="{b}" x2="{x}" y2="{b2}" stroke="#606060" stroke-width="1"/><text x="{x}" y="{lbl}" font-size="10" text-anchor="middle">{t}</text>"##,
            x = fx(xp),
            b = fx(bottom),
            b2 = fx(bottom + 4.0),
            lbl = fx(bottom + 16.0),
            t = esc(&tick_label(xv)),
        );
        let _ = write!(
            svg,
            r##"<line x1="{l2}" y1="{y}" x2="{l}" y2="{y}" stroke="#606060" stroke-width="1"/><text x="{lbl}" y="{ty}" font-size="10" text-anchor="end">{t}</text>"##,
            l = fx(f.x0),
            l2 = fx(f.x0 - 4.0),
            y = fx(yp),
            lbl = fx(f.x0 - 7.0),
            ty = fx(yp + 3.5),
            t = esc(&tick_label(yv)),
        );
    }
    let _ = write!(
        svg,
        r#"<text id="{panel}-x-label" x="{cx}" y="{by}" font-size="12" text-anchor="middle">{xl}</text>"#,
        panel = panel,
        cx = fx(f.x0 + PANEL_W / 2.0),
        by = fx(bottom + 34.0),
        xl = esc(x_label),
    );
    let _ = write!(
        svg,
        r#"<text id="{panel}-y-label" x="{lx}" y="{cy}" font-size="12" text-anchor="middle" transform="rotate(-90 {lx} {cy})">{yl}</text>"#,
        panel = panel,
        lx = fx(f.x0 - 42.0),
        cy = fx(f.y0 + PANEL_H / 2.0),
        yl = esc(y_label),
    );
}

fn band_polygon(f: &Frame, band: &BootstrapBand, to_y: impl Fn(f64, f64) -> f64) -> String {
    let mut points = String::new();
    for (g, u) in band.grid.iter().zip(&band.upper) {
        let _ = write!(points, "{},{} ", fx(f.px(*g)), fx(f.py(to_y(*g, *u))));
    }
    for (g, l) in band.grid.iter().rev().zip(band.lower.iter().rev()) {
        let _ = write!(points, "{},{} ", fx(f.px(*g)), fx(f.py(to_y(*g, *l))));
    }
    points.trim_end().to_string()
}

fn scatter(svg: &mut String, f: &Frame, id: &str, xs: &[f64], ys: &[f64]) {
    let _ = write!(svg, r#"<g id="{id}" fill="{POINT_FILL}" fill-opacity="0.75">"#);
    for (x, y) in xs.iter().zip(ys) {
        let _ = write!(
            svg,
            r#"<circle cx="{}" cy="{}" r="2.5"/>"#,
            fx(f.px(*x)),
            fx(f.py(*y))
        );
    }
    svg.push_str("</g>");
}

fn accuracy_panel(svg: &mut String, report: &Report, d_label: &str) {
    let ci = &report.graphical.bias_ci;
    let bias = report.tests.accuracy.estimate;
    let range = pad(extent([ci.lower, ci.upper, bias, 0.0]), 0.25);
    let f = Frame::new(PANEL_X[0], (0.0, 1.0), range);
    axes(svg, &f, "accuracy", "", d_label);
    let cx = f.px(0.5);
    let _ = write!(
        svg,
        r##"<line id="zero-line-accuracy" x1="{l}" y1="{z}" x2="{r}" y2="{z}" stroke="#909090" stroke-width="1" stroke-dasharray="4 3"/>"##,
        l = fx(f.x0),
        r = fx(f.x0 + PANEL_W),
        z = fx(f.py(0.0)),
    );
    let _ = write!(
        svg,
        r#"<line id="bias-ci" x1="{x}" y1="{lo}" x2="{x}" y2="{hi}" stroke="{ACCENT}" stroke-width="3"/>"#,
        x = fx(cx),
        lo = fx(f.py(ci.lower)),
        hi = fx(f.py(ci.upper)),
    );
    for bound in [ci.lower, ci.upper] {
        let _ = write!(
            svg,
            r#"<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" stroke="{ACCENT}" stroke-width="2"/>"#,
            x1 = fx(cx - 9.0),
            x2 = fx(cx + 9.0),
            y = fx(f.py(bound)),
        );
    }
    let zy = f.py(0.0);
    let _ = write!(
        svg,
        r#"<path id="origin-diamond" d="M {x} {t} L {r} {m} L {x} {b} L {l} {m} Z" fill="none" stroke="{NULL_COLOR}" stroke-width="1.5"/>"#,
        x = fx(cx),
        t = fx(zy - 6.0),
        b = fx(zy + 6.0),
        l = fx(cx - 6.0),
        r = fx(cx + 6.0),
        m = fx(zy),
    );
    let _ = write!(
        svg,
        r#"<circle id="bias-point" cx="{x}" cy="{y}" r="4" fill="{ACCENT}"/>"#,
        x = fx(cx),
        y = fx(f.py(bias)),
    );
}

fn precision_panel(
    svg: &mut String,
    report: &Report,
    sample: &PairedSample,
    band: &BootstrapBand,
    d_label: &str,
) {
    let sums = sample.sums();
    let d = sample.differences();
    let bias = report.tests.accuracy.estimate;
    let y_range = pad(
        extent(
            d.iter()
                .chain(&band.lower)
                .chain(&band.upper)
                .copied()
                .chain([0.0, bias]),
        ),
        0.12,
    );
    let f = Frame::new(PANEL_X[1], extent(sums.iter().copied()), y_range);
    axes(svg, &f, "precision", "sum of techniques (x + y)", d_label);
    let _ = write!(
        svg,
        r#"<polygon id="precision-band" points="{}" fill="{BAND_FILL}" fill-opacity="0.55"/>"#,
        band_polygon(&f, band, |_, v| v),
    );
    let _ = write!(
        svg,
        r##"<line id="zero-line" x1="{l}" y1="{z}" x2="{r}" y2="{z}" stroke="#909090" stroke-width="1" stroke-dasharray="4 3"/>"##,
        l = fx(f.x0),
        r = fx(f.x0 + PANEL_W),
        z = fx(f.py(0.0)),
    );
    let _ = write!(
        svg,
        r#"<line id="bias-line" x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="{NULL_COLOR}" stroke-width="1.5"/>"#,
        l = fx(f.x0),
        r = fx(f.x0 + PANEL_W),
        b = fx(f.py(bias)),
    );
    scatter(svg, &f, "precision-points", &sums, &d);
}

fn agreement_panel(
    svg: &mut String,
    sample: &PairedSample,
    band: &BootstrapBand,
    ellipse: &ConfidenceEllipse,
    unit_suffix: &str,
) {
    let band_y = band
        .grid
        .iter()
        .zip(band.lower.iter().chain(&band.upper))
        .map(|(g, v)| g + v);
    let y_range = pad(extent(sample.y.iter().copied().chain(band_y)), 0.12);
    let x_range = pad(extent(sample.x.iter().copied()), 0.12);
    let f = Frame::new(PANEL_X[2], x_range, y_range);
    axes(
        svg,
        &f,
        "agreement",
        &format!("reference technique x{unit_suffix}"),
        &format!("evaluated technique y{unit_suffix}"),
    );
    let _ = write!(
        svg,
        r#"<polygon id="bisector-band" points="{}" fill="{BAND_FILL}" fill-opacity="0.55"/>"#,
        band_polygon(&f, band, |g, v| g + v),
    );
    // the identity line clipped to the frame
    let lo = f.xmin.max(f.ymin);
    let hi = f.xmax.min(f.ymax);
    if hi > lo {
        let _ = write!(
            svg,
            r#"<line id="bisector-line" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{NULL_COLOR}" stroke-width="1.5"/>"#,
            x1 = fx(f.px(lo)),
            y1 = fx(f.py(lo)),
            x2 = fx(f.px(hi)),
            y2 = fx(f.py(hi)),
        );
    }
    scatter(svg, &f, "agreement-points", &sample.x, &sample.y);
    ellipse_inset(svg, &f, ellipse);
}

fn ellipse_inset(svg: &mut String, panel: &Frame, ellipse: &ConfidenceEllipse) {
    let (a, b) = ellipse.center;
    let r = chi2_quantile_2df(ellipse.level).sqrt();
    let l11 = ellipse.cov[0][0].sqrt();
    let l21 = ellipse.cov[0][1] / l11;
    let l22 = (ellipse.cov[1][1] - l21 * l21).max(0.0).sqrt();
    let ring: Vec<(f64, f64)> = (0..=64)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            (
                a + r * l11 * th.cos(),
                b + r * (l21 * th.cos() + l22 * th.sin()),
            )
        })
        .collect();
    let ea = extent(ring.iter().map(|p| p.0).chain([0.0]));
    let eb = extent(ring.iter().map(|p| p.1).chain([1.0]));
    let inset = Frame {
        x0: panel.x0 + 12.0,
        y0: panel.y0 + 12.0,
        xmin: pad(ea, 0.15).0,
        xmax: pad(ea, 0.15).1,
        ymin: pad(eb, 0.15).0,
        ymax: pad(eb, 0.15).1,
    };
    let w = 120.0;
    let h = 96.0;
    let ipx = |x: f64| inset.x0 + (x - inset.xmin) / (inset.xmax - inset.xmin) * w;
    let ipy = |y: f64| inset.y0 + h - (y - inset.ymin) / (inset.ymax - inset.ymin) * h;
    let _ = write!(
        svg,
        r##"<rect id="ellipse-inset" x="{x}" y="{y}" width="{w}" height="{h}" fill="#ffffff" stroke="#606060" stroke-width="1"/>"##,
        x = fx(inset.x0),
        y = fx(inset.y0),
        w = fx(w),
        h = fx(h),
    );
    let mut points = String::new();
    for (pa, pb) in &ring {
        let _ = write!(points, "{},{} ", fx(ipx(*pa)), fx(ipy(*pb)));
    }
    let _ = write!(
        svg,
        r#"<polygon id="ellipse-outline" points="{}" fill="{BAND_FILL}" fill-opacity="0.4" stroke="{ACCENT}" stroke-width="1"/>"#,
        points.trim_end(),
    );
    let _ = write!(
        svg,
        r#"<circle id="ellipse-center" cx="{x}" cy="{y}" r="2" fill="{ACCENT}"/>"#,
        x = fx(ipx(a)),
        y = fx(ipy(b)),
    );
    let zx = ipx(0.0);
    let zy = ipy(1.0);
    let _ = write!(
        svg,
        r#"<path id="null-point" d="M {x} {t} L {r} {m} L {x} {b} L {l} {m} Z" fill="none" stroke="{NULL_COLOR}" stroke-width="1.5"/>"#,
        x = fx(zx),
        t = fx(zy - 4.0),
        b = fx(zy + 4.0),
        l = fx(zx - 4.0),
        r = fx(zx + 4.0),
        m = fx(zy),
    );
    let _ = write!(
        svg,
        r#"<text x="{x}" y="{y}" font-size="9" text-anchor="start">intercept vs slope, null at (0, 1)</text>"#,
        x = fx(inset.x0),
        y = fx(inset.y0 + h + 11.0),
    );
}

pub fn render_figure(
    report: &Report,
    sample: &PairedSample,
    precision_band: Option<&BootstrapBand>,
    bisector_band: Option<&BootstrapBand>,
    ellipse: Option<&ConfidenceEllipse>,
) -> concord::Result<String> {
    let precision_band =
        precision_band.ok_or_else(|| Error::IncompleteGraphics("precision band".into()))?;
    let bisector_band =
        bisector_band.ok_or_else(|| Error::IncompleteGraphics("bisector band".into()))?;
    let ellipse = ellipse.ok_or_else(|| Error::IncompleteGraphics("confidence ellipse".into()))?;

    let unit_suffix = match &report.input.unit {
        Some(u) => format!(" ({u})"),
        None => String::new(),
    };
    let d_label = format!("difference (y - x){unit_suffix}");

    let mut svg = String::with_capacity(64 * 1024);
    svg.push_str(r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"#,
        w = WIDTH,
        h = HEIGHT,
    );
    let _ = write!(
        svg,
        r#"<text id="figure-title" x="{x}" y="28" font-size="15" text-anchor="middle">{src} - verdict: {v}</text>"#,
        x = WIDTH / 2.0,
        src = esc(&report.input.source),
        v = esc(&report.verdict),
    );
    for (i, title) in [
        "accuracy: bias and 95% interval",
        "precision: difference vs sum",
        "agreement: band around the identity line",
    ]
    .iter()
    .enumerate()
    {
        let _ = write!(
            svg,
            r#"<text x="{x}" y="62" font-size="12" text-anchor="middle" font-weight="bold">{t}</text>"#,
            x = fx(PANEL_X[i] + PANEL_W / 2.0),
            t = esc(title),
        );
    }
    accuracy_panel(&mut svg, report, &d_label);
    precision_panel(&mut svg, report, sample, precision_band, &d_label);
    agreement_panel(&mut svg, sample, bisector_band, ellipse, &unit_suffix);
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{analyze, AnalyzeConfig};
    use concord::load_fixture;

    fn pefr() -> crate::report::Analysis {
        analyze(
            load_fixture("pefr").unwrap(),
            &AnalyzeConfig {
                source: "fixture:pefr".into(),
                alpha: 0.05,
                boot: 400,
                grid: 30,
                seed: 9,
                lambda_override: None,
                transform_label: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn figure_requires_all_graphics() {
        let a = pefr();
        let missing = render_figure(&a.report, &a.sample, None, Some(&a.bisector_band), Some(&a.ellipse));
        assert!(matches!(missing, Err(Error::IncompleteGraphics(_))));
    }

    #[test]
    fn figure_is_deterministic_and_tagged() {
        let a = pefr();
        let one = render_figure(
            &a.report,
            &a.sample,
            Some(&a.precision_band),
            Some(&a.bisector_band),
            Some(&a.ellipse),
        )
        .unwrap();
        let two = render_figure(
            &a.report,
            &a.sample,
            Some(&a.precision_band),
            Some(&a.bisector_band),
            Some(&a.ellipse),
        )
        .unwrap();
        assert_eq!(one, two);
        for id in [
            "bias-point",
            "bias-ci",
            "origin-diamond",
            "precision-band",
            "bias-line",
            "bisector-band",
            "bisector-line",
            "ellipse-outline",
            "null-point",
        ] {
            assert!(one.contains(&format!(r#"id="{id}""#)), "missing {id}");
        }
    }

    #[test]
    fn tick_labels_are_compact() {
        assert_eq!(tick_label(123.456), "123.5");
        assert_eq!(tick_label(0.000123456), "0.0001235");
        assert_eq!(tick_label(0.0), "0");
        assert_eq!(tick_label(-42.0), "-42");
    }
}
