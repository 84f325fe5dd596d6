//! SVG 1.1 figures (MDS scatter plots and GDV curves) and number
//! formatting shared by the CSV writers.
//!
//! Output is a pure function of the input: no timestamps, no hash-map
//! iteration, fixed-precision coordinates.

use std::fmt::Write as _;

use crate::analysis::GdvCurve;
use crate::corpus::Construction;
use crate::error::ReportError;
use crate::linalg::Matrix;

/// Formats like C's `%.6g`: six significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-4, 1e6)`. Negative zero prints as `0`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Fill color per construction, indexed like [`Construction::ALL`]. Agree
/// constructions are blues, come constructions reds/oranges, give
/// constructions greens/purples.
pub const CONSTRUCTION_PALETTE: [&str; 11] = [
    "#1f77b4", // agree_on
    "#aec7e8", // agree_to
    "#17becf", // agree_that
    "#9edae5", // agree_with
    "#d62728", // come_back
    "#ff7f0e", // come_in
    "#ffbb78", // come_out
    "#2ca02c", // give_in
    "#98df8a", // give_out
    "#9467bd", // give_up
    "#c5b0d5", // give_away
];

pub const CURVE_PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub fn construction_color(c: Construction) -> &'static str {
    CONSTRUCTION_PALETTE[c.index()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Scatter,
    Curve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
}

impl PlotSpec {
    pub fn scatter(title: impl Into<String>) -> Self {
        Self {
            kind: PlotKind::Scatter,
            title: title.into(),
            x_label: "MDS 1".into(),
            y_label: "MDS 2".into(),
            width: 640,
            height: 480,
        }
    }

    pub fn curve(title: impl Into<String>) -> Self {
        Self {
            kind: PlotKind::Curve,
            title: title.into(),
            x_label: "layer".into(),
            y_label: "GDV".into(),
            width: 640,
            height: 420,
        }
    }
}

/// Per-point annotation for a scatter plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PointLabel {
    pub id: String,
    pub construction: Construction,
    pub flagged: bool,
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Fixed two-decimal pixel coordinate.
fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Data range padded so a single value still spans a visible interval.
fn padded_range<I: IntoIterator<Item = f64>>(values: I) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn new(spec: &PlotSpec, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Self {
            x0: MARGIN_LEFT,
            y0: MARGIN_TOP,
            w: (f64::from(spec.width) - MARGIN_LEFT - MARGIN_RIGHT).max(10.0),
            h: (f64::from(spec.height) - MARGIN_TOP - MARGIN_BOTTOM).max(10.0),
            x_range,
            y_range,
        }
    }

    fn x(&self, v: f64) -> f64 {
        self.x0 + (v - self.x_range.0) / (self.x_range.1 - self.x_range.0) * self.w
    }

    /// Larger values are drawn higher.
    fn y(&self, v: f64) -> f64 {
        self.y0 + (self.y_range.1 - v) / (self.y_range.1 - self.y_range.0) * self.h
    }
}

fn open_document(out: &mut String, spec: &PlotSpec) {
    let (w, h) = (spec.width, spec.height);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&spec.title));
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
        px(f64::from(w) / 2.0),
        escape(&spec.title)
    );
}

fn axes(
    out: &mut String,
    spec: &PlotSpec,
    f: &Frame,
    x_ticks: &[(f64, String)],
    y_ticks: &[(f64, String)],
) {
    let bottom = f.y0 + f.h;
    out.push_str("<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n");
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
        px(f.x0),
        px(bottom),
        px(f.x0 + f.w),
        px(bottom)
    );
    let _ = writeln!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
        px(f.x0),
        px(f.y0),
        px(f.x0),
        px(bottom)
    );
    for (v, _) in x_ticks {
        let x = f.x(*v);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            px(x),
            px(bottom),
            px(x),
            px(bottom + 5.0)
        );
    }
    for (v, _) in y_ticks {
        let y = f.y(*v);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            px(f.x0 - 5.0),
            px(y),
            px(f.x0),
            px(y)
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"tick-labels\" font-family=\"sans-serif\" font-size=\"11\">\n");
    for (v, label) in x_ticks {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            px(f.x(*v)),
            px(bottom + 18.0),
            escape(label)
        );
    }
    for (v, label) in y_ticks {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            px(f.x0 - 8.0),
            px(f.y(*v) + 4.0),
            escape(label)
        );
    }
    out.push_str("</g>\n");

    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        px(f.x0 + f.w / 2.0),
        px(f64::from(spec.height) - 10.0),
        escape(&spec.x_label)
    );
    let (lx, ly) = (16.0, f.y0 + f.h / 2.0);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>",
        px(lx),
        px(ly),
        px(lx),
        px(ly),
        escape(&spec.y_label)
    );
}

fn even_ticks(range: (f64, f64), count: usize) -> Vec<(f64, String)> {
    (0..count)
        .map(|i| {
            let v = range.0 + (range.1 - range.0) * i as f64 / (count - 1) as f64;
            (v, format_float(round_sig(v, 3)))
        })
        .collect()
}

fn round_sig(v: f64, digits: i32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let mag = 10f64.powi(digits - 1 - v.abs().log10().floor() as i32);
    (v * mag).round() / mag
}

fn legend_entry(out: &mut String, f: &Frame, slot: usize, color: &str, label: &str, line: bool) {
    let x = f.x0 + f.w + 16.0;
    let y = f.y0 + 6.0 + slot as f64 * 18.0;
    out.push_str("<g class=\"legend-entry\">\n");
    if line {
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            px(x),
            px(y + 5.0),
            px(x + 14.0),
            px(y + 5.0)
        );
    } else {
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{color}\"/>",
            px(x),
            px(y)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
        px(x + 20.0),
        px(y + 9.0),
        escape(label)
    );
    out.push_str("</g>\n");
}

/// Scatter plot of 2-D coordinates colored by construction. Flagged
/// outliers get a black outline. Legend entries follow
/// [`Construction::ALL`] order and cover only constructions present.
pub fn emit_scatter_svg(
    coords: &Matrix,
    labels: &[PointLabel],
    spec: &PlotSpec,
) -> Result<String, ReportError> {
    if coords.cols() != 2 {
        return Err(ReportError::NotTwoDimensional(coords.cols()));
    }
    if coords.rows() != labels.len() {
        return Err(ReportError::LabelCount {
            points: coords.rows(),
            labels: labels.len(),
        });
    }
    let frame = Frame::new(
        spec,
        padded_range(coords.iter_rows().map(|r| r[0])),
        padded_range(coords.iter_rows().map(|r| r[1])),
    );

    let mut out = String::new();
    open_document(&mut out, spec);
    axes(
        &mut out,
        spec,
        &frame,
        &even_ticks(frame.x_range, 5),
        &even_ticks(frame.y_range, 5),
    );

    out.push_str("<g class=\"points\">\n");
    for (row, label) in coords.iter_rows().zip(labels) {
        let stroke = if label.flagged {
            "stroke=\"#000000\" stroke-width=\"1.5\""
        } else {
            "stroke=\"none\""
        };
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.85\" {stroke}><title>{}</title></circle>",
            px(frame.x(row[0])),
            px(frame.y(row[1])),
            construction_color(label.construction),
            escape(&label.id)
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"legend\">\n");
    let present: Vec<Construction> = Construction::ALL
        .into_iter()
        .filter(|c| labels.iter().any(|l| l.construction == *c))
        .collect();
    for (slot, c) in present.iter().enumerate() {
        legend_entry(
            &mut out,
            &frame,
            slot,
            construction_color(*c),
            c.name(),
            false,
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// One polyline per curve over a shared layer domain. More negative GDV
/// (stronger separation) is drawn lower.
pub fn emit_curve_svg(curves: &[GdvCurve], spec: &PlotSpec) -> Result<String, ReportError> {
    let layers: Vec<usize> = curves
        .first()
        .map(|c| c.values.keys().copied().collect())
        .unwrap_or_default();
    for c in curves.iter().skip(1) {
        if !c.values.keys().copied().eq(layers.iter().copied()) {
            return Err(ReportError::MismatchedLayers {
                first: curves[0].grouping.name(),
                other: c.grouping.name(),
            });
        }
    }

    let x_range = match (layers.first(), layers.last()) {
        (Some(&a), Some(&b)) if a != b => (a as f64 - 0.5, b as f64 + 0.5),
        (Some(&a), _) => (a as f64 - 1.0, a as f64 + 1.0),
        _ => (0.0, 1.0),
    };
    let y_range = padded_range(curves.iter().flat_map(|c| c.values.values().copied()));
    let frame = Frame::new(spec, x_range, y_range);

    let mut out = String::new();
    open_document(&mut out, spec);
    let x_ticks: Vec<(f64, String)> = layers.iter().map(|&l| (l as f64, l.to_string())).collect();
    axes(&mut out, spec, &frame, &x_ticks, &even_ticks(y_range, 5));

    if y_range.0 < 0.0 && y_range.1 > 0.0 {
        let y = frame.y(0.0);
        let _ = writeln!(
            out,
            "<line class=\"zero\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>",
            px(frame.x0),
            px(y),
            px(frame.x0 + frame.w),
            px(y)
        );
    }

    out.push_str("<g class=\"curves\">\n");
    for (i, c) in curves.iter().enumerate() {
        let pts: Vec<String> = c
            .values
            .iter()
            .map(|(&l, &v)| format!("{},{}", px(frame.x(l as f64)), px(frame.y(v))))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"><title>{}</title></polyline>",
            CURVE_PALETTE[i % CURVE_PALETTE.len()],
            pts.join(" "),
            escape(&format!("{} ({})", c.grouping.name(), c.model_id))
        );
    }
    out.push_str("</g>\n");

    out.push_str("<g class=\"legend\">\n");
    for (i, c) in curves.iter().enumerate() {
        legend_entry(
            &mut out,
            &frame,
            i,
            CURVE_PALETTE[i % CURVE_PALETTE.len()],
            &c.grouping.name(),
            true,
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}
