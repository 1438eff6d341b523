//! Deterministic SVG figures for the JSON artifacts.

use std::fmt::Write;

use hypcircle::carpet::{DiskFamily, LabeledGapSystem};
use hypcircle::kleinian::{LimitSetApprox, OrbitReport};
use hypcircle::slicer::CantorApprox;
use hypcircle::{MoebiusMap, OrientedCircle, Side, SpherePoint};
use num_complex::Complex64;
use serde_json::Value;

use crate::io::{from_value, CliError, CliResult};

const SIZE: f64 = 800.0;
const ARC_SAMPLES: usize = 96;
const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

pub enum Artifact {
    Carpet(DiskFamily),
    Cloud(LimitSetApprox),
    Gaps(LabeledGapSystem),
    Cantor(CantorApprox),
    Orbit(OrbitReport),
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Carpet(_) => "disk-family",
            Artifact::Cloud(_) => "limit-set",
            Artifact::Gaps(_) => "gap-system",
            Artifact::Cantor(_) => "cantor",
            Artifact::Orbit(_) => "orbit",
        }
    }
}

pub fn detect(v: Value) -> CliResult<Artifact> {
    let has = |k: &str| v.get(k).is_some();
    if has("disks") {
        Ok(Artifact::Carpet(from_value(v, "disk family")?))
    } else if has("bridges") {
        Ok(Artifact::Cantor(from_value(v, "Cantor approximation")?))
    } else if has("arcs") && has("circle") {
        Ok(Artifact::Gaps(from_value(v, "gap system")?))
    } else if has("points") {
        Ok(Artifact::Cloud(from_value::<LimitSetApprox>(v, "limit-set cloud")?.indexed()))
    } else if has("circles") && has("min_distance") {
        Ok(Artifact::Orbit(from_value(v, "orbit report")?))
    } else {
        Err(CliError::validation("UnknownArtifactKind", "input is not a renderable artifact"))
    }
}

/// World box `[x0, x1] x [y0, y1]` mapped onto the fixed canvas.
struct View {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl View {
    fn fit(points: &[Complex64]) -> View {
        let finite: Vec<&Complex64> = points.iter().filter(|z| z.re.is_finite() && z.im.is_finite()).collect();
        let (mut x0, mut x1, mut y0, mut y1) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
        if !finite.is_empty() {
            x0 = finite.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            x1 = finite.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            y0 = finite.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
            y1 = finite.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9) * 1.1;
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        View { x0: cx - 0.5 * span, y0: cy - 0.5 * span, scale: SIZE / span }
    }

    fn xy(&self, z: Complex64) -> (f64, f64) {
        ((z.re - self.x0) * self.scale, SIZE - (z.im - self.y0) * self.scale)
    }
}

fn finite(p: &SpherePoint) -> Option<Complex64> {
    p.to_complex().filter(|z| z.norm() < 1e6)
}

/// Extent of a circle for framing: its bounding points, or two points of a line.
fn circle_extent(c: &OrientedCircle) -> Vec<Complex64> {
    match c.center_radius() {
        Some((z, r)) if r < 1e6 => vec![z - Complex64::new(r, r), z + Complex64::new(r, r)],
        _ => vec![],
    }
}

fn header(kind: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}" data-kind="{kind}">"#
    );
    let _ = writeln!(s, r##"<rect class="background" x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>"##);
    s
}

fn circle_element(out: &mut String, view: &View, c: &OrientedCircle, attrs: &str) {
    match c.center_radius() {
        Some((z, r)) if r < 1e6 => {
            let (x, y) = view.xy(z);
            let _ = writeln!(out, r#"<circle {attrs} cx="{x:.4}" cy="{y:.4}" r="{:.4}"/>"#, r * view.scale);
        }
        _ => {
            // A line: draw the chord through the two points nearest the view.
            let pts: Vec<Complex64> = (0..ARC_SAMPLES).filter_map(|j| finite(&c.point_at(j as f64 * std::f64::consts::TAU / ARC_SAMPLES as f64))).collect();
            let (a, b) = (pts.first().copied().unwrap_or_default(), pts.last().copied().unwrap_or_default());
            let (x1, y1) = view.xy(a);
            let (x2, y2) = view.xy(b);
            let _ = writeln!(out, r#"<line {attrs} x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}"/>"#);
        }
    }
}

fn arc_path(out: &mut String, view: &View, chart: &MoebiusMap, start: f64, len: f64, attrs: &str) {
    let mut d = String::new();
    let mut pen_up = true;
    for j in 0..=ARC_SAMPLES {
        let theta = start + len * j as f64 / ARC_SAMPLES as f64;
        let p = chart.apply(&SpherePoint::finite(Complex64::from_polar(1.0, theta)));
        match finite(&p) {
            Some(z) => {
                let (x, y) = view.xy(z);
                let _ = write!(d, "{}{x:.4} {y:.4} ", if pen_up { "M" } else { "L" });
                pen_up = false;
            }
            None => pen_up = true,
        }
    }
    let _ = writeln!(out, r#"<path {attrs} fill="none" d="{}"/>"#, d.trim_end());
}

fn slice_points(c: &OrientedCircle) -> Vec<Complex64> {
    (0..ARC_SAMPLES).filter_map(|j| finite(&c.point_at(j as f64 * std::f64::consts::TAU / ARC_SAMPLES as f64))).collect()
}

pub fn render(a: &Artifact) -> String {
    let mut out = header(a.kind());
    match a {
        Artifact::Carpet(f) => {
            let ext: Vec<Complex64> = f.disks.iter().flat_map(|d| circle_extent(&d.circle)).collect();
            let view = View::fit(&ext);
            for (i, d) in f.disks.iter().enumerate() {
                let (cls, fill) = match d.side {
                    Side::Positive => ("disk", "#c6dbef"),
                    Side::Negative => ("disk exterior", "none"),
                };
                let attrs = format!(r##"class="{cls}" data-index="{i}" fill="{fill}" stroke="#08306b" stroke-width="0.5""##);
                circle_element(&mut out, &view, &d.circle, &attrs);
            }
        }
        Artifact::Cloud(lam) => {
            let pts: Vec<Complex64> = lam.points.iter().filter_map(finite).filter(|z| z.norm() < 100.0).collect();
            let view = View::fit(&pts);
            for z in &pts {
                let (x, y) = view.xy(*z);
                let _ = writeln!(out, r##"<circle class="point" cx="{x:.4}" cy="{y:.4}" r="1.2" fill="#000000"/>"##);
            }
        }
        Artifact::Gaps(g) => {
            let view = View::fit(&slice_points(&g.circle));
            arc_path(&mut out, &view, &g.chart, 0.0, std::f64::consts::TAU, r##"class="slice" stroke="#bbbbbb""##);
            for a in &g.arcs {
                let attrs = format!(
                    r#"class="gap" data-label="{}" data-start="{:.12}" data-end="{:.12}" stroke="{}" stroke-width="3""#,
                    a.label,
                    a.start,
                    a.end,
                    PALETTE[a.label % PALETTE.len()]
                );
                arc_path(&mut out, &view, &g.chart, a.start, a.length(), &attrs);
            }
        }
        Artifact::Cantor(ca) => {
            let view = View::fit(&slice_points(&ca.circle));
            for r in &ca.residual {
                arc_path(&mut out, &view, &ca.chart, r.start, r.length, r##"class="residual" stroke="#000000" stroke-width="1""##);
            }
            for (i, b) in ca.bridges.iter().enumerate() {
                let attrs = format!(
                    r#"class="bridge" data-index="{i}" data-label="{}" data-start="{:.12}" data-end="{:.12}" stroke="{}" stroke-width="3""#,
                    b.label,
                    b.start,
                    b.end,
                    PALETTE[b.label % PALETTE.len()]
                );
                arc_path(&mut out, &view, &ca.chart, b.start, b.length(), &attrs);
            }
        }
        Artifact::Orbit(rep) => {
            let ext: Vec<Complex64> = rep.circles.iter().flat_map(circle_extent).collect();
            let view = View::fit(&ext);
            for (c, w) in rep.circles.iter().zip(&rep.words) {
                let attrs = format!(r##"class="orbit" data-word="{w}" fill="none" stroke="#08306b" stroke-width="0.5""##);
                circle_element(&mut out, &view, c, &attrs);
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
