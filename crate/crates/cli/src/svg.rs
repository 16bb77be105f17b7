//! Static SVG rendering of a model document in the style of textbook
//! figures: curves as polylines, control polygons with point markers,
//! curvature combs and end-curvature circles.

use std::fmt::Write as _;

use splinelab_core::{
    curvature_comb, curvature_comb_auto, end_curvature_circle, Circle, CurvatureComb, CurveEnd,
    ModelDocument, Point, RationalCurve, RationalSurface,
};

/// Hard cap on polyline vertices per curve.
pub const MAX_CURVE_POINTS: usize = 4096;
/// Chord-height tolerance as a fraction of the view diagonal.
pub const CHORD_TOLERANCE: f64 = 1e-3;
const MARGIN: f64 = 0.05;
/// Initial uniform segments per knot span before adaptive refinement.
const SEED_SEGMENTS: usize = 8;
const MAX_DEPTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    /// Top view onto the xy-plane.
    #[default]
    Xy,
    /// Front view onto the xz-plane.
    Xz,
}

impl Projection {
    fn project(self, p: Point) -> (f64, f64) {
        match self {
            Projection::Xy => (p.x, p.y),
            Projection::Xz => (p.x, p.z),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombLayer {
    pub samples: usize,
    /// Tooth scale; `None` picks the automatic 10%-of-diagonal scale.
    pub scale: Option<f64>,
    /// Curves to comb; empty means all.
    pub curves: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub projection: Projection,
    pub control_polygon: bool,
    pub control_points: bool,
    pub comb: Option<CombLayer>,
    pub end_circles: bool,
    /// Isoline count per direction drawn for each surface.
    pub surface_lines: usize,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800.0,
            projection: Projection::Xy,
            control_polygon: true,
            control_points: true,
            comb: None,
            end_circles: false,
            surface_lines: 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgScene {
    pub text: String,
    pub warnings: Vec<String>,
}

/// Adaptive polyline of a curve: uniform seeding per knot span, then
/// bisection while the mid-parameter point is farther than `tol` from the
/// chord, stopping at [`MAX_CURVE_POINTS`].
pub fn sample_curve(curve: &RationalCurve, tol: f64) -> Vec<(f64, Point)> {
    let knots = curve.knots().as_slice();
    let mut breaks: Vec<f64> = knots.to_vec();
    breaks.dedup();
    let mut seeds = Vec::new();
    for w in breaks.windows(2) {
        for k in 0..SEED_SEGMENTS {
            seeds.push(w[0] + (w[1] - w[0]) * k as f64 / SEED_SEGMENTS as f64);
        }
    }
    seeds.push(*breaks.last().expect("clamped knots are non-empty"));
    let eval = |t: f64| curve.eval(t).expect("parameter inside domain");

    let mut out: Vec<(f64, Point)> = Vec::with_capacity(seeds.len());
    out.push((seeds[0], eval(seeds[0])));
    let budget = MAX_CURVE_POINTS.saturating_sub(seeds.len());
    let mut extra = 0;
    for w in seeds.windows(2) {
        let end = (w[1], eval(w[1]));
        refine(&eval, *out.last().unwrap(), end, tol, MAX_DEPTH, &mut out, &mut extra, budget);
        out.push(end);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn refine(
    eval: &impl Fn(f64) -> Point,
    a: (f64, Point),
    b: (f64, Point),
    tol: f64,
    depth: u32,
    out: &mut Vec<(f64, Point)>,
    extra: &mut usize,
    budget: usize,
) {
    if depth == 0 || *extra >= budget {
        return;
    }
    let tm = 0.5 * (a.0 + b.0);
    let m = (tm, eval(tm));
    if chord_distance(a.1, b.1, m.1) <= tol {
        return;
    }
    *extra += 1;
    refine(eval, a, m, tol, depth - 1, out, extra, budget);
    out.push(m);
    refine(eval, m, b, tol, depth - 1, out, extra, budget);
}

fn chord_distance(a: Point, b: Point, p: Point) -> f64 {
    let e = b - a;
    let len2 = e.dot(&e);
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let s = ((p - a).dot(&e) / len2).clamp(0.0, 1.0);
    p.distance(&(a + e * s))
}

#[derive(Default)]
struct Bounds {
    min: (f64, f64),
    max: (f64, f64),
    any: bool,
}

impl Bounds {
    fn add(&mut self, (x, y): (f64, f64)) {
        if !(x.is_finite() && y.is_finite()) {
            return;
        }
        if self.any {
            self.min = (self.min.0.min(x), self.min.1.min(y));
            self.max = (self.max.0.max(x), self.max.1.max(y));
        } else {
            self.min = (x, y);
            self.max = (x, y);
            self.any = true;
        }
    }

    fn diagonal(&self) -> f64 {
        (self.max.0 - self.min.0).hypot(self.max.1 - self.min.1)
    }
}

/// Maps model coordinates to pixels with a y-flip.
struct View {
    left: f64,
    top: f64,
    k: f64,
    width: f64,
    height: f64,
    projection: Projection,
}

impl View {
    fn fit(b: &Bounds, width: f64, projection: Projection) -> View {
        let (w, h) = if b.any {
            (b.max.0 - b.min.0, b.max.1 - b.min.1)
        } else {
            (0.0, 0.0)
        };
        let span = w.max(h);
        let span = if span > 0.0 { span } else { 1.0 };
        let m = MARGIN * span;
        let (w, h) = (w + 2.0 * m, h + 2.0 * m);
        let k = width / w;
        let (x0, y1) = if b.any { (b.min.0, b.max.1) } else { (0.0, 0.0) };
        View {
            left: x0 - m,
            top: y1 + m,
            k,
            width,
            height: h * k,
            projection,
        }
    }

    fn px(&self, p: Point) -> (f64, f64) {
        let (x, y) = self.projection.project(p);
        ((x - self.left) * self.k, (self.top - y) * self.k)
    }
}

/// Fixed three-decimal pixel coordinates without trailing zeros or `-0`.
pub fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
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

fn points_attr(view: &View, pts: impl IntoIterator<Item = Point>) -> String {
    let mut s = String::new();
    for (i, p) in pts.into_iter().enumerate() {
        let (x, y) = view.px(p);
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{},{}", num(x), num(y));
    }
    s
}

struct CurveLayers {
    name: String,
    polyline: Vec<Point>,
    control: Vec<Point>,
    comb: Option<CombMarks>,
    circles: Vec<Circle>,
}

struct CombMarks {
    bases: Vec<Point>,
    tips: Vec<Point>,
}

impl From<CurvatureComb> for CombMarks {
    fn from(c: CurvatureComb) -> Self {
        CombMarks {
            bases: c.samples.iter().map(|s| s.point).collect(),
            tips: c.tips,
        }
    }
}

fn surface_lines(s: &RationalSurface, count: usize) -> Vec<Vec<Point>> {
    let count = count.max(2);
    let (u0, u1) = s.domain_u();
    let (v0, v1) = s.domain_v();
    let steps = 64;
    let at = |a: f64, b: f64, i: usize, n: usize| if i == n { b } else { a + (b - a) * i as f64 / n as f64 };
    let mut lines = Vec::new();
    for i in 0..count {
        let u = at(u0, u1, i, count - 1);
        lines.push((0..=steps).filter_map(|k| s.eval(u, at(v0, v1, k, steps)).ok()).collect());
    }
    for j in 0..count {
        let v = at(v0, v1, j, count - 1);
        lines.push((0..=steps).filter_map(|k| s.eval(at(u0, u1, k, steps), v).ok()).collect());
    }
    lines
}

/// Renders the document. Geometry that cannot be interrogated (a comb at a
/// singular point, an end circle of a straight end) is skipped with a warning.
pub fn render_svg(doc: &ModelDocument, opts: &SvgOptions) -> SvgScene {
    let mut warnings = Vec::new();
    if doc.is_empty() {
        warnings.push("empty scene: the document has no curves or surfaces".to_string());
    }

    // Chord tolerance needs the view diagonal, which the control nets bound.
    let mut coarse = Bounds::default();
    for c in doc.curves() {
        for cp in c.curve.control() {
            coarse.add(opts.projection.project(cp.position));
        }
    }
    for s in doc.surfaces() {
        for cp in s.surface.net().iter().flatten() {
            coarse.add(opts.projection.project(cp.position));
        }
    }
    let tol = CHORD_TOLERANCE * coarse.diagonal().max(f64::MIN_POSITIVE);

    let mut curves = Vec::new();
    for named in doc.curves() {
        let curve = &named.curve;
        let polyline: Vec<Point> = sample_curve(curve, tol).into_iter().map(|(_, p)| p).collect();
        let comb = match &opts.comb {
            Some(layer) if layer.curves.is_empty() || layer.curves.iter().any(|n| n == &named.name) => {
                let comb = match layer.scale {
                    Some(scale) => curvature_comb(curve, layer.samples, scale),
                    None => curvature_comb_auto(curve, layer.samples),
                };
                match comb {
                    Ok(c) => Some(CombMarks::from(c)),
                    Err(e) => {
                        warnings.push(format!("comb of curve \"{}\" skipped: {e}", named.name));
                        None
                    }
                }
            }
            _ => None,
        };
        let mut circles = Vec::new();
        if opts.end_circles {
            for end in [CurveEnd::Start, CurveEnd::End] {
                match end_curvature_circle(curve, end) {
                    Ok(c) => circles.push(c),
                    Err(e) => warnings.push(format!(
                        "end circle of curve \"{}\" skipped: {e}",
                        named.name
                    )),
                }
            }
        }
        curves.push(CurveLayers {
            name: named.name.clone(),
            polyline,
            control: curve.control().iter().map(|c| c.position).collect(),
            comb,
            circles,
        });
    }
    let surfaces: Vec<(String, Vec<Vec<Point>>)> = doc
        .surfaces()
        .iter()
        .map(|s| (s.name.clone(), surface_lines(&s.surface, opts.surface_lines)))
        .collect();

    let mut bounds = Bounds::default();
    let proj = opts.projection;
    for c in &curves {
        c.polyline.iter().for_each(|&p| bounds.add(proj.project(p)));
        if opts.control_polygon || opts.control_points {
            c.control.iter().for_each(|&p| bounds.add(proj.project(p)));
        }
        if let Some(comb) = &c.comb {
            comb.tips.iter().for_each(|&p| bounds.add(proj.project(p)));
        }
        for circle in &c.circles {
            let (x, y) = proj.project(circle.center);
            bounds.add((x - circle.radius, y - circle.radius));
            bounds.add((x + circle.radius, y + circle.radius));
        }
    }
    for (_, lines) in &surfaces {
        lines.iter().flatten().for_each(|&p| bounds.add(proj.project(p)));
    }

    let view = View::fit(&bounds, opts.width, proj);
    let mut svg = String::new();
    let (w, h) = (num(view.width), num(view.height));
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    svg.push_str(
        "<style>.curve{fill:none;stroke:#1f4e9c;stroke-width:1.5}\
.control-polygon{fill:none;stroke:#999;stroke-dasharray:4 3}\
.control-point{fill:#c0392b}\
.comb{stroke:#2e8b57;stroke-width:0.75}\
.comb-envelope{fill:none;stroke:#2e8b57}\
.osculating{fill:none;stroke:#8e44ad;stroke-dasharray:2 2}\
.isoline{fill:none;stroke:#555;stroke-width:0.75}</style>\n",
    );
    if doc.is_empty() {
        svg.push_str("<!-- empty scene -->\n");
    }

    if !surfaces.is_empty() {
        svg.push_str("<g class=\"surfaces\">\n");
        for (name, lines) in &surfaces {
            let _ = writeln!(svg, r#"<g data-name="{}">"#, escape(name));
            for line in lines {
                let _ = writeln!(
                    svg,
                    r#"<polyline class="isoline" points="{}"/>"#,
                    points_attr(&view, line.iter().copied())
                );
            }
            svg.push_str("</g>\n");
        }
        svg.push_str("</g>\n");
    }

    for c in &curves {
        let _ = writeln!(svg, r#"<g class="curve-group" data-name="{}">"#, escape(&c.name));
        if let Some(comb) = &c.comb {
            svg.push_str("<g class=\"combs\">\n");
            for (b, t) in comb.bases.iter().zip(&comb.tips) {
                let (x1, y1) = view.px(*b);
                let (x2, y2) = view.px(*t);
                let _ = writeln!(
                    svg,
                    r#"<line class="comb" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    num(x1),
                    num(y1),
                    num(x2),
                    num(y2)
                );
            }
            let _ = writeln!(
                svg,
                r#"<polyline class="comb-envelope" points="{}"/>"#,
                points_attr(&view, comb.tips.iter().copied())
            );
            svg.push_str("</g>\n");
        }
        if opts.control_polygon {
            let _ = writeln!(
                svg,
                r#"<polyline class="control-polygon" points="{}"/>"#,
                points_attr(&view, c.control.iter().copied())
            );
        }
        let _ = writeln!(
            svg,
            r#"<polyline class="curve" points="{}"/>"#,
            points_attr(&view, c.polyline.iter().copied())
        );
        if opts.control_points {
            for p in &c.control {
                let (x, y) = view.px(*p);
                let _ = writeln!(
                    svg,
                    r#"<circle class="control-point" cx="{}" cy="{}" r="3"/>"#,
                    num(x),
                    num(y)
                );
            }
        }
        for circle in &c.circles {
            let (x, y) = view.px(circle.center);
            let _ = writeln!(
                svg,
                r#"<circle class="osculating" cx="{}" cy="{}" r="{}"/>"#,
                num(x),
                num(y),
                num(circle.radius * view.k)
            );
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    SvgScene { text: svg, warnings }
}
