//! Command-line surface: argument definitions and the subcommand runners.
//!
//! Every runner returns a [`Summary`], printed by the binary as one
//! `key=value` line. Bad flag values surface as [`UsageError`] (exit 2);
//! everything else that fails is a processing error (exit 1).

use std::fmt;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use splinelab_core::iges::{read_iges, write_iges};
use splinelab_core::model::{read_model_json, write_model_json};
use splinelab_core::{
    check_continuity, check_spiral, curvature_comb, curvature_comb_auto,
    make_circle_nurbs, make_cubic_spiral, make_half_circle_profile, revolve, ContinuityTolerances,
    IsolineDirection, ModelDocument, Point, RationalCurve, RationalSurface, SpiralSpec,
};

use crate::svg::{render_svg, CombLayer, Projection, SvgOptions};

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const BIND_ENV: &str = "SPLINELAB_BIND";

/// A flag value that parsed but is not acceptable.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(message: impl Into<String>) -> Result<T> {
    Err(UsageError(message.into()).into())
}

/// Ordered `key=value` pairs of a command's result.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary(pub Vec<(String, String)>);

impl Summary {
    fn new(command: &str) -> Self {
        Summary(vec![("command".into(), command.into())])
    }

    fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if v.is_empty() || v.contains(char::is_whitespace) || v.contains('"') {
                write!(f, "{k}={v:?}")?;
            } else {
                write!(f, "{k}={v}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "splinelab", version, about = "Construct, interrogate, exchange and render spline curves and surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact quadratic NURBS circle
    Circle(CircleArgs),
    /// Cubic Bézier spiral with monotone curvature from 0 to kappa1
    Spiral(SpiralArgs),
    /// Surface of revolution of an xz-plane profile about the z-axis
    Revolve(RevolveArgs),
    /// Evaluate a curve or surface
    Eval(EvalArgs),
    /// Curvature comb of a curve
    Comb(CombArgs),
    /// Continuity level at the joint of two curves
    Continuity(ContinuityArgs),
    /// Isolines of a Bézier surface patch
    Isolines(IsolinesArgs),
    /// Write a model as IGES
    ExportIges(ExportArgs),
    /// Read IGES spline entities into a model
    ImportIges(ImportArgs),
    /// Run the JSON/HTTP service
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ViewArg {
    Xy,
    Xz,
}

#[derive(Debug, Args)]
pub struct SvgArgs {
    /// Also render the result as SVG to this path
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
    /// SVG width in pixels
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
    /// Projection plane
    #[arg(long, value_enum, default_value_t = ViewArg::Xy)]
    pub view: ViewArg,
    /// Hide control polygons and control points
    #[arg(long)]
    pub no_control_polygon: bool,
    /// Draw osculating circles at both curve ends
    #[arg(long)]
    pub end_circles: bool,
}

impl SvgArgs {
    fn options(&self) -> Result<SvgOptions> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return usage(format!("--width must be positive, got {}", self.width));
        }
        Ok(SvgOptions {
            width: self.width,
            projection: match self.view {
                ViewArg::Xy => Projection::Xy,
                ViewArg::Xz => Projection::Xz,
            },
            control_polygon: !self.no_control_polygon,
            control_points: !self.no_control_polygon,
            end_circles: self.end_circles,
            ..SvgOptions::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct CircleArgs {
    /// Center as x,y or x,y,z
    #[arg(long, default_value = "0,0", value_parser = parse_point)]
    pub center: Point,
    #[arg(long)]
    pub radius: f64,
    /// Curve name in the written model
    #[arg(long, default_value = "circle")]
    pub name: String,
    /// Output model JSON
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    pub svg: SvgArgs,
}

#[derive(Debug, Args)]
pub struct SpiralArgs {
    /// Total tangent turn in radians, in (0, π/2]
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    /// End curvature, positive
    #[arg(long, allow_negative_numbers = true)]
    pub kappa1: f64,
    #[arg(long, default_value = "0,0", value_parser = parse_point)]
    pub start: Point,
    /// Start tangent direction in radians from +x
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tangent_angle: f64,
    #[arg(long, default_value = "spiral")]
    pub name: String,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Samples for the monotone-curvature check
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[command(flatten)]
    pub svg: SvgArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Half-circle profile of --radius: a sphere
    Sphere,
    /// Vertical segment at --radius from z=0 to z=--height
    Cylinder,
}

#[derive(Debug, Args)]
pub struct RevolveArgs {
    /// Model containing the profile curve (omit with --preset)
    pub input: Option<PathBuf>,
    /// Profile curve name
    #[arg(long, conflicts_with = "preset")]
    pub profile: Option<String>,
    /// Built-in profile instead of an input model
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub height: f64,
    #[arg(long, default_value = "surface")]
    pub name: String,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    pub svg: SvgArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub input: PathBuf,
    #[arg(long, conflicts_with = "surface")]
    pub curve: Option<String>,
    #[arg(long)]
    pub surface: Option<String>,
    /// Curve parameters (comma separated)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Vec<f64>,
    /// Surface parameter pair u,v
    #[arg(long, value_parser = parse_pair)]
    pub uv: Vec<(f64, f64)>,
    /// Uniform sample count (curves) or per direction (surfaces)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Write samples as JSON
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CombArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub curve: String,
    #[arg(long, default_value_t = splinelab_core::interrogate::DEFAULT_COMB_SAMPLES)]
    pub samples: usize,
    /// Tooth length per unit curvature; automatic when omitted
    #[arg(long)]
    pub scale: Option<f64>,
    /// Write the comb as JSON
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub svg: SvgArgs,
}

#[derive(Debug, Args)]
pub struct ContinuityArgs {
    pub input: PathBuf,
    /// Curve ending at the joint
    #[arg(long, requires = "b", conflicts_with_all = ["curve", "split"])]
    pub a: Option<String>,
    /// Curve starting at the joint
    #[arg(long, requires = "a")]
    pub b: Option<String>,
    /// Split this curve and check the joint of its halves
    #[arg(long, requires = "split")]
    pub curve: Option<String>,
    /// Split parameter for --curve
    #[arg(long, requires = "curve")]
    pub split: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_position: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_angle: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_curvature: f64,
    /// Write the report as JSON
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirArg {
    /// Fixed u: curves along v
    U,
    /// Fixed v: curves along u
    V,
}

#[derive(Debug, Args)]
pub struct IsolinesArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub surface: String,
    #[arg(long, value_enum)]
    pub dir: DirArg,
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Model with the isolines added as curves
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub svg: SvgArgs,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub input: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    pub input: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Listen address
    #[arg(long, env = BIND_ENV, default_value = DEFAULT_BIND)]
    pub bind: SocketAddr,
    /// Initial model
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate {c:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let p = match v.as_slice() {
        [x, y] => Point::xy(*x, *y),
        [x, y, z] => Point::new(*x, *y, *z),
        _ => return Err(format!("expected x,y or x,y,z, got {s:?}")),
    };
    if p.is_finite() {
        Ok(p)
    } else {
        Err("coordinates must be finite".into())
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match s.split(',').map(|c| c.trim().parse::<f64>()).collect::<Vec<_>>().as_slice() {
        [Ok(u), Ok(v)] => Ok((*u, *v)),
        _ => Err(format!("expected u,v, got {s:?}")),
    }
}

pub fn load_model(path: &Path) -> Result<ModelDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read model {}", path.display()))?;
    read_model_json(&text).with_context(|| format!("invalid model {}", path.display()))
}

fn save(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn save_model(path: &Path, doc: &ModelDocument) -> Result<()> {
    save(path, &write_model_json(doc))
}

fn find_curve<'a>(doc: &'a ModelDocument, name: &str) -> Result<&'a RationalCurve> {
    match doc.curve(name) {
        Some(c) => Ok(c),
        None => bail!("no curve named {name:?} in the model"),
    }
}

fn find_surface<'a>(doc: &'a ModelDocument, name: &str) -> Result<&'a RationalSurface> {
    match doc.surface(name) {
        Some(s) => Ok(s),
        None => bail!("no surface named {name:?} in the model"),
    }
}

/// Writes the SVG if requested; returns the summary extended with its path.
fn maybe_svg(summary: Summary, args: &SvgArgs, doc: &ModelDocument, opts: Option<SvgOptions>) -> Result<Summary> {
    let Some(path) = &args.svg else {
        return Ok(summary);
    };
    let opts = match opts {
        Some(o) => o,
        None => args.options()?,
    };
    let scene = render_svg(doc, &opts);
    for w in &scene.warnings {
        eprintln!("warning: {w}");
    }
    save(path, &scene.text)?;
    Ok(summary.with("svg", path.display()))
}

pub fn run(command: Command) -> Result<Summary> {
    match command {
        Command::Circle(a) => circle(a),
        Command::Spiral(a) => spiral(a),
        Command::Revolve(a) => revolve_cmd(a),
        Command::Eval(a) => eval(a),
        Command::Comb(a) => comb(a),
        Command::Continuity(a) => continuity(a),
        Command::Isolines(a) => isolines(a),
        Command::ExportIges(a) => export_iges(a),
        Command::ImportIges(a) => import_iges(a),
        Command::Serve(a) => serve(a),
    }
}

fn circle(a: CircleArgs) -> Result<Summary> {
    if !(a.radius > 0.0 && a.radius.is_finite()) {
        return usage(format!("--radius must be positive and finite, got {}", a.radius));
    }
    let curve = make_circle_nurbs(a.center, a.radius)?;
    let mut doc = ModelDocument::new(&a.name);
    let control = curve.control().len();
    doc.add_curve(&a.name, curve).map_err(|e| UsageError(e.to_string()))?;
    save_model(&a.out, &doc)?;
    let s = Summary::new("circle")
        .with("curve", &a.name)
        .with("control_points", control)
        .with("out", a.out.display());
    maybe_svg(s, &a.svg, &doc, None)
}

fn spiral(a: SpiralArgs) -> Result<Summary> {
    let spec = SpiralSpec {
        start: a.start,
        start_tangent_angle: a.tangent_angle,
        turn_angle: a.theta,
        end_curvature: a.kappa1,
    };
    if let Err(e) = spec.validate() {
        return usage(e.to_string());
    }
    let curve = make_cubic_spiral(&spec)?;
    let report = check_spiral(&curve, a.samples, 1e-9).map_err(|e| UsageError(e.to_string()))?;
    let mut doc = ModelDocument::new(&a.name);
    doc.add_curve(&a.name, curve).map_err(|e| UsageError(e.to_string()))?;
    save_model(&a.out, &doc)?;
    let s = Summary::new("spiral")
        .with("curve", &a.name)
        .with("monotone", report.monotone)
        .with("kappa_start", report.kappa_start)
        .with("kappa_end", report.kappa_end)
        .with("out", a.out.display());
    maybe_svg(s, &a.svg, &doc, None)
}

fn revolve_cmd(a: RevolveArgs) -> Result<Summary> {
    let (mut doc, profile) = match (&a.preset, &a.input, &a.profile) {
        (Some(preset), None, None) => {
            if !(a.radius > 0.0 && a.radius.is_finite()) {
                return usage(format!("--radius must be positive, got {}", a.radius));
            }
            let profile = match preset {
                Preset::Sphere => make_half_circle_profile(a.radius)?,
                Preset::Cylinder => {
                    if !(a.height > 0.0 && a.height.is_finite()) {
                        return usage(format!("--height must be positive, got {}", a.height));
                    }
                    RationalCurve::bezier_from_points(&[
                        Point::new(a.radius, 0.0, 0.0),
                        Point::new(a.radius, 0.0, a.height),
                    ])?
                }
            };
            (ModelDocument::new(&a.name), profile)
        }
        (None, Some(input), Some(name)) => {
            let doc = load_model(input)?;
            let profile = find_curve(&doc, name)?.clone();
            (doc, profile)
        }
        _ => return usage("revolve needs either --preset, or an input model with --profile"),
    };
    let surface = revolve(&profile)?;
    let net = format!("{}x{}", surface.net()[0].len(), surface.net().len());
    doc.add_surface(&a.name, surface).map_err(|e| UsageError(e.to_string()))?;
    save_model(&a.out, &doc)?;
    let s = Summary::new("revolve")
        .with("surface", &a.name)
        .with("net", net)
        .with("out", a.out.display());
    maybe_svg(s, &a.svg, &doc, None)
}

#[derive(serde::Serialize)]
struct CurveSample {
    t: f64,
    point: Point,
}

#[derive(serde::Serialize)]
struct SurfaceSample {
    u: f64,
    v: f64,
    point: Point,
}

fn uniform(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 }).collect()
}

fn eval(a: EvalArgs) -> Result<Summary> {
    let doc = load_model(&a.input)?;
    if let Some(n) = a.samples {
        if n < 2 {
            return usage("--samples must be at least 2");
        }
    }
    let (summary, json) = match (&a.curve, &a.surface) {
        (Some(name), None) => {
            let c = find_curve(&doc, name)?;
            let (t0, t1) = c.domain();
            let ts: Vec<f64> = match (a.t.is_empty(), a.samples) {
                (false, None) => a.t.clone(),
                (true, Some(n)) => uniform(n).into_iter().map(|s| t0 + (t1 - t0) * s).collect(),
                (true, None) => return usage("eval --curve needs --t or --samples"),
                (false, Some(_)) => return usage("--t and --samples are exclusive"),
            };
            let samples = ts
                .iter()
                .map(|&t| Ok(CurveSample { t, point: c.eval(t)? }))
                .collect::<Result<Vec<_>>>()?;
            let mut s = Summary::new("eval").with("curve", name).with("samples", samples.len());
            if let [one] = samples.as_slice() {
                s = s.with("x", one.point.x).with("y", one.point.y).with("z", one.point.z);
            }
            (s, serde_json::to_string_pretty(&samples)?)
        }
        (None, Some(name)) => {
            let surf = find_surface(&doc, name)?;
            let uvs: Vec<(f64, f64)> = match (a.uv.is_empty(), a.samples) {
                (false, None) => a.uv.clone(),
                (true, Some(n)) => {
                    let (u0, u1) = surf.domain_u();
                    let (v0, v1) = surf.domain_v();
                    let g = uniform(n);
                    g.iter()
                        .flat_map(|&sv| g.iter().map(move |&su| (u0 + (u1 - u0) * su, v0 + (v1 - v0) * sv)))
                        .collect()
                }
                (true, None) => return usage("eval --surface needs --uv or --samples"),
                (false, Some(_)) => return usage("--uv and --samples are exclusive"),
            };
            let samples = uvs
                .iter()
                .map(|&(u, v)| Ok(SurfaceSample { u, v, point: surf.eval(u, v)? }))
                .collect::<Result<Vec<_>>>()?;
            let mut s = Summary::new("eval").with("surface", name).with("samples", samples.len());
            if let [one] = samples.as_slice() {
                s = s.with("x", one.point.x).with("y", one.point.y).with("z", one.point.z);
            }
            (s, serde_json::to_string_pretty(&samples)?)
        }
        _ => return usage("eval needs exactly one of --curve or --surface"),
    };
    match &a.out {
        Some(path) => {
            save(path, &(json + "\n"))?;
            Ok(summary.with("out", path.display()))
        }
        None => Ok(summary),
    }
}

fn comb(a: CombArgs) -> Result<Summary> {
    if a.samples < 2 {
        return usage("--samples must be at least 2");
    }
    if let Some(scale) = a.scale {
        if !(scale > 0.0 && scale.is_finite()) {
            return usage(format!("--scale must be positive, got {scale}"));
        }
    }
    let doc = load_model(&a.input)?;
    let curve = find_curve(&doc, &a.curve)?;
    let comb = match a.scale {
        Some(scale) => curvature_comb(curve, a.samples, scale)?,
        None => curvature_comb_auto(curve, a.samples)?,
    };
    let mut s = Summary::new("comb")
        .with("curve", &a.curve)
        .with("samples", comb.samples.len())
        .with("scale", comb.scale)
        .with("max_kappa", comb.max_abs_kappa());
    if let Some(path) = &a.out {
        save(path, &(serde_json::to_string_pretty(&comb)? + "\n"))?;
        s = s.with("out", path.display());
    }
    let opts = SvgOptions {
        comb: Some(CombLayer {
            samples: a.samples,
            scale: Some(comb.scale),
            curves: vec![a.curve.clone()],
        }),
        ..a.svg.options()?
    };
    maybe_svg(s, &a.svg, &doc, Some(opts))
}

fn continuity(a: ContinuityArgs) -> Result<Summary> {
    let tol = ContinuityTolerances {
        position: a.tol_position,
        tangent_angle: a.tol_angle,
        curvature: a.tol_curvature,
    };
    for (flag, v) in [("--tol-position", tol.position), ("--tol-angle", tol.tangent_angle), ("--tol-curvature", tol.curvature)] {
        if !(v >= 0.0 && v.is_finite()) {
            return usage(format!("{flag} must be non-negative, got {v}"));
        }
    }
    let doc = load_model(&a.input)?;
    let (first, second, joint) = match (&a.a, &a.b, &a.curve, a.split) {
        (Some(na), Some(nb), None, None) => (
            find_curve(&doc, na)?.clone(),
            find_curve(&doc, nb)?.clone(),
            format!("{na}->{nb}"),
        ),
        (None, None, Some(name), Some(t)) => {
            let c = find_curve(&doc, name)?;
            let (lo, hi) = c.domain();
            if !(t > lo && t < hi) {
                return usage(format!("--split must lie strictly inside ({lo}, {hi}), got {t}"));
            }
            let (l, r) = c.split(t)?;
            (l, r, format!("{name}@{t}"))
        }
        _ => return usage("continuity needs --a and --b, or --curve with --split"),
    };
    let report = check_continuity(&first, &second, &tol)?;
    let mut s = Summary::new("continuity")
        .with("joint", joint)
        .with("level", report.level)
        .with("position_gap", report.position_gap)
        .with("tangent_angle_gap", report.tangent_angle_gap)
        .with("curvature_gap", report.curvature_gap);
    if let Some(path) = &a.out {
        save(path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
        s = s.with("out", path.display());
    }
    Ok(s)
}

fn isolines(a: IsolinesArgs) -> Result<Summary> {
    let mut doc = load_model(&a.input)?;
    let surface = find_surface(&doc, &a.surface)?;
    let dir = match a.dir {
        DirArg::U => IsolineDirection::UFixed,
        DirArg::V => IsolineDirection::VFixed,
    };
    if let Some(v) = a.values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return usage(format!("isoline values must lie in [0, 1], got {v}"));
    }
    let lines = surface.isolines(dir, &a.values)?;
    let tag = match a.dir {
        DirArg::U => "u",
        DirArg::V => "v",
    };
    for (k, iso) in lines.into_iter().enumerate() {
        let name = doc.unused_curve_name(&format!("{}_{tag}{k}", a.surface));
        doc.add_curve(name, iso.curve)?;
    }
    let mut s = Summary::new("isolines")
        .with("surface", &a.surface)
        .with("dir", tag)
        .with("count", a.values.len());
    if let Some(path) = &a.out {
        save_model(path, &doc)?;
        s = s.with("out", path.display());
    }
    maybe_svg(s, &a.svg, &doc, None)
}

fn export_iges(a: ExportArgs) -> Result<Summary> {
    let doc = load_model(&a.input)?;
    let text = write_iges(&doc);
    save(&a.out, &text)?;
    Ok(Summary::new("export-iges")
        .with("curves", doc.curves().len())
        .with("surfaces", doc.surfaces().len())
        .with("lines", text.lines().count())
        .with("out", a.out.display()))
}

fn import_iges(a: ImportArgs) -> Result<Summary> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let (doc, report) = read_iges(&text).with_context(|| format!("invalid IGES file {}", a.input.display()))?;
    for s in &report.skipped {
        eprintln!(
            "skipped entity {} (directory line {}): {}",
            s.entity_type, s.directory_index, s.reason
        );
    }
    save_model(&a.out, &doc)?;
    Ok(Summary::new("import-iges")
        .with("curves", doc.curves().len())
        .with("surfaces", doc.surfaces().len())
        .with("skipped", report.skipped.len())
        .with("out", a.out.display()))
}

fn serve(a: ServeArgs) -> Result<Summary> {
    let doc = match &a.model {
        Some(p) => load_model(p)?,
        None => ModelDocument::new("untitled"),
    };
    let runtime = tokio::runtime::Runtime::new().context("cannot start async runtime")?;
    runtime.block_on(crate::service::serve(a.bind, doc))?;
    Ok(Summary::new("serve").with("bind", a.bind))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_quotes_values_with_spaces() {
        let s = Summary::new("x").with("a", 1.5).with("b", "two words");
        assert_eq!(s.to_string(), r#"command=x a=1.5 b="two words""#);
        assert_eq!(s.get("a"), Some("1.5"));
    }

    #[test]
    fn point_flags_accept_two_or_three_coordinates() {
        assert_eq!(parse_point("1,2").unwrap(), Point::xy(1.0, 2.0));
        assert_eq!(parse_point("1, 2, -3").unwrap(), Point::new(1.0, 2.0, -3.0));
        assert!(parse_point("1").is_err());
        assert!(parse_point("1,x").is_err());
        assert!(parse_point("1,inf").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
