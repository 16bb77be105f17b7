//! IGES 5.3 subset: rational B-spline curves (entity 126) and surfaces
//! (entity 128) in the fixed 80-column ASCII form.
//!
//! [`write_iges`] and [`read_iges`] convert between a [`ModelDocument`] and
//! IGES text through the structured [`IgesDocument`]. Other entity types are
//! skipped on import and listed in the [`ImportReport`].

mod text;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use text::format_real;

use crate::curve::{CurveData, RationalCurve};
use crate::model::{curve_from_data, surface_from_data, ModelDocument};
use crate::point::{ControlPoint, Point};
use crate::surface::{RationalSurface, SurfaceData};

pub const ENTITY_BSPLINE_CURVE: i64 = 126;
pub const ENTITY_BSPLINE_SURFACE: i64 = 128;

/// Version flag for IGES 5.3 in global parameter 23.
const IGES_VERSION_5_3: i64 = 11;
/// Fixed file timestamp keeps exports byte-reproducible.
pub const DEFAULT_TIMESTAMP: &str = "20000101.000000";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IgesError {
    #[error("IGES parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A single free-format parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Integer(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl Param {
    fn as_f64(&self) -> Option<f64> {
        match *self {
            Param::Integer(i) => Some(i as f64),
            Param::Real(x) => Some(x),
            _ => None,
        }
    }

    fn as_int(&self) -> Option<i64> {
        match *self {
            Param::Integer(i) => Some(i),
            Param::Real(x) if x.fract() == 0.0 && x.abs() < 1e15 => Some(x as i64),
            Param::Empty => Some(0),
            _ => None,
        }
    }
}

/// One directory entry (two D-section lines). Pointers and line counts are
/// derived when rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectoryEntry {
    pub entity_type: i64,
    pub structure: i64,
    pub line_font: i64,
    pub level: i64,
    pub view: i64,
    pub transform: i64,
    pub label_display: i64,
    pub status: String,
    pub line_weight: i64,
    pub color: i64,
    pub form: i64,
    pub label: String,
    pub subscript: i64,
}

impl DirectoryEntry {
    fn geometry(entity_type: i64, label: String) -> Self {
        DirectoryEntry {
            entity_type,
            structure: 0,
            line_font: 0,
            level: 0,
            view: 0,
            transform: 0,
            label_display: 0,
            status: "00000000".into(),
            line_weight: 0,
            color: 0,
            form: 0,
            label,
            subscript: 0,
        }
    }
}

/// Parameter data of one entity, entity type first.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterRecord {
    pub params: Vec<Param>,
}

/// Structured image of the five IGES sections. The terminate section is
/// derived from the others when rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct IgesDocument {
    pub start_lines: Vec<String>,
    pub global_params: Vec<Param>,
    pub directory_entries: Vec<DirectoryEntry>,
    pub parameter_records: Vec<ParameterRecord>,
}

impl IgesDocument {
    /// Parameter and record delimiters from global parameters 1 and 2.
    pub fn delimiters(&self) -> (char, char) {
        let pick = |i: usize, default: char| match self.global_params.get(i) {
            Some(Param::Text(s)) if s.chars().count() == 1 => s.chars().next().unwrap_or(default),
            _ => default,
        };
        (pick(0, ','), pick(1, ';'))
    }

    pub fn to_text(&self) -> String {
        text::render(self)
    }

    pub fn parse(text: &str) -> Result<Self, IgesError> {
        text::parse(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SkippedEntity {
    pub entity_type: i64,
    /// D-section sequence number of the entry's first line.
    pub directory_index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ImportReport {
    /// Imported entity counts keyed by entity type.
    pub imported: BTreeMap<i64, usize>,
    pub skipped: Vec<SkippedEntity>,
}

impl ImportReport {
    pub fn imported_total(&self) -> usize {
        self.imported.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WriteOptions {
    /// `YYYYMMDD.HHNNSS` stamp written to the global section.
    pub timestamp: String,
    pub file_name: String,
}

impl Default for WriteOptions {
    fn default() -> Self {
        WriteOptions {
            timestamp: DEFAULT_TIMESTAMP.into(),
            file_name: String::new(),
        }
    }
}

fn label_for(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_graphic())
        .take(8)
        .collect()
}

fn reals(values: impl IntoIterator<Item = f64>) -> impl Iterator<Item = Param> {
    values.into_iter().map(Param::Real)
}

fn flag(b: bool) -> Param {
    Param::Integer(i64::from(b))
}

fn curve_params(c: &RationalCurve) -> Vec<Param> {
    let control = c.control();
    let k = control.len() as i64 - 1;
    let planar = c.is_planar();
    let closed = control[0].position == control[control.len() - 1].position;
    let (v0, v1) = c.domain();
    let mut p = vec![
        Param::Integer(ENTITY_BSPLINE_CURVE),
        Param::Integer(k),
        Param::Integer(c.degree() as i64),
        flag(planar),
        flag(closed),
        flag(c.is_polynomial()),
        flag(false),
    ];
    p.extend(reals(c.knots().as_slice().iter().copied()));
    p.extend(reals(control.iter().map(|cp| cp.weight)));
    for cp in control {
        p.extend(reals([cp.position.x, cp.position.y, cp.position.z]));
    }
    p.extend(reals([v0, v1]));
    let normal = if planar { [0.0, 0.0, 1.0] } else { [0.0, 0.0, 0.0] };
    p.extend(reals(normal));
    p
}

fn surface_params(s: &RationalSurface) -> Vec<Param> {
    let net = s.net();
    let k1 = net[0].len() as i64 - 1;
    let k2 = net.len() as i64 - 1;
    let closed_u = net.iter().all(|row| row[0].position == row[row.len() - 1].position);
    let closed_v = net[0]
        .iter()
        .zip(&net[net.len() - 1])
        .all(|(a, b)| a.position == b.position);
    let (u0, u1) = s.domain_u();
    let (v0, v1) = s.domain_v();
    let mut p = vec![
        Param::Integer(ENTITY_BSPLINE_SURFACE),
        Param::Integer(k1),
        Param::Integer(k2),
        Param::Integer(s.degree_u() as i64),
        Param::Integer(s.degree_v() as i64),
        flag(closed_u),
        flag(closed_v),
        flag(s.is_polynomial()),
        flag(false),
        flag(false),
    ];
    p.extend(reals(s.knots_u().as_slice().iter().copied()));
    p.extend(reals(s.knots_v().as_slice().iter().copied()));
    // first index (u) varies fastest
    p.extend(reals(net.iter().flatten().map(|cp| cp.weight)));
    for cp in net.iter().flatten() {
        p.extend(reals([cp.position.x, cp.position.y, cp.position.z]));
    }
    p.extend(reals([u0, u1, v0, v1]));
    p
}

fn max_coordinate(doc: &ModelDocument) -> f64 {
    let curve_pts = doc.curves().iter().flat_map(|c| c.curve.control().iter());
    let surf_pts = doc
        .surfaces()
        .iter()
        .flat_map(|s| s.surface.net().iter().flatten());
    curve_pts
        .chain(surf_pts)
        .flat_map(|cp| [cp.position.x, cp.position.y, cp.position.z])
        .fold(0.0, |m: f64, v| m.max(v.abs()))
}

/// Builds the structured IGES image of a model document.
pub fn to_iges_document(doc: &ModelDocument, options: &WriteOptions) -> IgesDocument {
    let product = if doc.name().is_empty() { "splinelab" } else { doc.name() };
    let text = |s: &str| Param::Text(s.to_string());
    let global_params = vec![
        text(","),
        text(";"),
        text(product),
        text(&options.file_name),
        text("splinelab"),
        text(env!("CARGO_PKG_VERSION")),
        Param::Integer(32),
        Param::Integer(38),
        Param::Integer(6),
        Param::Integer(308),
        Param::Integer(15),
        text(product),
        Param::Real(1.0),
        Param::Integer(2),
        text("MM"),
        Param::Integer(1),
        Param::Real(1.0),
        text(&options.timestamp),
        Param::Real(1e-10),
        Param::Real(max_coordinate(doc)),
        Param::Empty,
        Param::Empty,
        Param::Integer(IGES_VERSION_5_3),
        Param::Integer(0),
        text(&options.timestamp),
    ];

    let mut directory_entries = Vec::new();
    let mut parameter_records = Vec::new();
    for c in doc.curves() {
        directory_entries.push(DirectoryEntry::geometry(ENTITY_BSPLINE_CURVE, label_for(&c.name)));
        parameter_records.push(ParameterRecord {
            params: curve_params(&c.curve),
        });
    }
    for s in doc.surfaces() {
        directory_entries.push(DirectoryEntry::geometry(ENTITY_BSPLINE_SURFACE, label_for(&s.name)));
        parameter_records.push(ParameterRecord {
            params: surface_params(&s.surface),
        });
    }

    IgesDocument {
        start_lines: vec![format!(
            "{} exported by splinelab: {} curves, {} surfaces",
            product,
            doc.curves().len(),
            doc.surfaces().len()
        )],
        global_params,
        directory_entries,
        parameter_records,
    }
}

/// IGES text for a model document with default options.
pub fn write_iges(doc: &ModelDocument) -> String {
    write_iges_with(doc, &WriteOptions::default())
}

pub fn write_iges_with(doc: &ModelDocument, options: &WriteOptions) -> String {
    to_iges_document(doc, options).to_text()
}

/// Cursor over a parameter record that reports shortfalls as skip reasons.
struct Cursor<'a> {
    params: &'a [Param],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<&'a Param, String> {
        let p = self
            .params
            .get(self.at)
            .ok_or_else(|| format!("parameter record too short ({} values)", self.params.len()))?;
        self.at += 1;
        Ok(p)
    }

    fn int(&mut self) -> Result<i64, String> {
        let i = self.at;
        self.next()?
            .as_int()
            .ok_or_else(|| format!("parameter {} is not an integer", i + 1))
    }

    fn count(&mut self) -> Result<usize, String> {
        let i = self.at;
        let v = self.int()?;
        usize::try_from(v).map_err(|_| format!("parameter {} must be non-negative, got {v}", i + 1))
    }

    fn real(&mut self) -> Result<f64, String> {
        let i = self.at;
        self.next()?
            .as_f64()
            .ok_or_else(|| format!("parameter {} is not a number", i + 1))
    }

    fn reals(&mut self, n: usize) -> Result<Vec<f64>, String> {
        (0..n).map(|_| self.real()).collect()
    }

    fn points(&mut self, weights: &[f64]) -> Result<Vec<ControlPoint>, String> {
        weights
            .iter()
            .map(|&w| {
                let (x, y, z) = (self.real()?, self.real()?, self.real()?);
                Ok(ControlPoint::new(Point::new(x, y, z), w))
            })
            .collect()
    }
}

fn same_range(a: (f64, f64), b: (f64, f64)) -> bool {
    let scale = 1.0f64.max(a.0.abs()).max(a.1.abs());
    (a.0 - b.0).abs() <= 1e-9 * scale && (a.1 - b.1).abs() <= 1e-9 * scale
}

fn curve_from_record(params: &[Param]) -> Result<RationalCurve, String> {
    let mut c = Cursor { params, at: 1 };
    let k = c.count()?;
    let degree = c.count()?;
    for _ in 0..4 {
        c.int()?;
    }
    let knots = c.reals(k + degree + 2)?;
    let weights = c.reals(k + 1)?;
    let control = c.points(&weights)?;
    let range = (c.real()?, c.real()?);
    let curve = curve_from_data(
        CurveData {
            degree,
            knots,
            control,
        },
        "entity",
    )
    .map_err(|e| format!("invalid geometry: {e}"))?;
    if !same_range(range, curve.domain()) {
        return Err(format!(
            "trimmed parameter range [{}, {}] unsupported",
            range.0, range.1
        ));
    }
    Ok(curve)
}

fn surface_from_record(params: &[Param]) -> Result<RationalSurface, String> {
    let mut c = Cursor { params, at: 1 };
    let k1 = c.count()?;
    let k2 = c.count()?;
    let m1 = c.count()?;
    let m2 = c.count()?;
    for _ in 0..5 {
        c.int()?;
    }
    let knots_u = c.reals(k1 + m1 + 2)?;
    let knots_v = c.reals(k2 + m2 + 2)?;
    let weights = c.reals((k1 + 1) * (k2 + 1))?;
    let flat = c.points(&weights)?;
    let range_u = (c.real()?, c.real()?);
    let range_v = (c.real()?, c.real()?);
    let net = flat.chunks(k1 + 1).map(<[ControlPoint]>::to_vec).collect();
    let surface = surface_from_data(
        SurfaceData {
            degree_u: m1,
            degree_v: m2,
            knots_u,
            knots_v,
            net,
        },
        "entity",
    )
    .map_err(|e| format!("invalid geometry: {e}"))?;
    if !same_range(range_u, surface.domain_u()) || !same_range(range_v, surface.domain_v()) {
        return Err("trimmed parameter range unsupported".into());
    }
    Ok(surface)
}

/// Converts a parsed IGES document into a model, skipping what it cannot import.
pub fn from_iges_document(iges: &IgesDocument) -> (ModelDocument, ImportReport) {
    let name = match iges.global_params.get(2) {
        Some(Param::Text(s)) => s.clone(),
        _ => String::new(),
    };
    let mut doc = ModelDocument::new(name);
    let mut report = ImportReport::default();
    for (k, (entry, record)) in iges
        .directory_entries
        .iter()
        .zip(&iges.parameter_records)
        .enumerate()
    {
        let directory_index = 2 * k + 1;
        let skip = |reason: String| SkippedEntity {
            entity_type: entry.entity_type,
            directory_index,
            reason,
        };
        let base = if entry.label.is_empty() {
            match entry.entity_type {
                ENTITY_BSPLINE_SURFACE => format!("surface{directory_index}"),
                _ => format!("curve{directory_index}"),
            }
        } else if entry.subscript != 0 {
            format!("{}{}", entry.label, entry.subscript)
        } else {
            entry.label.clone()
        };
        let outcome = match entry.entity_type {
            ENTITY_BSPLINE_CURVE => curve_from_record(&record.params).map(|curve| {
                let name = doc.unused_curve_name(&base);
                doc.add_curve(name, curve).expect("fresh name is unique");
            }),
            ENTITY_BSPLINE_SURFACE => surface_from_record(&record.params).map(|surface| {
                let name = doc.unused_surface_name(&base);
                doc.add_surface(name, surface).expect("fresh name is unique");
            }),
            _ => Err("unsupported entity".to_string()),
        };
        match outcome {
            Ok(()) => *report.imported.entry(entry.entity_type).or_default() += 1,
            Err(reason) => report.skipped.push(skip(reason)),
        }
    }
    (doc, report)
}

/// Parses IGES text and imports its spline entities.
pub fn read_iges(text: &str) -> Result<(ModelDocument, ImportReport), IgesError> {
    let iges = IgesDocument::parse(text)?;
    Ok(from_iges_document(&iges))
}
