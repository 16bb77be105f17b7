//! The model document: named curves and surfaces plus free-form annotations,
//! persisted as UTF-8 JSON.
//!
//! Serialization is deterministic: fields are written in a fixed order,
//! annotation keys sorted, and reals in shortest round-trip decimal form, so
//! reading a written document and writing it again is byte-identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::curve::{CurveData, RationalCurve};
use crate::error::GeomError;
use crate::knots::KnotVector;
use crate::point::ControlPoint;
use crate::surface::{RationalSurface, SurfaceData};

/// Newest schema version this build reads and the one it writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("malformed model JSON: {0}")]
    Parse(String),

    #[error("model schemaVersion {found} is newer than supported version {supported}")]
    Version { found: u64, supported: u32 },

    #[error("invalid model at {path}: {message}")]
    Validation { path: String, message: String },
}

impl ModelError {
    fn invalid(path: impl Into<String>, message: impl ToString) -> Self {
        ModelError::Validation {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Location path of a validation error, if any.
    pub fn path(&self) -> Option<&str> {
        match self {
            ModelError::Validation { path, .. } => Some(path),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedCurve {
    pub name: String,
    pub curve: RationalCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSurface {
    pub name: String,
    pub surface: RationalSurface,
}

/// A named collection of curves and surfaces with unique names per list.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    name: String,
    curves: Vec<NamedCurve>,
    surfaces: Vec<NamedSurface>,
    annotations: BTreeMap<String, Value>,
}

impl Default for ModelDocument {
    fn default() -> Self {
        ModelDocument::new("")
    }
}

impl ModelDocument {
    pub fn new(name: impl Into<String>) -> Self {
        ModelDocument {
            name: name.into(),
            curves: Vec::new(),
            surfaces: Vec::new(),
            annotations: BTreeMap::new(),
        }
    }

    pub fn schema_version(&self) -> u32 {
        SCHEMA_VERSION
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn curves(&self) -> &[NamedCurve] {
        &self.curves
    }

    pub fn surfaces(&self) -> &[NamedSurface] {
        &self.surfaces
    }

    pub fn annotations(&self) -> &BTreeMap<String, Value> {
        &self.annotations
    }

    pub fn annotations_mut(&mut self) -> &mut BTreeMap<String, Value> {
        &mut self.annotations
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty() && self.surfaces.is_empty()
    }

    pub fn curve(&self, name: &str) -> Option<&RationalCurve> {
        self.curves.iter().find(|c| c.name == name).map(|c| &c.curve)
    }

    pub fn surface(&self, name: &str) -> Option<&RationalSurface> {
        self.surfaces
            .iter()
            .find(|s| s.name == name)
            .map(|s| &s.surface)
    }

    pub fn add_curve(&mut self, name: impl Into<String>, curve: RationalCurve) -> Result<(), ModelError> {
        let name = name.into();
        check_name(&name, self.curves.iter().map(|c| c.name.as_str()), "curves")?;
        self.curves.push(NamedCurve { name, curve });
        Ok(())
    }

    pub fn add_surface(
        &mut self,
        name: impl Into<String>,
        surface: RationalSurface,
    ) -> Result<(), ModelError> {
        let name = name.into();
        check_name(&name, self.surfaces.iter().map(|s| s.name.as_str()), "surfaces")?;
        self.surfaces.push(NamedSurface { name, surface });
        Ok(())
    }

    /// Replaces an existing curve; returns `false` when no curve has that name.
    pub fn replace_curve(&mut self, name: &str, curve: RationalCurve) -> bool {
        match self.curves.iter_mut().find(|c| c.name == name) {
            Some(slot) => {
                slot.curve = curve;
                true
            }
            None => false,
        }
    }

    /// A name not yet used by any curve, derived from `base`.
    pub fn unused_curve_name(&self, base: &str) -> String {
        unused_name(base, |n| self.curve(n).is_some())
    }

    pub fn unused_surface_name(&self, base: &str) -> String {
        unused_name(base, |n| self.surface(n).is_some())
    }
}

fn unused_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (2..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken(n))
        .expect("unbounded suffix search")
}

fn check_name<'a>(
    name: &str,
    mut existing: impl Iterator<Item = &'a str>,
    list: &str,
) -> Result<(), ModelError> {
    if name.is_empty() {
        return Err(ModelError::invalid(list, "entity names must be non-empty"));
    }
    if existing.any(|n| n == name) {
        return Err(ModelError::invalid(
            list,
            format!("duplicate name \"{name}\""),
        ));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct NamedCurveWire {
    name: String,
    #[serde(flatten)]
    data: CurveData,
}

#[derive(Serialize, Deserialize)]
struct NamedSurfaceWire {
    name: String,
    #[serde(flatten)]
    data: SurfaceData,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DocumentWire<'a> {
    schema_version: u32,
    name: &'a str,
    curves: Vec<NamedCurveWire>,
    surfaces: Vec<NamedSurfaceWire>,
    annotations: &'a BTreeMap<String, Value>,
}

impl Serialize for NamedCurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NamedCurveWire {
            name: self.name.clone(),
            data: self.curve.clone().into(),
        }
        .serialize(s)
    }
}

impl Serialize for NamedSurface {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NamedSurfaceWire {
            name: self.name.clone(),
            data: self.surface.clone().into(),
        }
        .serialize(s)
    }
}

impl Serialize for ModelDocument {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DocumentWire {
            schema_version: SCHEMA_VERSION,
            name: &self.name,
            curves: self
                .curves
                .iter()
                .map(|c| NamedCurveWire {
                    name: c.name.clone(),
                    data: c.curve.clone().into(),
                })
                .collect(),
            surfaces: self
                .surfaces
                .iter()
                .map(|c| NamedSurfaceWire {
                    name: c.name.clone(),
                    data: c.surface.clone().into(),
                })
                .collect(),
            annotations: &self.annotations,
        }
        .serialize(s)
    }
}

/// Deterministic pretty-printed JSON, newline-terminated.
pub fn write_model_json(doc: &ModelDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("model documents always serialize");
    text.push('\n');
    text
}

/// Parses and validates a model document.
pub fn read_model_json(text: &str) -> Result<ModelDocument, ModelError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
    model_from_value(value)
}

/// Validates an already-parsed JSON value as a model document.
pub fn model_from_value(value: Value) -> Result<ModelDocument, ModelError> {
    let Value::Object(mut top) = value else {
        return Err(ModelError::invalid("$", "model must be a JSON object"));
    };

    let version = match top.remove("schemaVersion") {
        Some(Value::Number(n)) if n.as_u64().is_some() => n.as_u64().unwrap_or_default(),
        Some(_) => {
            return Err(ModelError::invalid(
                "schemaVersion",
                "must be a non-negative integer",
            ))
        }
        None => return Err(ModelError::invalid("schemaVersion", "missing")),
    };
    if version > u64::from(SCHEMA_VERSION) {
        return Err(ModelError::Version {
            found: version,
            supported: SCHEMA_VERSION,
        });
    }

    let mut doc = ModelDocument::new(match top.remove("name") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s,
        Some(_) => return Err(ModelError::invalid("name", "must be a string")),
    });

    for (i, item) in take_array(&mut top, "curves")?.into_iter().enumerate() {
        let path = format!("curves[{i}]");
        let wire: NamedCurveWire = serde_json::from_value(item)
            .map_err(|e| ModelError::invalid(path.as_str(), e))?;
        let curve = curve_from_data(wire.data, &path)?;
        doc.add_curve(wire.name, curve).map_err(|e| relocate(e, &path))?;
    }
    for (i, item) in take_array(&mut top, "surfaces")?.into_iter().enumerate() {
        let path = format!("surfaces[{i}]");
        let wire: NamedSurfaceWire = serde_json::from_value(item)
            .map_err(|e| ModelError::invalid(path.as_str(), e))?;
        let surface = surface_from_data(wire.data, &path)?;
        doc.add_surface(wire.name, surface).map_err(|e| relocate(e, &path))?;
    }

    match top.remove("annotations") {
        None | Some(Value::Null) => {}
        Some(Value::Object(map)) => doc.annotations.extend(map),
        Some(_) => return Err(ModelError::invalid("annotations", "must be an object")),
    }
    // unknown top-level keys are kept as annotations
    for (key, value) in top {
        doc.annotations.entry(key).or_insert(value);
    }
    Ok(doc)
}

fn relocate(e: ModelError, path: &str) -> ModelError {
    match e {
        ModelError::Validation { message, .. } => ModelError::invalid(format!("{path}.name"), message),
        other => other,
    }
}

fn take_array(top: &mut serde_json::Map<String, Value>, key: &str) -> Result<Vec<Value>, ModelError> {
    match top.remove(key) {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(items)) => Ok(items),
        Some(_) => Err(ModelError::invalid(key, "must be an array")),
    }
}

fn check_control(cp: &ControlPoint, path: String) -> Result<(), ModelError> {
    if !cp.position.is_finite() {
        return Err(ModelError::invalid(path, "coordinates must be finite"));
    }
    if !(cp.weight > 0.0 && cp.weight.is_finite()) {
        return Err(ModelError::invalid(
            format!("{path}.w"),
            format!("weight {} must be positive and finite", cp.weight),
        ));
    }
    Ok(())
}

fn geom(path: String) -> impl FnOnce(GeomError) -> ModelError {
    move |e| ModelError::invalid(path, e)
}

/// Validates curve data, reporting violations under the location `path`.
pub fn curve_from_data(data: CurveData, path: &str) -> Result<RationalCurve, ModelError> {
    for (k, cp) in data.control.iter().enumerate() {
        check_control(cp, format!("{path}.control[{k}]"))?;
    }
    let knots = KnotVector::new(data.knots, data.degree).map_err(geom(format!("{path}.knots")))?;
    RationalCurve::new(data.control, knots).map_err(geom(format!("{path}.control")))
}

/// Validates surface data, reporting violations under the location `path`.
pub fn surface_from_data(data: SurfaceData, path: &str) -> Result<RationalSurface, ModelError> {
    for (j, row) in data.net.iter().enumerate() {
        for (i, cp) in row.iter().enumerate() {
            check_control(cp, format!("{path}.net[{j}][{i}]"))?;
        }
    }
    let ku = KnotVector::new(data.knots_u, data.degree_u).map_err(geom(format!("{path}.knotsU")))?;
    let kv = KnotVector::new(data.knots_v, data.degree_v).map_err(geom(format!("{path}.knotsV")))?;
    RationalSurface::new(data.net, ku, kv).map_err(geom(format!("{path}.net")))
}
