//! Tensor-product rational surfaces, surfaces of revolution and isolines.
//!
//! The control net is stored as rows: `net[j][i]` is the control point with
//! u-index `i` and v-index `j`, so each row is a u-direction polygon at a
//! fixed v-index. A v-fixed isoline therefore collapses the rows.

use serde::{Deserialize, Serialize};

use crate::construct::{CIRCLE_CONTROL, CIRCLE_KNOTS};
use crate::curve::{
    bounding_diagonal, de_boor, de_casteljau, validate_control_point, RationalCurve,
};
use crate::error::{GeomError, Result};
use crate::knots::KnotVector;
use crate::point::{ControlPoint, Homogeneous, Point, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceData", into = "SurfaceData")]
pub struct RationalSurface {
    net: Vec<Vec<ControlPoint>>,
    knots_u: KnotVector,
    knots_v: KnotVector,
}

/// Plain serialized layout of a [`RationalSurface`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurfaceData {
    pub degree_u: usize,
    pub degree_v: usize,
    pub knots_u: Vec<f64>,
    pub knots_v: Vec<f64>,
    /// Rows of constant v-index, each listing control points along u.
    pub net: Vec<Vec<ControlPoint>>,
}

impl TryFrom<SurfaceData> for RationalSurface {
    type Error = GeomError;
    fn try_from(d: SurfaceData) -> Result<Self> {
        RationalSurface::new(
            d.net,
            KnotVector::new(d.knots_u, d.degree_u)?,
            KnotVector::new(d.knots_v, d.degree_v)?,
        )
    }
}

impl From<RationalSurface> for SurfaceData {
    fn from(s: RationalSurface) -> Self {
        SurfaceData {
            degree_u: s.knots_u.degree(),
            degree_v: s.knots_v.degree(),
            knots_u: s.knots_u.as_slice().to_vec(),
            knots_v: s.knots_v.as_slice().to_vec(),
            net: s.net,
        }
    }
}

/// Which parameter an isoline holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IsolineDirection {
    /// `u` fixed; the isoline runs along `v`.
    #[serde(rename = "u")]
    UFixed,
    /// `v` fixed; the isoline runs along `u`.
    #[serde(rename = "v")]
    VFixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Isoline {
    pub direction: IsolineDirection,
    pub value: f64,
    pub curve: RationalCurve,
}

/// Order in which the two curve evaluations of a tensor product are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorOrder {
    /// Evaluate every row along `u`, then the resulting column along `v`.
    RowsFirst,
    /// Evaluate every column along `v`, then the resulting row along `u`.
    ColumnsFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshVertex {
    pub u: f64,
    pub v: f64,
    pub point: Point,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vector>,
    /// Set when a normal was requested but the surface is degenerate here.
    pub singular: bool,
}

/// Uniform parameter-grid samples; `vertices[j * nu + i]` sits at `(u_i, v_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub nu: usize,
    pub nv: usize,
    pub vertices: Vec<MeshVertex>,
}

impl SurfaceMesh {
    pub fn vertex(&self, i: usize, j: usize) -> &MeshVertex {
        &self.vertices[j * self.nu + i]
    }
}

impl RationalSurface {
    pub fn new(net: Vec<Vec<ControlPoint>>, knots_u: KnotVector, knots_v: KnotVector) -> Result<Self> {
        let rows = knots_v.control_count();
        let cols = knots_u.control_count();
        if net.len() != rows {
            return Err(GeomError::Form(format!(
                "control net has {} rows, v knots require {rows}",
                net.len()
            )));
        }
        for (j, row) in net.iter().enumerate() {
            if row.len() != cols {
                return Err(GeomError::Form(format!(
                    "control net row {j} has {} points, u knots require {cols}",
                    row.len()
                )));
            }
            for (i, cp) in row.iter().enumerate() {
                validate_control_point(cp, &format!("control point [{j}][{i}]"))?;
            }
        }
        Ok(RationalSurface {
            net,
            knots_u,
            knots_v,
        })
    }

    /// Bézier patch from rows of control points along u.
    pub fn bezier(net: Vec<Vec<ControlPoint>>) -> Result<Self> {
        let rows = net.len();
        let cols = net.first().map_or(0, Vec::len);
        if rows < 2 || cols < 2 {
            return Err(GeomError::Form("a Bézier patch needs at least 2×2 control points".into()));
        }
        let ku = KnotVector::bezier(cols - 1)?;
        let kv = KnotVector::bezier(rows - 1)?;
        RationalSurface::new(net, ku, kv)
    }

    pub fn net(&self) -> &[Vec<ControlPoint>] {
        &self.net
    }

    pub fn knots_u(&self) -> &KnotVector {
        &self.knots_u
    }

    pub fn knots_v(&self) -> &KnotVector {
        &self.knots_v
    }

    pub fn degree_u(&self) -> usize {
        self.knots_u.degree()
    }

    pub fn degree_v(&self) -> usize {
        self.knots_v.degree()
    }

    pub fn domain_u(&self) -> (f64, f64) {
        self.knots_u.domain()
    }

    pub fn domain_v(&self) -> (f64, f64) {
        self.knots_v.domain()
    }

    pub fn is_bezier(&self) -> bool {
        self.knots_u.is_bezier() && self.knots_v.is_bezier()
    }

    pub fn is_polynomial(&self) -> bool {
        let w0 = self.net[0][0].weight;
        self.net.iter().flatten().all(|c| c.weight == w0)
    }

    pub fn extent(&self) -> f64 {
        bounding_diagonal(self.net.iter().flatten().map(|c| c.position))
    }

    /// Control polygon of row `j` (fixed v-index) as a curve along u.
    pub fn row_curve(&self, j: usize) -> Result<RationalCurve> {
        RationalCurve::new(self.net[j].clone(), self.knots_u.clone())
    }

    /// Control polygon of column `i` (fixed u-index) as a curve along v.
    pub fn column_curve(&self, i: usize) -> Result<RationalCurve> {
        let column = self.net.iter().map(|row| row[i]).collect();
        RationalCurve::new(column, self.knots_v.clone())
    }

    fn check(&self, u: f64, v: f64) -> Result<()> {
        self.knots_u.check_parameter(u)?;
        self.knots_v.check_parameter(v)
    }

    fn corner(&self, u: f64, v: f64) -> Option<Point> {
        let (u0, u1) = self.domain_u();
        let (v0, v1) = self.domain_v();
        let i = if u == u0 { 0 } else if u == u1 { self.net[0].len() - 1 } else { return None };
        let j = if v == v0 { 0 } else if v == v1 { self.net.len() - 1 } else { return None };
        Some(self.net[j][i].position)
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<Point> {
        self.eval_with_order(u, v, TensorOrder::RowsFirst)
    }

    pub fn eval_with_order(&self, u: f64, v: f64, order: TensorOrder) -> Result<Point> {
        self.check(u, v)?;
        if let Some(p) = self.corner(u, v) {
            return Ok(p);
        }
        let h = match order {
            TensorOrder::RowsFirst => {
                let column: Vec<Homogeneous> = self
                    .net
                    .iter()
                    .map(|row| de_boor(&homogeneous_row(row), &self.knots_u, u))
                    .collect();
                de_boor(&column, &self.knots_v, v)
            }
            TensorOrder::ColumnsFirst => {
                let row: Vec<Homogeneous> = (0..self.net[0].len())
                    .map(|i| {
                        let column: Vec<Homogeneous> =
                            self.net.iter().map(|r| r[i].homogeneous()).collect();
                        de_boor(&column, &self.knots_v, v)
                    })
                    .collect();
                de_boor(&row, &self.knots_u, u)
            }
        };
        Ok(h.project())
    }

    /// Point with first partial derivatives `(S, ∂S/∂u, ∂S/∂v)`.
    pub fn partials(&self, u: f64, v: f64) -> Result<(Point, Vector, Vector)> {
        self.check(u, v)?;
        let (pu, pv) = (self.degree_u(), self.degree_v());
        let (su, sv) = (self.knots_u.span(u), self.knots_v.span(v));
        let bu = self.knots_u.basis_derivatives(su, u, 1);
        let bv = self.knots_v.basis_derivatives(sv, v, 1);
        let (mut h, mut hu, mut hv) = (Homogeneous::ZERO, Homogeneous::ZERO, Homogeneous::ZERO);
        for (b, j) in (sv - pv..=sv).enumerate() {
            for (a, i) in (su - pu..=su).enumerate() {
                let q = self.net[j][i].homogeneous();
                h = h.add(&q.scaled(bu[0][a] * bv[0][b]));
                hu = hu.add(&q.scaled(bu[1][a] * bv[0][b]));
                hv = hv.add(&q.scaled(bu[0][a] * bv[1][b]));
            }
        }
        let s = h.project();
        let du = (hu.point - s * hu.weight) / h.weight;
        let dv = (hv.point - s * hv.weight) / h.weight;
        Ok((s, du, dv))
    }

    /// Unit normal `∂S/∂u × ∂S/∂v`, normalized.
    pub fn normal(&self, u: f64, v: f64) -> Result<Vector> {
        let (_, du, dv) = self.partials(u, v)?;
        let n = du.cross(&dv);
        let len = n.norm();
        let extent = self.extent();
        if len < 1e-12 * extent * extent || len <= 1e-12 * du.norm() * dv.norm() {
            return Err(GeomError::SingularSurfacePoint { u, v });
        }
        Ok(n / len)
    }

    /// Isolines of a Bézier patch at the given fixed parameter values.
    pub fn isolines(&self, direction: IsolineDirection, values: &[f64]) -> Result<Vec<Isoline>> {
        if !self.is_bezier() {
            return Err(GeomError::Form(
                "isoline extraction requires a Bézier patch; sample a mesh instead".into(),
            ));
        }
        values
            .iter()
            .map(|&value| {
                if !(0.0..=1.0).contains(&value) {
                    return Err(GeomError::domain(value, (0.0, 1.0)));
                }
                let curve = match direction {
                    IsolineDirection::VFixed => {
                        let control = (0..self.net[0].len())
                            .map(|i| {
                                let column: Vec<ControlPoint> =
                                    self.net.iter().map(|r| r[i]).collect();
                                collapse(&column, value)
                            })
                            .collect();
                        RationalCurve::bezier(control)?
                    }
                    IsolineDirection::UFixed => {
                        let control = self.net.iter().map(|row| collapse(row, value)).collect();
                        RationalCurve::bezier(control)?
                    }
                };
                Ok(Isoline {
                    direction,
                    value,
                    curve,
                })
            })
            .collect()
    }

    /// Samples an `nu × nv` uniform parameter grid, boundaries included.
    pub fn sample_mesh(&self, nu: usize, nv: usize, with_normals: bool) -> Result<SurfaceMesh> {
        if nu < 2 || nv < 2 {
            return Err(GeomError::InvalidArgument(format!(
                "mesh needs at least 2×2 samples, got {nu}×{nv}"
            )));
        }
        let us = uniform(self.domain_u(), nu);
        let vs = uniform(self.domain_v(), nv);
        let mut vertices = Vec::with_capacity(nu * nv);
        for &v in &vs {
            for &u in &us {
                let point = self.eval(u, v)?;
                let (normal, singular) = if with_normals {
                    match self.normal(u, v) {
                        Ok(n) => (Some(n), false),
                        Err(GeomError::SingularSurfacePoint { .. }) => (None, true),
                        Err(e) => return Err(e),
                    }
                } else {
                    (None, false)
                };
                vertices.push(MeshVertex {
                    u,
                    v,
                    point,
                    normal,
                    singular,
                });
            }
        }
        Ok(SurfaceMesh { nu, nv, vertices })
    }
}

fn homogeneous_row(row: &[ControlPoint]) -> Vec<Homogeneous> {
    row.iter().map(ControlPoint::homogeneous).collect()
}

/// One de Casteljau collapse of a control polygon; boundary values copy the
/// end point so boundary isolines reproduce the control rows exactly.
fn collapse(polygon: &[ControlPoint], t: f64) -> ControlPoint {
    if t == 0.0 {
        return polygon[0];
    }
    if t == 1.0 {
        return polygon[polygon.len() - 1];
    }
    de_casteljau(&homogeneous_row(polygon), t).to_control()
}

fn uniform((a, b): (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Exact surface of revolution of an xz-plane profile about the z-axis.
///
/// The angular direction uses the nine-point quadratic circle, so every row
/// of the net is the profile scaled about the axis and the seam rows `v = 0`
/// and `v = 1` are identical.
pub fn revolve(profile: &RationalCurve) -> Result<RationalSurface> {
    for (i, cp) in profile.control().iter().enumerate() {
        if cp.position.y != 0.0 {
            return Err(GeomError::Precondition(format!(
                "profile control point {i} has y = {} (profile must lie in the xz-plane)",
                cp.position.y
            )));
        }
        if cp.position.x < 0.0 {
            return Err(GeomError::Precondition(format!(
                "profile control point {i} has x = {} < 0 (revolution would self-intersect)",
                cp.position.x
            )));
        }
    }
    let net = CIRCLE_CONTROL
        .iter()
        .map(|&(cx, cy, cw)| {
            profile
                .control()
                .iter()
                .map(|cp| {
                    let p = cp.position;
                    ControlPoint::new(Point::new(p.x * cx, p.x * cy, p.z), cp.weight * cw)
                })
                .collect()
        })
        .collect();
    RationalSurface::new(
        net,
        profile.knots().clone(),
        KnotVector::new(CIRCLE_KNOTS.to_vec(), 2)?,
    )
}
