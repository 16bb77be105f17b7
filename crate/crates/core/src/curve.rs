//! Rational curves: Bézier, B-spline and NURBS share one representation.
//!
//! Bézier curves are evaluated with the de Casteljau recursion and NURBS
//! curves with the de Boor recursion, both on homogeneous coordinates
//! followed by projection. Derivatives of the rational curve come from the
//! quotient rule applied to the homogeneous numerator and weight functions.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::knots::KnotVector;
use crate::point::{ControlPoint, Homogeneous, Point, Similarity, Vector};

/// Weighted control points over a clamped knot vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveData", into = "CurveData")]
pub struct RationalCurve {
    control: Vec<ControlPoint>,
    knots: KnotVector,
}

/// Plain serialized layout of a [`RationalCurve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveData {
    pub degree: usize,
    pub knots: Vec<f64>,
    pub control: Vec<ControlPoint>,
}

impl TryFrom<CurveData> for RationalCurve {
    type Error = GeomError;
    fn try_from(data: CurveData) -> Result<Self> {
        RationalCurve::new(data.control, KnotVector::new(data.knots, data.degree)?)
    }
}

impl From<RationalCurve> for CurveData {
    fn from(c: RationalCurve) -> Self {
        CurveData {
            degree: c.degree(),
            knots: c.knots.as_slice().to_vec(),
            control: c.control,
        }
    }
}

/// Checks a single control point; `what` names it in the message.
pub(crate) fn validate_control_point(cp: &ControlPoint, what: &str) -> Result<()> {
    if !cp.position.is_finite() {
        return Err(GeomError::InvalidArgument(format!(
            "{what} has a non-finite coordinate"
        )));
    }
    if !(cp.weight > 0.0 && cp.weight.is_finite()) {
        return Err(GeomError::InvalidArgument(format!(
            "{what} has weight {} (must be positive and finite)",
            cp.weight
        )));
    }
    Ok(())
}

impl RationalCurve {
    pub fn new(control: Vec<ControlPoint>, knots: KnotVector) -> Result<Self> {
        if control.len() != knots.control_count() {
            return Err(GeomError::Form(format!(
                "{} control points do not match {} knots of degree {} (need {})",
                control.len(),
                knots.len(),
                knots.degree(),
                knots.control_count()
            )));
        }
        for (i, cp) in control.iter().enumerate() {
            validate_control_point(cp, &format!("control point {i}"))?;
        }
        Ok(RationalCurve { control, knots })
    }

    /// Bézier curve of degree `control.len() - 1`.
    pub fn bezier(control: Vec<ControlPoint>) -> Result<Self> {
        if control.len() < 2 {
            return Err(GeomError::Form(
                "a Bézier curve needs at least two control points".into(),
            ));
        }
        let knots = KnotVector::bezier(control.len() - 1)?;
        RationalCurve::new(control, knots)
    }

    /// Polynomial Bézier curve (unit weights).
    pub fn bezier_from_points(points: &[Point]) -> Result<Self> {
        RationalCurve::bezier(points.iter().copied().map(ControlPoint::from).collect())
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn control(&self) -> &[ControlPoint] {
        &self.control
    }

    pub fn knots(&self) -> &KnotVector {
        &self.knots
    }

    pub fn domain(&self) -> (f64, f64) {
        self.knots.domain()
    }

    pub fn is_bezier(&self) -> bool {
        self.knots.is_bezier()
    }

    /// All weights equal: the curve is polynomial (up to a common factor).
    pub fn is_polynomial(&self) -> bool {
        let w0 = self.control[0].weight;
        self.control.iter().all(|c| c.weight == w0)
    }

    /// All control points lie in the plane `z = 0`.
    pub fn is_planar(&self) -> bool {
        self.control.iter().all(|c| c.position.z == 0.0)
    }

    /// Diagonal of the control points' bounding box.
    pub fn extent(&self) -> f64 {
        bounding_diagonal(self.control.iter().map(|c| c.position))
    }

    /// The same curve with a different control point list (same knots).
    pub fn with_control(&self, control: Vec<ControlPoint>) -> Result<Self> {
        RationalCurve::new(control, self.knots.clone())
    }

    /// Applies a similarity transform to the control points.
    pub fn transformed(&self, m: &Similarity) -> RationalCurve {
        let control = self
            .control
            .iter()
            .map(|c| ControlPoint::new(m.apply(c.position), c.weight))
            .collect();
        RationalCurve {
            control,
            knots: self.knots.clone(),
        }
    }

    /// Reverses the direction of traversal; `reversed(t)` equals `self(a + b - t)`.
    pub fn reversed(&self) -> RationalCurve {
        let (a, b) = self.domain();
        let knots: Vec<f64> = self.knots.as_slice().iter().rev().map(|k| a + b - k).collect();
        let control = self.control.iter().rev().copied().collect();
        RationalCurve {
            control,
            knots: KnotVector::new(knots, self.degree()).expect("mirrored knots stay clamped"),
        }
    }

    /// Uniformly spaced parameters over the domain, both ends included.
    pub fn uniform_parameters(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.domain();
        match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        b
                    } else {
                        a + (b - a) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }

    fn homogeneous_points(&self) -> Vec<Homogeneous> {
        self.control.iter().map(ControlPoint::homogeneous).collect()
    }

    fn require_bezier(&self) -> Result<()> {
        if self.is_bezier() {
            Ok(())
        } else {
            Err(GeomError::Form(
                "curve is not a single-segment Bézier on [0, 1]".into(),
            ))
        }
    }

    /// Point at `t ∈ [0, 1]` by (rational) de Casteljau.
    pub fn eval_bezier(&self, t: f64) -> Result<Point> {
        self.require_bezier()?;
        self.knots.check_parameter(t)?;
        if t == 0.0 {
            return Ok(self.control[0].position);
        }
        if t == 1.0 {
            return Ok(self.control[self.control.len() - 1].position);
        }
        Ok(de_casteljau(&self.homogeneous_points(), t).project())
    }

    /// First (and, for `order == 2`, second) derivative of a Bézier curve,
    /// evaluated from the hodographs of the homogeneous control polygon.
    pub fn bezier_derivatives(&self, t: f64, order: usize) -> Result<Vec<Vector>> {
        check_order(order)?;
        self.require_bezier()?;
        self.knots.check_parameter(t)?;
        let h = self.homogeneous_points();
        let p = self.degree() as f64;
        let first: Vec<Homogeneous> = h.windows(2).map(|w| w[1].sub(&w[0]).scaled(p)).collect();
        let second: Vec<Homogeneous> = first
            .windows(2)
            .map(|w| w[1].sub(&w[0]).scaled(p - 1.0))
            .collect();
        let a0 = de_casteljau(&h, t);
        let a1 = de_casteljau(&first, t);
        let a2 = if second.is_empty() {
            Homogeneous::ZERO
        } else {
            de_casteljau(&second, t)
        };
        Ok(rational_derivatives([a0, a1, a2], order))
    }

    /// Splits a Bézier curve at `t` into two Bézier curves of the same degree.
    pub fn subdivide_bezier(&self, t: f64) -> Result<(RationalCurve, RationalCurve)> {
        self.require_bezier()?;
        self.knots.check_parameter(t)?;
        let mut level = self.homogeneous_points();
        let n = level.len();
        let mut left = Vec::with_capacity(n);
        let mut right = vec![Homogeneous::ZERO; n];
        left.push(level[0]);
        right[n - 1] = level[n - 1];
        for r in 1..n {
            for i in 0..n - r {
                level[i] = level[i].lerp(&level[i + 1], t);
            }
            left.push(level[0]);
            right[n - 1 - r] = level[n - 1 - r];
        }
        let to_curve = |pts: Vec<Homogeneous>| RationalCurve {
            control: pts.into_iter().map(Homogeneous::to_control).collect(),
            knots: self.knots.clone(),
        };
        Ok((to_curve(left), to_curve(right)))
    }

    /// Splits the curve at an interior parameter by knot insertion. The
    /// pieces keep their original parameter ranges `[a, t]` and `[t, b]`.
    pub fn split(&self, t: f64) -> Result<(RationalCurve, RationalCurve)> {
        self.knots.check_parameter(t)?;
        let (a, b) = self.domain();
        if t <= a || t >= b {
            return Err(GeomError::Form(format!("split parameter {t} is not inside ({a}, {b})")));
        }
        let p = self.degree();
        let mut knots = self.knots.as_slice().to_vec();
        let mut pts = self.homogeneous_points();
        let existing = knots.iter().filter(|&&k| k == t).count();
        for _ in existing..p {
            // right-continuous span: knots[k] <= t < knots[k + 1]
            let k = knots.iter().rposition(|&u| u <= t).expect("t is inside the domain");
            let mut next = Vec::with_capacity(pts.len() + 1);
            next.extend_from_slice(&pts[..=k - p]);
            for i in k - p + 1..=k {
                let alpha = (t - knots[i]) / (knots[i + p] - knots[i]);
                next.push(pts[i - 1].lerp(&pts[i], alpha));
            }
            next.extend_from_slice(&pts[k..]);
            knots.insert(k + 1, t);
            pts = next;
        }
        let first = knots.iter().position(|&u| u == t).expect("t was inserted");
        let mut left_knots = knots[..first + p].to_vec();
        left_knots.push(t);
        let mut right_knots = vec![t];
        right_knots.extend_from_slice(&knots[first..]);
        let piece = |pts: &[Homogeneous], knots: Vec<f64>| -> Result<RationalCurve> {
            RationalCurve::new(
                pts.iter().copied().map(Homogeneous::to_control).collect(),
                KnotVector::new(knots, p)?,
            )
        };
        Ok((piece(&pts[..first], left_knots)?, piece(&pts[first - 1..], right_knots)?))
    }

    /// Point at `t` by the de Boor recursion on homogeneous coordinates.
    pub fn eval(&self, t: f64) -> Result<Point> {
        self.knots.check_parameter(t)?;
        let (a, b) = self.domain();
        if t == a {
            return Ok(self.control[0].position);
        }
        if t == b {
            return Ok(self.control[self.control.len() - 1].position);
        }
        Ok(de_boor(&self.homogeneous_points(), &self.knots, t).project())
    }

    /// First (and, for `order == 2`, second) derivative at `t`.
    pub fn derivatives(&self, t: f64, order: usize) -> Result<Vec<Vector>> {
        check_order(order)?;
        self.knots.check_parameter(t)?;
        let h = homogeneous_derivatives(&self.homogeneous_points(), &self.knots, t, order);
        Ok(rational_derivatives(h, order))
    }

    /// Position together with first and second derivatives.
    pub fn point_and_derivatives(&self, t: f64) -> Result<(Point, Vector, Vector)> {
        self.knots.check_parameter(t)?;
        let h = homogeneous_derivatives(&self.homogeneous_points(), &self.knots, t, 2);
        let d = rational_derivatives(h, 2);
        Ok((self.eval(t)?, d[0], d[1]))
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 1 || order == 2 {
        Ok(())
    } else {
        Err(GeomError::UnsupportedOrder(order))
    }
}

pub(crate) fn bounding_diagonal(points: impl Iterator<Item = Point>) -> f64 {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    let mut any = false;
    for p in points {
        any = true;
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    if any {
        (hi - lo).norm()
    } else {
        0.0
    }
}

pub(crate) fn de_casteljau(points: &[Homogeneous], t: f64) -> Homogeneous {
    let mut level = points.to_vec();
    for r in 1..level.len() {
        for i in 0..level.len() - r {
            level[i] = level[i].lerp(&level[i + 1], t);
        }
    }
    level[0]
}

/// De Boor recursion on homogeneous points; `points.len()` must match `knots`.
pub(crate) fn de_boor(points: &[Homogeneous], knots: &KnotVector, t: f64) -> Homogeneous {
    let (a, b) = knots.domain();
    if t == a {
        return points[0];
    }
    if t == b {
        return points[points.len() - 1];
    }
    let p = knots.degree();
    let k = knots.span(t);
    let u = knots.as_slice();
    let mut d: Vec<Homogeneous> = points[k - p..=k].to_vec();
    for r in 1..=p {
        for j in (r..=p).rev() {
            let lo = u[j + k - p];
            let hi = u[j + 1 + k - r];
            let alpha = (t - lo) / (hi - lo);
            d[j] = d[j - 1].lerp(&d[j], alpha);
        }
    }
    d[p]
}

/// Homogeneous numerator/weight and their derivatives up to `order` at `t`.
pub(crate) fn homogeneous_derivatives(
    points: &[Homogeneous],
    knots: &KnotVector,
    t: f64,
    order: usize,
) -> [Homogeneous; 3] {
    let p = knots.degree();
    let span = knots.span(t);
    let basis = knots.basis_derivatives(span, t, order);
    let mut out = [Homogeneous::ZERO; 3];
    for (k, row) in basis.iter().enumerate().take(3) {
        out[k] = row
            .iter()
            .enumerate()
            .fold(Homogeneous::ZERO, |acc, (j, &n)| {
                acc.add(&points[span - p + j].scaled(n))
            });
    }
    out
}

/// Quotient rule: `C' = (A' − w'C)/w`, `C'' = (A'' − 2w'C' − w''C)/w`.
pub(crate) fn rational_derivatives(h: [Homogeneous; 3], order: usize) -> Vec<Vector> {
    let [a0, a1, a2] = h;
    let c = a0.project();
    let d1 = (a1.point - c * a1.weight) / a0.weight;
    if order == 1 {
        return vec![d1];
    }
    let d2 = (a2.point - d1 * (2.0 * a1.weight) - c * a2.weight) / a0.weight;
    vec![d1, d2]
}
