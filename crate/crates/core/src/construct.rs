//! Named constructions: the exact NURBS circle and the cubic Bézier spiral.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::curve::RationalCurve;
use crate::error::{GeomError, Result};
use crate::knots::KnotVector;
use crate::point::{ControlPoint, Point};

/// Knots of the nine-point quadratic circle.
pub const CIRCLE_KNOTS: [f64; 12] = [0.0, 0.0, 0.0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1.0, 1.0, 1.0];

/// Unit-circle control polygon (corners and edge midpoints of the
/// circumscribed square) with its weights, starting and ending at `(1, 0)`.
pub const CIRCLE_CONTROL: [(f64, f64, f64); 9] = [
    (1.0, 0.0, 1.0),
    (1.0, 1.0, FRAC_1_SQRT_2),
    (0.0, 1.0, 1.0),
    (-1.0, 1.0, FRAC_1_SQRT_2),
    (-1.0, 0.0, 1.0),
    (-1.0, -1.0, FRAC_1_SQRT_2),
    (0.0, -1.0, 1.0),
    (1.0, -1.0, FRAC_1_SQRT_2),
    (1.0, 0.0, 1.0),
];

/// Exact circle as a clamped quadratic NURBS curve in the plane `z = center.z`,
/// traversed counterclockwise from `center + (radius, 0)`.
pub fn make_circle_nurbs(center: Point, radius: f64) -> Result<RationalCurve> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GeomError::InvalidArgument(format!(
            "circle radius must be positive and finite, got {radius}"
        )));
    }
    if !center.is_finite() {
        return Err(GeomError::InvalidArgument("circle center is not finite".into()));
    }
    let control = CIRCLE_CONTROL
        .iter()
        .map(|&(x, y, w)| {
            ControlPoint::new(
                Point::new(center.x + radius * x, center.y + radius * y, center.z),
                w,
            )
        })
        .collect();
    RationalCurve::new(control, KnotVector::new(CIRCLE_KNOTS.to_vec(), 2)?)
}

/// Half circle of the given radius in the xz-plane from the south pole
/// `(0, 0, -r)` through `(r, 0, 0)` to the north pole. Revolving it about
/// the z-axis gives a sphere.
pub fn make_half_circle_profile(radius: f64) -> Result<RationalCurve> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GeomError::InvalidArgument(format!(
            "profile radius must be positive and finite, got {radius}"
        )));
    }
    let r = radius;
    let control = vec![
        ControlPoint::new(Point::new(0.0, 0.0, -r), 1.0),
        ControlPoint::new(Point::new(r, 0.0, -r), FRAC_1_SQRT_2),
        ControlPoint::new(Point::new(r, 0.0, 0.0), 1.0),
        ControlPoint::new(Point::new(r, 0.0, r), FRAC_1_SQRT_2),
        ControlPoint::new(Point::new(0.0, 0.0, r), 1.0),
    ];
    RationalCurve::new(
        control,
        KnotVector::new(vec![0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0], 2)?,
    )
}

/// Input to [`make_cubic_spiral`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpiralSpec {
    pub start: Point,
    /// Direction of the start tangent, radians from +x.
    #[serde(default)]
    pub start_tangent_angle: f64,
    /// Total counterclockwise tangent turn, in `(0, π/2]`.
    pub turn_angle: f64,
    /// Curvature reached at the end of the segment.
    pub end_curvature: f64,
}

impl SpiralSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.turn_angle > 0.0 && self.turn_angle <= FRAC_PI_2) {
            return Err(GeomError::InvalidArgument(format!(
                "spiral turn angle {} outside (0, π/2]",
                self.turn_angle
            )));
        }
        if !(self.end_curvature > 0.0 && self.end_curvature.is_finite()) {
            return Err(GeomError::InvalidArgument(format!(
                "spiral end curvature must be positive, got {}",
                self.end_curvature
            )));
        }
        if !self.start.is_finite() || !self.start_tangent_angle.is_finite() {
            return Err(GeomError::InvalidArgument(
                "spiral start point and tangent angle must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Ratio of the first to the second control leg.
const SPIRAL_LEAD_RATIO: f64 = 1.0;
/// Last-leg ratio is this fraction of `cos θ`; curvature is monotone for
/// ratios up to `6 cos θ / (4 + lead)`, i.e. `1.2 cos θ` with a unit lead.
const SPIRAL_TAIL_FACTOR: f64 = 0.6;
/// Lower bound on the last-leg ratio so the curve stays bounded as θ → π/2.
const SPIRAL_TAIL_FLOOR: f64 = 1e-3;

/// Cubic Bézier spiral: curvature grows monotonically from zero at the start
/// to `end_curvature` at the end while the tangent turns by `turn_angle`.
///
/// The first three control points are collinear along the start tangent,
/// which forces zero curvature at the start; the last leg points along the
/// end tangent. With legs `h1, h2, h3` the end curvature is
/// `2 h2 sin θ / (3 h3²)`, which fixes the overall size.
pub fn make_cubic_spiral(spec: &SpiralSpec) -> Result<RationalCurve> {
    spec.validate()?;
    let theta = spec.turn_angle;
    let tail = (SPIRAL_TAIL_FACTOR * theta.cos()).max(SPIRAL_TAIL_FLOOR);
    let h2 = 2.0 * theta.sin() / (3.0 * tail * tail * spec.end_curvature);
    let h1 = SPIRAL_LEAD_RATIO * h2;
    let h3 = tail * h2;

    let (s0, c0) = spec.start_tangent_angle.sin_cos();
    let (s1, c1) = (spec.start_tangent_angle + theta).sin_cos();
    let t0 = Point::new(c0, s0, 0.0);
    let t1 = Point::new(c1, s1, 0.0);

    let p0 = spec.start;
    let p1 = p0 + t0 * h1;
    let p2 = p0 + t0 * (h1 + h2);
    let p3 = p2 + t1 * h3;
    RationalCurve::bezier_from_points(&[p0, p1, p2, p3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_starts_on_positive_x_axis() {
        let c = make_circle_nurbs(Point::ORIGIN, 1.0).unwrap();
        assert_eq!(c.eval(0.0).unwrap(), Point::xy(1.0, 0.0));
        assert_eq!(c.degree(), 2);
        assert_eq!(c.control().len(), 9);
    }

    #[test]
    fn circle_half_turn_is_antipodal() {
        let c = make_circle_nurbs(Point::ORIGIN, 1.0).unwrap();
        let p = c.eval(0.5).unwrap();
        assert!((p - Point::xy(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn circle_quarter_turn() {
        let c = make_circle_nurbs(Point::xy(3.0, 4.0), 2.0).unwrap();
        assert!((c.eval(0.25).unwrap() - Point::xy(3.0, 6.0)).norm() < 1e-15);
    }

    #[test]
    fn circle_rejects_nonpositive_radius() {
        assert!(make_circle_nurbs(Point::ORIGIN, 0.0).is_err());
        assert!(make_circle_nurbs(Point::ORIGIN, -1.0).is_err());
        assert!(make_circle_nurbs(Point::ORIGIN, f64::NAN).is_err());
    }

    #[test]
    fn spiral_rejects_bad_specs() {
        let base = SpiralSpec {
            start: Point::ORIGIN,
            start_tangent_angle: 0.0,
            turn_angle: 0.5,
            end_curvature: 1.0,
        };
        for bad in [
            SpiralSpec { turn_angle: 0.0, ..base },
            SpiralSpec { turn_angle: 1.6, ..base },
            SpiralSpec { end_curvature: 0.0, ..base },
            SpiralSpec { end_curvature: -2.0, ..base },
        ] {
            assert!(matches!(make_cubic_spiral(&bad), Err(GeomError::InvalidArgument(_))));
        }
        assert!(make_cubic_spiral(&SpiralSpec { turn_angle: FRAC_PI_2, ..base }).is_ok());
    }

    #[test]
    fn spiral_honors_start_point_and_tangent() {
        let spec = SpiralSpec {
            start: Point::xy(2.0, -1.0),
            start_tangent_angle: 0.7,
            turn_angle: 0.4,
            end_curvature: 3.0,
        };
        let c = make_cubic_spiral(&spec).unwrap();
        assert_eq!(c.eval_bezier(0.0).unwrap(), spec.start);
        let d = c.bezier_derivatives(0.0, 1).unwrap()[0];
        assert!((d.y.atan2(d.x) - 0.7).abs() < 1e-12);
    }
}
