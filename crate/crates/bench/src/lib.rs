//! Fixtures shared by the criterion benchmarks.

use splinelab_core::{
    make_circle_nurbs, make_half_circle_profile, revolve, ControlPoint, KnotVector, Point,
    RationalCurve, RationalSurface,
};

/// A clamped cubic B-spline over `n` control points on a wavy line.
pub fn wavy_bspline(n: usize) -> RationalCurve {
    let control = (0..n)
        .map(|i| {
            let x = i as f64;
            ControlPoint::unweighted(Point::xy(x, (0.7 * x).sin()))
        })
        .collect();
    let knots = KnotVector::uniform_clamped(n, 3).expect("valid knots");
    RationalCurve::new(control, knots).expect("valid wavy spline")
}

pub fn unit_circle() -> RationalCurve {
    make_circle_nurbs(Point::ORIGIN, 1.0).expect("unit circle")
}

pub fn unit_sphere() -> RationalSurface {
    revolve(&make_half_circle_profile(1.0).expect("profile")).expect("sphere")
}
