//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls the evaluators under test: points come from explicit
//! Bernstein or Cox-de Boor sums and curvature from circle fits.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use splinelab_core::{ControlPoint, KnotVector, Point, RationalCurve};

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Rational Bézier point as an explicit weighted Bernstein sum.
pub fn bernstein_point(control: &[ControlPoint], t: f64) -> Point {
    let n = control.len() - 1;
    let mut num = Point::ORIGIN;
    let mut den = 0.0;
    for (i, cp) in control.iter().enumerate() {
        let b = binomial(n, i) * t.powi(i as i32) * (1.0 - t).powi((n - i) as i32);
        num += cp.position * (b * cp.weight);
        den += b * cp.weight;
    }
    num / den
}

/// Cox-de Boor basis value by the textbook recursion, with the last
/// non-degenerate interval closed on the right.
pub fn cox_de_boor(knots: &[f64], i: usize, p: usize, t: f64) -> f64 {
    if p == 0 {
        let (a, b) = (knots[i], knots[i + 1]);
        let last = *knots.last().unwrap();
        let inside = if b == last { a <= t && t <= b && a < b } else { a <= t && t < b };
        return if inside { 1.0 } else { 0.0 };
    }
    let mut v = 0.0;
    let d1 = knots[i + p] - knots[i];
    if d1 > 0.0 {
        v += (t - knots[i]) / d1 * cox_de_boor(knots, i, p - 1, t);
    }
    let d2 = knots[i + p + 1] - knots[i + 1];
    if d2 > 0.0 {
        v += (knots[i + p + 1] - t) / d2 * cox_de_boor(knots, i + 1, p - 1, t);
    }
    v
}

/// NURBS point as a sum over Cox-de Boor basis functions.
pub fn basis_sum_point(curve: &RationalCurve, t: f64) -> Point {
    let knots = curve.knots().as_slice();
    let p = curve.degree();
    let mut num = Point::ORIGIN;
    let mut den = 0.0;
    for (i, cp) in curve.control().iter().enumerate() {
        let b = cox_de_boor(knots, i, p, t) * cp.weight;
        num += cp.position * b;
        den += b;
    }
    num / den
}

/// Signed curvature of the circle through three planar points (positive
/// when the points turn counterclockwise).
pub fn three_point_kappa(a: Point, b: Point, c: Point) -> f64 {
    let cross = (b - a).cross(&(c - a)).z;
    let (ab, bc, ca) = (a.distance(&b), b.distance(&c), c.distance(&a));
    2.0 * cross / (ab * bc * ca)
}

/// Unsigned three-point curvature for space curves.
pub fn three_point_kappa_3d(a: Point, b: Point, c: Point) -> f64 {
    let cross = (b - a).cross(&(c - a)).norm();
    let (ab, bc, ca) = (a.distance(&b), b.distance(&c), c.distance(&a));
    2.0 * cross / (ab * bc * ca)
}

/// True when `p` lies in the convex hull of the xy-projection of `pts`,
/// allowing `slack` outside each hull edge.
pub fn in_convex_hull_2d(pts: &[Point], p: Point, slack: f64) -> bool {
    let hull = convex_hull_2d(pts);
    if hull.len() < 3 {
        // degenerate hull: distance to the hull segment
        let (a, b) = match hull.len() {
            1 => (hull[0], hull[0]),
            _ => (hull[0], hull[1]),
        };
        return segment_distance(a, b, p) <= slack;
    }
    (0..hull.len()).all(|i| {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let e = b - a;
        let len = e.norm();
        (e.x * (p.y - a.y) - e.y * (p.x - a.x)) / len >= -slack
    })
}

fn segment_distance(a: Point, b: Point, p: Point) -> f64 {
    let e = b - a;
    let len2 = e.dot(&e);
    let s = if len2 == 0.0 { 0.0 } else { ((p - a).dot(&e) / len2).clamp(0.0, 1.0) };
    Point::xy(a.x + s * e.x, a.y + s * e.y).distance(&Point::xy(p.x, p.y))
}

/// Andrew's monotone chain, counterclockwise, collinear points dropped.
pub fn convex_hull_2d(pts: &[Point]) -> Vec<Point> {
    let mut v: Vec<Point> = pts.iter().map(|p| Point::xy(p.x, p.y)).collect();
    v.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    v.dedup();
    if v.len() < 3 {
        return v;
    }
    let turn = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut lower: Vec<Point> = Vec::new();
    for &p in &v {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in v.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn random_point_2d(rng: &mut StdRng, range: f64) -> Point {
    Point::xy(rng.random_range(-range..range), rng.random_range(-range..range))
}

/// Random planar polynomial cubic Bézier whose speed stays well away from
/// zero and whose curvature at `t_check` (if given) is not tiny.
pub fn random_cubic(rng: &mut StdRng, t_check: Option<f64>) -> RationalCurve {
    loop {
        let pts: Vec<Point> = (0..4).map(|_| random_point_2d(rng, 5.0)).collect();
        let curve = RationalCurve::bezier_from_points(&pts).unwrap();
        if is_nonsingular(&curve) && kappa_not_tiny(&curve, t_check) {
            return curve;
        }
    }
}

/// Random planar rational cubic Bézier with weights in `[0.5, 2]`.
pub fn random_rational_cubic(rng: &mut StdRng) -> RationalCurve {
    loop {
        let control: Vec<ControlPoint> = (0..4)
            .map(|_| ControlPoint::new(random_point_2d(rng, 5.0), rng.random_range(0.5..2.0)))
            .collect();
        let curve = RationalCurve::bezier(control).unwrap();
        if is_nonsingular(&curve) {
            return curve;
        }
    }
}

/// Minimum sampled speed above 5% of the extent.
pub fn is_nonsingular(curve: &RationalCurve) -> bool {
    let ext = curve.extent();
    ext > 1e-3
        && (0..=200).all(|i| {
            let t = i as f64 / 200.0;
            curve.derivatives(t, 1).unwrap()[0].norm() > 0.05 * ext
        })
}

fn kappa_not_tiny(curve: &RationalCurve, t: Option<f64>) -> bool {
    match t {
        None => true,
        Some(t) => {
            let k = splinelab_core::curvature(curve, t).unwrap().kappa;
            k.abs() * curve.extent() > 1e-2
        }
    }
}

/// Random clamped knot vector with `n` control points, simple interior knots.
pub fn random_knots(rng: &mut StdRng, n: usize, degree: usize) -> KnotVector {
    let mut interior: Vec<f64> = (0..n - degree - 1).map(|_| rng.random_range(0.05..0.95)).collect();
    interior.sort_by(f64::total_cmp);
    let mut k = vec![0.0; degree + 1];
    k.extend(interior);
    k.extend(vec![1.0; degree + 1]);
    KnotVector::new(k, degree).unwrap()
}

pub fn max_deviation(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.distance(q)).fold(0.0, f64::max)
}
