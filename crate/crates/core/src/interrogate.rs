//! Differential-geometry interrogation of curves.
//!
//! Planar curves (all control points at `z = 0`) get signed curvature with
//! the left normal, positive for counterclockwise turning. Other curves get
//! unsigned curvature and the principal normal. Sampling-based checks report
//! verdicts at the requested resolution; they are not symbolic proofs.

use serde::{Deserialize, Serialize};

use crate::curve::{bounding_diagonal, RationalCurve};
use crate::error::{GeomError, Result};
use crate::point::{Point, Vector};

/// Relative speed below which a parameter counts as singular.
const SINGULAR_SPEED: f64 = 1e-12;
/// Curvature magnitude below which no finite osculating circle exists.
const MIN_OSCULATING_CURVATURE: f64 = 1e-12;

pub const DEFAULT_COMB_SAMPLES: usize = 64;
pub const MIN_SPIRAL_SAMPLES: usize = 16;
pub const MIN_ENERGY_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub t: f64,
    pub point: Point,
    pub tangent: Vector,
    pub normal: Vector,
    pub kappa: f64,
}

/// Curvature at `t`.
pub fn curvature(curve: &RationalCurve, t: f64) -> Result<CurvatureSample> {
    let (point, d1, d2) = curve.point_and_derivatives(t)?;
    let speed = d1.norm();
    if speed == 0.0 || speed <= SINGULAR_SPEED * curve.extent() {
        return Err(GeomError::SingularParameter { t, index: None });
    }
    let tangent = d1 / speed;
    let (kappa, normal) = if curve.is_planar() {
        let kappa = (d1.x * d2.y - d1.y * d2.x) / speed.powi(3);
        (kappa, Point::xy(-tangent.y, tangent.x))
    } else {
        let kappa = d1.cross(&d2).norm() / speed.powi(3);
        let normal = (d2 - tangent * d2.dot(&tangent))
            .normalized()
            .or_else(|| tangent.cross(&Point::new(0.0, 0.0, 1.0)).normalized())
            .or_else(|| tangent.cross(&Point::new(1.0, 0.0, 0.0)).normalized())
            .expect("a unit tangent has a perpendicular");
        (kappa, normal)
    };
    Ok(CurvatureSample {
        t,
        point,
        tangent,
        normal,
        kappa,
    })
}

fn sample_curvatures(curve: &RationalCurve, n: usize) -> Result<Vec<CurvatureSample>> {
    curve
        .uniform_parameters(n)
        .into_iter()
        .enumerate()
        .map(|(i, t)| curvature(curve, t).map_err(|e| e.at_sample(i)))
        .collect()
}

/// The porcupine plot: curvature-scaled normals at uniform parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureComb {
    pub samples: Vec<CurvatureSample>,
    pub scale: f64,
    /// `point + scale · kappa · normal` for each sample.
    pub tips: Vec<Point>,
}

impl CurvatureComb {
    pub fn max_abs_kappa(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.kappa.abs()))
    }
}

pub fn curvature_comb(curve: &RationalCurve, n: usize, scale: f64) -> Result<CurvatureComb> {
    if n < 2 {
        return Err(GeomError::InvalidArgument(format!(
            "comb needs at least 2 samples, got {n}"
        )));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(GeomError::InvalidArgument(format!(
            "comb scale must be positive, got {scale}"
        )));
    }
    let samples = sample_curvatures(curve, n)?;
    let tips = samples
        .iter()
        .map(|s| s.point + s.normal * (scale * s.kappa))
        .collect();
    Ok(CurvatureComb {
        samples,
        scale,
        tips,
    })
}

/// Comb whose longest tooth is 10% of the sampled curve's bounding-box diagonal.
pub fn curvature_comb_auto(curve: &RationalCurve, n: usize) -> Result<CurvatureComb> {
    let probe = curvature_comb(curve, n, 1.0)?;
    let diagonal = bounding_diagonal(probe.samples.iter().map(|s| s.point));
    let kmax = probe.max_abs_kappa();
    let scale = if kmax > 0.0 && diagonal > 0.0 {
        0.1 * diagonal / kmax
    } else {
        1.0
    };
    curvature_comb(curve, n, scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpiralReport {
    pub monotone: bool,
    pub kappa_start: f64,
    pub kappa_end: f64,
    /// Largest decrease of `|κ|` between consecutive samples.
    pub max_violation: f64,
    pub inflection_count: usize,
}

/// Checks that `|κ|` is non-decreasing along `n` samples (within the absolute
/// tolerance `tol`) and that `κ` keeps one sign.
pub fn check_spiral(curve: &RationalCurve, n: usize, tol: f64) -> Result<SpiralReport> {
    if n < MIN_SPIRAL_SAMPLES {
        return Err(GeomError::InvalidArgument(format!(
            "spiral check needs at least {MIN_SPIRAL_SAMPLES} samples, got {n}"
        )));
    }
    let kappas: Vec<f64> = sample_curvatures(curve, n)?
        .into_iter()
        .map(|s| s.kappa)
        .collect();
    let max_violation = kappas
        .windows(2)
        .map(|w| w[0].abs() - w[1].abs())
        .fold(0.0, f64::max);

    let mut inflection_count = 0;
    let mut last_sign = 0.0;
    for &k in &kappas {
        if k.abs() <= tol {
            continue;
        }
        let sign = k.signum();
        if last_sign != 0.0 && sign != last_sign {
            inflection_count += 1;
        }
        last_sign = sign;
    }
    Ok(SpiralReport {
        monotone: max_violation <= tol && inflection_count == 0,
        kappa_start: kappas[0],
        kappa_end: kappas[kappas.len() - 1],
        max_violation,
        inflection_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ContinuityLevel {
    None,
    G0,
    G1,
    G2,
}

impl std::fmt::Display for ContinuityLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ContinuityLevel::None => "NONE",
            ContinuityLevel::G0 => "G0",
            ContinuityLevel::G1 => "G1",
            ContinuityLevel::G2 => "G2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContinuityTolerances {
    /// Absolute position gap, model units.
    pub position: f64,
    /// Angle between unit tangents, radians.
    pub tangent_angle: f64,
    /// Curvature gap relative to `max(1, |κ|)`.
    pub curvature: f64,
}

impl Default for ContinuityTolerances {
    fn default() -> Self {
        ContinuityTolerances {
            position: 1e-9,
            tangent_angle: 1e-9,
            curvature: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContinuityReport {
    pub level: ContinuityLevel,
    pub position_gap: f64,
    pub tangent_angle_gap: f64,
    pub curvature_gap: f64,
}

/// Geometric continuity of the joint between the end of `a` and the start of `b`.
pub fn check_continuity(
    a: &RationalCurve,
    b: &RationalCurve,
    tol: &ContinuityTolerances,
) -> Result<ContinuityReport> {
    let endpoint = |curve: &RationalCurve, t: f64, which: &'static str| {
        curvature(curve, t).map_err(|e| match e {
            GeomError::SingularParameter { .. } => GeomError::SingularEndpoint { which },
            other => other,
        })
    };
    let end = endpoint(a, a.domain().1, "first")?;
    let start = endpoint(b, b.domain().0, "second")?;

    let signed = a.is_planar() && b.is_planar();
    let (ka, kb) = if signed {
        (end.kappa, start.kappa)
    } else {
        (end.kappa.abs(), start.kappa.abs())
    };
    let position_gap = end.point.distance(&start.point);
    let tangent_angle_gap = end.tangent.angle_to(&start.tangent);
    let curvature_gap = (ka - kb).abs();

    let g0 = position_gap <= tol.position;
    let g1 = g0 && tangent_angle_gap <= tol.tangent_angle;
    let g2 = g1 && curvature_gap <= tol.curvature * ka.abs().max(kb.abs()).max(1.0);
    let level = if g2 {
        ContinuityLevel::G2
    } else if g1 {
        ContinuityLevel::G1
    } else if g0 {
        ContinuityLevel::G0
    } else {
        ContinuityLevel::None
    };
    Ok(ContinuityReport {
        level,
        position_gap,
        tangent_angle_gap,
        curvature_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveEnd {
    Start,
    End,
}

/// Osculating circle at one end of the curve.
pub fn end_curvature_circle(curve: &RationalCurve, end: CurveEnd) -> Result<Circle> {
    let (a, b) = curve.domain();
    let t = match end {
        CurveEnd::Start => a,
        CurveEnd::End => b,
    };
    let s = curvature(curve, t)?;
    if s.kappa.abs() < MIN_OSCULATING_CURVATURE {
        return Err(GeomError::InfiniteRadius { kappa: s.kappa });
    }
    Ok(Circle {
        center: s.point + s.normal / s.kappa,
        radius: 1.0 / s.kappa.abs(),
    })
}

/// `∫ κ² ds` by composite Simpson quadrature over `n` uniform parameter samples.
pub fn bending_energy(curve: &RationalCurve, n: usize) -> Result<f64> {
    if n < MIN_ENERGY_SAMPLES {
        return Err(GeomError::InvalidArgument(format!(
            "bending energy needs at least {MIN_ENERGY_SAMPLES} samples, got {n}"
        )));
    }
    let params = curve.uniform_parameters(n);
    let values = params
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let s = curvature(curve, t).map_err(|e| e.at_sample(i))?;
            let speed = curve.derivatives(t, 1)?[0].norm();
            Ok(s.kappa * s.kappa * speed)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (a, b) = curve.domain();
    let h = (b - a) / (n - 1) as f64;
    Ok(composite_simpson(&values, h))
}

/// Simpson's rule over equally spaced values; an odd interval count closes
/// with the 3/8 rule on the last three intervals.
fn composite_simpson(f: &[f64], h: f64) -> f64 {
    let intervals = f.len() - 1;
    let (simpson_end, tail) = if intervals.is_multiple_of(2) {
        (intervals, 0.0)
    } else {
        let e = intervals - 3;
        (e, 3.0 * h / 8.0 * (f[e] + 3.0 * f[e + 1] + 3.0 * f[e + 2] + f[e + 3]))
    };
    let mut sum = 0.0;
    for i in (0..simpson_end).step_by(2) {
        sum += f[i] + 4.0 * f[i + 1] + f[i + 2];
    }
    sum * h / 3.0 + tail
}
