//! Points, vectors and weighted control points.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point (or free vector) in model space. Planar entities keep `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

/// Vectors share the point representation.
pub type Vector = Point;

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point { x, y, z }
    }

    pub const fn xy(x: f64, y: f64) -> Self {
        Point { x, y, z: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Point) -> Point {
        Point::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(&self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| *self / n)
    }

    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        *self * (1.0 - t) + *other * t
    }

    /// Angle between two vectors in `[0, π]`, accurate for nearly parallel inputs.
    pub fn angle_to(&self, other: &Point) -> f64 {
        self.cross(other).norm().atan2(self.dot(other))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        p * self
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, s: f64) -> Point {
        Point::new(self.x / s, self.y / s, self.z / s)
    }
}

/// A control point with its rational weight. Weight 1 is the polynomial case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    #[serde(flatten)]
    pub position: Point,
    #[serde(rename = "w", default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

impl ControlPoint {
    pub const fn new(position: Point, weight: f64) -> Self {
        ControlPoint { position, weight }
    }

    pub const fn unweighted(position: Point) -> Self {
        ControlPoint { position, weight: 1.0 }
    }

    pub(crate) fn homogeneous(&self) -> Homogeneous {
        Homogeneous {
            point: self.position * self.weight,
            weight: self.weight,
        }
    }
}

impl From<Point> for ControlPoint {
    fn from(p: Point) -> Self {
        ControlPoint::unweighted(p)
    }
}

/// A point in homogeneous (weighted) coordinates: `(w·x, w·y, w·z, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Homogeneous {
    pub point: Point,
    pub weight: f64,
}

impl Homogeneous {
    pub const ZERO: Homogeneous = Homogeneous {
        point: Point::ORIGIN,
        weight: 0.0,
    };

    pub fn project(&self) -> Point {
        self.point / self.weight
    }

    pub fn lerp(&self, other: &Homogeneous, t: f64) -> Homogeneous {
        Homogeneous {
            point: self.point.lerp(&other.point, t),
            weight: self.weight * (1.0 - t) + other.weight * t,
        }
    }

    pub fn scaled(&self, s: f64) -> Homogeneous {
        Homogeneous {
            point: self.point * s,
            weight: self.weight * s,
        }
    }

    pub fn add(&self, other: &Homogeneous) -> Homogeneous {
        Homogeneous {
            point: self.point + other.point,
            weight: self.weight + other.weight,
        }
    }

    pub fn sub(&self, other: &Homogeneous) -> Homogeneous {
        Homogeneous {
            point: self.point - other.point,
            weight: self.weight - other.weight,
        }
    }

    pub fn to_control(self) -> ControlPoint {
        ControlPoint::new(self.project(), self.weight)
    }
}

/// A rigid motion or uniform scaling applied to model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    /// Row-major 3×3 linear part (rotation times scale).
    pub linear: [[f64; 3]; 3],
    pub translation: Vector,
}

impl Similarity {
    pub fn identity() -> Self {
        Similarity {
            linear: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: Point::ORIGIN,
        }
    }

    pub fn translation(v: Vector) -> Self {
        Similarity {
            translation: v,
            ..Similarity::identity()
        }
    }

    /// Rotation by `angle` radians about the z-axis.
    pub fn rotation_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Similarity {
            linear: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            translation: Point::ORIGIN,
        }
    }

    /// Uniform scaling by `factor` about `center`.
    pub fn scaling(factor: f64, center: Point) -> Self {
        Similarity {
            linear: [[factor, 0.0, 0.0], [0.0, factor, 0.0], [0.0, 0.0, factor]],
            translation: center * (1.0 - factor),
        }
    }

    /// Applies `self` first, then `next`.
    pub fn then(&self, next: &Similarity) -> Similarity {
        let mut linear = [[0.0; 3]; 3];
        for (i, row) in linear.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| next.linear[i][k] * self.linear[k][j]).sum();
            }
        }
        Similarity {
            linear,
            translation: next.apply_vector(self.translation) + next.translation,
        }
    }

    pub fn apply_vector(&self, v: Vector) -> Vector {
        let m = &self.linear;
        Point::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn apply(&self, p: Point) -> Point {
        self.apply_vector(p) + self.translation
    }
}
