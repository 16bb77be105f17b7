//! Curve and surface kernel for computer-aided geometric design.
//!
//! - [`curve`]: Bézier, B-spline and NURBS curves in one rational representation.
//! - [`construct`]: the exact NURBS circle and the cubic Bézier spiral.
//! - [`interrogate`]: curvature, curvature combs, spiral checks, joint continuity.
//! - [`surface`]: tensor-product surfaces, surfaces of revolution, isolines.
//! - [`model`]: the JSON model document.
//! - [`iges`]: IGES 5.3 reader/writer for entities 126 and 128.

pub mod construct;
pub mod curve;
pub mod error;
pub mod iges;
pub mod interrogate;
pub mod knots;
pub mod model;
pub mod point;
pub mod surface;

pub use construct::{make_circle_nurbs, make_cubic_spiral, make_half_circle_profile, SpiralSpec};
pub use curve::RationalCurve;
pub use error::GeomError;
pub use interrogate::{
    bending_energy, check_continuity, check_spiral, curvature, curvature_comb, curvature_comb_auto,
    end_curvature_circle, Circle, ContinuityLevel, ContinuityReport, ContinuityTolerances,
    CurvatureComb, CurvatureSample, CurveEnd, SpiralReport,
};
pub use knots::KnotVector;
pub use model::{ModelDocument, ModelError, NamedCurve, NamedSurface};
pub use point::{ControlPoint, Point, Similarity, Vector};
pub use iges::{read_iges, write_iges, ImportReport, IgesError};
pub use surface::{revolve, Isoline, IsolineDirection, RationalSurface, SurfaceMesh};
