mod common;

use common::{bernstein_point, binomial};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use splinelab_core::surface::TensorOrder;
use splinelab_core::{
    make_half_circle_profile, revolve, ControlPoint, GeomError, IsolineDirection, KnotVector,
    Point, RationalCurve, RationalSurface, Similarity,
};

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn line_profile(a: Point, b: Point) -> RationalCurve {
    RationalCurve::bezier_from_points(&[a, b]).unwrap()
}

fn unit_cylinder() -> RationalSurface {
    revolve(&line_profile(Point::new(1.0, 0.0, 0.0), Point::new(1.0, 0.0, 1.0))).unwrap()
}

fn unit_sphere() -> RationalSurface {
    revolve(&make_half_circle_profile(1.0).unwrap()).unwrap()
}

/// Closed quartic profile: a loop in the x > 0 half-plane starting and
/// ending at the same point.
fn closed_quartic() -> RationalCurve {
    RationalCurve::bezier_from_points(&[
        Point::new(1.0, 0.0, 0.0),
        Point::new(3.0, 0.0, -1.0),
        Point::new(4.0, 0.0, 1.0),
        Point::new(2.0, 0.0, 2.0),
        Point::new(1.0, 0.0, 0.0),
    ])
    .unwrap()
}

/// Rational Bézier patch point as an explicit double Bernstein sum.
fn bernstein_patch(net: &[Vec<ControlPoint>], u: f64, v: f64) -> Point {
    let (m, n) = (net[0].len() - 1, net.len() - 1);
    let b = |deg: usize, i: usize, t: f64| binomial(deg, i) * t.powi(i as i32) * (1.0 - t).powi((deg - i) as i32);
    let mut num = Point::ORIGIN;
    let mut den = 0.0;
    for (j, row) in net.iter().enumerate() {
        for (i, cp) in row.iter().enumerate() {
            let w = b(m, i, u) * b(n, j, v) * cp.weight;
            num += cp.position * w;
            den += w;
        }
    }
    num / den
}

fn random_patch(rng: &mut StdRng, rows: usize, cols: usize) -> RationalSurface {
    let net = (0..rows)
        .map(|j| {
            (0..cols)
                .map(|i| {
                    let p = Point::new(
                        i as f64 + rng.random_range(-0.3..0.3),
                        j as f64 + rng.random_range(-0.3..0.3),
                        rng.random_range(-1.0..1.0),
                    );
                    ControlPoint::new(p, rng.random_range(0.5..2.0))
                })
                .collect()
        })
        .collect();
    RationalSurface::bezier(net).unwrap()
}

fn random_sized_patch(rng: &mut StdRng) -> RationalSurface {
    let (rows, cols) = (rng.random_range(2..6), rng.random_range(2..6));
    random_patch(rng, rows, cols)
}

#[test]
fn cylinder_and_sphere_of_revolution_are_exact() {
    let cyl = unit_cylinder();
    let sph = unit_sphere();
    for &u in &grid(32) {
        for &v in &grid(32) {
            let p = cyl.eval(u, v).unwrap();
            assert!((p.x.hypot(p.y) - 1.0).abs() < 1e-12, "cylinder ({u}, {v})");
            assert!((p.z - u).abs() < 1e-12);
            let q = sph.eval(u, v).unwrap();
            assert!((q.norm() - 1.0).abs() < 1e-12, "sphere ({u}, {v})");
        }
    }
    let mesh = cyl.sample_mesh(8, 8, false).unwrap();
    for vtx in &mesh.vertices {
        assert!((vtx.point.x.hypot(vtx.point.y) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn distance_to_axis_equals_profile_radius() {
    let profile = closed_quartic();
    let s = revolve(&profile).unwrap();
    for &u in &grid(33) {
        let p = profile.eval(u).unwrap();
        for &v in &grid(33) {
            let q = s.eval(u, v).unwrap();
            assert!((q.x.hypot(q.y) - p.x).abs() < 1e-12, "({u}, {v})");
            assert!((q.z - p.z).abs() < 1e-12);
        }
    }
}

#[test]
fn closed_profile_seam_is_exact() {
    let s = revolve(&closed_quartic()).unwrap();
    assert_eq!(s.net()[0], s.net()[8]);
    for &u in &grid(101) {
        assert_eq!(s.eval(u, 0.0).unwrap(), s.eval(u, 1.0).unwrap(), "u = {u}");
    }
    for &v in &grid(101) {
        let a = s.eval(0.0, v).unwrap();
        let b = s.eval(1.0, v).unwrap();
        assert!(a.distance(&b) < 1e-12, "profile closure at v = {v}");
    }
}

#[test]
fn quarter_turns_shift_the_angular_parameter() {
    let s = revolve(&closed_quartic()).unwrap();
    let mesh = s.sample_mesh(17, 33, false).unwrap();
    let quarter = Similarity::rotation_z(std::f64::consts::FRAC_PI_2);
    for k in 1..4 {
        let mut m = Similarity::identity();
        for _ in 0..k {
            m = m.then(&quarter);
        }
        for j in 0..33 {
            let shifted = (j + 8 * k) % 32;
            for i in 0..17 {
                let rotated = m.apply(mesh.vertex(i, j).point);
                let target = mesh.vertex(i, shifted).point;
                assert!(rotated.distance(&target) < 1e-12, "k={k} i={i} j={j}");
            }
        }
    }
}

#[test]
fn sphere_normals_are_radial() {
    let s = unit_sphere();
    let mesh = s.sample_mesh(17, 17, true).unwrap();
    let mut singular = 0;
    for vtx in &mesh.vertices {
        match vtx.normal {
            Some(n) => assert!((n.dot(&vtx.point).abs() - 1.0).abs() < 1e-9, "({}, {})", vtx.u, vtx.v),
            None => {
                assert!(vtx.singular);
                assert!(vtx.point.x.hypot(vtx.point.y) < 1e-12, "only poles are singular");
                singular += 1;
            }
        }
    }
    assert_eq!(singular, 2 * 17);
}

#[test]
fn revolve_rejects_profiles_off_the_half_plane() {
    let off_plane = line_profile(Point::new(1.0, 0.5, 0.0), Point::new(1.0, 0.0, 1.0));
    assert!(matches!(revolve(&off_plane), Err(GeomError::Precondition(_))));
    let crossing = line_profile(Point::new(-1.0, 0.0, 0.0), Point::new(1.0, 0.0, 1.0));
    assert!(matches!(revolve(&crossing), Err(GeomError::Precondition(_))));
}

#[test]
fn boundary_isolines_equal_boundary_control_curves() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let s = random_sized_patch(&mut rng);
        let net = s.net();
        let rows = net.len();
        let cols = net[0].len();

        let v_iso = s.isolines(IsolineDirection::VFixed, &[0.0, 1.0]).unwrap();
        assert_eq!(v_iso[0].curve, s.row_curve(0).unwrap());
        assert_eq!(v_iso[1].curve, s.row_curve(rows - 1).unwrap());

        let u_iso = s.isolines(IsolineDirection::UFixed, &[0.0, 1.0]).unwrap();
        assert_eq!(u_iso[0].curve, s.column_curve(0).unwrap());
        assert_eq!(u_iso[1].curve, s.column_curve(cols - 1).unwrap());
    }
}

#[test]
fn interior_isolines_lie_on_the_surface() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..20 {
        let s = random_sized_patch(&mut rng);
        let values = [0.1, 0.5, 0.77];
        for iso in s.isolines(IsolineDirection::VFixed, &values).unwrap() {
            for &t in &grid(50) {
                let d = iso.curve.eval(t).unwrap().distance(&s.eval(t, iso.value).unwrap());
                assert!(d < 1e-12, "v = {} t = {t}: {d:e}", iso.value);
            }
        }
        for iso in s.isolines(IsolineDirection::UFixed, &values).unwrap() {
            for &t in &grid(50) {
                let d = iso.curve.eval(t).unwrap().distance(&s.eval(iso.value, t).unwrap());
                assert!(d < 1e-12, "u = {} t = {t}: {d:e}", iso.value);
            }
        }
    }
}

#[test]
fn isolines_need_bezier_patches_and_unit_parameters() {
    let s = unit_sphere();
    assert!(matches!(s.isolines(IsolineDirection::UFixed, &[0.5]), Err(GeomError::Form(_))));
    let mut rng = StdRng::seed_from_u64(3);
    let p = random_patch(&mut rng, 3, 3);
    assert!(p.isolines(IsolineDirection::UFixed, &[1.5]).is_err());
    assert!(p.isolines(IsolineDirection::VFixed, &[f64::NAN]).is_err());
}

#[test]
fn patch_evaluation_matches_bernstein_sum() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..10 {
        let s = random_patch(&mut rng, 4, 3);
        for &u in &grid(11) {
            for &v in &grid(11) {
                let d = s.eval(u, v).unwrap().distance(&bernstein_patch(s.net(), u, v));
                assert!(d < 1e-12);
            }
        }
    }
}

#[test]
fn rows_of_a_patch_match_curve_evaluation() {
    let mut rng = StdRng::seed_from_u64(14);
    let s = random_patch(&mut rng, 3, 4);
    let row = s.row_curve(0).unwrap();
    for &u in &grid(20) {
        assert!(row.eval(u).unwrap().distance(&bernstein_point(&s.net()[0], u)) < 1e-12);
    }
}

#[test]
fn control_net_shape_is_validated() {
    let row = vec![ControlPoint::from(Point::ORIGIN); 3];
    let net = vec![row.clone(), row[..2].to_vec()];
    assert!(matches!(RationalSurface::bezier(net), Err(GeomError::Form(_))));
    let net = vec![row.clone(); 3];
    let ku = KnotVector::bezier(2).unwrap();
    let kv = KnotVector::bezier(3).unwrap();
    assert!(RationalSurface::new(net, ku, kv).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tensor_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = if seed % 3 == 0 {
            unit_sphere()
        } else {
            random_sized_patch(&mut rng)
        };
        for _ in 0..100 {
            let (u, v) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
            let a = s.eval_with_order(u, v, TensorOrder::RowsFirst).unwrap();
            let b = s.eval_with_order(u, v, TensorOrder::ColumnsFirst).unwrap();
            prop_assert!(a.distance(&b) < 1e-12);
        }
    }

    #[test]
    fn revolution_preserves_profile_radius(
        xs in prop::collection::vec(0.0f64..5.0, 3..7),
        zs in prop::collection::vec(-5.0f64..5.0, 7),
        ws in prop::collection::vec(0.3f64..3.0, 7),
    ) {
        let control: Vec<ControlPoint> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| ControlPoint::new(Point::new(x, 0.0, zs[i]), ws[i]))
            .collect();
        let profile = RationalCurve::bezier(control).unwrap();
        let s = revolve(&profile).unwrap();
        for &u in &grid(9) {
            let p = profile.eval(u).unwrap();
            for &v in &grid(17) {
                let q = s.eval(u, v).unwrap();
                prop_assert!((q.x.hypot(q.y) - p.x).abs() < 1e-12 * p.x.max(1.0));
                prop_assert!((q.z - p.z).abs() < 1e-12 * p.z.abs().max(1.0));
            }
        }
    }

    #[test]
    fn surface_partials_match_central_differences(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = random_patch(&mut rng, 3, 4);
        let h = 1e-6;
        for _ in 0..10 {
            let (u, v) = (rng.random_range(0.1..0.9), rng.random_range(0.1..0.9));
            let (_, du, dv) = s.partials(u, v).unwrap();
            let fu = (s.eval(u + h, v).unwrap() - s.eval(u - h, v).unwrap()) / (2.0 * h);
            let fv = (s.eval(u, v + h).unwrap() - s.eval(u, v - h).unwrap()) / (2.0 * h);
            prop_assert!((du - fu).norm() < 1e-5 * du.norm().max(1.0));
            prop_assert!((dv - fv).norm() < 1e-5 * dv.norm().max(1.0));
        }
    }
}
