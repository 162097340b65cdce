mod common;

use common::*;
use larg_lab::geometry::{is_triangular_set, smooth_generators};
use larg_lab::io::ShapeSpec;
use larg_lab::{LpShape, Metric, NormShape, Polygon, Rational, Scalar, Vec2};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn polygon_norm_matches_ray_oracle(poly in int_polygon(), x in rational_point()) {
        let verts = oracle_vertices(poly.generators());
        prop_assert_eq!(poly.norm(&x), ray_norm(&verts, &x));
    }

    #[test]
    fn exact_norm_axioms(poly in int_polygon(), x in rational_point(), y in rational_point(), k in small_rational()) {
        let nx = poly.norm(&x);
        prop_assert!(nx >= <Rational as Scalar>::zero());
        prop_assert_eq!(nx.is_zero(), x.is_zero());
        prop_assert_eq!(poly.norm(&x.scale(&k)), k.abs() * nx.clone());
        prop_assert!(poly.norm(&(&x + &y)) <= nx + poly.norm(&y));
        prop_assert_eq!(poly.distance(&x, &y), poly.distance(&y, &x));
    }

    #[test]
    fn float_norm_axioms(p in 1.1f64..8.0, x in (-50.0f64..50.0, -50.0f64..50.0), y in (-50.0f64..50.0, -50.0f64..50.0), k in -20.0f64..20.0) {
        let s = LpShape::new(p, 64).unwrap();
        let (x, y) = (Vec2::new(x.0, x.1), Vec2::new(y.0, y.1));
        let nx = s.norm(&x);
        prop_assert!(nx >= 0.0);
        let scaled = s.norm(&x.scale(&k));
        prop_assert!((scaled - k.abs() * nx).abs() <= 1e-12 * (1.0 + k.abs() * nx));
        prop_assert!(s.norm(&(&x + &y)) <= nx + s.norm(&y) + 1e-12 * (nx + s.norm(&y)));
    }

    #[test]
    fn sandwich_bound(poly in int_polygon(), x in rational_point()) {
        let (inner, outer) = poly.euclidean_radii();
        let e = x.norm2_f64();
        let n = poly.norm(&x).to_f64();
        // |x|_2 / outer <= |x| <= |x|_2 / inner
        prop_assert!(e / outer <= n * (1.0 + 1e-12) + 1e-12);
        prop_assert!(n <= e / inner * (1.0 + 1e-12) + 1e-12);
        let verts = oracle_vertices(poly.generators());
        let circum = verts.iter().map(|v| v.norm2_f64()).fold(0.0, f64::max);
        prop_assert!((outer - circum).abs() < 1e-9);
    }

    #[test]
    fn smooth_approximation_monotone(p in 1.2f64..6.0, theta in 0.0f64..std::f64::consts::TAU) {
        let s = LpShape::new(p, 16).unwrap();
        let x = Vec2::new(theta.cos() * 3.0, theta.sin() * 3.0);
        let exact = s.norm(&x);
        let mut prev = 0.0;
        for count in [3usize, 4, 8, 16, 32, 64, 128] {
            let gens = smooth_generators(p, count).unwrap();
            let approx = gens.iter().map(|a| a.dot(&x).abs()).fold(0.0, f64::max);
            prop_assert!(approx >= prev - 1e-12);
            prop_assert!(approx <= exact + 1e-12);
            prev = approx;
        }
    }

    #[test]
    fn triangular_invariance(
        poly in int_polygon(),
        pts in prop::array::uniform3(rational_point()),
        t in rational_point(),
    ) {
        let [a, b, c] = pts;
        let base = is_triangular_set(&poly, &a, &b, &c).unwrap();
        let (at, bt, ct) = (&a + &t, &b + &t, &c + &t);
        prop_assert_eq!(is_triangular_set(&poly, &at, &bt, &ct).unwrap(), base);
        prop_assert_eq!(is_triangular_set(&poly, &b, &c, &a).unwrap(), base);
        prop_assert_eq!(is_triangular_set(&poly, &c, &a, &b).unwrap(), base);
        prop_assert_eq!(is_triangular_set(&poly, &b, &a, &c).unwrap(), base);
    }

    #[test]
    fn shape_json_round_trip(poly in int_polygon()) {
        let text = serde_json::to_string(&ShapeSpec::from_polygon(&poly)).unwrap();
        let back: ShapeSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.polygon::<Rational>().unwrap(), poly);
    }
}

#[test]
fn lp_shape_json_round_trip() {
    let s = NormShape::SmoothLp(LpShape::new(3.0, 40).unwrap());
    let spec = ShapeSpec::from_norm_shape(&s);
    let back: ShapeSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(back.norm_shape().unwrap(), s);
}

#[test]
fn named_shapes() {
    let x = vq((1, 2), (-1, 3));
    assert_eq!(Polygon::<Rational>::linf().norm(&x), q(1, 2));
    assert_eq!(Polygon::<Rational>::l1().norm(&x), q(5, 6));
    // max(|x|, |y|, |x + y|)
    assert_eq!(Polygon::<Rational>::hexagon().norm(&x), q(1, 2));
    let reg = Polygon::<f64>::regular_hexagon();
    assert_eq!(reg.vertices().len(), 6);
    // unit apothem
    for v in reg.vertices() {
        assert!((v.norm2_f64() - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    }
}
