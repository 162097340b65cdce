mod common;

use common::*;
use larg_lab::anchoring::{
    certify, generate_grid, good_enumeration, grid_offsets, grid_summary, max_circular_gap,
    reconstruct_from_anchor, validate_enumeration,
};
use larg_lab::dense_set::{sample_poisson_window, Window};
use larg_lab::geometry::is_triangular_set;
use larg_lab::io::EnumerationFile;
use larg_lab::{Metric, Polygon, Rational, Vec2};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grid_levels_nest(b in rational_point(), c in rational_point()) {
        let gens = Polygon::<Rational>::hexagon().generators().to_vec();
        let fam = generate_grid(&[b, c], &gens, 2, 1).unwrap();
        for level in 0..2 {
            prop_assert!(fam.line_count(level) <= fam.line_count(level + 1));
            for g in 0..gens.len() {
                for off in fam.offsets(level, g) {
                    prop_assert!(fam.contains(level + 1, g, &off));
                }
            }
        }
    }

    #[test]
    fn reconstruction_under_symmetry(
        anchor in prop::array::uniform3(rational_point()),
        x in rational_point(),
        t in rational_point(),
        sym in 0usize..12,
    ) {
        let hex = Polygon::<Rational>::hexagon();
        let shrink = q(1, 40);
        let anchor = anchor.map(|a| a.scale(&shrink));
        let x = x.scale(&shrink);
        prop_assume!(is_triangular_set(&hex, &anchor[0], &anchor[1], &anchor[2]).unwrap());
        prop_assume!(certify(&hex, &[&anchor[0], &anchor[1], &anchor[2]], &x).is_ok());
        let syms = hex.linear_symmetries();
        let l = &syms[sym % syms.len()];
        let f = |p: &Vec2<Rational>| l.apply(p) + t.clone();
        let images = anchor.clone().map(|a| f(&a));
        let dists = [0, 1, 2].map(|i| hex.distance(&x, &anchor[i]));
        let y = reconstruct_from_anchor(&hex, &anchor, &images, &x, &dists).unwrap();
        prop_assert_eq!(y, f(&x));
    }

    #[test]
    fn enumerations_validate(seed in any::<u64>()) {
        let ps = sample_poisson_window::<f64>(&Window::square(2.0).unwrap(), 40.0, seed).unwrap();
        let hex = Polygon::<f64>::hexagon();
        match good_enumeration(&ps, &hex) {
            Ok(e) => {
                validate_enumeration(&e, &ps, &hex).unwrap();
                prop_assert_eq!(e.len() + e.unplaced.len(), ps.len());
            }
            Err(larg_lab::Error::NoTriangularSet) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn hexagon_group_has_twelve_elements() {
    let hex = Polygon::<Rational>::hexagon();
    let syms = hex.linear_symmetries();
    assert_eq!(syms.len(), 12);
    // each maps the vertex set onto itself
    for l in &syms {
        let mut img: Vec<_> = hex.vertices().iter().map(|v| l.apply(v)).collect();
        let mut orig = hex.vertices().to_vec();
        img.sort_by_key(|v| v.key());
        orig.sort_by_key(|v| v.key());
        assert_eq!(img, orig);
    }
}

#[test]
fn dense_samples_are_mostly_placed() {
    let hex = Polygon::<f64>::hexagon();
    for seed in 0..5u64 {
        let ps = sample_poisson_window::<f64>(&Window::square(2.0).unwrap(), 100.0, seed).unwrap();
        let e = good_enumeration(&ps, &hex).unwrap();
        validate_enumeration(&e, &ps, &hex).unwrap();
        let placed = e.len() as f64 / ps.len() as f64;
        assert!(placed > 0.9, "seed {seed}: placed {placed}");
    }
}

#[test]
fn rational_enumeration_round_trips() {
    let hex = Polygon::<Rational>::hexagon();
    let ps = sample_poisson_window::<Rational>(&Window::unit(), 60.0, 4).unwrap();
    let e = good_enumeration(&ps, &hex).unwrap();
    validate_enumeration(&e, &ps, &hex).unwrap();
    let file = EnumerationFile::from_enumeration(&e);
    let text = serde_json::to_string(&file).unwrap();
    let back: EnumerationFile = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_enumeration::<Rational>().unwrap(), e);
}

#[test]
fn consecutive_points_are_close_and_certified() {
    // independent re-check of the defining conditions
    let hex = Polygon::<Rational>::hexagon();
    let ps = sample_poisson_window::<Rational>(&Window::unit(), 50.0, 12).unwrap();
    let e = good_enumeration(&ps, &hex).unwrap();
    let at = |k: usize| &ps.points[e.order[k]];
    for k in 1..e.len() {
        assert!(hex.distance(at(k - 1), at(k)) < q(1, 1));
    }
    for (k, cert) in e.certificates.iter().enumerate().skip(3) {
        let c = cert.as_ref().unwrap();
        for (r, a) in c.refs.iter().zip(&c.directions) {
            assert!(*r < k);
            let diff = at(k) - at(*r);
            assert_eq!(a.dot(&diff), hex.norm(&diff));
        }
    }
}

#[test]
fn gap_and_summary() {
    let gens = [Vec2::<Rational>::from_ints(1, 0), Vec2::from_ints(0, 1), Vec2::from_ints(1, 1)];
    let base = [Vec2::zero(), vq((2, 5), (0, 1))];
    let fam = generate_grid(&base, &gens, 3, 1).unwrap();
    let summary = grid_summary(&fam);
    assert_eq!(summary.len(), 4);
    assert!(summary.windows(2).all(|w| w[0].lines <= w[1].lines));
    let offs: Vec<f64> = grid_offsets(&fam, &gens[0])
        .unwrap()
        .iter()
        .map(larg_lab::Scalar::to_f64)
        .collect();
    // fifths only: the gap is exactly 1/5
    assert!((max_circular_gap(&offs) - 0.2).abs() < 1e-12, "{offs:?}");
}
