#![allow(dead_code)]

use larg_lab::{Polygon, Rational, Vec2};
use num::{BigInt, Signed, Zero};
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn vq(x: (i64, i64), y: (i64, i64)) -> Vec2<Rational> {
    Vec2::new(q(x.0, x.1), q(y.0, y.1))
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-400i64..=400, 1i64..=37).prop_map(|(n, d)| q(n, d))
}

pub fn rational_point() -> impl Strategy<Value = Vec2<Rational>> {
    (small_rational(), small_rational()).prop_map(|(x, y)| Vec2::new(x, y))
}

/// Random shapes with two to four pairwise non-parallel integer generators.
pub fn int_polygon() -> impl Strategy<Value = Polygon<Rational>> {
    prop::collection::vec((-3i64..=3, -3i64..=3), 2..=4).prop_filter_map("degenerate", |gens| {
        let mut kept: Vec<(i64, i64)> = Vec::new();
        for g in gens {
            if g != (0, 0) && kept.iter().all(|k| k.0 * g.1 - k.1 * g.0 != 0) {
                kept.push(g);
            }
        }
        if kept.len() < 2 {
            return None;
        }
        Polygon::from_int_generators(&kept).ok()
    })
}

/// Vertices of `{x : |a.x| <= 1 for all a}`, rebuilt from the generators
/// alone and sorted by angle.
pub fn oracle_vertices(gens: &[Vec2<Rational>]) -> Vec<Vec2<Rational>> {
    let one = q(1, 1);
    let mut out: Vec<Vec2<Rational>> = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            for sa in [-1i64, 1] {
                for sb in [-1i64, 1] {
                    // a.x = sa, b.x = sb
                    let det = a.x.clone() * b.y.clone() - a.y.clone() * b.x.clone();
                    if det.is_zero() {
                        continue;
                    }
                    let (ra, rb) = (q(sa, 1), q(sb, 1));
                    let x = (ra.clone() * b.y.clone() - rb.clone() * a.y.clone()) / det.clone();
                    let y = (a.x.clone() * rb - b.x.clone() * ra) / det;
                    let v = Vec2::new(x, y);
                    if gens.iter().all(|g| g.dot(&v).abs() <= one) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out.sort_by(|u, v| {
        let angle = |w: &Vec2<Rational>| w.to_f64().y.atan2(w.to_f64().x);
        let (au, av) = (angle(u), angle(v));
        au.total_cmp(&av)
    });
    out
}

/// Norm as `1 / s`, where `s x` is the point at which the ray from the
/// origin through `x` leaves the polygon with the given vertices.
pub fn ray_norm(vertices: &[Vec2<Rational>], x: &Vec2<Rational>) -> Rational {
    if x.x.is_zero() && x.y.is_zero() {
        return Rational::zero();
    }
    let n = vertices.len();
    for i in 0..n {
        let (p, r) = (&vertices[i], &vertices[(i + 1) % n]);
        let e = Vec2::new(r.x.clone() - p.x.clone(), r.y.clone() - p.y.clone());
        // s x = p + u e
        let det = x.x.clone() * (-e.y.clone()) + e.x.clone() * x.y.clone();
        if det.is_zero() {
            continue;
        }
        let s = (p.x.clone() * (-e.y.clone()) + e.x.clone() * p.y.clone()) / det.clone();
        let u = (x.x.clone() * p.y.clone() - x.y.clone() * p.x.clone()) / det;
        if s.is_positive() && !u.is_negative() && u <= q(1, 1) {
            return q(1, 1) / s;
        }
    }
    panic!("ray misses the polygon");
}
