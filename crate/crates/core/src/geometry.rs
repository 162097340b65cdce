//! Planar vectors, lines and norm-derived metrics.
//!
//! A polygonal shape is stored as one generator per side direction, scaled so
//! that `a . p = 1` on the side it supports; the norm is then
//! `max_a |a . x|`. Smooth `L_p` shapes evaluate in closed form and expose a
//! finite generator approximation separately.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Vec2<S> {
    /// Panics on non-finite coordinates.
    pub fn new(x: S, y: S) -> Self {
        assert!(x.is_finite() && y.is_finite(), "non-finite coordinate");
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::new(S::from_i64(x), S::from_i64(y))
    }

    pub fn from_f64(x: f64, y: f64) -> Option<Self> {
        Some(Self::new(S::from_f64(x)?, S::from_f64(y)?))
    }

    pub fn dot(&self, o: &Self) -> S {
        self.x.clone() * o.x.clone() + self.y.clone() * o.y.clone()
    }

    /// z-component of the 3D cross product.
    pub fn cross(&self, o: &Self) -> S {
        self.x.clone() * o.y.clone() - self.y.clone() * o.x.clone()
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::new(self.x.clone() * k.clone(), self.y.clone() * k.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Linear dependence, with the floating-point dead zone applied to the cross product.
    pub fn is_parallel(&self, o: &Self) -> bool {
        self.cross(o).sign() == Ordering::Equal
    }

    pub fn to_f64(&self) -> Vec2<f64> {
        Vec2::new(self.x.to_f64(), self.y.to_f64())
    }

    pub fn norm2_f64(&self) -> f64 {
        self.x.to_f64().hypot(self.y.to_f64())
    }

    pub fn key(&self) -> (S::Key, S::Key) {
        (self.x.key(), self.y.key())
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.x.approx_eq(&o.x, tol) && self.y.approx_eq(&o.y, tol)
    }
}

impl<S: Scalar> Add for Vec2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Vec2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Add for &Vec2<S> {
    type Output = Vec2<S>;
    fn add(self, o: Self) -> Vec2<S> {
        Vec2::new(self.x.clone() + o.x.clone(), self.y.clone() + o.y.clone())
    }
}

impl<S: Scalar> Sub for &Vec2<S> {
    type Output = Vec2<S>;
    fn sub(self, o: Self) -> Vec2<S> {
        Vec2::new(self.x.clone() - o.x.clone(), self.y.clone() - o.y.clone())
    }
}

impl<S: Scalar> Neg for Vec2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec2::new(-self.x, -self.y)
    }
}

impl<S: Scalar> Mul<S> for Vec2<S> {
    type Output = Self;
    fn mul(self, k: S) -> Self {
        Vec2::new(self.x * k.clone(), self.y * k)
    }
}

/// 2x2 matrix stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2<S> {
    pub rows: [Vec2<S>; 2],
}

impl<S: Scalar> Mat2<S> {
    pub fn from_rows(r0: Vec2<S>, r1: Vec2<S>) -> Self {
        Self { rows: [r0, r1] }
    }

    pub fn from_cols(c0: Vec2<S>, c1: Vec2<S>) -> Self {
        Self::from_rows(Vec2::new(c0.x, c1.x), Vec2::new(c0.y, c1.y))
    }

    pub fn identity() -> Self {
        Self::from_rows(Vec2::from_ints(1, 0), Vec2::from_ints(0, 1))
    }

    pub fn apply(&self, v: &Vec2<S>) -> Vec2<S> {
        Vec2::new(self.rows[0].dot(v), self.rows[1].dot(v))
    }

    pub fn det(&self) -> S {
        self.rows[0].cross(&self.rows[1])
    }

    pub fn transpose(&self) -> Self {
        Self::from_cols(self.rows[0].clone(), self.rows[1].clone())
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.sign() == Ordering::Equal {
            return None;
        }
        let [r0, r1] = &self.rows;
        Some(Self::from_rows(
            Vec2::new(r1.y.clone() / det.clone(), -r0.y.clone() / det.clone()),
            Vec2::new(-r1.x.clone() / det.clone(), r0.x.clone() / det),
        ))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let t = o.transpose();
        Self::from_rows(
            Vec2::new(self.rows[0].dot(&t.rows[0]), self.rows[0].dot(&t.rows[1])),
            Vec2::new(self.rows[1].dot(&t.rows[0]), self.rows[1].dot(&t.rows[1])),
        )
    }

    /// Solves `self * x = rhs`.
    pub fn solve(&self, rhs: &Vec2<S>) -> Option<Vec2<S>> {
        self.inverse().map(|inv| inv.apply(rhs))
    }
}

/// The line `normal . x = offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line<S> {
    pub normal: Vec2<S>,
    pub offset: S,
}

impl<S: Scalar> Line<S> {
    pub fn new(normal: Vec2<S>, offset: S) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::ZeroNormal);
        }
        Ok(Self { normal, offset })
    }

    /// Line with the given normal through `p`.
    pub fn through(normal: Vec2<S>, p: &Vec2<S>) -> Result<Self> {
        let offset = normal.dot(p);
        Self::new(normal, offset)
    }

    pub fn is_parallel(&self, o: &Self) -> bool {
        self.normal.is_parallel(&o.normal)
    }

    /// `normal . p - offset`.
    pub fn eval(&self, p: &Vec2<S>) -> S {
        self.normal.dot(p) - self.offset.clone()
    }

    /// Which open half-plane holds `p`; `Equal` on the line.
    pub fn side(&self, p: &Vec2<S>) -> Ordering {
        self.eval(p).sign()
    }

    /// Same point set, equation multiplied by `k`.
    pub fn scaled(&self, k: &S) -> Self {
        Self {
            normal: self.normal.scale(k),
            offset: self.offset.clone() * k.clone(),
        }
    }

    /// Parallel at metric distance `|z|`, assuming the normal is a unit-scaled generator.
    pub fn integer_parallel(&self, z: i64) -> Self {
        Self {
            normal: self.normal.clone(),
            offset: self.offset.clone() + S::from_i64(z),
        }
    }

    /// Metric distance to a parallel line, measured in units where `self.normal`
    /// has support value 1 on the unit ball. `None` if not parallel.
    pub fn parallel_distance(&self, o: &Self) -> Option<S> {
        if !self.is_parallel(o) {
            return None;
        }
        // o.normal = mu * self.normal
        let mu = if self.normal.x.sign() != Ordering::Equal {
            o.normal.x.clone() / self.normal.x.clone()
        } else {
            o.normal.y.clone() / self.normal.y.clone()
        };
        Some((self.offset.clone() - o.offset.clone() / mu).abs())
    }

    pub fn intersection(&self, o: &Self) -> Option<Vec2<S>> {
        Mat2::from_rows(self.normal.clone(), o.normal.clone())
            .solve(&Vec2::new(self.offset.clone(), o.offset.clone()))
    }
}

/// A norm-derived metric on the plane.
pub trait Metric<S: Scalar>: Send + Sync {
    fn norm(&self, x: &Vec2<S>) -> S;

    fn distance(&self, x: &Vec2<S>, y: &Vec2<S>) -> S {
        self.norm(&(x - y))
    }

    /// `floor(d(x, y))`; refuses boundary-ambiguous values in floating mode.
    fn truncated_distance(&self, x: &Vec2<S>, y: &Vec2<S>) -> Result<i64> {
        let d = self.distance(x, y);
        d.checked_floor()
            .ok_or(Error::BoundaryAmbiguous { value: d.to_f64() })
    }

    /// `(inner, outer)`: Euclidean radii of the largest inscribed and smallest
    /// circumscribed discs of the unit ball, so that
    /// `|x|_2 / outer <= |x| <= |x|_2 / inner`.
    fn euclidean_radii(&self) -> (f64, f64);

    fn is_box(&self) -> bool {
        false
    }

    /// Number of generator direction classes; `None` for smooth shapes.
    fn direction_classes(&self) -> Option<usize> {
        None
    }

    /// Generators `a` attaining `|v| = a . v` (several on ties).
    fn determining_directions(&self, v: &Vec2<S>) -> Vec<Vec2<S>>;
}

/// Centrally symmetric convex polygon given by one generator per side direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon<S> {
    generators: Vec<Vec2<S>>,
    /// Counter-clockwise.
    vertices: Vec<Vec2<S>>,
}

impl<S: Scalar> Polygon<S> {
    pub fn new(generators: Vec<Vec2<S>>) -> Result<Self> {
        if generators.len() < 2 {
            return Err(Error::InvalidShape(
                "at least two generator directions are required".into(),
            ));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.is_zero() {
                return Err(Error::InvalidShape(format!("generator {i} is zero")));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if generators[i].is_parallel(&generators[j]) {
                    return Err(Error::ParallelGenerators(i, j));
                }
            }
        }
        let vertices = enumerate_vertices(&generators);
        let poly = Self {
            generators,
            vertices,
        };
        for i in 0..poly.generators.len() {
            let on_face = poly
                .vertices
                .iter()
                .filter(|v| (poly.generators[i].dot(v) - S::one()).sign() == Ordering::Equal)
                .count();
            if on_face != 2 {
                return Err(Error::InvalidShape(format!(
                    "generator {i} does not support a side of the polygon \
                     (redundant or wrongly scaled)"
                )));
            }
        }
        Ok(poly)
    }

    pub fn from_int_generators(gens: &[(i64, i64)]) -> Result<Self> {
        Self::new(gens.iter().map(|&(x, y)| Vec2::from_ints(x, y)).collect())
    }

    /// Unit square, `L_inf`.
    pub fn linf() -> Self {
        Self::from_int_generators(&[(1, 0), (0, 1)]).expect("valid shape")
    }

    /// Diamond, `L_1`.
    pub fn l1() -> Self {
        Self::from_int_generators(&[(1, 1), (1, -1)]).expect("valid shape")
    }

    /// Affine-regular hexagon `{|x| <= 1, |y| <= 1, |x + y| <= 1}`; exact in every mode.
    pub fn hexagon() -> Self {
        Self::from_int_generators(&[(1, 0), (0, 1), (1, 1)]).expect("valid shape")
    }

    /// Parallelogram with the two given side normals.
    pub fn parallelogram(a1: Vec2<S>, a2: Vec2<S>) -> Result<Self> {
        Self::new(vec![a1, a2])
    }

    pub fn generators(&self) -> &[Vec2<S>] {
        &self.generators
    }

    pub fn vertices(&self) -> &[Vec2<S>] {
        &self.vertices
    }

    /// Index and sign `s` such that `a == s * generators[index]`.
    pub fn generator_index(&self, a: &Vec2<S>) -> Option<(usize, bool)> {
        self.generators.iter().enumerate().find_map(|(i, g)| {
            if g.approx_eq(a, 1e-12) {
                Some((i, true))
            } else if (-g.clone()).approx_eq(a, 1e-12) {
                Some((i, false))
            } else {
                None
            }
        })
    }

    /// Side of the polygon where `a . x = 1`, endpoints in counter-clockwise order.
    pub fn face_of(&self, a: &Vec2<S>) -> Result<(Vec2<S>, Vec2<S>)> {
        self.generator_index(a).ok_or(Error::NotAGenerator)?;
        let on_face =
            |v: &Vec2<S>| (a.dot(v) - S::one()).sign() == Ordering::Equal;
        let m = self.vertices.len();
        (0..m)
            .map(|k| (&self.vertices[k], &self.vertices[(k + 1) % m]))
            .find(|(u, w)| on_face(u) && on_face(w))
            .map(|(u, w)| (u.clone(), w.clone()))
            .ok_or(Error::NotAGenerator)
    }

    /// Linear maps that send the polygon onto itself (the isometries fixing 0).
    pub fn linear_symmetries(&self) -> Vec<Mat2<S>> {
        let vs = &self.vertices;
        let m = vs.len();
        let src = Mat2::from_cols(vs[0].clone(), vs[1].clone());
        let src_inv = match src.inverse() {
            Some(inv) => inv,
            None => return vec![Mat2::identity()],
        };
        let mut out = Vec::new();
        for k in 0..m {
            for step in [1usize, m - 1] {
                let img = Mat2::from_cols(vs[k].clone(), vs[(k + step) % m].clone());
                let lin = img.mul(&src_inv);
                let ok = (0..m).all(|t| {
                    lin.apply(&vs[t])
                        .approx_eq(&vs[(k + step * t) % m], 1e-9)
                });
                if ok {
                    out.push(lin);
                }
            }
        }
        out
    }
}

fn enumerate_vertices<S: Scalar>(gens: &[Vec2<S>]) -> Vec<Vec2<S>> {
    let mut found: Vec<Vec2<S>> = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let m = Mat2::from_rows(gens[i].clone(), gens[j].clone());
            let Some(inv) = m.inverse() else { continue };
            for si in [1i64, -1] {
                for sj in [1i64, -1] {
                    let v = inv.apply(&Vec2::from_ints(si, sj));
                    let inside = gens
                        .iter()
                        .all(|g| (g.dot(&v).abs() - S::one()).sign() != Ordering::Greater);
                    if inside && !found.iter().any(|u| u.approx_eq(&v, 1e-9)) {
                        found.push(v);
                    }
                }
            }
        }
    }
    found.sort_by(ccw_order);
    found
}

/// Angular order starting at the positive x axis.
fn ccw_order<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>) -> Ordering {
    let lower = |v: &Vec2<S>| v.y < S::zero() || (v.y.is_zero() && v.x < S::zero());
    lower(a).cmp(&lower(b)).then_with(|| {
        let c = a.cross(b);
        if c > S::zero() {
            Ordering::Less
        } else if c < S::zero() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// `a * x`, skipping the multiplication for coefficients 0 and +-1; exact
/// arithmetic spends most of its time normalising products.
fn coeff_mul<S: Scalar>(a: &S, x: &S) -> Option<S> {
    if a.is_zero() {
        None
    } else if *a == S::one() {
        Some(x.clone())
    } else if *a == -S::one() {
        Some(-x.clone())
    } else {
        Some(a.clone() * x.clone())
    }
}

fn sparse_dot<S: Scalar>(g: &Vec2<S>, x: &Vec2<S>) -> S {
    match (coeff_mul(&g.x, &x.x), coeff_mul(&g.y, &x.y)) {
        (Some(u), Some(v)) => u + v,
        (Some(u), None) | (None, Some(u)) => u,
        (None, None) => S::zero(),
    }
}

impl<S: Scalar> Metric<S> for Polygon<S> {
    fn norm(&self, x: &Vec2<S>) -> S {
        self.generators
            .iter()
            .map(|g| sparse_dot(g, x).abs())
            .reduce(S::max_of)
            .expect("polygon has generators")
    }

    fn euclidean_radii(&self) -> (f64, f64) {
        let inner = self
            .generators
            .iter()
            .map(|g| 1.0 / g.norm2_f64())
            .fold(f64::INFINITY, f64::min);
        let outer = self
            .vertices
            .iter()
            .map(Vec2::norm2_f64)
            .fold(0.0, f64::max);
        (inner, outer)
    }

    fn is_box(&self) -> bool {
        self.generators.len() == 2
    }

    fn direction_classes(&self) -> Option<usize> {
        Some(self.generators.len())
    }

    fn determining_directions(&self, v: &Vec2<S>) -> Vec<Vec2<S>> {
        let m = self.norm(v);
        self.generators
            .iter()
            .filter_map(|g| {
                let d = g.dot(v);
                if (d.clone() - m.clone()).sign() == Ordering::Equal {
                    Some(g.clone())
                } else if (-d - m.clone()).sign() == Ordering::Equal {
                    Some(-g.clone())
                } else {
                    None
                }
            })
            .collect()
    }
}

impl Polygon<f64> {
    /// Regular hexagon with unit apothem; side normals at 0, 60 and 120 degrees.
    pub fn regular_hexagon() -> Self {
        let h = 3f64.sqrt() / 2.0;
        Self::new(vec![
            Vec2::new(1.0, 0.0),
            Vec2::new(0.5, h),
            Vec2::new(-0.5, h),
        ])
        .expect("valid shape")
    }
}

/// Smooth `L_p` shape, `1 < p < inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpShape {
    pub p: f64,
    pub generator_budget: usize,
}

impl LpShape {
    pub fn new(p: f64, generator_budget: usize) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "smooth L_p shapes need 1 < p < inf, got {p}"
            )));
        }
        if generator_budget < 3 {
            return Err(Error::InvalidParameter(
                "generator budget must be at least 3".into(),
            ));
        }
        Ok(Self {
            p,
            generator_budget,
        })
    }

    /// Outward normal at the boundary point in direction `v`, scaled to touch
    /// the unit ball with value 1.
    pub fn gradient(&self, v: &Vec2<f64>) -> Vec2<f64> {
        let n = lp_norm(self.p, v.x, v.y);
        let (ux, uy) = (v.x / n, v.y / n);
        let e = self.p - 1.0;
        Vec2::new(ux.signum() * ux.abs().powf(e), uy.signum() * uy.abs().powf(e))
    }

    pub fn generators(&self) -> Vec<Vec2<f64>> {
        smooth_generators(self.p, self.generator_budget).expect("validated shape")
    }

    /// Lower approximation of the norm from the finite generator budget.
    pub fn approx_norm(&self, x: &Vec2<f64>) -> f64 {
        self.generators()
            .iter()
            .map(|a| a.dot(x).abs())
            .fold(0.0, f64::max)
    }
}

fn lp_norm(p: f64, x: f64, y: f64) -> f64 {
    let m = x.abs().max(y.abs());
    if m == 0.0 {
        return 0.0;
    }
    m * ((x.abs() / m).powf(p) + (y.abs() / m).powf(p)).powf(1.0 / p)
}

/// `count` generators of the `L_p` ball, normals at boundary points whose
/// directions follow the golden-angle sequence on `[0, pi)`. Sets for
/// increasing `count` are nested, so the approximation is monotone.
pub fn smooth_generators(p: f64, count: usize) -> Result<Vec<Vec2<f64>>> {
    let shape = LpShape::new(p, count)?;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    Ok((0..count)
        .map(|k| {
            let theta = PI * (k as f64 * inv_phi).fract();
            shape.gradient(&Vec2::new(theta.cos(), theta.sin()))
        })
        .collect())
}

impl Metric<f64> for LpShape {
    fn norm(&self, x: &Vec2<f64>) -> f64 {
        lp_norm(self.p, x.x, x.y)
    }

    fn euclidean_radii(&self) -> (f64, f64) {
        let diag = 2f64.powf(0.5 - 1.0 / self.p);
        (diag.min(1.0), diag.max(1.0))
    }

    fn determining_directions(&self, v: &Vec2<f64>) -> Vec<Vec2<f64>> {
        if v.is_zero() {
            return Vec::new();
        }
        vec![self.gradient(v)]
    }
}

/// Any supported shape, evaluated in floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum NormShape {
    Polygonal(Polygon<f64>),
    SmoothLp(LpShape),
}

impl NormShape {
    pub fn as_polygon(&self) -> Option<&Polygon<f64>> {
        match self {
            NormShape::Polygonal(p) => Some(p),
            NormShape::SmoothLp(_) => None,
        }
    }
}

impl Metric<f64> for NormShape {
    fn norm(&self, x: &Vec2<f64>) -> f64 {
        match self {
            NormShape::Polygonal(p) => p.norm(x),
            NormShape::SmoothLp(s) => s.norm(x),
        }
    }

    fn euclidean_radii(&self) -> (f64, f64) {
        match self {
            NormShape::Polygonal(p) => p.euclidean_radii(),
            NormShape::SmoothLp(s) => s.euclidean_radii(),
        }
    }

    fn is_box(&self) -> bool {
        match self {
            NormShape::Polygonal(p) => p.is_box(),
            NormShape::SmoothLp(_) => false,
        }
    }

    fn direction_classes(&self) -> Option<usize> {
        match self {
            NormShape::Polygonal(p) => p.direction_classes(),
            NormShape::SmoothLp(_) => None,
        }
    }

    fn determining_directions(&self, v: &Vec2<f64>) -> Vec<Vec2<f64>> {
        match self {
            NormShape::Polygonal(p) => p.determining_directions(v),
            NormShape::SmoothLp(s) => s.determining_directions(v),
        }
    }
}

/// Three points whose sorted distances satisfy the strict triangle inequality.
pub fn is_triangular_set<S: Scalar, M: Metric<S> + ?Sized>(
    metric: &M,
    x: &Vec2<S>,
    y: &Vec2<S>,
    z: &Vec2<S>,
) -> Result<bool> {
    let pts = [x, y, z];
    for i in 0..3 {
        for j in i + 1..3 {
            if pts[i].approx_eq(pts[j], 1e-12) {
                return Err(Error::DuplicatePoints(i, j));
            }
        }
    }
    let mut d = [
        metric.distance(x, y),
        metric.distance(y, z),
        metric.distance(x, z),
    ];
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let [a, b, c] = d;
    Ok((a + b - c).sign() == Ordering::Greater)
}
