//! Step-isometry constructions and checks.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense_set::PointSet;
use crate::error::{Error, Result};
use crate::geometry::{Line, Mat2, Metric, Polygon, Vec2};
use crate::larg::{check_permutation, GeoGraph};
use crate::scalar::{Coord, Scalar};

/// The two-branch map on the reals: `floor(x) + (2/3) t` for `t = frac(x) <= 1/2`,
/// `floor(x) + (4/3) t - 1/3` otherwise.
pub fn explicit_step_isometry_1d<S: Scalar>(x: &S) -> S {
    let fl = S::from_i64(x.floor_i64());
    let t = x.clone() - fl.clone();
    if t <= S::from_ratio(1, 2) {
        fl + S::from_ratio(2, 3) * t
    } else {
        fl + S::from_ratio(4, 3) * t - S::from_ratio(1, 3)
    }
}

/// Strictly increasing piecewise-linear map of `[0, 1]` onto itself, fixing 0 and 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Interleaving1D<S> {
    knots: Vec<(S, S)>,
}

impl<S: Scalar> Interleaving1D<S> {
    pub fn new(knots: Vec<(S, S)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidParameter("need at least two knots".into()));
        }
        let (first, last) = (&knots[0], &knots[knots.len() - 1]);
        if !(first.0.is_zero() && first.1.is_zero() && last.0 == S::one() && last.1 == S::one()) {
            return Err(Error::InvalidParameter(
                "knots must start at (0, 0) and end at (1, 1)".into(),
            ));
        }
        for w in knots.windows(2) {
            if !(w[0].0 < w[1].0 && w[0].1 < w[1].1) {
                return Err(Error::InvalidParameter(
                    "knots must be strictly increasing in both coordinates".into(),
                ));
            }
        }
        Ok(Self { knots })
    }

    pub fn identity() -> Self {
        Self::new(vec![(S::zero(), S::zero()), (S::one(), S::one())]).expect("valid")
    }

    /// Knots (0,0), (1/2,1/3), (1,1).
    pub fn paper() -> Self {
        Self::new(vec![
            (S::zero(), S::zero()),
            (S::from_ratio(1, 2), S::from_ratio(1, 3)),
            (S::one(), S::one()),
        ])
        .expect("valid")
    }

    pub fn knots(&self) -> &[(S, S)] {
        &self.knots
    }

    pub fn is_identity(&self) -> bool {
        self.knots.iter().all(|(x, y)| x == y)
    }

    /// `g(t)` for `t` in `[0, 1]`.
    pub fn eval(&self, t: &S) -> S {
        let k = self
            .knots
            .windows(2)
            .position(|w| *t <= w[1].0)
            .unwrap_or(self.knots.len() - 2);
        let (x0, y0) = &self.knots[k];
        let (x1, y1) = &self.knots[k + 1];
        y0.clone() + (y1.clone() - y0.clone()) * (t.clone() - x0.clone()) / (x1.clone() - x0.clone())
    }
}

/// `floor(x) + g(frac(x))`.
pub fn apply_fractional_map<S: Scalar>(g: &Interleaving1D<S>, x: &S) -> S {
    let fl = S::from_i64(x.floor_i64());
    let t = x.clone() - fl.clone();
    fl + g.eval(&t)
}

/// Product map in dual coordinates `u_i = a_i . v` for the box shape's two generators.
pub fn box_product_map<S: Scalar>(
    shape: &Polygon<S>,
    g1: &Interleaving1D<S>,
    g2: &Interleaving1D<S>,
    v: &Vec2<S>,
) -> Result<Vec2<S>> {
    if !shape.is_box() {
        return Err(Error::NotBox);
    }
    let gens = shape.generators();
    box_product_map_with(&gens[0], &gens[1], g1, g2, v)
}

/// Same construction for an arbitrary non-parallel pair `a1, a2`.
pub fn box_product_map_with<S: Scalar>(
    a1: &Vec2<S>,
    a2: &Vec2<S>,
    g1: &Interleaving1D<S>,
    g2: &Interleaving1D<S>,
    v: &Vec2<S>,
) -> Result<Vec2<S>> {
    let m = Mat2::from_rows(a1.clone(), a2.clone());
    let target = Vec2::new(
        apply_fractional_map(g1, &a1.dot(v)),
        apply_fractional_map(g2, &a2.dot(v)),
    );
    m.solve(&target).ok_or(Error::ParallelGenerators(0, 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Arbitrary,
    BoxProduct,
    Explicit1D,
}

/// A finite map given by aligned domain and image lists.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMap<S> {
    pub domain: Vec<Vec2<S>>,
    pub images: Vec<Vec2<S>>,
    pub kind: MapKind,
}

impl<S: Scalar> PointMap<S> {
    /// Checks lengths, distinct domain points and injectivity.
    pub fn new(domain: Vec<Vec2<S>>, images: Vec<Vec2<S>>, kind: MapKind) -> Result<Self> {
        if domain.len() != images.len() {
            return Err(Error::LengthMismatch {
                domain: domain.len(),
                images: images.len(),
            });
        }
        let mut seen = HashMap::with_capacity(domain.len());
        for (i, p) in domain.iter().enumerate() {
            if let Some(j) = seen.insert(p.key(), i) {
                return Err(Error::DuplicatePoints(j, i));
            }
        }
        seen.clear();
        for (i, p) in images.iter().enumerate() {
            if let Some(j) = seen.insert(p.key(), i) {
                return Err(Error::NotInjective(j, i));
            }
        }
        Ok(Self {
            domain,
            images,
            kind,
        })
    }

    pub fn identity(points: &PointSet<S>) -> Self {
        Self::new(points.points.clone(), points.points.clone(), MapKind::Arbitrary)
            .expect("point sets are duplicate-free")
    }

    pub fn from_fn(
        points: &PointSet<S>,
        kind: MapKind,
        f: impl Fn(&Vec2<S>) -> Result<Vec2<S>>,
    ) -> Result<Self> {
        let images = points.points.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(points.points.clone(), images, kind)
    }

    /// Real values `x` embedded as `(x, 0)`, mapped by the two-branch map.
    pub fn explicit_1d(values: &[S]) -> Result<Self> {
        let domain: Vec<_> = values.iter().map(|x| Vec2::new(x.clone(), S::zero())).collect();
        let images = values
            .iter()
            .map(|x| Vec2::new(explicit_step_isometry_1d(x), S::zero()))
            .collect();
        Self::new(domain, images, MapKind::Explicit1D)
    }

    pub fn box_product(
        points: &PointSet<S>,
        shape: &Polygon<S>,
        g1: &Interleaving1D<S>,
        g2: &Interleaving1D<S>,
    ) -> Result<Self> {
        Self::from_fn(points, MapKind::BoxProduct, |v| {
            box_product_map(shape, g1, g2, v)
        })
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub domain_distance: Coord,
    pub image_distance: Coord,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub domain_floor: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub image_floor: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Counterexample(Witness),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Ok => None,
            Verdict::Counterexample(w) => Some(w),
        }
    }
}

/// Scans pairs `(i, j)`, `i < j`, in lexicographic order and returns the first hit.
fn first_pair<T: Send>(
    n: usize,
    f: impl Fn(usize, usize) -> Option<T> + Sync,
) -> Option<T> {
    (0..n)
        .into_par_iter()
        .find_map_first(|i| (i + 1..n).find_map(|j| f(i, j)))
}

/// Checks `floor d(u, v) == floor d(f u, f v)` on every pair.
pub fn is_step_isometry<S: Scalar, M: Metric<S> + ?Sized>(
    map: &PointMap<S>,
    metric: &M,
) -> Result<Verdict> {
    let floor_of = |i: usize, j: usize, d: &S| {
        d.checked_floor().ok_or(Error::AmbiguousPair {
            i,
            j,
            value: d.to_f64(),
        })
    };
    let found = first_pair(map.len(), |i, j| {
        let d0 = metric.distance(&map.domain[i], &map.domain[j]);
        let d1 = metric.distance(&map.images[i], &map.images[j]);
        let f0 = match floor_of(i, j, &d0) {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        let f1 = match floor_of(i, j, &d1) {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        (f0 != f1).then(|| {
            Ok(Witness {
                i,
                j,
                domain_distance: d0.to_coord(),
                image_distance: d1.to_coord(),
                domain_floor: Some(f0),
                image_floor: Some(f1),
            })
        })
    });
    match found {
        None => Ok(Verdict::Ok),
        Some(Ok(w)) => Ok(Verdict::Counterexample(w)),
        Some(Err(e)) => Err(e),
    }
}

/// Checks `d(u, v) == d(f u, f v)` on every pair; exact for exact scalars,
/// relative tolerance `tol` for doubles.
pub fn is_isometry<S: Scalar, M: Metric<S> + ?Sized>(
    map: &PointMap<S>,
    metric: &M,
    tol: f64,
) -> Verdict {
    let found = first_pair(map.len(), |i, j| {
        let d0 = metric.distance(&map.domain[i], &map.domain[j]);
        let d1 = metric.distance(&map.images[i], &map.images[j]);
        (!d0.approx_eq(&d1, tol)).then(|| Witness {
            i,
            j,
            domain_distance: d0.to_coord(),
            image_distance: d1.to_coord(),
            domain_floor: None,
            image_floor: None,
        })
    });
    match found {
        None => Verdict::Ok,
        Some(w) => Verdict::Counterexample(w),
    }
}

/// Domain points whose image breaks the side condition.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LineReport {
    /// `a . v < r` but `a' . f(v) >= r'`.
    pub below_violations: Vec<usize>,
    /// `a . v > r` but `a' . f(v) <= r'`.
    pub above_violations: Vec<usize>,
}

impl LineReport {
    pub fn respected(&self) -> bool {
        self.below_violations.is_empty() && self.above_violations.is_empty()
    }
}

pub fn respects_line_report<S: Scalar>(
    map: &PointMap<S>,
    ell: &Line<S>,
    ell_image: &Line<S>,
) -> Result<LineReport> {
    let mut report = LineReport::default();
    for (i, (v, w)) in map.domain.iter().zip(&map.images).enumerate() {
        match ell.side(v) {
            Ordering::Equal => return Err(Error::PointOnLine { index: i }),
            Ordering::Less => {
                if ell_image.side(w) != Ordering::Less {
                    report.below_violations.push(i);
                }
            }
            Ordering::Greater => {
                if ell_image.side(w) != Ordering::Greater {
                    report.above_violations.push(i);
                }
            }
        }
    }
    Ok(report)
}

/// Both side implications hold for every domain point.
pub fn respects_line<S: Scalar>(
    map: &PointMap<S>,
    ell: &Line<S>,
    ell_image: &Line<S>,
) -> Result<bool> {
    respects_line_report(map, ell, ell_image).map(|r| r.respected())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub pairs: usize,
    /// Pairs whose truncated distance changes, in pair order.
    pub violations: Vec<(usize, usize)>,
    /// Pairs whose floor could not be decided in floating mode.
    pub ambiguous: usize,
    /// Pairs in range on exactly one side of the map.
    pub range_flips: usize,
    /// Probability that an honest independent pair of samples agrees on all
    /// flipped pairs: `(1 - p)^range_flips`.
    pub survival_bound: f64,
}

/// Confirms `perm` is an isomorphism `g -> h`, then measures how far it is from
/// a step-isometry of `points`.
pub fn stepiso_statistical_check<S: Scalar, M: Metric<S> + ?Sized>(
    g: &GeoGraph,
    h: &GeoGraph,
    points: &PointSet<S>,
    metric: &M,
    perm: &[usize],
) -> Result<StatReport> {
    if g.n != h.n || g.n != points.len() {
        return Err(Error::NotIsomorphism(format!(
            "vertex counts differ: {} / {} / {} points",
            g.n,
            h.n,
            points.len()
        )));
    }
    check_permutation(perm, g.n)?;
    if g.edge_count() != h.edge_count() {
        return Err(Error::NotIsomorphism(format!(
            "edge counts differ: {} vs {}",
            g.edge_count(),
            h.edge_count()
        )));
    }
    if let Some((u, v)) = g
        .edges()
        .into_iter()
        .find(|&(u, v)| !h.has_edge(perm[u], perm[v]))
    {
        return Err(Error::NotIsomorphism(format!(
            "edge ({u}, {v}) maps to a non-edge"
        )));
    }
    let delta = S::from_f64(g.delta).expect("finite delta");
    let pts = &points.points;
    let n = g.n;
    // per row: violating pairs, ambiguous count, range flips
    type Row = (Vec<(usize, usize)>, usize, usize);
    let rows: Vec<Row> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut viol = Vec::new();
            let (mut amb, mut flips) = (0, 0);
            for j in i + 1..n {
                let d0 = metric.distance(&pts[i], &pts[j]);
                let d1 = metric.distance(&pts[perm[i]], &pts[perm[j]]);
                if (d0 < delta) != (d1 < delta) {
                    flips += 1;
                }
                match (d0.checked_floor(), d1.checked_floor()) {
                    (Some(a), Some(b)) if a != b => viol.push((i, j)),
                    (Some(_), Some(_)) => {}
                    _ => amb += 1,
                }
            }
            (viol, amb, flips)
        })
        .collect();
    let mut report = StatReport {
        pairs: n * n.saturating_sub(1) / 2,
        violations: Vec::new(),
        ambiguous: 0,
        range_flips: 0,
        survival_bound: 1.0,
    };
    for (v, a, f) in rows {
        report.violations.extend(v);
        report.ambiguous += a;
        report.range_flips += f;
    }
    report.survival_bound = (1.0 - g.p).powi(report.range_flips as i32);
    Ok(report)
}
