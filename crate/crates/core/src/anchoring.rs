//! Line grids, anchored reconstruction and good enumerations.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense_set::PointSet;
use crate::error::{Error, Result};
use crate::geometry::{is_triangular_set, Line, LpShape, Mat2, Metric, NormShape, Polygon, Vec2};
use crate::scalar::Scalar;

/// The levels `L_0, ..., L_depth` of the recursively generated line family.
///
/// Level 0 holds the lines `a . x = a . b + z` for base points `b`, generators
/// `a` and integer shifts `|z| <= window`. Every level is clipped to offsets
/// with `|offset| <= window + max |a . b|`, which keeps it finite.
#[derive(Clone, Debug)]
pub struct LineFamily<S: Scalar> {
    pub base: Vec<Vec2<S>>,
    pub generators: Vec<Vec2<S>>,
    pub window: u32,
    pub clip: S,
    /// `levels[i][g]`: offsets of the level-`i` lines with normal `generators[g]`.
    levels: Vec<Vec<BTreeMap<S::Key, S>>>,
}

impl<S: Scalar> LineFamily<S> {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Sorted offsets of level `level` for generator index `g`.
    pub fn offsets(&self, level: usize, g: usize) -> Vec<S> {
        self.levels[level][g].values().cloned().collect()
    }

    pub fn line_count(&self, level: usize) -> usize {
        self.levels[level].iter().map(BTreeMap::len).sum()
    }

    pub fn lines(&self, level: usize) -> Vec<Line<S>> {
        self.levels[level]
            .iter()
            .zip(&self.generators)
            .flat_map(|(offs, a)| {
                offs.values()
                    .map(move |r| Line::new(a.clone(), r.clone()).expect("non-zero generator"))
            })
            .collect()
    }

    /// Level-`level` membership of the line `generators[g] . x = offset`.
    pub fn contains(&self, level: usize, g: usize, offset: &S) -> bool {
        self.levels[level][g].contains_key(&offset.key())
    }

    pub fn generator_index(&self, a: &Vec2<S>) -> Option<usize> {
        self.generators.iter().position(|g| g.approx_eq(a, 1e-12))
    }
}

/// Builds levels `0..=depth` of the line family through `base` with normals `gens`.
pub fn generate_grid<S: Scalar>(
    base: &[Vec2<S>],
    gens: &[Vec2<S>],
    depth: usize,
    window: u32,
) -> Result<LineFamily<S>> {
    if base.is_empty() {
        return Err(Error::InvalidParameter("base point set is empty".into()));
    }
    let mut generators: Vec<Vec2<S>> = Vec::new();
    for a in gens {
        if a.is_zero() {
            return Err(Error::ZeroNormal);
        }
        if !generators.iter().any(|g| g.is_parallel(a)) {
            generators.push(a.clone());
        }
    }
    if generators.len() < 2 {
        return Err(Error::InvalidParameter(
            "generators fall into fewer than two direction classes".into(),
        ));
    }
    let w = S::from_i64(i64::from(window));
    let clip = generators
        .iter()
        .flat_map(|a| base.iter().map(move |b| a.dot(b).abs()))
        .reduce(S::max_of)
        .expect("non-empty")
        + w;
    let k = generators.len();
    let mut level0: Vec<BTreeMap<S::Key, S>> = vec![BTreeMap::new(); k];
    for (g, a) in generators.iter().enumerate() {
        for b in base {
            let r = a.dot(b);
            for z in -i64::from(window)..=i64::from(window) {
                let off = r.clone() + S::from_i64(z);
                level0[g].insert(off.key(), off);
            }
        }
    }
    let mut levels = vec![level0];
    // the m-offset of the intersection of lines i and j is lambda * c + mu * d
    let mut rules = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let inv_t = Mat2::from_rows(generators[i].clone(), generators[j].clone())
                .inverse()
                .expect("non-parallel")
                .transpose();
            for m in (0..k).filter(|&m| m != i && m != j) {
                rules.push((i, j, m, inv_t.apply(&generators[m])));
            }
        }
    }
    for _ in 0..depth {
        let cur = levels.last().expect("level 0");
        let mut next = cur.clone();
        for (i, j, m, coef) in &rules {
            let ds: Vec<&S> = cur[*j].values().collect();
            let found: Vec<(S::Key, S)> = cur[*i]
                .values()
                .collect::<Vec<_>>()
                .par_iter()
                .flat_map_iter(|c| {
                    let lc = coef.x.clone() * (*c).clone();
                    let clip = &clip;
                    ds.iter().filter_map(move |d| {
                        let off = lc.clone() + coef.y.clone() * (*d).clone();
                        (off.abs() <= *clip).then(|| (off.key(), off))
                    })
                })
                .collect();
            next[*m].extend(found);
        }
        levels.push(next);
    }
    Ok(LineFamily {
        base: base.to_vec(),
        generators,
        window,
        clip,
        levels,
    })
}

/// Offsets of the deepest level with normal `a`, reduced mod 1, deduplicated and sorted.
pub fn grid_offsets<S: Scalar>(family: &LineFamily<S>, a: &Vec2<S>) -> Result<Vec<S>> {
    let g = family.generator_index(a).ok_or(Error::NotAGenerator)?;
    let mut out: BTreeMap<S::Key, S> = BTreeMap::new();
    for off in family.levels[family.depth()][g].values() {
        let f = off.fract();
        out.insert(f.key(), f);
    }
    let mut v: Vec<S> = out.into_values().collect();
    v.sort_by(|x, y| x.partial_cmp(y).expect("comparable"));
    Ok(v)
}

/// Largest gap between consecutive values on the circle `R / Z`; inputs in `[0, 1)`, sorted.
pub fn max_circular_gap(sorted: &[f64]) -> f64 {
    match sorted {
        [] => 1.0,
        [_] => 1.0,
        _ => {
            let inner = sorted
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(0.0, f64::max);
            inner.max(sorted[0] + 1.0 - sorted[sorted.len() - 1])
        }
    }
}

/// An isometry `x -> linear * x + translation` pinned by an anchor, with the
/// normal map `sigma = linear^{-T}` that carries face normals to image face normals.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<S> {
    pub linear: Mat2<S>,
    pub translation: Vec2<S>,
    pub sigma: Mat2<S>,
}

impl<S: Scalar> Frame<S> {
    pub fn apply(&self, x: &Vec2<S>) -> Vec2<S> {
        self.linear.apply(x) + self.translation.clone()
    }
}

/// One distance constraint: the sought point lies at `distance` from `image`,
/// achieved (in the source frame) by the generator `direction`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reference<S> {
    pub image: Vec2<S>,
    pub distance: S,
    pub direction: Vec2<S>,
}

/// Shapes whose isometries can be pinned down by three points.
pub trait Anchorable<S: Scalar>: Metric<S> {
    /// `l` maps the unit ball onto itself.
    fn is_linear_isometry(&self, l: &Mat2<S>) -> bool;

    /// The point satisfying all three constraints.
    fn locate(&self, frame: &Frame<S>, refs: &[Reference<S>; 3]) -> Result<Vec2<S>>;
}

fn check_distances<S: Scalar, M: Metric<S> + ?Sized>(
    metric: &M,
    y: &Vec2<S>,
    refs: &[Reference<S>; 3],
    tol: f64,
) -> Result<()> {
    for (i, r) in refs.iter().enumerate() {
        let d = metric.distance(y, &r.image);
        if !d.approx_eq(&r.distance, tol) {
            return Err(Error::Inconsistent(format!(
                "distance to reference {i} is {} instead of {}",
                d.to_f64(),
                r.distance.to_f64()
            )));
        }
    }
    Ok(())
}

impl<S: Scalar> Anchorable<S> for Polygon<S> {
    fn is_linear_isometry(&self, l: &Mat2<S>) -> bool {
        let Some(inv) = l.inverse() else {
            return false;
        };
        let unit = |v: Vec2<S>| (self.norm(&v) - S::one()).sign() == Ordering::Equal;
        self.vertices()
            .iter()
            .all(|v| unit(l.apply(v)) && unit(inv.apply(v)))
    }

    fn locate(&self, frame: &Frame<S>, refs: &[Reference<S>; 3]) -> Result<Vec2<S>> {
        for r in refs {
            if self.generator_index(&r.direction).is_none() {
                return Err(Error::InvalidCertificate(
                    "direction is not a generator of the shape".into(),
                ));
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if refs[i].direction.is_parallel(&refs[j].direction) {
                    return Err(Error::InvalidCertificate(format!(
                        "directions {i} and {j} are parallel"
                    )));
                }
            }
        }
        let n: Vec<Vec2<S>> = refs.iter().map(|r| frame.sigma.apply(&r.direction)).collect();
        let rhs = |i: usize| n[i].dot(&refs[i].image) + refs[i].distance.clone();
        let y = Mat2::from_rows(n[0].clone(), n[1].clone())
            .solve(&Vec2::new(rhs(0), rhs(1)))
            .ok_or_else(|| Error::InvalidCertificate("image normals are parallel".into()))?;
        let third = n[2].dot(&y);
        if !third.approx_eq(&rhs(2), 1e-9) {
            return Err(Error::Inconsistent(format!(
                "third face constraint misses by {}",
                (third - rhs(2)).to_f64()
            )));
        }
        check_distances(self, &y, refs, 1e-9)?;
        Ok(y)
    }
}

/// Unit-circle directions used to test linear maps of smooth shapes.
fn probe_directions() -> Vec<Vec2<f64>> {
    (0..64)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / 64.0;
            Vec2::new(t.cos(), t.sin())
        })
        .collect()
}

impl Anchorable<f64> for LpShape {
    fn is_linear_isometry(&self, l: &Mat2<f64>) -> bool {
        let Some(inv) = l.inverse() else {
            return false;
        };
        probe_directions().iter().all(|u| {
            let n = self.norm(u);
            self.norm(&l.apply(u)).approx_eq(&n, 1e-9) && self.norm(&inv.apply(u)).approx_eq(&n, 1e-9)
        })
    }

    /// Walks the metric circle of radius `d_0` around the first image, brackets
    /// the roots of the second constraint and bisects; the third constraint
    /// picks among the roots.
    fn locate(&self, _frame: &Frame<f64>, refs: &[Reference<f64>; 3]) -> Result<Vec2<f64>> {
        const SAMPLES: usize = 2048;
        let (c, r) = (&refs[0].image, refs[0].distance);
        let point = |t: f64| {
            let u = Vec2::new(t.cos(), t.sin());
            let s = r / self.norm(&u);
            Vec2::new(c.x + s * u.x, c.y + s * u.y)
        };
        let h = |t: f64| self.distance(&point(t), &refs[1].image) - refs[1].distance;
        let step = 2.0 * std::f64::consts::PI / SAMPLES as f64;
        let mut roots = Vec::new();
        let mut prev = h(0.0);
        for k in 1..=SAMPLES {
            let t1 = step * k as f64;
            let cur = h(t1);
            if prev == 0.0 {
                roots.push(t1 - step);
            } else if prev.signum() != cur.signum() {
                let (mut lo, mut hi, mut flo) = (t1 - step, t1, prev);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = h(mid);
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
        let best = roots
            .into_iter()
            .map(point)
            .min_by(|a, b| {
                let ea = (self.distance(a, &refs[2].image) - refs[2].distance).abs();
                let eb = (self.distance(b, &refs[2].image) - refs[2].distance).abs();
                ea.total_cmp(&eb)
            })
            .ok_or_else(|| Error::Inconsistent("metric circles do not meet".into()))?;
        check_distances(self, &best, refs, 1e-9)?;
        Ok(best)
    }
}

impl Anchorable<f64> for NormShape {
    fn is_linear_isometry(&self, l: &Mat2<f64>) -> bool {
        match self {
            NormShape::Polygonal(p) => p.is_linear_isometry(l),
            NormShape::SmoothLp(s) => s.is_linear_isometry(l),
        }
    }

    fn locate(&self, frame: &Frame<f64>, refs: &[Reference<f64>; 3]) -> Result<Vec2<f64>> {
        match self {
            NormShape::Polygonal(p) => p.locate(frame, refs),
            NormShape::SmoothLp(s) => s.locate(frame, refs),
        }
    }
}

/// Frame of the isometry sending `anchor[i]` to `images[i]`.
pub fn anchor_frame<S: Scalar, M: Anchorable<S> + ?Sized>(
    metric: &M,
    anchor: &[Vec2<S>; 3],
    images: &[Vec2<S>; 3],
) -> Result<Frame<S>> {
    if metric.is_box() {
        return Err(Error::BoxShape);
    }
    if !is_triangular_set(metric, &anchor[0], &anchor[1], &anchor[2])? {
        return Err(Error::NotTriangular);
    }
    let cols = |p: &[Vec2<S>; 3]| Mat2::from_cols(&p[1] - &p[0], &p[2] - &p[0]);
    let src_inv = cols(anchor).inverse().ok_or(Error::NotTriangular)?;
    let linear = cols(images).mul(&src_inv);
    if !metric.is_linear_isometry(&linear) {
        return Err(Error::Inconsistent(
            "anchor images are not an isometric copy of the anchor".into(),
        ));
    }
    let translation = &images[0] - &linear.apply(&anchor[0]);
    let sigma = linear
        .inverse()
        .ok_or_else(|| Error::Inconsistent("singular anchor map".into()))?
        .transpose();
    Ok(Frame {
        linear,
        translation,
        sigma,
    })
}

/// Picks, for each reference point, a generator achieving `d(x, ref)` so that
/// the three are pairwise non-parallel.
pub fn certify<S: Scalar, M: Metric<S> + ?Sized>(
    metric: &M,
    refs: &[&Vec2<S>; 3],
    x: &Vec2<S>,
) -> Result<[Vec2<S>; 3]> {
    let options: Vec<Vec<Vec2<S>>> = refs
        .iter()
        .map(|r| metric.determining_directions(&(x - *r)))
        .collect();
    for a in &options[0] {
        for b in options[1].iter().filter(|b| !b.is_parallel(a)) {
            if let Some(c) = options[2]
                .iter()
                .find(|c| !c.is_parallel(a) && !c.is_parallel(b))
            {
                return Ok([a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    Err(Error::InvalidCertificate(
        "no three pairwise non-parallel generators realise the distances".into(),
    ))
}

/// Image of `x` under the isometry fixed by `anchor -> images`, recovered
/// from the three distances `dists` alone.
pub fn reconstruct_from_anchor<S: Scalar, M: Anchorable<S> + ?Sized>(
    metric: &M,
    anchor: &[Vec2<S>; 3],
    images: &[Vec2<S>; 3],
    x: &Vec2<S>,
    dists: &[S; 3],
) -> Result<Vec2<S>> {
    let frame = anchor_frame(metric, anchor, images)?;
    let dirs = certify(metric, &[&anchor[0], &anchor[1], &anchor[2]], x)?;
    let refs = [0, 1, 2].map(|i| Reference {
        image: images[i].clone(),
        distance: dists[i].clone(),
        direction: dirs[i].clone(),
    });
    metric.locate(&frame, &refs)
}

/// Why a later point's position is pinned down: three earlier positions in
/// the order and the generators achieving the distances to them.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<S> {
    /// Positions in the enumeration, strictly increasing and before the point itself.
    pub refs: [usize; 3],
    pub directions: [Vec2<S>; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodEnumeration<S> {
    /// Point indices in enumeration order.
    pub order: Vec<usize>,
    /// Aligned with `order`; `None` for the three anchor points.
    pub certificates: Vec<Option<Certificate<S>>>,
    /// Points the finite window could not accommodate.
    pub unplaced: Vec<usize>,
}

impl<S: Scalar> GoodEnumeration<S> {
    pub fn anchor(&self) -> [usize; 3] {
        [self.order[0], self.order[1], self.order[2]]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Up to `limit` triangular anchors with pairwise distances < 1, at most one
/// per starting point.
fn find_anchors<S: Scalar, M: Metric<S> + ?Sized>(
    pts: &[Vec2<S>],
    metric: &M,
    limit: usize,
) -> Result<Vec<[usize; 3]>> {
    let one = S::one();
    let n = pts.len();
    let mut out = Vec::new();
    'outer: for i in 0..n {
        if out.len() == limit {
            break;
        }
        let near: Vec<usize> = (i + 1..n)
            .filter(|&j| metric.distance(&pts[i], &pts[j]) < one)
            .collect();
        for (a, &j) in near.iter().enumerate() {
            for &k in &near[a + 1..] {
                if metric.distance(&pts[j], &pts[k]) < one
                    && is_triangular_set(metric, &pts[i], &pts[j], &pts[k])?
                {
                    out.push([i, j, k]);
                    continue 'outer;
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoTriangularSet);
    }
    Ok(out)
}

/// Anchors tried by [`good_enumeration`] before settling for the longest walk.
pub const ANCHOR_ATTEMPTS: usize = 32;

struct Builder<'a, S: Scalar, M: ?Sized> {
    pts: &'a [Vec2<S>],
    metric: &'a M,
    placed: Vec<bool>,
    order: Vec<usize>,
    certificates: Vec<Option<Certificate<S>>>,
    witnesses: Vec<Vec<(usize, Vec2<S>)>>,
}

impl<S: Scalar, M: Metric<S> + ?Sized> Builder<'_, S, M> {
    fn determined(&self, v: usize) -> bool {
        self.witnesses[v].len() == 3
    }

    fn place(&mut self, u: usize) {
        let cert = (self.order.len() >= 3).then(|| {
            let w = &self.witnesses[u];
            Certificate {
                refs: [w[0].0, w[1].0, w[2].0],
                directions: [w[0].1.clone(), w[1].1.clone(), w[2].1.clone()],
            }
        });
        let pos = self.order.len();
        self.order.push(u);
        self.certificates.push(cert);
        self.placed[u] = true;
        for v in 0..self.pts.len() {
            if self.placed[v] || self.witnesses[v].len() >= 3 {
                continue;
            }
            let dirs = self.metric.determining_directions(&(&self.pts[v] - &self.pts[u]));
            if let Some(a) = dirs
                .into_iter()
                .find(|a| self.witnesses[v].iter().all(|(_, b)| !b.is_parallel(a)))
            {
                self.witnesses[v].push((pos, a));
            }
        }
    }
}

/// Greedy path insertion: after a triangular anchor, the walk repeatedly
/// appends an unplaced point that is determined by the points placed so far
/// and lies within distance 1 of the last one. Among such candidates the one
/// with the fewest unplaced neighbours goes first, so that sparse regions are
/// visited before they get cut off. Walks from up to [`ANCHOR_ATTEMPTS`]
/// anchors are tried and the longest kept; points it never reaches are
/// reported as unplaced.
pub fn good_enumeration<S: Scalar, M: Metric<S> + ?Sized>(
    points: &PointSet<S>,
    metric: &M,
) -> Result<GoodEnumeration<S>> {
    if metric.is_box() {
        return Err(Error::BoxShape);
    }
    let pts = &points.points;
    let n = pts.len();
    let anchors = find_anchors(pts, metric, ANCHOR_ATTEMPTS)?;
    let one = S::one();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|u| {
            (0..n)
                .filter(|&v| v != u && metric.distance(&pts[u], &pts[v]) < one)
                .collect()
        })
        .collect();
    let mut best: Option<GoodEnumeration<S>> = None;
    for anchor in anchors {
        let e = walk(pts, metric, &neighbours, anchor);
        if best.as_ref().is_none_or(|b| e.len() > b.len()) {
            let done = e.unplaced.is_empty();
            best = Some(e);
            if done {
                break;
            }
        }
    }
    Ok(best.expect("at least one anchor"))
}

fn walk<S: Scalar, M: Metric<S> + ?Sized>(
    pts: &[Vec2<S>],
    metric: &M,
    neighbours: &[Vec<usize>],
    anchor: [usize; 3],
) -> GoodEnumeration<S> {
    let n = pts.len();
    let mut b = Builder {
        pts,
        metric,
        placed: vec![false; n],
        order: Vec::with_capacity(n),
        certificates: Vec::with_capacity(n),
        witnesses: vec![Vec::new(); n],
    };
    let mut free: Vec<usize> = neighbours.iter().map(Vec::len).collect();
    let place = |b: &mut Builder<'_, S, M>, free: &mut [usize], u: usize| {
        b.place(u);
        for &v in &neighbours[u] {
            free[v] -= 1;
        }
    };
    for u in anchor {
        place(&mut b, &mut free, u);
    }
    loop {
        let last = *b.order.last().expect("anchor placed");
        let Some(next) = neighbours[last]
            .iter()
            .filter(|&&u| !b.placed[u] && b.determined(u))
            .min_by_key(|&&u| (free[u], u))
            .copied()
        else {
            break;
        };
        place(&mut b, &mut free, next);
    }
    let unplaced = (0..n).filter(|&u| !b.placed[u]).collect();
    GoodEnumeration {
        order: b.order,
        certificates: b.certificates,
        unplaced,
    }
}

/// Re-checks every defining condition of a good enumeration from scratch.
pub fn validate_enumeration<S: Scalar, M: Metric<S> + ?Sized>(
    e: &GoodEnumeration<S>,
    points: &PointSet<S>,
    metric: &M,
) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidEnumeration(msg));
    let n = points.len();
    let pts = &points.points;
    if e.order.len() < 3 {
        return bad("fewer than three points".into());
    }
    if e.certificates.len() != e.order.len() {
        return bad("certificate list misaligned".into());
    }
    let mut seen = vec![false; n];
    for &u in e.order.iter().chain(&e.unplaced) {
        if u >= n {
            return bad(format!("index {u} out of range"));
        }
        if seen[u] {
            return bad(format!("point {u} listed twice"));
        }
        seen[u] = true;
    }
    if seen.iter().any(|s| !s) {
        return bad("some points are neither placed nor reported".into());
    }
    let one = S::one();
    let at = |pos: usize| &pts[e.order[pos]];
    for i in 0..3 {
        for j in i + 1..3 {
            if metric.distance(at(i), at(j)) >= one {
                return bad(format!("anchor points {i} and {j} are not within 1"));
            }
        }
    }
    if !is_triangular_set(metric, at(0), at(1), at(2))? {
        return bad("anchor is not triangular".into());
    }
    for pos in 1..e.order.len() {
        if metric.distance(at(pos - 1), at(pos)) >= one {
            return bad(format!("positions {} and {pos} are not within 1", pos - 1));
        }
    }
    let probes: Vec<Vec2<S>> = probe_directions()
        .iter()
        .filter_map(|u| Vec2::from_f64(u.x, u.y))
        .collect();
    for (pos, cert) in e.certificates.iter().enumerate() {
        let cert = match (pos < 3, cert) {
            (true, None) => continue,
            (true, Some(_)) => return bad(format!("anchor position {pos} has a certificate")),
            (false, None) => return bad(format!("position {pos} lacks a certificate")),
            (false, Some(c)) => c,
        };
        let [j, k, l] = cert.refs;
        if !(j < k && k < l && l < pos) {
            return bad(format!("position {pos}: references {:?} out of order", cert.refs));
        }
        for (r, a) in cert.refs.iter().zip(&cert.directions) {
            let diff = at(pos) - at(*r);
            if !a.dot(&diff).approx_eq(&metric.norm(&diff), 1e-9) {
                return bad(format!("position {pos}: direction does not realise d to {r}"));
            }
            // a must not exceed the norm anywhere (dual unit ball)
            if probes
                .iter()
                .any(|u| (a.dot(u) - metric.norm(u)).sign() == Ordering::Greater)
            {
                return bad(format!("position {pos}: direction is not a unit functional"));
            }
        }
        let d = &cert.directions;
        if d[0].is_parallel(&d[1]) || d[0].is_parallel(&d[2]) || d[1].is_parallel(&d[2]) {
            return bad(format!("position {pos}: directions not pairwise non-parallel"));
        }
    }
    Ok(())
}

/// Grid counts per level, for reporting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub level: usize,
    pub lines: usize,
}

pub fn grid_summary<S: Scalar>(family: &LineFamily<S>) -> Vec<GridSummary> {
    (0..=family.depth())
        .map(|level| GridSummary {
            level,
            lines: family.line_count(level),
        })
        .collect()
}
