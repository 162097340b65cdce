//! Finite windows of countable dense sets.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Metric, Vec2};
use crate::scalar::{Scalar, BOUNDARY_EPS};

/// Closed axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let w = Self {
            x_min,
            y_min,
            x_max,
            y_max,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn unit() -> Self {
        Self::new(0.0, 0.0, 1.0, 1.0).expect("unit window")
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(0.0, 0.0, side, side)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.y_min, self.x_max, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(Error::DegenerateWindow);
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains<S: Scalar>(&self, p: &Vec2<S>) -> bool {
        let slack = 1e-12 * (1.0 + self.width().abs().max(self.height().abs()));
        let (x, y) = (p.x.to_f64(), p.y.to_f64());
        x >= self.x_min - slack
            && x <= self.x_max + slack
            && y >= self.y_min - slack
            && y <= self.y_max + slack
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            x_min: self.x_min * alpha,
            y_min: self.y_min * alpha,
            x_max: self.x_max * alpha,
            y_max: self.y_max * alpha,
        }
    }
}

/// Properties recorded on a sample; violations are surfaced here rather than
/// resampled away.
#[derive(Clone, Debug, PartialEq)]
pub struct Flags<S> {
    pub idf_per_generator: Vec<(Vec2<S>, bool)>,
    /// `None` until checked.
    pub pairwise_noninteger: Option<bool>,
}

impl<S> Default for Flags<S> {
    fn default() -> Self {
        Self {
            idf_per_generator: Vec::new(),
            pairwise_noninteger: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<S> {
    pub points: Vec<Vec2<S>>,
    pub window: Window,
    pub seed: u64,
    pub alpha: S,
    pub flags: Flags<S>,
}

impl<S: Scalar> PointSet<S> {
    /// Checks distinctness and window membership.
    pub fn new(points: Vec<Vec2<S>>, window: Window, seed: u64) -> Result<Self> {
        window.validate()?;
        let mut seen = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if !window.contains(p) {
                return Err(Error::OutsideWindow { index: i });
            }
            if let Some(j) = seen.insert(p.key(), i) {
                return Err(Error::DuplicatePoints(j, i));
            }
        }
        Ok(Self {
            points,
            window,
            seed,
            alpha: S::one(),
            flags: Flags::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> Result<&Vec2<S>> {
        self.points.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.points.len(),
        })
    }

    /// The first `n` points, flags cleared.
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            points: self.points[..n.min(self.len())].to_vec(),
            window: self.window,
            seed: self.seed,
            alpha: self.alpha.clone(),
            flags: Flags::default(),
        }
    }

    /// Every point multiplied by `alpha`; the window follows.
    pub fn scaled(&self, alpha: &S) -> Self {
        Self {
            points: self.points.iter().map(|p| p.scale(alpha)).collect(),
            window: self.window.scaled(alpha.to_f64()),
            seed: self.seed,
            alpha: self.alpha.clone() * alpha.clone(),
            flags: Flags::default(),
        }
    }

    pub fn update_idf_flags(&mut self, generators: &[Vec2<S>]) {
        self.flags.idf_per_generator = generators
            .iter()
            .map(|a| (a.clone(), is_idf(&projections(&self.points, a))))
            .collect();
    }

    /// Exhaustive check that no two points are at integer distance.
    pub fn check_pairwise_noninteger<M: Metric<S> + ?Sized>(&mut self, metric: &M) -> bool {
        let n = self.len();
        let ok = (0..n).all(|i| {
            (i + 1..n).all(|j| !metric.distance(&self.points[i], &self.points[j]).is_integer())
        });
        self.flags.pairwise_noninteger = Some(ok);
        ok
    }

    /// Stable FNV-1a digest of the coordinates.
    pub fn content_hash(&self) -> u64 {
        let mut h = Fnv::new();
        for p in &self.points {
            for c in [&p.x, &p.y] {
                let text = match c.to_coord() {
                    crate::scalar::Coord::Float(v) => format!("{:016x}", v.to_bits()),
                    crate::scalar::Coord::Exact(s) => s,
                };
                h.write(text.as_bytes());
                h.write(b";");
            }
        }
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
    fn finish(&self) -> u64 {
        self.0
    }
}

/// `min + width * k / 2^32`: the same dyadic value in every numeric mode.
fn dyadic_coord<S: Scalar>(min: f64, width: f64, k: u32) -> S {
    S::from_f64(min).expect("finite")
        + S::from_f64(width).expect("finite") * S::from_ratio(i64::from(k), 1 << 32)
}

fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> Result<usize> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean)
        .map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as usize)
}

/// Homogeneous Poisson process of the given intensity on `window`.
pub fn sample_poisson_window<S: Scalar>(
    window: &Window,
    intensity: f64,
    seed: u64,
) -> Result<PointSet<S>> {
    window.validate()?;
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "intensity must be positive, got {intensity}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = poisson_count(&mut rng, intensity * window.area())?;
    let mut seen = HashSet::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let (kx, ky): (u32, u32) = (rng.random(), rng.random());
        if seen.insert((kx, ky)) {
            points.push(Vec2::new(
                dyadic_coord(window.x_min, window.width(), kx),
                dyadic_coord(window.y_min, window.height(), ky),
            ));
        }
    }
    PointSet::new(points, *window, seed)
}

fn sample_axis<S: Scalar>(
    rng: &mut ChaCha8Rng,
    lo: f64,
    hi: f64,
    intensity: f64,
) -> Result<Vec<S>> {
    let mut out = Vec::new();
    let mut z = lo.floor();
    while z < hi {
        let a = z.max(lo);
        let b = (z + 1.0).min(hi);
        if b > a {
            let count = poisson_count(rng, intensity * (b - a))?;
            let mut ks: Vec<u32> = (0..count).map(|_| rng.random()).collect();
            ks.sort_unstable();
            ks.dedup();
            out.extend(ks.into_iter().map(|k| dyadic_coord::<S>(a, b - a, k)));
        }
        z += 1.0;
    }
    Ok(out)
}

/// Product model: on each axis, a Poisson sample of linear intensity
/// `intensity` inside every unit interval `(z, z + 1)` meeting the window;
/// the point set is the Cartesian product of the two axis samples.
pub fn sample_product_window<S: Scalar>(
    window: &Window,
    intensity: f64,
    seed: u64,
) -> Result<PointSet<S>> {
    window.validate()?;
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "intensity must be positive, got {intensity}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = sample_axis::<S>(&mut rng, window.x_min, window.x_max, intensity)?;
    let ys = sample_axis::<S>(&mut rng, window.y_min, window.y_max, intensity)?;
    let points = xs
        .iter()
        .flat_map(|x| ys.iter().map(move |y| Vec2::new(x.clone(), y.clone())))
        .collect();
    PointSet::new(points, *window, seed)
}

/// `[a . v for v in points]`.
pub fn projections<S: Scalar>(points: &[Vec2<S>], a: &Vec2<S>) -> Vec<S> {
    points.iter().map(|v| a.dot(v)).collect()
}

/// First pair (by sorted fractional part) whose difference is an integer.
pub fn idf_violation<S: Scalar>(values: &[S]) -> Option<(usize, usize)> {
    let mut fr: Vec<(S, usize)> = values.iter().map(|v| v.fract()).zip(0..).collect();
    fr.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable"));
    let close = |a: &S, b: &S| {
        if S::EXACT {
            a == b
        } else {
            (a.to_f64() - b.to_f64()).abs() < BOUNDARY_EPS
        }
    };
    let ordered = |i: usize, j: usize| (i.min(j), i.max(j));
    for w in fr.windows(2) {
        if close(&w[0].0, &w[1].0) {
            return Some(ordered(w[0].1, w[1].1));
        }
    }
    if !S::EXACT && fr.len() >= 2 {
        let (first, last) = (&fr[0], &fr[fr.len() - 1]);
        if first.0.to_f64() + 1.0 - last.0.to_f64() < BOUNDARY_EPS {
            return Some(ordered(first.1, last.1));
        }
    }
    None
}

/// No two distinct entries differ by an integer.
pub fn is_idf<S: Scalar>(values: &[S]) -> bool {
    idf_violation(values).is_none()
}

const FIB_40: i64 = 102_334_155;
const FIB_41: i64 = 165_580_141;

/// Scaling candidates: 1, then `1 + frac(k * phi) / 2` for random `k`, with
/// `phi` replaced by its continued-fraction approximant `F41 / F40` so the
/// candidate is an exact rational.
fn alpha_candidate<S: Scalar>(k: i64) -> S {
    let num = (k % FIB_40) * FIB_41 % FIB_40;
    S::one() + S::from_ratio(num, 2 * FIB_40)
}

/// Finds `alpha` such that every generator projection of `alpha * V` is idf.
pub fn rescale_to_idf<S: Scalar>(
    points: &PointSet<S>,
    generators: &[Vec2<S>],
    trials: usize,
    seed: u64,
) -> Result<(S, PointSet<S>)> {
    // equal projections stay equal under scaling
    for (g, a) in generators.iter().enumerate() {
        let proj = projections(&points.points, a);
        let mut keyed: Vec<(S::Key, usize)> = proj.iter().map(|v| v.key()).zip(0..).collect();
        keyed.sort();
        if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::NoIdfScaling {
                trials: 0,
                pair: (w[0].1.min(w[1].1), w[0].1.max(w[1].1)),
                generator: g,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = ((0, 0), 0);
    for t in 0..trials {
        let alpha = if t == 0 {
            S::one()
        } else {
            alpha_candidate(rng.random_range(1..1_000_000_000))
        };
        let scaled = points.scaled(&alpha);
        let obstruction = generators.iter().enumerate().find_map(|(g, a)| {
            idf_violation(&projections(&scaled.points, a)).map(|pair| (pair, g))
        });
        match obstruction {
            None => {
                let mut out = scaled;
                out.update_idf_flags(generators);
                return Ok((alpha, out));
            }
            Some(o) => last = o,
        }
    }
    Err(Error::NoIdfScaling {
        trials,
        pair: last.0,
        generator: last.1,
    })
}

/// Grid-probe density summary: a probe is empty when no sample point lies in
/// the sup-norm ball of radius `radius` around it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub radius: f64,
    pub probes: usize,
    pub empty_probes: usize,
}

impl DensityReport {
    pub fn is_dense(&self) -> bool {
        self.empty_probes == 0
    }
}

/// Probes the window interior (points at least `radius` from the border) on a
/// grid of spacing `radius`.
pub fn density_probe<S: Scalar>(points: &PointSet<S>, radius: f64) -> DensityReport {
    let w = &points.window;
    let pts: Vec<Vec2<f64>> = points.points.iter().map(Vec2::to_f64).collect();
    let lookup = PointLookup::new(&pts, radius.max(1e-6));
    let mut probes = 0;
    let mut empty = 0;
    let mut y = w.y_min + radius;
    while y <= w.y_max - radius {
        let mut x = w.x_min + radius;
        while x <= w.x_max - radius {
            probes += 1;
            let q = Vec2::new(x, y);
            let hit = lookup.candidates_near(&q, radius).into_iter().any(|i| {
                let p = &pts[i];
                (p.x - x).abs() <= radius && (p.y - y).abs() <= radius
            });
            if !hit {
                empty += 1;
            }
            x += radius;
        }
        y += radius;
    }
    DensityReport {
        radius,
        probes,
        empty_probes: empty,
    }
}

/// Bucket grid over the points for image lookups and neighbourhood queries.
#[derive(Clone, Debug)]
pub struct PointLookup<S> {
    points: Vec<Vec2<S>>,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl<S: Scalar> PointLookup<S> {
    pub fn new(points: &[Vec2<S>], cell: f64) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::cell_of(cell, &p.to_f64())).or_default().push(i);
        }
        Self {
            points: points.to_vec(),
            cell,
            buckets,
        }
    }

    fn cell_of(cell: f64, p: &Vec2<f64>) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Indices whose bucket meets the square of half-side `r` around `q`.
    pub fn candidates_near(&self, q: &Vec2<S>, r: f64) -> Vec<usize> {
        let q = q.to_f64();
        let lo = Self::cell_of(self.cell, &Vec2::new(q.x - r, q.y - r));
        let hi = Self::cell_of(self.cell, &Vec2::new(q.x + r, q.y + r));
        let mut out = Vec::new();
        for cx in lo.0..=hi.0 {
            for cy in lo.1..=hi.1 {
                if let Some(b) = self.buckets.get(&(cx, cy)) {
                    out.extend_from_slice(b);
                }
            }
        }
        out
    }

    /// Index of the point equal to `q` (exactly, or within relative `tol` in
    /// floating mode).
    pub fn find(&self, q: &Vec2<S>, tol: f64) -> Option<usize> {
        let r = if S::EXACT {
            1e-9
        } else {
            tol * (1.0 + q.norm2_f64())
        };
        let mut hits = self.candidates_near(q, r);
        hits.sort_unstable();
        hits.into_iter().find(|&i| self.points[i].approx_eq(q, tol))
    }

    pub fn points(&self) -> &[Vec2<S>] {
        &self.points
    }
}
