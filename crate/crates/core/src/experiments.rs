//! Monte Carlo drivers: partial-isomorphism decay for non-box shapes and the
//! back-and-forth demo for boxes.

use std::collections::HashMap;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anchoring::{anchor_frame, good_enumeration, validate_enumeration, Anchorable, GoodEnumeration, Reference};
use crate::dense_set::{
    rescale_to_idf, sample_poisson_window, sample_product_window, PointLookup, PointSet, Window,
};
use crate::error::{Error, Result};
use crate::geometry::{Mat2, Metric, NormShape, Polygon, Vec2};
use crate::io::ShapeSpec;
use crate::larg::{compatibility_probability, pair_uniform, sample_larg, GeoGraph};
use crate::scalar::Scalar;
use crate::worker_pool;

/// z for a two-sided 95% interval.
pub const WILSON_Z: f64 = 1.959963984540054;

pub const DEFAULT_BUDGET: u64 = 200_000;

fn default_delta() -> f64 {
    1.0
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_idf_trials() -> usize {
    64
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    #[default]
    Poisson,
    Product,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    #[serde(default)]
    pub kind: SamplerKind,
    pub window: Window,
    pub intensity: f64,
}

impl SamplerSpec {
    pub fn sample<S: Scalar>(&self, seed: u64) -> Result<PointSet<S>> {
        match self.kind {
            SamplerKind::Poisson => sample_poisson_window(&self.window, self.intensity, seed),
            SamplerKind::Product => sample_product_window(&self.window, self.intensity, seed),
        }
    }
}

/// Which images of the anchor triple the decay search may try.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorPolicy {
    /// Every ordered triple of distinct vertices of `V_n`.
    #[default]
    AllTriples,
    /// Only the anchor itself.
    IdentityOnly,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub report: Option<String>,
}

/// Shared configuration for both experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub shape: ShapeSpec,
    pub sampler: SamplerSpec,
    pub n_values: Vec<usize>,
    pub p: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub anchor_policy: AnchorPolicy,
    /// Use one edge seed for both graphs (sanity runs).
    #[serde(default)]
    pub same_graph: bool,
    /// Geometrically admissible extension attempts per back-and-forth search.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Box demo: repeat every trial with the affine hexagon for comparison.
    #[serde(default)]
    pub compare_hexagon: bool,
    #[serde(default = "default_idf_trials")]
    pub idf_trials: usize,
    #[serde(default)]
    pub output: OutputPaths,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() {
            return bad("n_values is empty".into());
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n_values must be strictly ascending".into());
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad(format!("p must lie in (0, 1), got {}", self.p));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        if self.budget == 0 {
            return bad("budget must be positive".into());
        }
        self.sampler.window.validate()
    }
}

/// One CSV row; `paper_bound` is blank where no bound applies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub paper_bound: Option<f64>,
}

impl DecayRow {
    pub fn new(n: usize, trials: usize, successes: usize, paper_bound: Option<f64>) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials);
        Self {
            n,
            trials,
            successes,
            fraction: if trials == 0 {
                0.0
            } else {
                successes as f64 / trials as f64
            },
            ci_lo,
            ci_hi,
            paper_bound,
        }
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    // the endpoints at 0 and n successes are exact; rounding must not exclude phat
    (
        (centre - half).clamp(0.0, phat),
        (centre + half).clamp(phat, 1.0),
    )
}

/// `n^(2k+2) * p_star^(n-1)`.
pub fn paper_bound(n: usize, k: usize, p_star: f64) -> f64 {
    (n as f64).powi(2 * k as i32 + 2) * p_star.powi(n as i32 - 1)
}

pub fn write_rows<W: Write>(w: W, rows: &[DecayRow]) -> Result<()> {
    // header written by hand so an empty table still has one
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(["n", "trials", "successes", "fraction", "ci_lo", "ci_hi", "paper_bound"])
        .map_err(csv_err)?;
    for r in rows {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(r: R) -> Result<Vec<DecayRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(csv_err))
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Independent seeds for trial `t`: point set, first graph, second graph.
pub fn trial_seeds(base: u64, trial: usize) -> [u64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(trial as u64);
    [rng.random(), rng.random(), rng.random()]
}

fn check_same_points<S: Scalar>(g: &GeoGraph, h: &GeoGraph, points: &PointSet<S>) -> Result<()> {
    let hash = points.content_hash();
    for (name, x) in [("G", g), ("H", h)] {
        if x.n != points.len() || x.point_set_hash != hash {
            return Err(Error::InvalidParameter(format!(
                "{name} was not sampled over this point set"
            )));
        }
    }
    Ok(())
}

/// Is there a partial isomorphism from `G[V_n]` into `H` sending the anchor
/// into `V_n`, where `V_n` is the first `n` points of the enumeration?
pub fn partial_isomorphism_exists<S: Scalar, M: Anchorable<S> + ?Sized>(
    g: &GeoGraph,
    h: &GeoGraph,
    points: &PointSet<S>,
    metric: &M,
    order: &GoodEnumeration<S>,
    n: usize,
) -> Result<bool> {
    check_same_points(g, h, points)?;
    validate_enumeration(order, points, metric)?;
    search_partial_isomorphism(g, h, points, metric, order, n, AnchorPolicy::AllTriples)
}

/// Same search without re-validating inputs; `policy` restricts the anchor images.
pub fn search_partial_isomorphism<S: Scalar, M: Anchorable<S> + ?Sized>(
    g: &GeoGraph,
    h: &GeoGraph,
    points: &PointSet<S>,
    metric: &M,
    order: &GoodEnumeration<S>,
    n: usize,
    policy: AnchorPolicy,
) -> Result<bool> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("n must be at least 3, got {n}")));
    }
    if n > order.len() {
        return Err(Error::InvalidEnumeration(format!(
            "enumeration has {} points, {n} requested",
            order.len()
        )));
    }
    let vs = &order.order[..n];
    let pts = &points.points;
    let lookup = PointLookup::new(pts, 1.0);
    let dist = |a: usize, b: usize| metric.distance(&pts[a], &pts[b]);
    let anchor = [vs[0], vs[1], vs[2]];
    let anchor_pts = anchor.map(|i| pts[i].clone());

    // Extends u1, u2, u3 through the certificates.
    let extend = |images: [usize; 3]| -> bool {
        let image_pts = images.map(|i| pts[i].clone());
        let Ok(frame) = anchor_frame(metric, &anchor_pts, &image_pts) else {
            return false;
        };
        let mut f: Vec<usize> = images.to_vec();
        for pos in 3..n {
            let v = vs[pos];
            let Some(cert) = &order.certificates[pos] else {
                return false;
            };
            let refs = [0, 1, 2].map(|k| Reference {
                image: pts[f[cert.refs[k]]].clone(),
                distance: dist(v, vs[cert.refs[k]]),
                direction: cert.directions[k].clone(),
            });
            let Ok(y) = metric.locate(&frame, &refs) else {
                return false;
            };
            let Some(w) = lookup.find(&y, 1e-9) else {
                return false;
            };
            if f.contains(&w) {
                return false;
            }
            if (0..pos).any(|m| g.has_edge(vs[m], v) != h.has_edge(f[m], w)) {
                return false;
            }
            f.push(w);
        }
        true
    };

    let triple_ok = |u: &[usize; 3]| {
        [(0, 1), (0, 2), (1, 2)].iter().all(|&(a, b)| {
            u[a] != u[b]
                && dist(anchor[a], anchor[b]).approx_eq(&dist(u[a], u[b]), 1e-9)
                && g.has_edge(anchor[a], anchor[b]) == h.has_edge(u[a], u[b])
        })
    };

    match policy {
        AnchorPolicy::IdentityOnly => Ok(triple_ok(&anchor) && extend(anchor)),
        AnchorPolicy::AllTriples => Ok(vs.par_iter().any(|&u1| {
            vs.iter().any(|&u2| {
                vs.iter().any(|&u3| {
                    let u = [u1, u2, u3];
                    triple_ok(&u) && extend(u)
                })
            })
        })),
    }
}

/// One decay trial: success flags for every `n` in `n_values`.
pub fn decay_trial(cfg: &ExperimentConfig, shape: &NormShape, trial: usize) -> Result<Vec<bool>> {
    let [point_seed, g_seed, h_seed] = trial_seeds(cfg.seed, trial);
    let h_seed = if cfg.same_graph { g_seed } else { h_seed };
    let points = cfg.sampler.sample::<f64>(point_seed)?;
    let order = good_enumeration(&points, shape)?;
    let largest = *cfg.n_values.last().expect("validated");
    if order.len() < largest {
        return Err(Error::InvalidEnumeration(format!(
            "trial {trial}: only {} points enumerated but n = {largest} requested; enlarge the window or intensity",
            order.len()
        )));
    }
    let g = sample_larg(&points, shape, cfg.delta, cfg.p, g_seed)?;
    let h = sample_larg(&points, shape, cfg.delta, cfg.p, h_seed)?;
    cfg.n_values
        .iter()
        .map(|&n| search_partial_isomorphism(&g, &h, &points, shape, &order, n, cfg.anchor_policy))
        .collect()
}

/// Fraction of trials with a partial isomorphism, per `n`.
pub fn run_decay_experiment(cfg: &ExperimentConfig) -> Result<Vec<DecayRow>> {
    cfg.validate()?;
    let shape = cfg.shape.norm_shape()?;
    if shape.is_box() {
        return Err(Error::Unsupported(
            "box shapes admit isomorphic samples; run `experiment box-demo` instead".into(),
        ));
    }
    if cfg.n_values[0] < 3 {
        return Err(Error::InvalidParameter("n_values must all be at least 3".into()));
    }
    let outcomes: Vec<Vec<bool>> = worker_pool().install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| decay_trial(cfg, &shape, t))
            .collect::<Result<_>>()
    })?;
    // consecutive points are within distance 1, hence in range once delta >= 1
    let p_star = compatibility_probability(cfg.p, cfg.delta >= 1.0);
    let k = shape.direction_classes();
    Ok(cfg
        .n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let successes = outcomes.iter().filter(|o| o[i]).count();
            DecayRow::new(n, cfg.trials, successes, k.map(|k| paper_bound(n, k, p_star)))
        })
        .collect())
}

/// `T` with rows `a1`, `a2`, so that `d_box(x, y) = |T x - T y|_inf`.
pub fn box_to_linf_transform<S: Scalar>(shape: &Polygon<S>) -> Result<Mat2<S>> {
    if !shape.is_box() {
        return Err(Error::NotBox);
    }
    let g = shape.generators();
    Ok(Mat2::from_rows(g[0].clone(), g[1].clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DemoOutcome {
    /// Pairs `(v, f(v))`.
    Found { map: Vec<(usize, usize)> },
    NoIsomorphism,
    Undetermined { attempts: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoRow {
    pub n: usize,
    pub trials: usize,
    pub found: usize,
    pub no_isomorphism: usize,
    pub undetermined: usize,
    pub fraction: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl DemoRow {
    fn from_outcomes(n: usize, outcomes: &[&DemoOutcome]) -> Self {
        let count = |f: fn(&DemoOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count();
        let found = count(|o| matches!(o, DemoOutcome::Found { .. }));
        let row = DecayRow::new(n, outcomes.len(), found, None);
        Self {
            n,
            trials: outcomes.len(),
            found,
            no_isomorphism: count(|o| matches!(o, DemoOutcome::NoIsomorphism)),
            undetermined: count(|o| matches!(o, DemoOutcome::Undetermined { .. })),
            fraction: row.fraction,
            ci_lo: row.ci_lo,
            ci_hi: row.ci_hi,
        }
    }

    pub fn as_csv_row(&self) -> DecayRow {
        DecayRow::new(self.n, self.trials, self.found, None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDemoReport {
    pub p: f64,
    pub delta: f64,
    pub budget: u64,
    pub pool_sizes: Vec<usize>,
    pub alphas: Vec<f64>,
    pub box_rows: Vec<DemoRow>,
    pub hexagon_rows: Option<Vec<DemoRow>>,
    /// Outcomes of the first trial, per `n`.
    pub first_trial: Vec<DemoOutcome>,
}

/// Pair constraint on a candidate assignment `v -> w` against a mapped pair.
trait PairRule: Sync {
    /// Pool indices to try as images of `v` (or preimages when `back`).
    fn candidates(&self, v: usize) -> Vec<usize>;
    fn agrees(&self, v: usize, w: usize, v2: usize, w2: usize) -> bool;
}

/// Integer parts and per-coordinate fractional order of the `T` coordinates.
struct TruncatedCoords {
    cells: Vec<(i64, i64)>,
    fracs: Vec<(f64, f64)>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl TruncatedCoords {
    fn new(t: &Mat2<f64>, pts: &[Vec2<f64>]) -> Self {
        let mut cells = Vec::with_capacity(pts.len());
        let mut fracs = Vec::with_capacity(pts.len());
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            let q = t.apply(p);
            let cell = (q.x.floor() as i64, q.y.floor() as i64);
            cells.push(cell);
            fracs.push((q.x - q.x.floor(), q.y - q.y.floor()));
            buckets.entry(cell).or_default().push(i);
        }
        Self {
            cells,
            fracs,
            buckets,
        }
    }
}

impl PairRule for TruncatedCoords {
    fn candidates(&self, v: usize) -> Vec<usize> {
        self.buckets[&self.cells[v]].clone()
    }

    fn agrees(&self, v: usize, w: usize, v2: usize, w2: usize) -> bool {
        let (a, b) = (self.fracs[v], self.fracs[v2]);
        let (c, d) = (self.fracs[w], self.fracs[w2]);
        self.cells[v] == self.cells[w]
            && (a.0 < b.0) == (c.0 < d.0)
            && (a.1 < b.1) == (c.1 < d.1)
    }
}

/// Exact distance preservation.
struct Isometric<'a, M: ?Sized> {
    pts: &'a [Vec2<f64>],
    metric: &'a M,
}

impl<M: Metric<f64> + ?Sized> PairRule for Isometric<'_, M> {
    fn candidates(&self, _v: usize) -> Vec<usize> {
        (0..self.pts.len()).collect()
    }

    fn agrees(&self, v: usize, w: usize, v2: usize, w2: usize) -> bool {
        let d1 = self.metric.distance(&self.pts[v], &self.pts[v2]);
        let d2 = self.metric.distance(&self.pts[w], &self.pts[w2]);
        d1.approx_eq(&d2, 1e-9)
    }
}

/// LARG adjacency evaluated on demand from the per-pair streams.
struct LazyGraph<'a, M: ?Sized> {
    pts: &'a [Vec2<f64>],
    metric: &'a M,
    delta: f64,
    p: f64,
    seed: u64,
}

impl<M: Metric<f64> + ?Sized> LazyGraph<'_, M> {
    fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v
            && self.metric.distance(&self.pts[u], &self.pts[v]) < self.delta
            && pair_uniform(self.seed, u, v) < self.p
    }
}

struct BackAndForth<'a, R: ?Sized, M: ?Sized> {
    rule: &'a R,
    g: &'a LazyGraph<'a, M>,
    h: &'a LazyGraph<'a, M>,
    budget: u64,
    attempts: u64,
    forward: HashMap<usize, usize>,
    backward: HashMap<usize, usize>,
    pairs: Vec<(usize, usize)>,
}

struct Exhausted;

impl<R: PairRule + ?Sized, M: Metric<f64> + ?Sized> BackAndForth<'_, R, M> {
    fn geometric(&self, v: usize, w: usize) -> bool {
        self.pairs
            .iter()
            .all(|&(v2, w2)| self.rule.agrees(v, w, v2, w2))
    }

    fn adjacent_alike(&self, v: usize, w: usize) -> bool {
        self.pairs
            .iter()
            .all(|&(v2, w2)| self.g.has_edge(v, v2) == self.h.has_edge(w, w2))
    }

    fn run(&mut self, tasks: &[(usize, bool)]) -> Result<bool, Exhausted> {
        let Some((&(x, forth), rest)) = tasks.split_first() else {
            return Ok(true);
        };
        let done = if forth {
            self.forward.contains_key(&x)
        } else {
            self.backward.contains_key(&x)
        };
        if done {
            return self.run(rest);
        }
        // identity first, then pool order
        let mut cands = self.rule.candidates(x);
        if let Some(i) = cands.iter().position(|&c| c == x) {
            cands.remove(i);
            cands.insert(0, x);
        }
        for c in cands {
            let (v, w) = if forth { (x, c) } else { (c, x) };
            if self.forward.contains_key(&v) || self.backward.contains_key(&w) {
                continue;
            }
            if !self.geometric(v, w) {
                continue;
            }
            self.attempts += 1;
            if self.attempts > self.budget {
                return Err(Exhausted);
            }
            if !self.adjacent_alike(v, w) {
                continue;
            }
            self.forward.insert(v, w);
            self.backward.insert(w, v);
            self.pairs.push((v, w));
            if self.run(rest)? {
                return Ok(true);
            }
            self.pairs.pop();
            self.forward.remove(&v);
            self.backward.remove(&w);
        }
        Ok(false)
    }
}

/// Back-and-forth search for a partial isomorphism `G -> H` over the pool
/// whose domain and range both contain `0..n`.
fn back_and_forth<R: PairRule + ?Sized, M: Metric<f64> + ?Sized>(
    rule: &R,
    g: &LazyGraph<'_, M>,
    h: &LazyGraph<'_, M>,
    n: usize,
    budget: u64,
) -> DemoOutcome {
    let tasks: Vec<(usize, bool)> = (0..n).flat_map(|i| [(i, true), (i, false)]).collect();
    let mut s = BackAndForth {
        rule,
        g,
        h,
        budget,
        attempts: 0,
        forward: HashMap::new(),
        backward: HashMap::new(),
        pairs: Vec::new(),
    };
    match s.run(&tasks) {
        Ok(true) => {
            let mut map = s.pairs;
            map.sort_unstable();
            DemoOutcome::Found { map }
        }
        Ok(false) => DemoOutcome::NoIsomorphism,
        Err(Exhausted) => DemoOutcome::Undetermined {
            attempts: s.attempts,
        },
    }
}

struct DemoTrial {
    pool: usize,
    alpha: f64,
    boxed: Vec<DemoOutcome>,
    hexagon: Option<Vec<DemoOutcome>>,
}

fn lazy_pair<'a, M: ?Sized>(
    pts: &'a [Vec2<f64>],
    metric: &'a M,
    cfg: &ExperimentConfig,
    g_seed: u64,
    h_seed: u64,
) -> (LazyGraph<'a, M>, LazyGraph<'a, M>) {
    let mk = |seed| LazyGraph {
        pts,
        metric,
        delta: cfg.delta,
        p: cfg.p,
        seed,
    };
    (mk(g_seed), mk(h_seed))
}

fn demo_trial(cfg: &ExperimentConfig, shape: &Polygon<f64>, trial: usize) -> Result<DemoTrial> {
    let [point_seed, g_seed, h_seed] = trial_seeds(cfg.seed, trial);
    let h_seed = if cfg.same_graph { g_seed } else { h_seed };
    let raw = cfg.sampler.sample::<f64>(point_seed)?;
    let (alpha, points) = rescale_to_idf(&raw, shape.generators(), cfg.idf_trials, point_seed)?;
    let largest = *cfg.n_values.last().expect("validated");
    if points.len() < largest {
        return Err(Error::InvalidParameter(format!(
            "trial {trial}: pool has {} points but n = {largest} requested",
            points.len()
        )));
    }
    let pts = &points.points;
    let t = box_to_linf_transform(shape)?;
    let rule = TruncatedCoords::new(&t, pts);
    let (g, h) = lazy_pair(pts, shape, cfg, g_seed, h_seed);
    let boxed = cfg
        .n_values
        .iter()
        .map(|&n| back_and_forth(&rule, &g, &h, n, cfg.budget))
        .collect();
    let hexagon = cfg.compare_hexagon.then(|| {
        let hex = Polygon::<f64>::hexagon();
        let (g, h) = lazy_pair(pts, &hex, cfg, g_seed, h_seed);
        let rule = Isometric { pts, metric: &hex };
        cfg.n_values
            .iter()
            .map(|&n| back_and_forth(&rule, &g, &h, n, cfg.budget))
            .collect()
    });
    Ok(DemoTrial {
        pool: points.len(),
        alpha,
        boxed,
        hexagon,
    })
}

fn demo_rows(
    n_values: &[usize],
    trials: &[DemoTrial],
    pick: fn(&DemoTrial) -> &[DemoOutcome],
) -> Vec<DemoRow> {
    n_values
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let outcomes: Vec<&DemoOutcome> = trials.iter().map(|t| &pick(t)[i]).collect();
            DemoRow::from_outcomes(n, &outcomes)
        })
        .collect()
}

/// Back-and-forth between two LARG samples over an idf-rescaled pool; the map
/// must preserve the integer parts and the fractional order of both box
/// coordinates. With `compare_hexagon`, the same trials are repeated under
/// the affine hexagon, where maps must preserve distances exactly.
pub fn box_isomorphism_demo(cfg: &ExperimentConfig) -> Result<BoxDemoReport> {
    cfg.validate()?;
    let shape = cfg.shape.polygon::<f64>()?;
    if !shape.is_box() {
        return Err(Error::NotBox);
    }
    let trials: Vec<DemoTrial> = worker_pool().install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| demo_trial(cfg, &shape, t))
            .collect::<Result<_>>()
    })?;
    Ok(BoxDemoReport {
        p: cfg.p,
        delta: cfg.delta,
        budget: cfg.budget,
        pool_sizes: trials.iter().map(|t| t.pool).collect(),
        alphas: trials.iter().map(|t| t.alpha).collect(),
        box_rows: demo_rows(&cfg.n_values, &trials, |t| &t.boxed),
        hexagon_rows: cfg
            .compare_hexagon
            .then(|| demo_rows(&cfg.n_values, &trials, |t| t.hexagon.as_deref().expect("computed"))),
        first_trial: trials[0].boxed.clone(),
    })
}
