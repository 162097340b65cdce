//! LARG(V, delta, p) sampling and graph files.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense_set::PointSet;
use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::scalar::Scalar;

/// Metadata stored in the first line of a graph file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphHeader {
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub edge_seed: u64,
    pub point_set_hash: u64,
    pub point_set_seed: u64,
    pub edges: usize,
}

/// Undirected simple graph over point indices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeoGraph {
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub edge_seed: u64,
    pub point_set_hash: u64,
    pub point_set_seed: u64,
    /// Sorted neighbour lists.
    adjacency: Vec<Vec<usize>>,
}

/// Uniform draw in `[0, 1)` for the unordered pair `{u, v}`; one ChaCha stream
/// per pair, so the value does not depend on which other pairs are sampled.
pub fn pair_uniform(edge_seed: u64, u: usize, v: usize) -> f64 {
    let base = ChaCha8Rng::seed_from_u64(edge_seed);
    pair_uniform_from(&base, u, v)
}

fn pair_uniform_from(base: &ChaCha8Rng, u: usize, v: usize) -> f64 {
    let (a, b) = (u.min(v) as u64, u.max(v) as u64);
    let mut rng = base.clone();
    rng.set_stream((a << 32) | (b & 0xffff_ffff));
    rng.random::<f64>()
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")))
    }
}

/// Samples LARG over `points`: every pair at distance `< delta` is an edge with
/// probability `p`; pairs at distance `>= delta` never are.
pub fn sample_larg<S: Scalar, M: Metric<S> + ?Sized>(
    points: &PointSet<S>,
    metric: &M,
    delta: f64,
    p: f64,
    edge_seed: u64,
) -> Result<GeoGraph> {
    check_p(p)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let n = points.len();
    let delta_s = S::from_f64(delta).expect("finite delta");
    let base = ChaCha8Rng::seed_from_u64(edge_seed);
    let pts = &points.points;
    let upper: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|u| {
            (u + 1..n)
                .filter(|&v| {
                    metric.distance(&pts[u], &pts[v]) < delta_s
                        && pair_uniform_from(&base, u, v) < p
                })
                .collect()
        })
        .collect();
    let mut g = GeoGraph::empty(n, p, delta, edge_seed);
    g.point_set_hash = points.content_hash();
    g.point_set_seed = points.seed;
    for (u, row) in upper.into_iter().enumerate() {
        for v in row {
            g.adjacency[u].push(v);
            g.adjacency[v].push(u);
        }
    }
    for row in &mut g.adjacency {
        row.sort_unstable();
    }
    Ok(g)
}

impl GeoGraph {
    pub fn empty(n: usize, p: f64, delta: f64, edge_seed: u64) -> Self {
        Self {
            n,
            p,
            delta,
            edge_seed,
            point_set_hash: 0,
            point_set_seed: 0,
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds from an explicit edge list; rejects loops and bad indices.
    pub fn from_edges(header: &GraphHeader, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(header.n, header.p, header.delta, header.edge_seed);
        g.point_set_hash = header.point_set_hash;
        g.point_set_seed = header.point_set_seed;
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= g.n {
                    return Err(Error::IndexOutOfRange { index: x, len: g.n });
                }
            }
            if u == v {
                return Err(Error::Parse(format!("self-loop at {u}")));
            }
            g.adjacency[u].push(v);
            g.adjacency[v].push(u);
        }
        for row in &mut g.adjacency {
            row.sort_unstable();
            row.dedup();
        }
        Ok(g)
    }

    pub fn header(&self) -> GraphHeader {
        GraphHeader {
            n: self.n,
            p: self.p,
            delta: self.delta,
            edge_seed: self.edge_seed,
            point_set_hash: self.point_set_hash,
            point_set_seed: self.point_set_seed,
            edges: self.edge_count(),
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    /// Copy with the status of `{u, v}` toggled.
    pub fn flipped(&self, u: usize, v: usize) -> Self {
        let mut g = self.clone();
        if g.has_edge(u, v) {
            g.adjacency[u].retain(|&x| x != v);
            g.adjacency[v].retain(|&x| x != u);
        } else if u != v {
            g.adjacency[u].push(v);
            g.adjacency[v].push(u);
            g.adjacency[u].sort_unstable();
            g.adjacency[v].sort_unstable();
        }
        g
    }

    /// Pushforward along the vertex bijection `perm` (`u -> perm[u]`).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let edges: Vec<_> = self.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Self::from_edges(&self.header(), &edges)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        serde_json::to_writer(&mut w, &self.header())?;
        writeln!(w)?;
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))??;
        let header: GraphHeader = serde_json::from_str(&header_line)?;
        let mut edges = Vec::with_capacity(header.edges);
        for (k, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => {
                    return Err(Error::Parse(format!(
                        "bad edge line {}: {line:?}",
                        k + 2
                    )))
                }
            }
        }
        let g = Self::from_edges(&header, &edges)?;
        if g.edge_count() != header.edges {
            return Err(Error::Parse(format!(
                "header announces {} edges, found {}",
                header.edges,
                g.edge_count()
            )));
        }
        Ok(g)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::LengthMismatch {
            domain: n,
            images: perm.len(),
        });
    }
    let mut seen = vec![usize::MAX; n];
    for (u, &x) in perm.iter().enumerate() {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, len: n });
        }
        if seen[x] != usize::MAX {
            return Err(Error::NotInjective(seen[x], u));
        }
        seen[x] = u;
    }
    Ok(())
}

/// `p^2 + (1 - p)^2` for in-range pairs, 1 otherwise.
pub fn compatibility_probability(p: f64, within_range: bool) -> f64 {
    if within_range {
        p * p + (1.0 - p) * (1.0 - p)
    } else {
        1.0
    }
}

/// True when `{v, w}` in `g` and `{v2, w2}` in `h` have the same adjacency status.
pub fn pair_compatible(
    g: &GeoGraph,
    h: &GeoGraph,
    (v, w): (usize, usize),
    (v2, w2): (usize, usize),
) -> Result<bool> {
    for (x, n) in [(v, g.n), (w, g.n), (v2, h.n), (w2, h.n)] {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, len: n });
        }
    }
    Ok(g.has_edge(v, w) == h.has_edge(v2, w2))
}

/// First edge `(u, v)` at distance `>= delta`, if any.
pub fn range_violation<S: Scalar, M: Metric<S> + ?Sized>(
    g: &GeoGraph,
    points: &PointSet<S>,
    metric: &M,
) -> Option<(usize, usize)> {
    let delta = S::from_f64(g.delta).expect("finite delta");
    g.edges()
        .into_iter()
        .find(|&(u, v)| metric.distance(&points.points[u], &points.points[v]) >= delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_set::{sample_poisson_window, Window};
    use crate::geometry::{Polygon, Vec2};

    fn pts(coords: &[(f64, f64)]) -> PointSet<f64> {
        PointSet::new(
            coords.iter().map(|&(x, y)| Vec2::new(x, y)).collect(),
            Window::square(10.0).unwrap(),
            0,
        )
        .unwrap()
    }

    #[test]
    fn far_pairs_never_edges() {
        let ps = pts(&[(0.0, 0.0), (2.0, 0.0)]);
        for seed in 0..50 {
            let g = sample_larg(&ps, &Polygon::<f64>::linf(), 1.0, 0.99, seed).unwrap();
            assert_eq!(g.edge_count(), 0);
        }
    }

    #[test]
    fn threshold_is_open() {
        let ps = PointSet::new(
            vec![Vec2::<crate::Rational>::from_ints(0, 0), Vec2::from_ints(1, 0)],
            Window::square(2.0).unwrap(),
            0,
        )
        .unwrap();
        for seed in 0..50 {
            let g = sample_larg(&ps, &Polygon::linf(), 1.0, 0.99, seed).unwrap();
            assert!(!g.has_edge(0, 1));
        }
    }

    #[test]
    fn invalid_p_rejected() {
        let ps = pts(&[(0.0, 0.0)]);
        for p in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(sample_larg(&ps, &Polygon::<f64>::linf(), 1.0, p, 0).is_err());
        }
    }

    #[test]
    fn edge_fraction_binomial() {
        // 1000 points on a tight cluster: all 499500 pairs in range; use the first 1000 pairs
        let mut in_range = 0usize;
        let mut hits = 0usize;
        for u in 0..1000usize {
            let v = u + 1000;
            in_range += 1;
            if pair_uniform(42, u, v) < 0.5 {
                hits += 1;
            }
        }
        let frac = hits as f64 / in_range as f64;
        let sigma = (0.25f64 / 1e3).sqrt();
        assert!((frac - 0.5).abs() < 3.0 * sigma, "{frac}");
    }

    #[test]
    fn deterministic_and_consistent_under_prefix() {
        let w = Window::square(3.0).unwrap();
        let ps = sample_poisson_window::<f64>(&w, 30.0, 5).unwrap();
        let shape = Polygon::<f64>::hexagon();
        let g1 = sample_larg(&ps, &shape, 1.0, 0.5, 9).unwrap();
        let g2 = sample_larg(&ps, &shape, 1.0, 0.5, 9).unwrap();
        assert_eq!(g1, g2);
        let half = ps.prefix(ps.len() / 2);
        let gh = sample_larg(&half, &shape, 1.0, 0.5, 9).unwrap();
        for (u, v) in gh.edges() {
            assert!(g1.has_edge(u, v));
        }
        assert!(range_violation(&g1, &ps, &shape).is_none());
    }

    #[test]
    fn compatibility_examples() {
        assert_eq!(compatibility_probability(0.5, true), 0.5);
        assert!((compatibility_probability(0.9, true) - 0.82).abs() < 1e-12);
        assert_eq!(compatibility_probability(0.3, false), 1.0);
        let h = GraphHeader {
            n: 3,
            p: 0.5,
            delta: 1.0,
            edge_seed: 0,
            point_set_hash: 0,
            point_set_seed: 0,
            edges: 0,
        };
        let g = GeoGraph::from_edges(&h, &[(0, 1)]).unwrap();
        let k = GeoGraph::from_edges(&h, &[(0, 1), (1, 2)]).unwrap();
        assert!(pair_compatible(&g, &k, (0, 1), (0, 1)).unwrap());
        assert!(!pair_compatible(&g, &k, (1, 2), (1, 2)).unwrap());
        assert!(pair_compatible(&g, &k, (0, 2), (0, 2)).unwrap());
        assert!(pair_compatible(&g, &k, (0, 5), (0, 1)).is_err());
    }

    #[test]
    fn graph_file_round_trip() {
        let w = Window::square(2.0).unwrap();
        let ps = sample_poisson_window::<f64>(&w, 20.0, 1).unwrap();
        let g = sample_larg(&ps, &Polygon::<f64>::l1(), 1.0, 0.4, 3).unwrap();
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let body: Vec<(usize, usize)> = text
            .lines()
            .skip(1)
            .map(|l| {
                let mut it = l.split(' ').map(|t| t.parse().unwrap());
                (it.next().unwrap(), it.next().unwrap())
            })
            .collect();
        let mut sorted = body.clone();
        sorted.sort_unstable();
        assert_eq!(body, sorted);
        let back = GeoGraph::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn relabel_and_flip() {
        let h = GraphHeader {
            n: 3,
            p: 0.5,
            delta: 1.0,
            edge_seed: 0,
            point_set_hash: 0,
            point_set_seed: 0,
            edges: 0,
        };
        let g = GeoGraph::from_edges(&h, &[(0, 1)]).unwrap();
        let r = g.relabeled(&[2, 1, 0]).unwrap();
        assert!(r.has_edge(1, 2) && !r.has_edge(0, 1));
        assert!(g.relabeled(&[0, 0, 1]).is_err());
        let f = g.flipped(0, 1).flipped(1, 2);
        assert_eq!(f.edges(), vec![(1, 2)]);
    }
}
