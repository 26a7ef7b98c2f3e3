//! Low-diameter stochastic decompositions of graph shortest-path metrics.
//!
//! A sample runs `rounds` passes of shifted band chopping (each cluster is
//! cut into bands of width `Δ/2` of its internal distance from a root, and
//! bands split into connected pieces). Clusters whose diameter is already
//! below `Δ` are left alone. Any cluster still too wide is finished by ball
//! carving with radius drawn from `[Δ/4, Δ/2)`, so every output cluster has
//! diameter strictly below `Δ`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default number of chopping passes.
pub const DEFAULT_ROUNDS: usize = 3;

/// Partition of the vertex set into clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub clusters: Vec<Vec<usize>>,
    pub cluster_of: Vec<usize>,
    pub delta: f64,
}

impl Decomposition {
    fn from_labels(labels: &[usize], delta: f64) -> Self {
        let mut index = std::collections::BTreeMap::new();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut cluster_of = vec![0; labels.len()];
        for (v, &l) in labels.iter().enumerate() {
            let c = *index.entry(l).or_insert_with(|| {
                clusters.push(Vec::new());
                clusters.len() - 1
            });
            clusters[c].push(v);
            cluster_of[v] = c;
        }
        Decomposition { clusters, cluster_of, delta }
    }

    pub fn separates(&self, u: usize, v: usize) -> bool {
        self.cluster_of[u] != self.cluster_of[v]
    }
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then(o.1.cmp(&self.1))
    }
}

/// Shortest-path metric of a graph with per-edge lengths.
#[derive(Clone, Debug)]
pub struct EdgeMetric {
    n: usize,
    /// Adjacency with lengths.
    adj: Vec<Vec<(usize, f64)>>,
    dist: Vec<f64>,
}

impl EdgeMetric {
    /// `lengths[i]` is the length of `g.edges()[i]`.
    pub fn new(g: &Graph, lengths: &[f64]) -> Result<Self> {
        if lengths.len() != g.m() {
            return Err(Error::Input(format!("expected {} edge lengths, got {}", g.m(), lengths.len())));
        }
        if let Some(l) = lengths.iter().find(|l| !l.is_finite() || **l < 0.0) {
            return Err(Error::Input(format!("edge length {l} is not a nonnegative real")));
        }
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for (&(u, v, _), &l) in g.edges().iter().zip(lengths) {
            adj[u].push((v, l));
            adj[v].push((u, l));
        }
        let mut metric = EdgeMetric { n, adj, dist: Vec::new() };
        let all = vec![true; n];
        let mut dist = vec![f64::INFINITY; n * n];
        for s in 0..n {
            let row = metric.dijkstra(s, &all);
            dist[s * n..(s + 1) * n].copy_from_slice(&row);
        }
        metric.dist = dist;
        Ok(metric)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self, u: usize, v: usize) -> f64 {
        self.dist[u * self.n + v]
    }

    /// Distances from `s` inside the vertex set `allowed`.
    fn dijkstra(&self, s: usize, allowed: &[bool]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n];
        dist[s] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Item(0.0, s));
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, l) in &self.adj[u] {
                if allowed[v] && d + l < dist[v] {
                    dist[v] = d + l;
                    heap.push(Item(d + l, v));
                }
            }
        }
        dist
    }

    pub fn diameter(&self, set: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (i, &u) in set.iter().enumerate() {
            for &v in &set[i + 1..] {
                best = best.max(self.d(u, v));
            }
        }
        best
    }

    /// Samples a decomposition whose clusters all have diameter below `delta`.
    pub fn decompose<R: Rng + ?Sized>(&self, delta: f64, rounds: usize, rng: &mut R) -> Decomposition {
        let n = self.n;
        let mut clusters: Vec<Vec<usize>> = vec![(0..n).collect()];
        let width = delta / 2.0;
        for _ in 0..rounds {
            let mut next = Vec::new();
            for c in clusters {
                if c.len() <= 1 || self.diameter(&c) < delta {
                    next.push(c);
                    continue;
                }
                next.extend(self.chop(&c, width, rng));
            }
            clusters = next;
        }
        let mut out = Vec::new();
        for c in clusters {
            if c.len() <= 1 || self.diameter(&c) < delta {
                out.push(c);
            } else {
                out.extend(self.carve(&c, delta, rng));
            }
        }
        let mut labels = vec![0; n];
        for (i, c) in out.iter().enumerate() {
            for &v in c {
                labels[v] = i;
            }
        }
        let mut d = Decomposition::from_labels(&labels, delta);
        d.delta = delta;
        d
    }

    /// One band-chopping pass over a cluster, piece by connected piece.
    fn chop<R: Rng + ?Sized>(&self, c: &[usize], width: f64, rng: &mut R) -> Vec<Vec<usize>> {
        let mut allowed = vec![false; self.n];
        for &v in c {
            allowed[v] = true;
        }
        let shift = width * rng.random::<f64>();
        let mut band = vec![i64::MIN; self.n];
        let mut done = vec![false; self.n];
        for &root in c {
            if done[root] {
                continue;
            }
            let dist = self.dijkstra(root, &allowed);
            for &v in c {
                if dist[v].is_finite() {
                    done[v] = true;
                    band[v] = if width > 0.0 { ((dist[v] + shift) / width).floor() as i64 } else { 0 };
                }
            }
        }
        // pieces: connected components of equal-band vertices (zero-length edges keep
        // coincident points together only if they share a band)
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for &s in c {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut piece = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < piece.len() {
                let u = piece[i];
                i += 1;
                for &(v, _) in &self.adj[u] {
                    if allowed[v] && comp[v] == usize::MAX && band[v] == band[u] {
                        comp[v] = id;
                        piece.push(v);
                    }
                }
            }
            piece.sort_unstable();
            out.push(piece);
        }
        out
    }

    /// Ball carving with a common random radius in `[Δ/4, Δ/2)`.
    fn carve<R: Rng + ?Sized>(&self, c: &[usize], delta: f64, rng: &mut R) -> Vec<Vec<usize>> {
        let mut order = c.to_vec();
        order.shuffle(rng);
        let radius = delta * (0.25 + 0.25 * rng.random::<f64>());
        let mut taken = vec![false; self.n];
        let mut out = Vec::new();
        for &center in &order {
            let ball: Vec<usize> = c.iter().cloned().filter(|&v| !taken[v] && self.d(center, v) <= radius).collect();
            if ball.is_empty() {
                continue;
            }
            for &v in &ball {
                taken[v] = true;
            }
            out.push(ball);
        }
        out
    }
}

/// Samples a decomposition of `g` under `lengths` with clusters of diameter below `delta`.
pub fn separating_decomposition<R: Rng + ?Sized>(
    g: &Graph,
    lengths: &[f64],
    delta: f64,
    rng: &mut R,
) -> Result<Decomposition> {
    if !(delta > 0.0) {
        return Err(Error::Input(format!("delta={delta} must be positive")));
    }
    Ok(EdgeMetric::new(g, lengths)?.decompose(delta, DEFAULT_ROUNDS, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn large_delta_single_cluster() {
        let g = path(6);
        let mut rng = stream(3, "test");
        for _ in 0..50 {
            let d = separating_decomposition(&g, &[1.0; 5], 5.5, &mut rng).unwrap();
            assert_eq!(d.clusters.len(), 1);
        }
    }

    #[test]
    fn tiny_delta_singletons() {
        let g = path(6);
        let mut rng = stream(4, "test");
        let d = separating_decomposition(&g, &[1.0; 5], 0.5, &mut rng).unwrap();
        assert_eq!(d.clusters.len(), 6);
    }

    #[test]
    fn diameter_bound_holds_and_components_stay_apart() {
        let g = Graph::new(7, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (4, 5, 1.0), (5, 6, 1.0)]).unwrap();
        let metric = EdgeMetric::new(&g, &[0.7, 1.3, 0.4, 1.0, 0.2]).unwrap();
        let mut rng = stream(5, "test");
        for _ in 0..200 {
            let d = metric.decompose(1.5, 2, &mut rng);
            for c in &d.clusters {
                assert!(metric.diameter(c) < 1.5);
            }
            assert!(d.separates(0, 4));
        }
    }
}
