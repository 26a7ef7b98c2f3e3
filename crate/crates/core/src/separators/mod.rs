//! Randomized rounding primitives.

mod decomposition;
mod orthogonal;
mod stats;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::relaxation::LpSolution;

pub use decomposition::{separating_decomposition, Decomposition, EdgeMetric, DEFAULT_ROUNDS};
pub use orthogonal::{projection_count, sample_orthogonal_separator, OrthogonalSeparator, PSD_FLOOR, ZERO_NORM};
pub use stats::{lp_stats, orthogonal_stats, SeparatorStats};

/// One sampled separator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatorSample {
    pub set: Vec<usize>,
    /// Probability scale of the distribution.
    pub alpha: f64,
    /// Orthogonality parameter; absent for LP separators.
    pub m: Option<f64>,
    pub beta: f64,
}

/// Tolerance for the LP rows checked before partitioning.
pub const LP_ROW_TOL: f64 = 1e-6;

/// Edge lengths `y(u,v) = min{1, z/x(u), z/x(v)}`, zero when either `x` is zero.
pub fn partition_lengths(g: &Graph, x: &[f64], z: &dyn Fn(usize, usize) -> f64) -> Vec<f64> {
    g.edges().iter().map(|&(u, v, _)| pair_length(x, z(u, v), u, v)).collect()
}

/// `y(u,v)` for any pair.
pub fn pair_length(x: &[f64], z: f64, u: usize, v: usize) -> f64 {
    if x[u] <= 0.0 || x[v] <= 0.0 {
        0.0
    } else {
        1f64.min(z / x[u]).min(z / x[v])
    }
}

/// Prepared sampler of probabilistic partitionings for one LP point.
#[derive(Clone, Debug)]
pub struct Partitioner {
    metric: EdgeMetric,
    beta: f64,
    rounds: usize,
}

fn check_lp_rows(n: usize, x: &[f64], z: &[f64]) -> Result<()> {
    if x.len() != n || z.len() != n * n {
        return Err(Error::Input("LP point has wrong dimensions".into()));
    }
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let zuv = z[u * n + v];
            if (x[u] - x[v]).abs() > zuv + LP_ROW_TOL {
                return Err(Error::Input(format!("|x({u})-x({v})| exceeds z({u},{v})")));
            }
            for w in 0..n {
                if w != u && w != v && zuv > z[u * n + w] + z[w * n + v] + LP_ROW_TOL {
                    return Err(Error::Input(format!("z violates the triangle inequality at ({u},{w},{v})")));
                }
            }
        }
    }
    Ok(())
}

impl Partitioner {
    /// `z` is row-major `n×n`.
    pub fn new(g: &Graph, x: &[f64], z: &[f64], beta: f64) -> Result<Self> {
        let n = g.n();
        check_lp_rows(n, x, z)?;
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Input(format!("beta={beta} must lie in (0,1]")));
        }
        let lengths = partition_lengths(g, x, &|u, v| z[u * n + v]);
        Ok(Partitioner { metric: EdgeMetric::new(g, &lengths)?, beta, rounds: DEFAULT_ROUNDS })
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn metric(&self) -> &EdgeMetric {
        &self.metric
    }

    pub fn delta(&self) -> f64 {
        self.beta / 3.0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Decomposition {
        self.metric.decompose(self.delta(), self.rounds, rng)
    }
}

/// Samples a probabilistic partitioning with separation threshold `beta`.
pub fn probabilistic_partitioning<R: Rng + ?Sized>(
    g: &Graph,
    x: &[f64],
    z: &[f64],
    beta: f64,
    rng: &mut R,
) -> Result<Decomposition> {
    Ok(Partitioner::new(g, x, z, beta)?.sample(rng))
}

/// Prepared LP separator sampler with `α = 1/n`.
#[derive(Clone, Debug)]
pub struct LpSeparator {
    x: Vec<f64>,
    partitioner: Partitioner,
}

impl LpSeparator {
    pub fn new(g: &Graph, x: &[f64], z: &[f64], beta: f64) -> Result<Self> {
        Ok(LpSeparator { x: x.to_vec(), partitioner: Partitioner::new(g, x, z, beta)? })
    }

    pub fn from_solution(g: &Graph, sol: &LpSolution, beta: f64) -> Result<Self> {
        Self::new(g, &sol.x, &sol.z, beta)
    }

    pub fn alpha(&self) -> f64 {
        1.0 / self.x.len().max(1) as f64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SeparatorSample {
        let n = self.x.len();
        let part = self.partitioner.sample(rng);
        let pick = n as f64 * rng.random::<f64>();
        let t = 1.0 - rng.random::<f64>();
        let mut acc = 0.0;
        let mut set = Vec::new();
        for c in &part.clusters {
            let top = c.iter().map(|&u| self.x[u]).fold(0.0, f64::max);
            acc += top;
            if pick < acc {
                set = c.iter().cloned().filter(|&u| self.x[u] > 0.0 && self.x[u] >= t * top).collect();
                break;
            }
        }
        SeparatorSample { set, alpha: self.alpha(), m: None, beta: self.partitioner.beta }
    }
}

/// Draws one LP separator.
pub fn sample_lp_separator<R: Rng + ?Sized>(
    g: &Graph,
    x: &[f64],
    z: &[f64],
    beta: f64,
    rng: &mut R,
) -> Result<SeparatorSample> {
    Ok(LpSeparator::new(g, x, z, beta)?.sample(rng))
}
