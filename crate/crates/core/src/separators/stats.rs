//! Monte-Carlo estimates of the separator properties.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{LpSeparator, OrthogonalSeparator};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::relaxation::SdpSolution;

/// Empirical separator behaviour over many draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatorStats {
    pub kind: String,
    pub draws: usize,
    pub alpha: f64,
    pub m: Option<f64>,
    pub beta: f64,
    /// Empirical `Pr(u ∈ S)`.
    pub inclusion: Vec<f64>,
    /// `‖ū‖²` or `x(u)`: inclusion should be proportional to it.
    pub weight: Vec<f64>,
    /// Largest deviation of `inclusion[u]` from `scale·weight[u]` in standard
    /// errors, with `scale` fitted (orthogonal) or `1/n` (LP).
    pub inclusion_max_z: f64,
    pub far_pairs: usize,
    /// Largest `(Pr(u,v ∈ S) − bound)/σ` over far pairs, where the bound is
    /// `min(Pr(u), Pr(v))/m` (orthogonal) or zero (LP).
    pub far_max_z: f64,
    /// Draws holding some far pair.
    pub far_violations: usize,
    /// Largest `Pr(edge separated)/(α·length)` over edges of positive length.
    pub distortion: f64,
    pub empty_draws: usize,
}

fn z_score(observed: f64, expected: f64, draws: usize) -> f64 {
    let p = expected.clamp(1.0 / draws as f64, 1.0);
    (observed - expected) / (p * (1.0 - p).max(1.0 / draws as f64) / draws as f64).sqrt()
}

struct Tally {
    n: usize,
    hits: Vec<usize>,
    pair: Vec<usize>,
    sep: Vec<usize>,
    far_violations: usize,
    empty: usize,
}

impl Tally {
    fn new(n: usize, m: usize) -> Self {
        Tally { n, hits: vec![0; n], pair: vec![0; n * n], sep: vec![0; m], far_violations: 0, empty: 0 }
    }

    fn add(&mut self, g: &Graph, set: &[usize], far: &[bool]) {
        let n = self.n;
        if set.is_empty() {
            self.empty += 1;
        }
        let mut inside = vec![false; n];
        for &u in set {
            inside[u] = true;
            self.hits[u] += 1;
        }
        let mut bad = false;
        for (i, &u) in set.iter().enumerate() {
            for &v in &set[i + 1..] {
                let (a, b) = (u.min(v), u.max(v));
                self.pair[a * n + b] += 1;
                bad |= far[a * n + b];
            }
        }
        self.far_violations += bad as usize;
        for (e, &(u, v, _)) in g.edges().iter().enumerate() {
            if inside[u] != inside[v] {
                self.sep[e] += 1;
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    kind: &str,
    g: &Graph,
    t: Tally,
    draws: usize,
    alpha: f64,
    m: Option<f64>,
    beta: f64,
    weight: Vec<f64>,
    scale: Option<f64>,
    far: &[bool],
    length: &dyn Fn(usize, usize) -> f64,
) -> SeparatorStats {
    let n = t.n;
    let nd = draws as f64;
    let inclusion: Vec<f64> = t.hits.iter().map(|&h| h as f64 / nd).collect();
    let scale = scale.unwrap_or_else(|| {
        let w: f64 = weight.iter().sum();
        if w > 0.0 {
            inclusion.iter().sum::<f64>() / w
        } else {
            0.0
        }
    });
    let inclusion_max_z =
        (0..n).map(|u| z_score(inclusion[u], scale * weight[u], draws).abs()).fold(0.0, f64::max);
    let mut far_pairs = 0;
    let mut far_max_z = f64::NEG_INFINITY;
    for u in 0..n {
        for v in (u + 1)..n {
            if !far[u * n + v] {
                continue;
            }
            far_pairs += 1;
            let both = t.pair[u * n + v] as f64 / nd;
            let bound = match m {
                Some(m) => inclusion[u].min(inclusion[v]) / m,
                None => 0.0,
            };
            far_max_z = far_max_z.max(z_score(both, bound, draws));
        }
    }
    let mut distortion: f64 = 0.0;
    for (e, &(u, v, _)) in g.edges().iter().enumerate() {
        let len = length(u, v);
        if len > 1e-12 && alpha > 0.0 {
            distortion = distortion.max(t.sep[e] as f64 / nd / (alpha * len));
        }
    }
    SeparatorStats {
        kind: kind.into(),
        draws,
        alpha,
        m,
        beta,
        inclusion,
        weight,
        inclusion_max_z,
        far_pairs,
        far_max_z: if far_pairs == 0 { 0.0 } else { far_max_z },
        far_violations: t.far_violations,
        distortion,
        empty_draws: t.empty,
    }
}

/// Statistics of the orthogonal separator of `sol` over `draws` draws. Far
/// pairs have `‖ū−v̄‖² ≥ β·min(‖ū‖², ‖v̄‖²)` with both vectors nonzero.
pub fn orthogonal_stats<R: Rng + ?Sized>(
    g: &Graph,
    sol: &SdpSolution,
    m: f64,
    beta: f64,
    draws: usize,
    rng: &mut R,
) -> Result<SeparatorStats> {
    let n = sol.n;
    if g.n() != n || draws == 0 {
        return Err(Error::Input("graph and solution sizes differ, or no draws".into()));
    }
    let sep = OrthogonalSeparator::new(sol, m, beta)?;
    let norms: Vec<f64> = (0..n).map(|u| sol.sq_norm(u).max(0.0)).collect();
    let scale = norms.iter().copied().fold(0.0, f64::max).max(1e-300);
    let mut far = vec![false; n * n];
    for u in 0..n {
        for v in (u + 1)..n {
            let lo = norms[u].min(norms[v]);
            far[u * n + v] = lo > super::ZERO_NORM * scale && sol.sq_dist(u, v) >= beta * lo;
        }
    }
    let mut t = Tally::new(n, g.m());
    for _ in 0..draws {
        t.add(g, &sep.sample(rng).set, &far);
    }
    Ok(finish("orthogonal", g, t, draws, sep.alpha(), Some(m), beta, norms, None, &far, &|u, v| sol.sq_dist(u, v)))
}

/// Statistics of the LP separator of `(x, z)`. Far pairs have
/// `z(u,v) ≥ β·min(x(u), x(v))` with both `x` positive.
pub fn lp_stats<R: Rng + ?Sized>(
    g: &Graph,
    x: &[f64],
    z: &[f64],
    beta: f64,
    draws: usize,
    rng: &mut R,
) -> Result<SeparatorStats> {
    let n = g.n();
    if draws == 0 {
        return Err(Error::Input("no draws requested".into()));
    }
    let sep = LpSeparator::new(g, x, z, beta)?;
    let mut far = vec![false; n * n];
    for u in 0..n {
        for v in (u + 1)..n {
            let lo = x[u].min(x[v]);
            far[u * n + v] = lo > 0.0 && z[u * n + v] >= beta * lo;
        }
    }
    let mut t = Tally::new(n, g.m());
    for _ in 0..draws {
        t.add(g, &sep.sample(rng).set, &far);
    }
    let alpha = sep.alpha();
    Ok(finish("lp", g, t, draws, alpha, None, beta, x.to_vec(), Some(alpha), &far, &|u, v| z[u * n + v]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn lp_stats_on_a_uniform_point() {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let x = vec![1.0; 4];
        let z = vec![0.0; 16];
        let s = lp_stats(&g, &x, &z, 0.5, 4000, &mut stream(1, "separator")).unwrap();
        assert_eq!(s.far_pairs, 0);
        assert!(s.inclusion_max_z < 5.0);
        assert_eq!(s.distortion, 0.0);
    }
}
