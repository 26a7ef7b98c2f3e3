//! Multiplicative-weights covering of the vertex set by unbalanced cuts.
//!
//! Vertex weights start at 1 and halve whenever a vertex is covered. They are
//! kept as halving counts `N_v`, so every `y(v) = 2^{-N_v}` is exact.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::UcutQuery;
use crate::sse::{weighted_unbalanced_cut, Backend, RoundingConfig, SseSolution, UCUT_MASS_FACTOR};

/// Guarantees of an unbalanced-cut backend: cut at most `alpha` times the
/// optimum, size at most `beta` times the cap and `y(S) ≥ τ·y(V)/gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contract {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Contract {
    pub const EXACT: Contract = Contract { alpha: 1.0, beta: 1.0, gamma: 1.0 };
}

/// Backend selection for the covering loops.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverConfig {
    pub backend: Backend,
    pub epsilon: f64,
    pub rounding: RoundingConfig,
    /// Cut factor assumed for rounding backends; `√(ln n · ln 2k)` when absent.
    pub alpha: Option<f64>,
}

impl CoverConfig {
    pub fn new(backend: Backend, epsilon: f64) -> Self {
        CoverConfig { backend, epsilon, rounding: RoundingConfig::default(), alpha: None }
    }

    pub fn contract(&self, n: usize, k: usize) -> Contract {
        match self.backend {
            Backend::Exact => Contract::EXACT,
            _ => {
                let alpha = self.alpha.unwrap_or_else(|| {
                    ((n.max(2) as f64).ln().max(1.0) * (2.0 * k.max(1) as f64).ln().max(1.0)).sqrt()
                });
                Contract { alpha, beta: 1.0 + self.epsilon, gamma: UCUT_MASS_FACTOR }
            }
        }
    }
}

/// One iteration of a covering loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverStep {
    pub set: Vec<usize>,
    pub cut: f64,
    /// Total vertex size of the set.
    pub size: usize,
    /// `yᵗ(Sᵗ)`.
    pub y_mass: f64,
    /// `Yᵗ`, before the update.
    pub y_total: f64,
    /// Accepted cost level of the cut-capped loop.
    pub level: Option<usize>,
    /// The backend exhausted its draws and missed its contract.
    pub fallback: bool,
}

/// Ordered multiset of covering sets with per-vertex coverage counts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cover {
    pub n: usize,
    pub k: usize,
    pub steps: Vec<CoverStep>,
    /// `N_v`: number of sets containing `v`.
    pub coverage: Vec<u32>,
    /// `Y¹, …, Y^{ℓ+1}`.
    pub y_trace: Vec<f64>,
    pub contract: Contract,
    pub backend: Backend,
    /// Separator draws spent by rounding backends.
    pub draws: usize,
}

impl Cover {
    /// Number of iterations `ℓ`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn sets(&self) -> impl Iterator<Item = &[usize]> {
        self.steps.iter().map(|s| s.set.as_slice())
    }

    pub fn max_cut(&self) -> f64 {
        self.steps.iter().map(|s| s.cut).fold(0.0, f64::max)
    }

    pub fn total_cut(&self) -> f64 {
        self.steps.iter().map(|s| s.cut).sum()
    }

    pub fn max_size(&self) -> usize {
        self.steps.iter().map(|s| s.size).max().unwrap_or(0)
    }

    pub fn fallbacks(&self) -> usize {
        self.steps.iter().filter(|s| s.fallback).count()
    }

    /// `min_v N_v / ℓ`.
    pub fn min_coverage_fraction(&self) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        *self.coverage.iter().min().unwrap_or(&0) as f64 / self.steps.len() as f64
    }

    /// `c` with every vertex in at least a `c/k` fraction of the sets.
    pub fn coverage_constant(&self) -> f64 {
        self.k as f64 * self.min_coverage_fraction()
    }
}

/// Iteration bound `1 + 4γk·ln n` of the balanced covering loop.
pub fn kpart_iteration_bound(n: usize, k: usize, gamma: f64) -> f64 {
    1.0 + 4.0 * gamma * k as f64 * (n.max(1) as f64).ln()
}

/// Iteration bound `9γk·log₂ n` of the cut-capped covering loop.
pub fn cut_iteration_bound(n: usize, k: usize, gamma: f64) -> f64 {
    9.0 * gamma * k as f64 * (n.max(1) as f64).log2()
}

/// Total-cut budget `17αγ·log₂ n·D` of the cut-capped covering loop.
pub fn cut_total_budget(n: usize, contract: &Contract, d: f64) -> f64 {
    17.0 * contract.alpha * contract.gamma * (n.max(1) as f64).log2() * d
}

struct Loop<'a> {
    g: &'a Graph,
    k: usize,
    rho: f64,
    sizes: Vec<usize>,
    terminals: Vec<usize>,
    cfg: &'a CoverConfig,
    contract: Contract,
}

impl Loop<'_> {
    fn query(&self, y: &[f64], tau: f64) -> UcutQuery {
        UcutQuery { y: y.to_vec(), tau, rho: self.rho, size_w: self.sizes.clone(), terminals: self.terminals.clone() }
    }

    fn solve<R: Rng + ?Sized>(&self, y: &[f64], tau: f64, rng: &mut R) -> Result<SseSolution> {
        let q = self.query(y, tau);
        weighted_unbalanced_cut(self.g, &q, self.cfg.epsilon, self.cfg.backend, &self.cfg.rounding, rng)
    }

    /// Runs the loop; `pick` returns the set of one iteration with its `τ` and level.
    fn run<R, F>(&self, rng: &mut R, hard_cap: usize, mut pick: F) -> Result<Cover>
    where
        R: Rng + ?Sized,
        F: FnMut(&Self, &[f64], &mut R) -> Result<(SseSolution, f64, Option<usize>)>,
    {
        let n = self.g.n();
        let mut coverage = vec![0u32; n];
        let y_of = |c: &[u32]| -> Vec<f64> { c.iter().map(|&h| 0.5f64.powi(h as i32)).collect() };
        let mut y_total: f64 = n as f64;
        let mut cover = Cover {
            n,
            k: self.k,
            steps: Vec::new(),
            coverage: Vec::new(),
            y_trace: vec![y_total],
            contract: self.contract,
            backend: self.cfg.backend,
            draws: 0,
        };
        let size_total: usize = self.sizes.iter().sum();
        let size_cap = self.contract.beta * self.rho * size_total as f64 * (1.0 + 1e-12);
        while y_total > 1.0 / n as f64 {
            if cover.steps.len() >= hard_cap {
                return Err(Error::Budget(format!(
                    "covering did not finish within {hard_cap} iterations after {} fallback sets",
                    cover.fallbacks()
                )));
            }
            let y = y_of(&coverage);
            let (sol, tau, level) = pick(self, &y, rng)?;
            if self.cfg.backend != Backend::Exact {
                cover.draws += sol.iterations;
            }
            let y_mass: f64 = sol.set.iter().map(|&v| y[v]).sum();
            let size: usize = sol.set.iter().map(|&v| self.sizes[v]).sum();
            let terms = sol.set.iter().filter(|v| self.terminals.contains(v)).count();
            if sol.set.is_empty() || y_mass <= 0.0 || terms > 1 {
                return Err(Error::Contract(format!(
                    "iteration {}: backend returned a set with no mass or {terms} terminals",
                    cover.steps.len() + 1
                )));
            }
            let met = y_mass >= tau * y_total / self.contract.gamma * (1.0 - 1e-12) && size as f64 <= size_cap;
            if !met && !sol.budget_exhausted {
                return Err(Error::Contract(format!(
                    "iteration {}: y(S)={y_mass:.6e} of Y={y_total:.6e} at tau={tau} with size {size}",
                    cover.steps.len() + 1
                )));
            }
            for &v in &sol.set {
                coverage[v] += 1;
            }
            let next: f64 = y_of(&coverage).iter().sum();
            debug_assert!((next - (y_total - 0.5 * y_mass)).abs() <= 1e-9 * y_total);
            cover.steps.push(CoverStep {
                set: sol.set,
                cut: sol.report.boundary,
                size,
                y_mass,
                y_total,
                level,
                fallback: !met,
            });
            y_total = next;
            cover.y_trace.push(y_total);
        }
        cover.coverage = coverage;
        Ok(cover)
    }
}

/// Algorithm 1: covers `V` with unbalanced cuts of size about `n/k`.
///
/// Each iteration solves the weighted instance `⟨G, yᵗ, w, ρ, 1/k⟩` with
/// `ρn = ⌈n/k⌉` and halves `y` on the returned set until `Σ y ≤ 1/n`. When
/// `k` does not divide `n`, no set of `⌊n/k⌋` vertices reaches `y(V)/k`
/// under uniform `y`, so the size cap rounds up.
pub fn cover_minmax_kpart<R: Rng + ?Sized>(g: &Graph, k: usize, cfg: &CoverConfig, rng: &mut R) -> Result<Cover> {
    if k < 2 {
        return Err(Error::Input(format!("k={k} must be at least 2")));
    }
    let n = g.n();
    if k > n {
        return Err(Error::Input(format!("k={k} exceeds n={n}")));
    }
    let tau = 1.0 / k as f64;
    let rho = n.div_ceil(k) as f64 / n as f64;
    let contract = cfg.contract(n, k);
    let lp = Loop { g, k, rho, sizes: vec![1; n], terminals: Vec::new(), cfg, contract };
    let bound = kpart_iteration_bound(n, k, contract.gamma);
    let cover = lp.run(rng, 4 * bound.floor() as usize + 4, |lp, y, rng| {
        lp.solve(y, tau, rng).map(|s| (s, tau, None))
    })?;
    if cover.fallbacks() == 0 && cover.len() as f64 > bound + 1e-9 {
        return Err(Error::Contract(format!("{} iterations exceed the bound {bound:.2}", cover.len())));
    }
    Ok(cover)
}

/// Per-set caps of a Min-Max Cut instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutCaps {
    /// Size cap as a fraction of the total vertex size.
    pub rho: f64,
    /// Cap on every part's cut.
    pub c: f64,
    /// Cap on the sum of part cuts.
    pub d: f64,
}

/// Number of cost levels `⌈log₂ k⌉ + 1` above level 0.
pub fn top_level(k: usize) -> usize {
    (k.max(1) as f64).log2().ceil() as usize + 1
}

/// Algorithm 3: covering under per-set and total cut caps.
///
/// Each iteration tries levels `i = 0, 1, …` with `τ = 2^{-i}` and accepts the
/// first set with `δ(S) ≤ α·min(C, 4D/2^i)`. `sizes` are vertex sizes (unit when
/// absent) and every set holds at most one of `terminals`.
pub fn cover_minmax_cut<R: Rng + ?Sized>(
    g: &Graph,
    k: usize,
    caps: CutCaps,
    terminals: &[usize],
    sizes: Option<&[usize]>,
    cfg: &CoverConfig,
    rng: &mut R,
) -> Result<Cover> {
    let n = g.n();
    if k == 0 {
        return Err(Error::Input("k must be positive".into()));
    }
    if !(caps.rho > 0.0 && caps.rho <= 1.0) || !(caps.c > 0.0) || !(caps.d > 0.0) {
        return Err(Error::Input(format!("caps {caps:?} must be positive with rho ≤ 1")));
    }
    let sizes = sizes.map(<[usize]>::to_vec).unwrap_or_else(|| vec![1; n]);
    if sizes.len() != n {
        return Err(Error::Input(format!("{} vertex sizes for n={n}", sizes.len())));
    }
    let contract = cfg.contract(n, k);
    let lp = Loop { g, k, rho: caps.rho, sizes, terminals: terminals.to_vec(), cfg, contract };
    let bound = cut_iteration_bound(n, k, contract.gamma).max(1.0);
    let top = top_level(k);
    let cover = lp.run(rng, 4 * bound.ceil() as usize + 4, |lp, y, rng| {
        for i in 0..=top {
            let scale = 0.5f64.powi(i as i32);
            let sol = match lp.solve(y, scale, rng) {
                Ok(s) => s,
                Err(Error::Infeasible(_)) => continue,
                Err(e) => return Err(e),
            };
            let cap = contract.alpha * caps.c.min(4.0 * caps.d * scale);
            if sol.report.boundary <= cap * (1.0 + 1e-12) {
                return Ok((sol, scale, Some(i)));
            }
        }
        Err(Error::Infeasible(format!(
            "no cost level accepted a set (C={}, D={}); the caps are below the feasible range",
            caps.c, caps.d
        )))
    })?;
    if cover.fallbacks() == 0 {
        check_cut_cover(&cover, caps)?;
    }
    Ok(cover)
}

/// Asserts the guarantees of the cut-capped covering loop on a run without fallbacks.
pub fn check_cut_cover(cover: &Cover, caps: CutCaps) -> Result<()> {
    let ct = &cover.contract;
    let n = cover.n;
    for (t, s) in cover.steps.iter().enumerate() {
        if s.cut > ct.alpha * caps.c * (1.0 + 1e-12) {
            return Err(Error::Contract(format!("set {t} has cut {} above αC", s.cut)));
        }
        // decay Y^{t+1} ≤ (1 − δ(Sᵗ)/(8αγD))·Yᵗ
        let next = cover.y_trace[t + 1];
        let decay = (1.0 - s.cut / (8.0 * ct.alpha * ct.gamma * caps.d)) * s.y_total;
        if next > decay * (1.0 + 1e-12) + 1e-300 {
            return Err(Error::Contract(format!("iteration {t}: Y fell to {next:.6e}, above {decay:.6e}")));
        }
    }
    let bound = cut_iteration_bound(n, cover.k, ct.gamma);
    if n > 1 && cover.len() as f64 > bound + 1e-9 {
        return Err(Error::Contract(format!("{} sets exceed the bound {bound:.2}", cover.len())));
    }
    let budget = cut_total_budget(n, ct, caps.d);
    if n > 1 && cover.total_cut() > budget * (1.0 + 1e-12) {
        return Err(Error::Contract(format!("total cut {} exceeds {budget:.4}", cover.total_cut())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn exact_cover_of_a_cycle() {
        let g = cycle(8);
        let cfg = CoverConfig::new(Backend::Exact, 0.1);
        let mut rng = stream(1, "cover");
        let c = cover_minmax_kpart(&g, 2, &cfg, &mut rng).unwrap();
        // the best half of a cycle is an arc with cut 2
        assert!(c.steps.iter().all(|s| s.cut == 2.0 && s.size <= 4));
        assert!(c.coverage.iter().all(|&v| v >= 3));
        assert!(c.len() as f64 <= kpart_iteration_bound(8, 2, 1.0));
        for w in c.y_trace.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(*c.y_trace.last().unwrap() <= 1.0 / 8.0);
    }

    #[test]
    fn halving_counts_match_weights() {
        let g = cycle(6);
        let cfg = CoverConfig::new(Backend::Exact, 0.1);
        let c = cover_minmax_kpart(&g, 3, &cfg, &mut stream(2, "cover")).unwrap();
        let y_final: f64 = c.coverage.iter().map(|&h| 0.5f64.powi(h as i32)).sum();
        assert_eq!(y_final, *c.y_trace.last().unwrap());
        for v in 0..6 {
            let hits = c.sets().filter(|s| s.contains(&v)).count() as u32;
            assert_eq!(hits, c.coverage[v]);
        }
    }

    #[test]
    fn loose_total_cap_covers() {
        let g = cycle(6);
        let cfg = CoverConfig::new(Backend::Exact, 0.1);
        let caps = CutCaps { rho: 0.5, c: 2.0, d: 4.0 };
        let c = cover_minmax_cut(&g, 2, caps, &[], None, &cfg, &mut stream(3, "cover")).unwrap();
        assert!(c.steps.iter().all(|s| s.cut <= 2.0));
        check_cut_cover(&c, caps).unwrap();
    }

    #[test]
    fn caps_below_optimum_fail() {
        let g = cycle(6);
        let cfg = CoverConfig::new(Backend::Exact, 0.1);
        let caps = CutCaps { rho: 0.5, c: 1.0, d: 4.0 };
        let r = cover_minmax_cut(&g, 2, caps, &[], None, &cfg, &mut stream(4, "cover"));
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn terminals_never_share_a_set() {
        let g = cycle(6);
        let cfg = CoverConfig::new(Backend::Exact, 0.1);
        let caps = CutCaps { rho: 0.5, c: 2.0, d: 6.0 };
        let c = cover_minmax_cut(&g, 3, caps, &[0, 2, 4], None, &cfg, &mut stream(5, "cover")).unwrap();
        for s in c.sets() {
            assert!(s.iter().filter(|v| [0, 2, 4].contains(*v)).count() <= 1);
        }
    }
}
