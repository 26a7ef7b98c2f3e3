//! Semidefinite and linear relaxations of small-set expansion.
//!
//! The SDP is stated over a gram matrix `X` of vectors, one per vertex, with
//! the origin implicit as the zero vector: `‖ū‖² = X[u,u]` and
//! `‖ū−v̄‖² = X[u,u] + X[v,v] − 2X[u,v]`.

mod lp;
mod sdp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Measure};

pub use lp::{build_sse_lp, sdp_shadow_feasible, solve_lp, LpProgram, LpSolution};
pub use sdp::{solve_sdp, solve_sdp_with, SdpOptions, SdpSolution};

/// Which rounding algorithm the program serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpMode {
    PartI,
    PartII,
}

/// SSE semidefinite program. Rows are implicit and generated on demand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpProgram {
    pub n: usize,
    /// Edge terms `(u, v, w(u,v)/w(E))`.
    pub objective: Vec<(usize, usize, f64)>,
    /// Normalized size measure.
    pub mu: Vec<f64>,
    /// Raw mass measure; `h` is in the same units.
    pub eta: Vec<f64>,
    pub rho: f64,
    pub h: f64,
    pub mode: SdpMode,
    /// Vertices whose vector is fixed to the origin.
    pub zeroed: Vec<bool>,
    /// Vertex whose squared norm is fixed to one.
    pub pinned: Option<usize>,
    /// Adds `‖ū‖² ≤ 1` for every vertex.
    pub norm_cap: bool,
}

/// Number of rows per constraint family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCounts {
    /// ℓ₂² triangle rows over the vertices plus the origin.
    pub triangle: usize,
    pub spreading: usize,
    pub measure: usize,
    pub eta_spreading: usize,
    pub mu_cap: usize,
    /// Pinned and zeroed norms.
    pub fixed: usize,
    pub norm_cap: usize,
}

/// Largest violation per constraint family (positive means violated).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub triangle: f64,
    pub spreading: f64,
    pub measure: f64,
    pub eta_spreading: f64,
    pub mu_cap: f64,
    pub fixed: f64,
    pub norm_cap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        [
            self.triangle,
            self.spreading,
            self.measure,
            self.eta_spreading,
            self.mu_cap,
            self.fixed,
            self.norm_cap,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Checks the shared preconditions of both relaxations.
fn check_params(g: &Graph, mu: &Measure, eta: &Measure, rho: f64, h: f64) -> Result<()> {
    let n = g.n();
    if mu.len() != n || eta.len() != n {
        return Err(Error::Input(format!("measures must have length n={n}")));
    }
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::Input(format!("rho={rho} must lie in (0, 1/2]")));
    }
    if !(h > 0.0 && h <= eta.total() * (1.0 + 1e-12)) {
        return Err(Error::Input(format!("H={h} must lie in (0, eta(V)]")));
    }
    if mu.total() <= 0.0 {
        return Err(Error::Input("mu has zero mass".into()));
    }
    Ok(())
}

fn objective_terms(g: &Graph) -> Vec<(usize, usize, f64)> {
    let we = g.total_weight();
    if we <= 0.0 {
        return Vec::new();
    }
    g.edges().iter().filter(|e| e.2 > 0.0).map(|&(u, v, w)| (u, v, w / we)).collect()
}

/// Builds the SSE semidefinite program.
///
/// Vertices with `η(u) > 2H` and terminals other than `pinned` are fixed to
/// the origin. `H` is measured in the units of `eta`.
#[allow(clippy::too_many_arguments)]
pub fn build_sse_sdp(
    g: &Graph,
    mu: &Measure,
    eta: &Measure,
    rho: f64,
    h: f64,
    mode: SdpMode,
    terminals: &[usize],
    pinned: Option<usize>,
) -> Result<SdpProgram> {
    check_params(g, mu, eta, rho, h)?;
    let n = g.n();
    if let Some(&t) = terminals.iter().find(|&&t| t >= n) {
        return Err(Error::Input(format!("terminal {t} out of range for n={n}")));
    }
    if let Some(p) = pinned {
        if !terminals.contains(&p) {
            return Err(Error::Input(format!("pinned vertex {p} is not a terminal")));
        }
    }
    let mut zeroed: Vec<bool> = eta.values().iter().map(|&e| e > 2.0 * h).collect();
    for &t in terminals {
        zeroed[t] = true;
    }
    if let Some(p) = pinned {
        zeroed[p] = false;
    }
    Ok(SdpProgram {
        n,
        objective: objective_terms(g),
        mu: mu.normalized()?.values().to_vec(),
        eta: eta.values().to_vec(),
        rho,
        h,
        mode,
        zeroed,
        pinned,
        norm_cap: false,
    })
}

impl SdpProgram {
    pub fn with_norm_cap(mut self, on: bool) -> Self {
        self.norm_cap = on;
        self
    }

    pub fn eta_total(&self) -> f64 {
        self.eta.iter().sum()
    }

    pub fn row_counts(&self) -> RowCounts {
        let n = self.n;
        let part2 = self.mode == SdpMode::PartII;
        RowCounts {
            triangle: (n + 1) * n * n.saturating_sub(1) / 2,
            spreading: n,
            measure: 1,
            eta_spreading: if part2 { n } else { 0 },
            mu_cap: part2 as usize,
            fixed: self.zeroed.iter().filter(|&&z| z).count() + self.pinned.is_some() as usize,
            norm_cap: if self.norm_cap { n } else { 0 },
        }
    }

    /// Gram matrix of the integral embedding `ū = e` for `u ∈ S`, origin otherwise.
    pub fn integral_gram(&self, s: &[usize]) -> Vec<f64> {
        let n = self.n;
        let mut x = vec![0.0; n * n];
        for &u in s {
            for &v in s {
                x[u * n + v] = 1.0;
            }
        }
        x
    }

    /// Objective `Σ w(u,v)‖ū−v̄‖²/w(E)`.
    pub fn objective_value(&self, gram: &[f64]) -> f64 {
        let n = self.n;
        self.objective
            .iter()
            .map(|&(u, v, c)| c * (gram[u * n + u] + gram[v * n + v] - 2.0 * gram[u * n + v]))
            .sum()
    }

    /// Largest violation of every constraint family, with min terms evaluated exactly.
    pub fn residuals(&self, gram: &[f64]) -> Residuals {
        let n = self.n;
        let x = |u: usize, v: usize| gram[u * n + v];
        let d = |u: usize, v: usize| x(u, u) + x(v, v) - 2.0 * x(u, v);
        let mut r = Residuals {
            triangle: f64::NEG_INFINITY,
            spreading: f64::NEG_INFINITY,
            measure: f64::NEG_INFINITY,
            eta_spreading: f64::NEG_INFINITY,
            mu_cap: f64::NEG_INFINITY,
            fixed: f64::NEG_INFINITY,
            norm_cap: f64::NEG_INFINITY,
        };
        for u in 0..n {
            for v in 0..n {
                if v == u {
                    continue;
                }
                // origin as an endpoint: ‖ū‖² ≤ ‖ū−v̄‖² + ‖v̄‖²
                r.triangle = r.triangle.max(x(u, u) - d(u, v) - x(v, v));
                if u < v {
                    // origin in the middle: ‖ū−v̄‖² ≤ ‖ū‖² + ‖v̄‖²
                    r.triangle = r.triangle.max(d(u, v) - x(u, u) - x(v, v));
                }
                for w in (u + 1)..n {
                    if w != v {
                        r.triangle = r.triangle.max(d(u, w) - d(u, v) - d(v, w));
                    }
                }
            }
        }
        let eta_total = self.eta_total();
        for u in 0..n {
            let mut sm = 0.0;
            let mut se = 0.0;
            for v in 0..n {
                if v != u {
                    let m = d(u, v).min(x(u, u));
                    sm += self.mu[v] * m;
                    se += self.eta[v] * m;
                }
            }
            r.spreading = r.spreading.max((1.0 - self.rho) * x(u, u) - sm);
            if self.mode == SdpMode::PartII {
                r.eta_spreading = r.eta_spreading.max((eta_total - 2.0 * self.h) * x(u, u) - se);
            }
            if self.zeroed[u] {
                r.fixed = r.fixed.max(x(u, u).abs());
            }
            if self.norm_cap {
                r.norm_cap = r.norm_cap.max(x(u, u) - 1.0);
            }
        }
        if let Some(p) = self.pinned {
            r.fixed = r.fixed.max((x(p, p) - 1.0).abs());
        }
        let diag_eta: f64 = (0..n).map(|v| self.eta[v] * x(v, v)).sum();
        r.measure = self.h - diag_eta;
        if self.mode == SdpMode::PartII {
            let diag_mu: f64 = (0..n).map(|v| self.mu[v] * x(v, v)).sum();
            r.mu_cap = diag_mu - self.rho;
        }
        for f in [
            &mut r.triangle,
            &mut r.spreading,
            &mut r.eta_spreading,
            &mut r.mu_cap,
            &mut r.fixed,
            &mut r.norm_cap,
        ] {
            if *f == f64::NEG_INFINITY {
                *f = 0.0;
            }
        }
        r
    }
}

/// Guess set `{2ᵗ·η(u) : u ∈ V, 0 ≤ t ≤ ⌊log₂ n⌋}` for `H`, sorted and deduplicated.
pub fn h_guesses(eta: &Measure) -> Vec<f64> {
    let n = eta.len();
    let tmax = if n <= 1 { 0 } else { (n as f64).log2().floor() as i32 };
    let mut out: Vec<f64> = Vec::new();
    for &e in eta.values() {
        if e <= 0.0 {
            continue;
        }
        for t in 0..=tmax {
            let h = e * 2f64.powi(t);
            if h <= eta.total() * (1.0 + 1e-12) {
                out.push(h.min(eta.total()));
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn triangle_row_counts() {
        let g = triangle();
        let u = Measure::uniform(3);
        let p = build_sse_sdp(&g, &u, &u, 0.5, 1.0 / 3.0, SdpMode::PartI, &[], None).unwrap();
        let c = p.row_counts();
        assert_eq!(c.measure, 1);
        assert_eq!(c.spreading, 3);
        // 3 vertex triangles, 6 with the origin as an endpoint, 3 with it in the middle
        assert_eq!(c.triangle, 12);
        assert_eq!(c.eta_spreading, 0);
        let p2 = build_sse_sdp(&g, &u, &u, 0.5, 1.0 / 3.0, SdpMode::PartII, &[], None).unwrap();
        assert_eq!(p2.row_counts().eta_spreading, 3);
        assert_eq!(p2.row_counts().mu_cap, 1);
    }

    #[test]
    fn pinned_must_be_terminal() {
        let g = triangle();
        let u = Measure::uniform(3);
        let err = build_sse_sdp(&g, &u, &u, 0.5, 0.3, SdpMode::PartI, &[0, 1], Some(2));
        assert!(matches!(err, Err(Error::Input(_))));
        let p = build_sse_sdp(&g, &u, &u, 0.5, 0.3, SdpMode::PartI, &[0, 1], Some(1)).unwrap();
        assert_eq!(p.zeroed, vec![true, false, false]);
        assert_eq!(p.pinned, Some(1));
    }

    #[test]
    fn heavy_vertices_are_zeroed() {
        let g = triangle();
        let eta = Measure::new(vec![0.8, 0.1, 0.1]).unwrap();
        let p = build_sse_sdp(&g, &Measure::uniform(3), &eta, 0.5, 0.1, SdpMode::PartI, &[], None)
            .unwrap();
        assert_eq!(p.zeroed, vec![true, false, false]);
    }

    #[test]
    fn integral_witness_is_feasible_exhaustively() {
        // every S with μ(S) ≤ ρ and η(S) ≥ H on a weighted 7-vertex graph
        let g = Graph::new(
            7,
            [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 0.5), (4, 5, 1.0), (5, 6, 3.0), (6, 0, 1.0), (1, 4, 1.0)],
        )
        .unwrap();
        let mu = Measure::uniform(7);
        let eta = Measure::new(vec![0.3, 0.1, 0.2, 0.05, 0.15, 0.1, 0.1]).unwrap();
        let rho = 3.0 / 7.0;
        let h = 0.2;
        for mode in [SdpMode::PartI, SdpMode::PartII] {
            let p = build_sse_sdp(&g, &mu, &eta, rho, h, mode, &[], None).unwrap();
            for mask in 1u32..(1 << 7) {
                let s: Vec<usize> = (0..7).filter(|i| mask >> i & 1 == 1).collect();
                let es = eta.of(&s);
                if mu.of(&s) > rho + 1e-12 || es < h {
                    continue;
                }
                if s.iter().any(|&u| p.zeroed[u]) {
                    continue;
                }
                if mode == SdpMode::PartII && es > 2.0 * h {
                    continue;
                }
                let x = p.integral_gram(&s);
                let r = p.residuals(&x);
                assert!(r.max() <= 1e-12, "{mode:?} {s:?} {r:?}");
                let cut = crate::graph::cut_weight(&g, &s).unwrap();
                assert!((p.objective_value(&x) - cut / g.total_weight()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn guess_set() {
        let eta = Measure::new(vec![0.5, 0.25, 0.25]).unwrap();
        // n=3 gives t ∈ {0, 1}
        assert_eq!(h_guesses(&eta), vec![0.25, 0.5, 1.0]);
    }
}
