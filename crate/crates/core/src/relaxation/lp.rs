//! Linear relaxation of small-set expansion, solved by dual simplex.
//!
//! Variables: `x(u) ∈ [0,1]`, a semimetric `z(u,v) ∈ [0,1]` and auxiliaries
//! `m(u,v) ≤ min(x(u), z(u,v))` for the spreading rows. Triangle rows are
//! generated lazily: the program is re-solved with every violated row added
//! until none remain.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use super::{build_sse_sdp, Residuals, SdpMode, SdpProgram};
use crate::error::{Error, Result};
use crate::graph::{Graph, Measure};

/// SSE linear program.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpProgram {
    pub n: usize,
    pub objective: Vec<(usize, usize, f64)>,
    pub mu: Vec<f64>,
    pub eta: Vec<f64>,
    pub rho: f64,
    pub h: f64,
    pub mode: SdpMode,
    pub zeroed: Vec<bool>,
    pub pinned: Option<usize>,
}

/// Optimal LP point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpSolution {
    pub n: usize,
    pub x: Vec<f64>,
    /// Row-major `n×n` symmetric semimetric with zero diagonal.
    pub z: Vec<f64>,
    pub objective: f64,
    pub max_violation: f64,
}

impl LpSolution {
    pub fn z(&self, u: usize, v: usize) -> f64 {
        self.z[u * self.n + v]
    }
}

/// Builds the SSE linear program with the same zeroing and pinning rules as
/// the semidefinite one.
#[allow(clippy::too_many_arguments)]
pub fn build_sse_lp(
    g: &Graph,
    mu: &Measure,
    eta: &Measure,
    rho: f64,
    h: f64,
    mode: SdpMode,
    terminals: &[usize],
    pinned: Option<usize>,
) -> Result<LpProgram> {
    Ok(LpProgram::from_sdp(&build_sse_sdp(g, mu, eta, rho, h, mode, terminals, pinned)?))
}

impl LpProgram {
    pub fn from_sdp(p: &SdpProgram) -> Self {
        LpProgram {
            n: p.n,
            objective: p.objective.clone(),
            mu: p.mu.clone(),
            eta: p.eta.clone(),
            rho: p.rho,
            h: p.h,
            mode: p.mode,
            zeroed: p.zeroed.clone(),
            pinned: p.pinned,
        }
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        self.objective.iter().map(|&(u, v, c)| c * z[u * self.n + v]).sum()
    }

    /// Integral point of a vertex set: `x = 1_S`, `z(u,v) = |1_S(u) − 1_S(v)|`.
    pub fn integral_point(&self, s: &[usize]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut x = vec![0.0; n];
        for &u in s {
            x[u] = 1.0;
        }
        let z = (0..n * n).map(|i| f64::abs(x[i / n] - x[i % n])).collect();
        (x, z)
    }

    /// Largest violation per family. `triangle` covers both the metric rows
    /// and `|x(u) − x(v)| ≤ z(u,v)`.
    pub fn residuals(&self, x: &[f64], z: &[f64]) -> Residuals {
        let n = self.n;
        let zz = |u: usize, v: usize| z[u * n + v];
        let mut r = Residuals::default();
        let eta_total: f64 = self.eta.iter().sum();
        let mut bounds = 0.0f64;
        for u in 0..n {
            bounds = bounds.max(-x[u]).max(x[u] - 1.0);
            let mut sm = 0.0;
            let mut se = 0.0;
            for v in 0..n {
                if v == u {
                    bounds = bounds.max(zz(u, u).abs());
                    continue;
                }
                bounds = bounds.max((zz(u, v) - zz(v, u)).abs()).max(-zz(u, v));
                r.triangle = r.triangle.max((x[u] - x[v]).abs() - zz(u, v));
                for w in (u + 1)..n {
                    if w != v {
                        r.triangle = r.triangle.max(zz(u, w) - zz(u, v) - zz(v, w));
                    }
                }
                let m = x[u].min(zz(u, v));
                sm += self.mu[v] * m;
                se += self.eta[v] * m;
            }
            r.spreading = r.spreading.max((1.0 - self.rho) * x[u] - sm);
            if self.mode == SdpMode::PartII {
                r.eta_spreading = r.eta_spreading.max((eta_total - 2.0 * self.h) * x[u] - se);
            }
            if self.zeroed[u] {
                r.fixed = r.fixed.max(x[u].abs());
            }
        }
        if let Some(p) = self.pinned {
            r.fixed = r.fixed.max((x[p] - 1.0).abs());
        }
        r.norm_cap = bounds;
        r.measure = self.h - (0..n).map(|v| self.eta[v] * x[v]).sum::<f64>();
        if self.mode == SdpMode::PartII {
            r.mu_cap = (0..n).map(|v| self.mu[v] * x[v]).sum::<f64>() - self.rho;
        }
        r
    }
}

fn lp_err(e: microlp::Error) -> Error {
    match e {
        microlp::Error::Infeasible => Error::Infeasible("SSE linear program is infeasible".into()),
        other => Error::Internal(format!("LP solver: {other}")),
    }
}

/// Solves the linear program to optimality.
pub fn solve_lp(p: &LpProgram) -> Result<LpSolution> {
    solve_with_caps(p, Some(1.0))
}

/// Necessary condition for feasibility of a semidefinite program.
///
/// Squared norms and squared distances of any feasible vector family form a
/// feasible point of the linear program with `x` capped only by the norm cap
/// and `z` uncapped (the origin triangles give `|x(u) − x(v)| ≤ z(u,v)`), so
/// `false` certifies infeasibility.
pub fn sdp_shadow_feasible(p: &SdpProgram) -> Result<bool> {
    let cap = if p.norm_cap { Some(1.0) } else { None };
    match solve_with_caps(&LpProgram::from_sdp(p), cap) {
        Ok(_) => Ok(true),
        Err(Error::Infeasible(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

fn solve_with_caps(p: &LpProgram, cap: Option<f64>) -> Result<LpSolution> {
    let n = p.n;
    let top = cap.unwrap_or(f64::INFINITY);
    let mut obj = vec![0.0; n * n];
    for &(u, v, c) in &p.objective {
        obj[u.min(v) * n + u.max(v)] += c;
    }
    let mut prob = Problem::new(OptimizationDirection::Minimize);
    let x: Vec<Variable> = (0..n)
        .map(|u| {
            let (lo, hi) = if p.zeroed[u] {
                (0.0, 0.0)
            } else if p.pinned == Some(u) {
                (1.0, 1.0)
            } else {
                (0.0, top)
            };
            prob.add_var(0.0, (lo, hi))
        })
        .collect();
    let mut z: Vec<Option<Variable>> = vec![None; n * n];
    for u in 0..n {
        for v in (u + 1)..n {
            let var = prob.add_var(obj[u * n + v], (0.0, top));
            z[u * n + v] = Some(var);
            z[v * n + u] = Some(var);
        }
    }
    let zv = |u: usize, v: usize| z[u * n + v].unwrap();
    let eta_total: f64 = p.eta.iter().sum();
    for u in 0..n {
        for v in (u + 1)..n {
            prob.add_constraint([(x[u], 1.0), (x[v], -1.0), (zv(u, v), -1.0)], ComparisonOp::Le, 0.0);
            prob.add_constraint([(x[v], 1.0), (x[u], -1.0), (zv(u, v), -1.0)], ComparisonOp::Le, 0.0);
        }
    }
    for u in 0..n {
        let mut spread = vec![(x[u], -(1.0 - p.rho))];
        let mut eta_spread = vec![(x[u], -(eta_total - 2.0 * p.h))];
        for v in 0..n {
            if v == u {
                continue;
            }
            let m = prob.add_var(0.0, (0.0, top));
            prob.add_constraint([(m, 1.0), (x[u], -1.0)], ComparisonOp::Le, 0.0);
            prob.add_constraint([(m, 1.0), (zv(u, v), -1.0)], ComparisonOp::Le, 0.0);
            spread.push((m, p.mu[v]));
            eta_spread.push((m, p.eta[v]));
        }
        prob.add_constraint(spread, ComparisonOp::Ge, 0.0);
        if p.mode == SdpMode::PartII {
            prob.add_constraint(eta_spread, ComparisonOp::Ge, 0.0);
        }
    }
    prob.add_constraint(x.iter().zip(&p.eta).map(|(&xv, &e)| (xv, e)), ComparisonOp::Ge, p.h);
    if p.mode == SdpMode::PartII {
        prob.add_constraint(x.iter().zip(&p.mu).map(|(&xv, &m)| (xv, m)), ComparisonOp::Le, p.rho);
    }
    let mut sol = prob.solve().map_err(lp_err)?;
    let mut added = vec![false; n * n * n];
    loop {
        let zval = |u: usize, v: usize| if u == v { 0.0 } else { *sol.var_value(zv(u, v)) };
        let mut cuts = Vec::new();
        for u in 0..n {
            for w in (u + 1)..n {
                for v in 0..n {
                    if v == u || v == w || added[(u * n + w) * n + v] {
                        continue;
                    }
                    if zval(u, w) > zval(u, v) + zval(v, w) + 1e-9 {
                        added[(u * n + w) * n + v] = true;
                        cuts.push((u, v, w));
                    }
                }
            }
        }
        if cuts.is_empty() {
            break;
        }
        for (u, v, w) in cuts {
            sol = sol
                .add_constraint([(zv(u, w), 1.0), (zv(u, v), -1.0), (zv(v, w), -1.0)], ComparisonOp::Le, 0.0)
                .map_err(lp_err)?;
        }
    }
    let xs: Vec<f64> = x.iter().map(|&v| sol.var_value(v).clamp(0.0, 1.0)).collect();
    let mut zs = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                zs[u * n + v] = sol.var_value(zv(u, v)).clamp(0.0, 1.0);
            }
        }
    }
    let objective = p.objective_value(&zs);
    let max_violation = p.residuals(&xs, &zs).max().max(0.0);
    Ok(LpSolution { n, x: xs, z: zs, objective, max_violation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_witness_objective() {
        let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let u = Measure::uniform(4);
        let p = build_sse_lp(&g, &u, &u, 0.5, 0.5, SdpMode::PartI, &[], None).unwrap();
        let (x, z) = p.integral_point(&[0, 1]);
        assert!(p.residuals(&x, &z).max() <= 0.0);
        assert!((p.objective_value(&z) - 1.0 / 3.0).abs() < 1e-15);
        let s = solve_lp(&p).unwrap();
        assert!(s.objective <= 1.0 / 3.0 + 1e-9);
        assert!(s.max_violation <= 1e-7, "{}", s.max_violation);
    }

    #[test]
    fn path_of_three_below_half_best_singleton() {
        // best single-vertex cut on a 3-path is an endpoint: δ = 1, w(E) = 2
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let u = Measure::uniform(3);
        let p = build_sse_lp(&g, &u, &u, 0.5, 1.0 / 3.0, SdpMode::PartI, &[], None).unwrap();
        let s = solve_lp(&p).unwrap();
        assert!(s.objective <= 0.5 * 1.0 / 2.0 + 1e-9, "{}", s.objective);
    }

    #[test]
    fn infeasible_measure_row() {
        let g = Graph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let u = Measure::uniform(3);
        // all vertices are terminals and none is pinned
        let p = build_sse_lp(&g, &u, &u, 0.5, 1.0 / 3.0, SdpMode::PartI, &[0, 1, 2], None).unwrap();
        assert!(matches!(solve_lp(&p), Err(Error::Infeasible(_))));
    }
}
