//! First-order solver for [`SdpProgram`].
//!
//! Augmented Lagrangian outer loop; each subproblem is minimized by FISTA
//! with backtracking and projection onto the PSD cone. The min terms in the
//! spreading rows use auxiliary variables `m[u,v] ≤ ‖ū−v̄‖²`, `m[u,v] ≤ ‖ū‖²`.
//! Vertex triangle rows live in a pool that only grows with violated rows.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{SdpMode, SdpProgram};

/// Solver settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpOptions {
    /// Feasibility tolerance on the worst row.
    pub tol: f64,
    /// Relative objective change accepted as converged.
    pub tol_obj: f64,
    /// Budget of inner gradient steps.
    pub max_iters: usize,
    /// Initial gram matrix, `n×n` row-major.
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { tol: 1e-5, tol_obj: 1e-4, max_iters: 200_000, warm_start: None }
    }
}

/// Solved gram matrix with diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpSolution {
    pub n: usize,
    /// Row-major `n×n` gram matrix.
    pub gram: Vec<f64>,
    pub objective: f64,
    pub max_violation: f64,
    pub min_eigenvalue: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.gram[u * self.n + v]
    }

    pub fn sq_norm(&self, u: usize) -> f64 {
        self.get(u, u)
    }

    pub fn sq_dist(&self, u: usize, v: usize) -> f64 {
        self.get(u, u) + self.get(v, v) - 2.0 * self.get(u, v)
    }
}

/// Solves with default objective tolerance.
pub fn solve_sdp(p: &SdpProgram, tol: f64, max_iters: usize) -> SdpSolution {
    solve_sdp_with(p, &SdpOptions { tol, max_iters, ..SdpOptions::default() })
}

struct Layout {
    k: usize,
    act: Vec<usize>,
    pairs: Vec<(usize, usize, f64)>,
    diag_obj: Vec<f64>,
    mu: Vec<f64>,
    eta: Vec<f64>,
    spread_coef: Vec<f64>,
    eta_coef: Vec<f64>,
    h: f64,
    rho: f64,
    part2: bool,
    norm_cap: bool,
    pinned: Option<usize>,
}

impl Layout {
    fn new(p: &SdpProgram) -> Self {
        let act: Vec<usize> = (0..p.n).filter(|&u| !p.zeroed[u]).collect();
        let k = act.len();
        let mut pos = vec![usize::MAX; p.n];
        for (i, &u) in act.iter().enumerate() {
            pos[u] = i;
        }
        let mut pairs = Vec::new();
        let mut diag_obj = vec![0.0; k];
        for &(u, v, c) in &p.objective {
            match (pos[u], pos[v]) {
                (usize::MAX, usize::MAX) => {}
                (usize::MAX, j) | (j, usize::MAX) => diag_obj[j] += c,
                (i, j) => pairs.push((i, j, c)),
            }
        }
        let zmu: f64 = (0..p.n).filter(|&u| p.zeroed[u]).map(|u| p.mu[u]).sum();
        let zeta: f64 = (0..p.n).filter(|&u| p.zeroed[u]).map(|u| p.eta[u]).sum();
        let eta_total = p.eta_total();
        // a zeroed v contributes min(‖ū‖², ‖ū‖²) exactly
        let spread_coef = vec![(1.0 - p.rho) - zmu; k];
        let eta_coef = vec![(eta_total - 2.0 * p.h) - zeta; k];
        Layout {
            k,
            pairs,
            diag_obj,
            mu: act.iter().map(|&u| p.mu[u]).collect(),
            eta: act.iter().map(|&u| p.eta[u]).collect(),
            spread_coef,
            eta_coef,
            h: p.h,
            rho: p.rho,
            part2: p.mode == SdpMode::PartII,
            norm_cap: p.norm_cap,
            pinned: p.pinned.map(|u| pos[u]),
            act,
        }
    }
}

struct Duals {
    tri: Vec<f64>,
    m_dist: Vec<f64>,
    m_norm: Vec<f64>,
    inner: Vec<f64>,
    nonneg: Vec<f64>,
    spread: Vec<f64>,
    eta_spread: Vec<f64>,
    measure: f64,
    mu_cap: f64,
    cap: Vec<f64>,
    pin: f64,
}

impl Duals {
    fn new(k: usize) -> Self {
        Duals {
            tri: Vec::new(),
            m_dist: vec![0.0; k * k],
            m_norm: vec![0.0; k * k],
            inner: vec![0.0; k * k],
            nonneg: vec![0.0; k * k],
            spread: vec![0.0; k],
            eta_spread: vec![0.0; k],
            measure: 0.0,
            mu_cap: 0.0,
            cap: vec![0.0; k],
            pin: 0.0,
        }
    }
}

/// Point of the subproblem: gram block on active vertices plus auxiliaries.
#[derive(Clone)]
struct Point {
    x: DMatrix<f64>,
    m: Vec<f64>,
}

impl Point {
    fn axpy(&self, a: f64, other: &Point) -> Point {
        Point {
            x: &self.x + &other.x * a,
            m: self.m.iter().zip(&other.m).map(|(p, q)| p + a * q).collect(),
        }
    }

    fn sub(&self, other: &Point) -> Point {
        self.axpy(-1.0, other)
    }

    fn dot(&self, other: &Point) -> f64 {
        self.x.dot(&other.x) + self.m.iter().zip(&other.m).map(|(p, q)| p * q).sum::<f64>()
    }

    fn norm_sq(&self) -> f64 {
        self.dot(self)
    }
}

/// Constraint values `g ≤ 0` (and `g = 0` for the pin) visited in a fixed order.
/// `f(family, index, g, grad)` receives the gradient as a list of terms.
enum Var {
    X(usize, usize),
    M(usize),
}

struct Problem<'a> {
    lay: &'a Layout,
    pool: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fam {
    Tri,
    MDist,
    MNorm,
    Inner,
    NonNeg,
    Spread,
    EtaSpread,
    Measure,
    MuCap,
    Cap,
    Pin,
}

impl Problem<'_> {
    /// Calls `f` for every row with its value and gradient terms.
    fn rows(&self, pt: &Point, mut f: impl FnMut(Fam, usize, f64, &[(Var, f64)])) {
        let k = self.lay.k;
        let x = &pt.x;
        let m = &pt.m;
        for (r, &(i, j, l)) in self.pool.iter().enumerate() {
            // ‖i−l‖² ≤ ‖i−j‖² + ‖j−l‖², halved
            let g = x[(i, j)] + x[(j, l)] - x[(i, l)] - x[(j, j)];
            f(Fam::Tri, r, g, &[(Var::X(i, j), 1.0), (Var::X(j, l), 1.0), (Var::X(i, l), -1.0), (Var::X(j, j), -1.0)]);
        }
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let idx = i * k + j;
                let d = x[(i, i)] + x[(j, j)] - 2.0 * x[(i, j)];
                f(Fam::MDist, idx, m[idx] - d, &[(Var::M(idx), 1.0), (Var::X(i, i), -1.0), (Var::X(j, j), -1.0), (Var::X(i, j), 2.0)]);
                f(Fam::MNorm, idx, m[idx] - x[(i, i)], &[(Var::M(idx), 1.0), (Var::X(i, i), -1.0)]);
                // ⟨ū,v̄⟩ ≤ ‖v̄‖²
                f(Fam::Inner, idx, x[(i, j)] - x[(j, j)], &[(Var::X(i, j), 1.0), (Var::X(j, j), -1.0)]);
                if i < j {
                    f(Fam::NonNeg, idx, -x[(i, j)], &[(Var::X(i, j), -1.0)]);
                }
            }
        }
        let mut terms: Vec<(Var, f64)> = Vec::with_capacity(k + 1);
        for i in 0..k {
            terms.clear();
            let mut g = self.lay.spread_coef[i] * x[(i, i)];
            terms.push((Var::X(i, i), self.lay.spread_coef[i]));
            for j in 0..k {
                if j != i {
                    g -= self.lay.mu[j] * m[i * k + j];
                    terms.push((Var::M(i * k + j), -self.lay.mu[j]));
                }
            }
            f(Fam::Spread, i, g, &terms);
            if self.lay.part2 {
                terms.clear();
                let mut g = self.lay.eta_coef[i] * x[(i, i)];
                terms.push((Var::X(i, i), self.lay.eta_coef[i]));
                for j in 0..k {
                    if j != i {
                        g -= self.lay.eta[j] * m[i * k + j];
                        terms.push((Var::M(i * k + j), -self.lay.eta[j]));
                    }
                }
                f(Fam::EtaSpread, i, g, &terms);
            }
            if self.lay.norm_cap {
                f(Fam::Cap, i, x[(i, i)] - 1.0, &[(Var::X(i, i), 1.0)]);
            }
        }
        terms.clear();
        let mut g = self.lay.h;
        for i in 0..k {
            g -= self.lay.eta[i] * x[(i, i)];
            terms.push((Var::X(i, i), -self.lay.eta[i]));
        }
        f(Fam::Measure, 0, g, &terms);
        if self.lay.part2 {
            terms.clear();
            let mut g = -self.lay.rho;
            for i in 0..k {
                g += self.lay.mu[i] * x[(i, i)];
                terms.push((Var::X(i, i), self.lay.mu[i]));
            }
            f(Fam::MuCap, 0, g, &terms);
        }
        if let Some(p) = self.lay.pinned {
            f(Fam::Pin, 0, x[(p, p)] - 1.0, &[(Var::X(p, p), 1.0)]);
        }
    }

    fn objective(&self, pt: &Point) -> f64 {
        let x = &pt.x;
        let mut v = 0.0;
        for &(i, j, c) in &self.lay.pairs {
            v += c * (x[(i, i)] + x[(j, j)] - 2.0 * x[(i, j)]);
        }
        for i in 0..self.lay.k {
            v += self.lay.diag_obj[i] * x[(i, i)];
        }
        v
    }

    fn dual_value(duals: &Duals, fam: Fam, idx: usize) -> f64 {
        match fam {
            Fam::Tri => duals.tri[idx],
            Fam::MDist => duals.m_dist[idx],
            Fam::MNorm => duals.m_norm[idx],
            Fam::Inner => duals.inner[idx],
            Fam::NonNeg => duals.nonneg[idx],
            Fam::Spread => duals.spread[idx],
            Fam::EtaSpread => duals.eta_spread[idx],
            Fam::Measure => duals.measure,
            Fam::MuCap => duals.mu_cap,
            Fam::Cap => duals.cap[idx],
            Fam::Pin => duals.pin,
        }
    }

    fn dual<'d>(duals: &'d mut Duals, fam: Fam, idx: usize) -> &'d mut f64 {
        match fam {
            Fam::Tri => &mut duals.tri[idx],
            Fam::MDist => &mut duals.m_dist[idx],
            Fam::MNorm => &mut duals.m_norm[idx],
            Fam::Inner => &mut duals.inner[idx],
            Fam::NonNeg => &mut duals.nonneg[idx],
            Fam::Spread => &mut duals.spread[idx],
            Fam::EtaSpread => &mut duals.eta_spread[idx],
            Fam::Measure => &mut duals.measure,
            Fam::MuCap => &mut duals.mu_cap,
            Fam::Cap => &mut duals.cap[idx],
            Fam::Pin => &mut duals.pin,
        }
    }

    /// Augmented Lagrangian value and, optionally, its gradient.
    fn eval(&self, pt: &Point, duals: &Duals, sigma: f64, grad: Option<&mut Point>) -> f64 {
        let mut val = self.objective(pt);
        let k = self.lay.k;
        let mut gx = DMatrix::<f64>::zeros(k, k);
        let mut gm = vec![0.0; k * k];
        let want = grad.is_some();
        self.rows(pt, |fam, idx, g, terms| {
            let lam = Self::dual_value(duals, fam, idx);
            let coef = if fam == Fam::Pin {
                val += lam * g + 0.5 * sigma * g * g;
                lam + sigma * g
            } else {
                let t = lam + sigma * g;
                if t > 0.0 {
                    val += (t * t - lam * lam) / (2.0 * sigma);
                    t
                } else {
                    val -= lam * lam / (2.0 * sigma);
                    0.0
                }
            };
            if want && coef != 0.0 {
                for (v, c) in terms {
                    match *v {
                        Var::X(i, j) => add_sym(&mut gx, i, j, coef * c),
                        Var::M(a) => gm[a] += coef * c,
                    }
                }
            }
        });
        if let Some(gr) = grad {
            for &(i, j, c) in &self.lay.pairs {
                gx[(i, i)] += c;
                gx[(j, j)] += c;
                add_sym(&mut gx, i, j, -2.0 * c);
            }
            for i in 0..k {
                gx[(i, i)] += self.lay.diag_obj[i];
            }
            gr.x = gx;
            gr.m = gm;
        }
        val
    }

    fn update_duals(&self, pt: &Point, duals: &mut Duals, sigma: f64) {
        let mut upd: Vec<(Fam, usize, f64)> = Vec::new();
        self.rows(pt, |fam, idx, g, _| upd.push((fam, idx, g)));
        for (fam, idx, g) in upd {
            let lam = Self::dual(duals, fam, idx);
            *lam = if fam == Fam::Pin { *lam + sigma * g } else { (*lam + sigma * g).max(0.0) };
        }
    }

    /// Adds violated vertex triangle rows to the pool. Returns how many were added.
    fn grow_pool(&mut self, pt: &Point, duals: &mut Duals, member: &mut [bool], thresh: f64) -> usize {
        let k = self.lay.k;
        let x = &pt.x;
        let mut added = 0;
        for i in 0..k {
            for l in (i + 1)..k {
                for j in 0..k {
                    if j == i || j == l {
                        continue;
                    }
                    let key = (i * k + l) * k + j;
                    if member[key] {
                        continue;
                    }
                    let g = x[(i, j)] + x[(j, l)] - x[(i, l)] - x[(j, j)];
                    if g > thresh {
                        member[key] = true;
                        self.pool.push((i, j, l));
                        duals.tri.push(0.0);
                        added += 1;
                    }
                }
            }
        }
        added
    }
}

fn add_sym(g: &mut DMatrix<f64>, i: usize, j: usize, c: f64) {
    if i == j {
        g[(i, i)] += c;
    } else {
        g[(i, j)] += 0.5 * c;
        g[(j, i)] += 0.5 * c;
    }
}

fn project_psd(x: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (x + x.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return eig.recompose();
    }
    let mut v = eig.eigenvectors.clone();
    for (c, &l) in eig.eigenvalues.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        v.column_mut(c).scale_mut(s);
    }
    &v * v.transpose()
}

fn project(p: &Point) -> Point {
    Point { x: project_psd(&p.x), m: p.m.clone() }
}

fn full_gram(p: &SdpProgram, lay: &Layout, x: &DMatrix<f64>) -> Vec<f64> {
    let n = p.n;
    let mut gram = vec![0.0; n * n];
    for (i, &u) in lay.act.iter().enumerate() {
        for (j, &v) in lay.act.iter().enumerate() {
            gram[u * n + v] = x[(i, j)];
        }
    }
    gram
}

fn min_eigenvalue(x: &DMatrix<f64>) -> f64 {
    if x.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new((x + x.transpose()) * 0.5).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn initial_point(p: &SdpProgram, lay: &Layout, warm: Option<&[f64]>) -> Point {
    let k = lay.k;
    let x = match warm {
        Some(w) => DMatrix::from_fn(k, k, |i, j| w[lay.act[i] * p.n + lay.act[j]]),
        None => {
            let mass: f64 = lay.eta.iter().sum();
            let c = if mass > 0.0 { (lay.h / mass).min(1.0) } else { 1.0 };
            let mut x = DMatrix::<f64>::identity(k, k) * c;
            if let Some(q) = lay.pinned {
                x[(q, q)] = 1.0;
            }
            x
        }
    };
    let x = project_psd(&x);
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                m[i * k + j] = (x[(i, i)] + x[(j, j)] - 2.0 * x[(i, j)]).min(x[(i, i)]);
            }
        }
    }
    Point { x, m }
}

/// Solves the program; see [`SdpOptions`].
pub fn solve_sdp_with(p: &SdpProgram, opts: &SdpOptions) -> SdpSolution {
    let lay = Layout::new(p);
    let k = lay.k;
    let mut pt = initial_point(p, &lay, opts.warm_start.as_deref());
    let finish = |x: &DMatrix<f64>, iterations: usize, converged: bool| {
        let gram = full_gram(p, &lay, x);
        SdpSolution {
            n: p.n,
            objective: p.objective_value(&gram),
            max_violation: p.residuals(&gram).max().max(0.0),
            min_eigenvalue: min_eigenvalue(x),
            gram,
            converged,
            iterations,
        }
    };
    if k == 0 {
        return finish(&pt.x, 0, p.residuals(&vec![0.0; p.n * p.n]).max() <= opts.tol);
    }
    let mut prob = Problem { lay: &lay, pool: Vec::new() };
    let mut duals = Duals::new(k);
    let mut member = vec![false; k * k * k];
    prob.grow_pool(&pt, &mut duals, &mut member, -1e-9);
    let mut sigma = 10.0;
    let mut lip = 1.0;
    let mut iters = 0usize;
    let mut prev_viol = f64::INFINITY;
    let mut best_viol = f64::INFINITY;
    let mut stalled = 0usize;
    let mut prev_obj = f64::INFINITY;
    let mut inner_tol = 1e-2;
    let mut steady = 0usize;
    let mut converged = false;
    let mut grad = pt.clone();
    while iters < opts.max_iters {
        // FISTA on the subproblem
        let mut y = pt.clone();
        let mut t: f64 = 1.0;
        let mut f_prev = f64::INFINITY;
        let mut inner_done = false;
        let inner_cap = 5000.min(opts.max_iters - iters).max(1);
        for _ in 0..inner_cap {
            iters += 1;
            let fy = prob.eval(&y, &duals, sigma, Some(&mut grad));
            let (next, f_next, step_sq) = loop {
                let cand = project(&y.axpy(-1.0 / lip, &grad));
                let diff = cand.sub(&y);
                let fc = prob.eval(&cand, &duals, sigma, None);
                let bound = fy + grad.dot(&diff) + 0.5 * lip * diff.norm_sq();
                if fc <= bound + 1e-12 * fy.abs().max(1.0) || lip > 1e15 {
                    break (cand, fc, diff.norm_sq());
                }
                lip *= 2.0;
            };
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            if f_next > f_prev {
                // adaptive restart
                t = 1.0;
                y = next.clone();
            } else {
                y = next.axpy((t - 1.0) / t_next, &next.sub(&pt));
                t = t_next;
            }
            pt = next;
            f_prev = f_next;
            let gmap = lip * step_sq.sqrt();
            lip = (lip * 0.95).max(1e-6);
            if gmap <= inner_tol {
                inner_done = true;
                break;
            }
        }
        prob.update_duals(&pt, &mut duals, sigma);
        let added = prob.grow_pool(&pt, &mut duals, &mut member, 0.25 * opts.tol);
        let gram = full_gram(p, &lay, &pt.x);
        let viol = p.residuals(&gram).max();
        let obj = p.objective_value(&gram);
        let obj_ok = (obj - prev_obj).abs() <= opts.tol_obj * obj.abs().max(1e-3);
        log::trace!("sdp outer: iters={iters} sigma={sigma:.1e} viol={viol:.3e} obj={obj:.6} pool={}", prob.pool.len());
        steady = if viol <= opts.tol && added == 0 && obj_ok { steady + 1 } else { 0 };
        if steady > 0 && (inner_tol <= opts.tol || steady >= 3) {
            converged = true;
            break;
        }
        // a program that stays far from feasible at full penalty is given up on
        if viol < 0.9 * best_viol {
            best_viol = viol;
            stalled = 0;
        } else if sigma >= 1e6 && viol > 1e3 * opts.tol {
            stalled += 1;
            if stalled >= 5 {
                break;
            }
        }
        if viol > opts.tol && viol > 0.25 * prev_viol && sigma < 1e7 {
            sigma *= 4.0;
        }
        prev_viol = viol;
        prev_obj = obj;
        if inner_done {
            inner_tol = (inner_tol * 0.3).max(opts.tol);
        }
    }
    finish(&pt.x, iters, converged)
}

#[cfg(test)]
mod tests {
    use super::super::build_sse_sdp;
    use super::*;
    use crate::graph::{Graph, Measure};

    #[test]
    fn single_edge_objective_at_most_one() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let u = Measure::uniform(2);
        let p = build_sse_sdp(&g, &u, &u, 0.5, 0.5, SdpMode::PartI, &[], None).unwrap();
        let s = solve_sdp(&p, 1e-6, 100_000);
        assert!(s.converged, "{s:?}");
        assert!(s.max_violation <= 1e-6);
        assert!(s.min_eigenvalue >= -1e-7);
        assert!(s.objective <= 1.0 + 1e-6);
    }

    #[test]
    fn warm_start_from_integral_witness() {
        // two triangles joined by one edge; S = first triangle
        let g = Graph::new(6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1.0)])
            .unwrap();
        let u = Measure::uniform(6);
        let p = build_sse_sdp(&g, &u, &u, 0.5, 0.5, SdpMode::PartI, &[], None).unwrap();
        let witness = p.integral_gram(&[0, 1, 2]);
        assert_eq!(p.residuals(&witness).max(), 0.0);
        assert!((p.objective_value(&witness) - 1.0 / 7.0).abs() < 1e-15);
        let s = solve_sdp_with(&p, &SdpOptions { tol: 1e-6, warm_start: Some(witness), ..Default::default() });
        assert!(s.max_violation <= 1e-6);
        assert!(s.objective <= 1.0 / 7.0 + 1e-6, "{}", s.objective);
    }
}
