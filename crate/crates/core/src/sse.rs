//! Small-set expansion rounding.
//!
//! Both rounding schemes repeatedly draw a separator of a solved relaxation
//! and accept a draw through an explicit test: `f(S) > 0` for the first
//! scheme, `f′(S) > 0` for the accumulating second scheme. Acceptance gates
//! are exact, so every returned set meets its measure caps deterministically.
//! The distortion `D` only scales the acceptance threshold; it starts at a
//! configured value and doubles whenever a draw budget runs out.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{to_mask, CutReport, Graph, Measure};
use crate::oracle::{self, UcutQuery};
use crate::relaxation::{
    build_sse_lp, build_sse_sdp, h_guesses, sdp_shadow_feasible, solve_lp, solve_sdp_with, SdpMode, SdpOptions, SdpProgram,
};
use crate::separators::{LpSeparator, OrthogonalSeparator, DEFAULT_ROUNDS};

/// Which rule produced a returned set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Acceptance {
    Exact,
    F,
    FPrime,
    Fallback,
}

/// A returned vertex set with its statistics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SseSolution {
    pub set: Vec<usize>,
    pub report: CutReport,
    pub objective: f64,
    pub accepted_by: Acceptance,
    pub iterations: usize,
    pub backend: String,
    pub budget_exhausted: bool,
    pub h: Option<f64>,
    pub relaxation_value: Option<f64>,
    pub distortion: Option<f64>,
}

/// Relaxation and separator family used for rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Exhaustive search (small inputs only).
    Exact,
    /// Semidefinite relaxation with orthogonal separators.
    Sdp,
    /// Linear relaxation with LP separators.
    Lp,
}

impl Backend {
    pub fn id(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Sdp => "sdp",
            Backend::Lp => "lp",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "sdp" => Ok(Backend::Sdp),
            "lp" => Ok(Backend::Lp),
            _ => Err(Error::Input(format!("unknown backend '{s}' (expected exact, sdp or lp)"))),
        }
    }
}

/// How the orthogonality parameter of the first scheme is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MReading {
    /// `m = max(1/ε, 1/ρ)`.
    Max,
    /// `m = 1/(ερ)`.
    Product,
}

/// Which mass targets are tried.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuessGrid {
    /// Every `2ᵗ·η(u)`.
    Full,
    /// A sub-chain of the full set whose consecutive ratios are at most 2,
    /// which still brackets every attainable mass within a factor of 2.
    Doubling,
}

/// Tunables of the rounding schemes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoundingConfig {
    /// Multiplier of the initial distortion.
    pub c_d: f64,
    /// Separator draws per budget, in units of `n²`.
    pub c_iter: f64,
    /// Doublings of `D` before giving up.
    pub max_doublings: usize,
    pub m_reading: MReading,
    pub guess_grid: GuessGrid,
    pub sdp: SdpOptions,
    /// Adds `‖ū‖² ≤ 1` to the semidefinite program.
    pub norm_cap: bool,
    /// Separation threshold of LP separators.
    pub lp_beta: f64,
    /// Chopping passes of the decomposition behind LP separators.
    pub lp_rounds: usize,
    /// Relaxations with a larger violation are treated as infeasible.
    pub max_violation: f64,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        RoundingConfig {
            c_d: 1.0,
            c_iter: 64.0,
            max_doublings: 8,
            m_reading: MReading::Max,
            guess_grid: GuessGrid::Full,
            sdp: SdpOptions { tol: 1e-4, tol_obj: 1e-3, ..SdpOptions::default() },
            norm_cap: false,
            lp_beta: 0.5,
            lp_rounds: DEFAULT_ROUNDS,
            max_violation: 1e-3,
        }
    }
}

/// Weighted small-set expansion instance.
#[derive(Clone, Debug)]
pub struct SseInstance<'a> {
    pub graph: &'a Graph,
    /// Size measure, normalized.
    pub mu: Measure,
    /// Mass measure, normalized.
    pub eta: Measure,
    pub rho: f64,
    /// Fixed mass target; guessed when absent.
    pub h: Option<f64>,
    pub terminals: Vec<usize>,
    pub epsilon: f64,
}

impl<'a> SseInstance<'a> {
    pub fn new(graph: &'a Graph, mu: &Measure, eta: &Measure, rho: f64, epsilon: f64) -> Result<Self> {
        let n = graph.n();
        if mu.len() != n || eta.len() != n {
            return Err(Error::Input(format!("measures must have length n={n}")));
        }
        if !(rho > 0.0 && rho <= 0.5) {
            return Err(Error::Input(format!("rho={rho} must lie in (0, 1/2]")));
        }
        if !(epsilon > 0.0 && epsilon < 0.25) {
            return Err(Error::Input(format!("epsilon={epsilon} must lie in (0, 1/4)")));
        }
        Ok(SseInstance {
            graph,
            mu: mu.normalized()?,
            eta: eta.normalized()?,
            rho,
            h: None,
            terminals: Vec::new(),
            epsilon,
        })
    }

    pub fn with_h(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::Input(format!("H={h} must lie in (0, 1]")));
        }
        self.h = Some(h);
        Ok(self)
    }

    pub fn with_terminals(mut self, terminals: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.graph.n()];
        for &t in terminals {
            if t >= seen.len() || seen[t] {
                return Err(Error::Input(format!("terminal {t} is out of range or repeated")));
            }
            seen[t] = true;
        }
        self.terminals = terminals.to_vec();
        Ok(self)
    }

    fn size_gate(&self) -> f64 {
        (1.0 + 10.0 * self.epsilon) * self.rho
    }

    fn check_nondegenerate(&self) -> Result<()> {
        let ok = (0..self.graph.n()).any(|u| self.eta.get(u) > 0.0 && self.mu.get(u) < self.size_gate());
        if ok {
            Ok(())
        } else {
            Err(Error::Infeasible("no vertex with positive mass fits under the size cap".into()))
        }
    }
}

/// Fixes one terminal's vector to unit length and all other terminals to the origin.
pub fn pin_terminals(mut program: SdpProgram, terminals: &[usize], pinned: Option<usize>) -> Result<SdpProgram> {
    if let Some(p) = pinned {
        if !terminals.contains(&p) {
            return Err(Error::Input(format!("pinned vertex {p} is not a terminal")));
        }
    }
    for &t in terminals {
        if t >= program.n {
            return Err(Error::Input(format!("terminal {t} out of range")));
        }
        program.zeroed[t] = Some(t) != pinned;
    }
    program.pinned = pinned;
    Ok(program)
}

enum Sampler {
    Sdp(OrthogonalSeparator),
    Lp(LpSeparator),
}

struct Relaxed {
    value: f64,
    sampler: Sampler,
    distortion: f64,
}

impl Relaxed {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        match &self.sampler {
            Sampler::Sdp(s) => s.sample(rng).set,
            Sampler::Lp(s) => s.sample(rng).set,
        }
    }
}

fn relax(
    inst: &SseInstance<'_>,
    mode: SdpMode,
    h: f64,
    pinned: Option<usize>,
    m: f64,
    backend: Backend,
    cfg: &RoundingConfig,
) -> Result<Option<Relaxed>> {
    let g = inst.graph;
    let n = g.n().max(2) as f64;
    if mode == SdpMode::PartII && !mass_reachable(inst, h) {
        return Ok(None);
    }
    match backend {
        Backend::Sdp => {
            let p = build_sse_sdp(g, &inst.mu, &inst.eta, inst.rho, h, mode, &inst.terminals, pinned)?
                .with_norm_cap(cfg.norm_cap);
            if !sdp_shadow_feasible(&p)? {
                return Ok(None);
            }
            let sol = solve_sdp_with(&p, &cfg.sdp);
            if sol.max_violation > cfg.max_violation {
                log::debug!("SDP at H={h} rejected: violation {:.2e}", sol.max_violation);
                return Ok(None);
            }
            let beta = inst.epsilon;
            let sep = OrthogonalSeparator::new(&sol, m, beta)?;
            let distortion = cfg.c_d * (n.ln().max(1.0) * m.ln().max(1.0)).sqrt();
            Ok(Some(Relaxed { value: sol.objective.max(0.0), sampler: Sampler::Sdp(sep), distortion }))
        }
        Backend::Lp => {
            let p = build_sse_lp(g, &inst.mu, &inst.eta, inst.rho, h, mode, &inst.terminals, pinned)?;
            let sol = match solve_lp(&p) {
                Ok(s) => s,
                Err(Error::Infeasible(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let sep = LpSeparator::from_solution(g, &sol, cfg.lp_beta)?;
            let r = cfg.lp_rounds.max(1) as f64;
            let distortion = cfg.c_d * r * r / cfg.lp_beta;
            Ok(Some(Relaxed { value: sol.objective.max(0.0), sampler: Sampler::Lp(sep), distortion }))
        }
        Backend::Exact => Err(Error::Internal("exact backend has no relaxation".into())),
    }
}

/// Necessary condition for the second relaxation: some vertex that may be
/// nonzero has `ρ·η(u)/μ(u) ≥ H`.
fn mass_reachable(inst: &SseInstance<'_>, h: f64) -> bool {
    (0..inst.graph.n()).any(|u| {
        let (e, m) = (inst.eta.get(u), inst.mu.get(u));
        e > 0.0 && e <= 2.0 * h && (m <= 0.0 || inst.rho * e / m >= h * (1.0 - 1e-9))
    })
}

/// Relaxation values at or below this count as zero.
const ZERO_VALUE: f64 = 1e-9;

/// `(δ(S)/w(E))·H/(4D·value)`, the cut penalty of the acceptance tests.
fn cut_penalty(cut_norm: f64, h: f64, d: f64, value: f64) -> f64 {
    if cut_norm <= 0.0 {
        0.0
    } else if value <= ZERO_VALUE {
        f64::INFINITY
    } else {
        cut_norm * h / (4.0 * d * value)
    }
}

fn budget(inst: &SseInstance<'_>, backend: Backend, cfg: &RoundingConfig) -> usize {
    let n = inst.graph.n().max(1) as f64;
    match backend {
        Backend::Lp => (n * n * n).ceil() as usize,
        _ => (cfg.c_iter * n * n).ceil().max(1.0) as usize,
    }
}

#[derive(Clone)]
struct Stats {
    cut: f64,
    mu: f64,
    eta: f64,
}

fn stats(inst: &SseInstance<'_>, s: &[usize]) -> Stats {
    let mask = to_mask(inst.graph.n(), s);
    Stats { cut: inst.graph.cut_of_mask(&mask), mu: inst.mu.of(s), eta: inst.eta.of(s) }
}

fn norm_cut(g: &Graph, cut: f64) -> f64 {
    if g.total_weight() > 0.0 {
        cut / g.total_weight()
    } else {
        0.0
    }
}

fn ratio(g: &Graph, st: &Stats) -> f64 {
    if st.eta <= 0.0 {
        f64::INFINITY
    } else {
        norm_cut(g, st.cut) / st.eta
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    inst: &SseInstance<'_>,
    mut set: Vec<usize>,
    accepted_by: Acceptance,
    iterations: usize,
    backend: Backend,
    exhausted: bool,
    h: f64,
    value: f64,
    distortion: f64,
) -> SseSolution {
    set.sort_unstable();
    let report = CutReport::new(inst.graph, &set, &inst.mu, &inst.eta);
    let objective =
        if report.eta > 0.0 { (norm_cut(inst.graph, report.boundary) / report.eta).max(0.0) } else { f64::INFINITY };
    SseSolution {
        set,
        report,
        objective,
        accepted_by,
        iterations,
        backend: backend.id().to_string(),
        budget_exhausted: exhausted,
        h: Some(h),
        relaxation_value: Some(value),
        distortion: Some(distortion),
    }
}

/// Keeps the better of two candidates: smaller ratio, then smaller μ.
fn better(a: &SseSolution, b: &SseSolution) -> bool {
    let (ra, rb) = (a.objective, b.objective);
    if (ra - rb).abs() > 1e-12 * ra.abs().max(rb.abs()).max(1e-300) {
        ra < rb
    } else {
        a.report.mu < b.report.mu
    }
}

/// Mass targets of the configured grid, ascending, restricted to `h ≥ floor`.
fn mass_targets(eta: &Measure, floor: f64, grid: GuessGrid) -> Vec<f64> {
    let full: Vec<f64> = h_guesses(eta).into_iter().filter(|&h| h >= floor * (1.0 - 1e-12)).collect();
    if grid == GuessGrid::Full || full.len() <= 2 {
        return full;
    }
    let mut out = vec![full[0]];
    let mut i = 1;
    while i < full.len() {
        let last = *out.last().unwrap();
        // furthest guess within a factor of 2, or the next one if there is none
        let mut j = i;
        while j + 1 < full.len() && full[j + 1] <= 2.0 * last {
            j += 1;
        }
        out.push(full[j]);
        i = j + 1;
    }
    out
}

fn pin_guesses(inst: &SseInstance<'_>) -> Vec<Option<usize>> {
    let mut out = vec![None];
    out.extend(inst.terminals.iter().map(|&t| Some(t)));
    out
}

fn first_scheme_m(inst: &SseInstance<'_>, cfg: &RoundingConfig) -> f64 {
    match cfg.m_reading {
        MReading::Max => (1.0 / inst.epsilon).max(1.0 / inst.rho),
        MReading::Product => 1.0 / (inst.epsilon * inst.rho),
    }
}

/// First scheme at one mass target and pin guess.
fn part1_fixed<R: Rng + ?Sized>(
    inst: &SseInstance<'_>,
    h: f64,
    pinned: Option<usize>,
    backend: Backend,
    cfg: &RoundingConfig,
    rng: &mut R,
) -> Result<Option<SseSolution>> {
    let g = inst.graph;
    let m = first_scheme_m(inst, cfg);
    let Some(rel) = relax(inst, SdpMode::PartI, h, pinned, m, backend, cfg)? else {
        return Ok(None);
    };
    let per_budget = budget(inst, backend, cfg);
    let gate = inst.size_gate();
    let mut d = rel.distortion;
    let mut draws = 0usize;
    let mut fallback: Option<(f64, f64, Vec<usize>)> = None;
    for _ in 0..=cfg.max_doublings {
        for _ in 0..per_budget {
            draws += 1;
            let s = rel.sample(rng);
            if s.is_empty() {
                continue;
            }
            let st = stats(inst, &s);
            if st.mu >= gate {
                continue;
            }
            let r = ratio(g, &st);
            if st.eta > 0.0 && fallback.as_ref().is_none_or(|f| (r, st.mu) < (f.0, f.1)) {
                fallback = Some((r, st.mu, s.clone()));
            }
            let f = st.eta - cut_penalty(norm_cut(g, st.cut), h, d, rel.value);
            if f > 0.0 {
                // acceptance implies the ratio bound
                debug_assert!(rel.value <= ZERO_VALUE || r <= 4.0 * d * rel.value / h * (1.0 + 1e-9));
                return Ok(Some(finish(inst, s, Acceptance::F, draws, backend, false, h, rel.value, d)));
            }
        }
        d *= 2.0;
    }
    Ok(fallback.map(|(_, _, s)| finish(inst, s, Acceptance::Fallback, draws, backend, true, h, rel.value, d)))
}

/// Algorithm I: approximates weighted small-set expansion up to the size gate `(1+10ε)ρ`.
pub fn sse_round_part1<R: Rng + ?Sized>(
    inst: &SseInstance<'_>,
    backend: Backend,
    cfg: &RoundingConfig,
    rng: &mut R,
) -> Result<SseSolution> {
    inst.check_nondegenerate()?;
    if backend == Backend::Exact {
        return exact_sse(inst);
    }
    let hs = match inst.h {
        Some(h) => vec![h],
        None => mass_targets(&inst.eta, 0.0, cfg.guess_grid),
    };
    let mut best: Option<SseSolution> = None;
    let mut draws = 0;
    for &h in &hs {
        for pinned in pin_guesses(inst) {
            if let Some(sol) = part1_fixed(inst, h, pinned, backend, cfg, rng)? {
                draws += sol.iterations;
                if best.as_ref().is_none_or(|b| better(&sol, b)) {
                    best = Some(sol);
                }
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::Infeasible("no mass target produced an admissible set".into()))?;
    best.iterations = draws;
    Ok(best)
}

fn exact_sse(inst: &SseInstance<'_>) -> Result<SseSolution> {
    if !inst.terminals.is_empty() {
        return Err(Error::Input("the exact SSE backend does not take terminals".into()));
    }
    oracle::exact_sse(inst.graph, &inst.mu, &inst.eta, inst.rho)
}

/// Second scheme at one mass target and pin guess.
fn part2_fixed<R: Rng + ?Sized>(
    inst: &SseInstance<'_>,
    h: f64,
    pinned: Option<usize>,
    backend: Backend,
    cfg: &RoundingConfig,
    rng: &mut R,
) -> Result<Option<SseSolution>> {
    let g = inst.graph;
    let n = g.n();
    let eps = inst.epsilon;
    let m = (1.0 / (eps * inst.rho)).max(1.0 / (h * inst.rho));
    let Some(rel) = relax(inst, SdpMode::PartII, h, pinned, m, backend, cfg)? else {
        return Ok(None);
    };
    let per_budget = budget(inst, backend, cfg);
    let gate = inst.size_gate();
    let mass_gate = 2.0 * (1.0 + 10.0 * eps) * h;
    let mut d = rel.distortion;
    let mut draws = 0usize;
    let mut in_t = vec![false; n];
    let mut t_set: Vec<usize> = Vec::new();
    let mut t_st = Stats { cut: 0.0, mu: 0.0, eta: 0.0 };
    let mut last: Option<Vec<usize>> = None;
    let mut fallback: Option<(f64, f64, Vec<usize>)> = None;
    let mut exhausted = false;
    loop {
        let mut accepted = None;
        'budget: for _ in 0..=cfg.max_doublings {
            for _ in 0..per_budget {
                draws += 1;
                let s: Vec<usize> = rel.sample(rng).into_iter().filter(|&u| !in_t[u]).collect();
                if s.is_empty() {
                    continue;
                }
                let st = stats(inst, &s);
                if st.mu >= gate || st.eta > mass_gate {
                    continue;
                }
                let r = ratio(g, &st);
                if st.eta > 0.0 && fallback.as_ref().is_none_or(|f| (r, st.mu) < (f.0, f.1)) {
                    fallback = Some((r, st.mu, s.clone()));
                }
                let f = st.eta - cut_penalty(norm_cut(g, st.cut), h, d, rel.value) - st.mu * h / (4.0 * inst.rho);
                if f > 0.0 {
                    accepted = Some(s);
                    break 'budget;
                }
            }
            d *= 2.0;
        }
        let Some(s) = accepted else {
            exhausted = true;
            break;
        };
        for &u in &s {
            in_t[u] = true;
        }
        t_set.extend_from_slice(&s);
        t_st = stats(inst, &t_set);
        debug_assert!(t_st.eta >= h * t_st.mu / (4.0 * inst.rho) - 1e-12);
        last = Some(s);
        if t_st.mu >= inst.rho / 4.0 || t_st.eta >= h / 4.0 {
            break;
        }
    }
    let t_ok = !t_set.is_empty() && t_st.mu <= inst.rho && t_st.eta <= h;
    let (set, by) = if t_ok {
        (t_set, Acceptance::FPrime)
    } else if let Some(s) = last {
        (s, Acceptance::FPrime)
    } else if let Some((_, _, s)) = fallback {
        (s, Acceptance::Fallback)
    } else {
        return Ok(None);
    };
    let by = if exhausted && by == Acceptance::FPrime && !t_ok { Acceptance::Fallback } else { by };
    Ok(Some(finish(inst, set, by, draws, backend, exhausted, h, rel.value, d)))
}

/// Algorithm II: additionally keeps `η(S)` within `[H/16, 2(1+10ε)H]` of the target `H`.
pub fn sse_round_part2<R: Rng + ?Sized>(
    inst: &SseInstance<'_>,
    backend: Backend,
    cfg: &RoundingConfig,
    rng: &mut R,
) -> Result<SseSolution> {
    let h = inst.h.ok_or_else(|| Error::Input("the second scheme needs a mass target H".into()))?;
    inst.check_nondegenerate()?;
    if backend == Backend::Exact {
        return Err(Error::Input("the second scheme needs a rounding backend".into()));
    }
    let mut best: Option<SseSolution> = None;
    let mut draws = 0;
    for pinned in pin_guesses(inst) {
        if let Some(sol) = part2_fixed(inst, h, pinned, backend, cfg, rng)? {
            draws += sol.iterations;
            if best.as_ref().is_none_or(|b| better(&sol, b)) {
                best = Some(sol);
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::Infeasible(format!("no admissible set for H={h}")))?;
    best.iterations = draws;
    Ok(best)
}

/// The first scheme on the linear relaxation with LP separators.
pub fn sse_round_minorfree<R: Rng + ?Sized>(
    inst: &SseInstance<'_>,
    cfg: &RoundingConfig,
    rng: &mut R,
) -> Result<SseSolution> {
    sse_round_part1(inst, Backend::Lp, cfg, rng)
}

/// Mass-capture constant of the rounding backends: the returned set has
/// `y(S) ≥ τ·y(V)/32` (guess `H ≥ τ/2`, then `η ≥ H/16`).
pub const UCUT_MASS_FACTOR: f64 = 32.0;

/// Weighted ρ-unbalanced cut: small cut `δ(S)` with size at most `(1+ε)ρ`
/// of the total vertex size, at most one terminal and large `y(S)`.
///
/// The exact backend returns size at most `ρ`, `y(S) ≥ τ·y(V)` and minimum
/// `δ`. The rounding backends run the second scheme with `ε/10` for every
/// mass target `H ≥ τ/2` of the guess grid and every terminal pin.
/// Candidates with `y(S) ≥ τ·y(V)` are preferred, then the smaller cut. The
/// returned objective is `δ(S)`.
pub fn weighted_unbalanced_cut<R: Rng + ?Sized>(
    g: &Graph,
    q: &UcutQuery,
    epsilon: f64,
    backend: Backend,
    cfg: &RoundingConfig,
    rng: &mut R,
) -> Result<SseSolution> {
    let n = g.n();
    if q.y.len() != n || q.size_w.len() != n {
        return Err(Error::Input(format!("query arrays must have length n={n}")));
    }
    let (tau, rho) = (q.tau, q.rho);
    if !(tau > 0.0 && tau <= 1.0) || !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Input(format!("tau={tau} and rho={rho} must lie in (0,1]")));
    }
    let y = Measure::new(q.y.clone())?;
    if y.total() <= 0.0 {
        return Err(Error::Input("y has zero mass".into()));
    }
    if q.size_total() == 0 {
        return Err(Error::Input("vertex sizes sum to zero".into()));
    }
    ucut_feasible(q)?;
    if backend == Backend::Exact {
        return oracle::exact_unbalanced_cut_query(g, q);
    }
    if rho > 0.5 {
        return Err(Error::Input(format!("rounding backends need rho ≤ 1/2, got {rho}")));
    }
    let mu = Measure::new(q.size_w.iter().map(|&w| w as f64).collect())?;
    let inst = SseInstance::new(g, &mu, &y, rho, epsilon / 10.0)?.with_terminals(&q.terminals)?;
    let reach = |sol: &SseSolution| sol.report.eta >= tau * (1.0 - 1e-12);
    let mut best: Option<SseSolution> = None;
    let mut draws = 0;
    'guesses: for h in mass_targets(&inst.eta, tau / 2.0, cfg.guess_grid) {
        for pinned in pin_guesses(&inst) {
            let Some(sol) = part2_fixed(&inst, h, pinned, backend, cfg, rng)? else {
                continue;
            };
            draws += sol.iterations;
            debug_assert!(sol.set.iter().filter(|u| q.terminals.contains(u)).count() <= 1);
            // sets reaching the full mass target first, then the smaller cut
            let better = match &best {
                None => true,
                Some(b) if reach(&sol) != reach(b) => reach(&sol),
                Some(b) => {
                    let (c, bc) = (sol.report.boundary, b.report.boundary);
                    if (c - bc).abs() > 1e-12 * c.max(bc).max(1.0) {
                        c < bc
                    } else if sol.report.eta != b.report.eta {
                        sol.report.eta > b.report.eta
                    } else {
                        sol.set.len() < b.set.len()
                    }
                }
            };
            if better {
                best = Some(sol);
            }
            if best.as_ref().is_some_and(|b| reach(b) && b.report.boundary <= 0.0) {
                break 'guesses;
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::Infeasible("rounding found no admissible set".into()))?;
    best.iterations = draws;
    best.objective = best.report.boundary;
    Ok(best)
}

/// Fails when even fractionally no set within the size cap with at most
/// one terminal reaches `y(S) ≥ τ·y(V)`.
fn ucut_feasible(q: &UcutQuery) -> Result<()> {
    let n = q.y.len();
    let cap = q.size_cap() as f64;
    let is_term = to_mask(n, &q.terminals);
    let mut free: Vec<usize> = (0..n).filter(|&u| !is_term[u]).collect();
    // zero-size vertices first, then by density
    free.sort_by(|&a, &b| {
        let da = q.y[a] * q.size_w[b] as f64;
        let db = q.y[b] * q.size_w[a] as f64;
        db.partial_cmp(&da).unwrap()
    });
    let fill = |room: f64| {
        let mut room = room;
        let mut got = 0.0;
        for &u in &free {
            let w = q.size_w[u] as f64;
            if w <= room {
                got += q.y[u];
                room -= w;
            } else {
                got += q.y[u] * room / w;
                break;
            }
        }
        got
    };
    let mut best = fill(cap);
    for &t in &q.terminals {
        let w = q.size_w[t] as f64;
        if w <= cap {
            best = best.max(q.y[t] + fill(cap - w));
        }
    }
    let total: f64 = q.y.iter().sum();
    if best < q.tau * total * (1.0 - 1e-12) {
        return Err(Error::Infeasible(format!(
            "no set of size ≤ {cap} reaches y(S) ≥ {}·y(V)",
            q.tau
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn two_clusters() -> Graph {
        // a triangle and a separate path: the triangle has zero boundary
        Graph::new(6, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0)]).unwrap()
    }

    #[test]
    fn zero_relaxation_returns_isolated_cluster() {
        let g = two_clusters();
        let u = Measure::uniform(6);
        let inst = SseInstance::new(&g, &u, &u, 0.5, 0.1).unwrap().with_h(0.5).unwrap();
        let mut rng = stream(11, "test");
        let s = sse_round_part1(&inst, Backend::Sdp, &RoundingConfig::default(), &mut rng).unwrap();
        assert_eq!(s.report.boundary, 0.0);
        assert!(s.report.mu < 0.5 * 2.0);
        assert_eq!(s.accepted_by, Acceptance::F);
    }

    #[test]
    fn pin_terminals_rules() {
        let g = two_clusters();
        let u = Measure::uniform(6);
        let p = build_sse_sdp(&g, &u, &u, 0.5, 0.5, SdpMode::PartI, &[], None).unwrap();
        let q = pin_terminals(p.clone(), &[1, 4], Some(4)).unwrap();
        assert!(q.zeroed[1] && !q.zeroed[4]);
        assert_eq!(q.pinned, Some(4));
        assert!(pin_terminals(p, &[1, 4], Some(0)).is_err());
    }

    #[test]
    fn degenerate_mass_is_infeasible() {
        let g = two_clusters();
        let mu = Measure::new(vec![0.9, 0.02, 0.02, 0.02, 0.02, 0.02]).unwrap();
        let eta = Measure::new(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let inst = SseInstance::new(&g, &mu, &eta, 0.25, 0.1).unwrap();
        let mut rng = stream(12, "test");
        let r = sse_round_part1(&inst, Backend::Sdp, &RoundingConfig::default(), &mut rng);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn ucut_infeasible_detected() {
        let y = Measure::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(ucut_feasible(&UcutQuery::new(&y, 0.6, 0.25)).is_err());
        assert!(ucut_feasible(&UcutQuery::new(&y, 0.25, 0.25)).is_ok());
        // two terminals cannot share a set
        let mut q = UcutQuery::new(&y, 0.5, 0.5);
        q.terminals = vec![0, 1, 2, 3];
        assert!(ucut_feasible(&q).is_err());
        // a heavy vertex does not fit
        let mut q = UcutQuery::new(&y, 0.25, 0.5);
        q.size_w = vec![3, 2, 2, 1];
        assert!(ucut_feasible(&q).is_ok());
        q.tau = 0.65;
        assert!(ucut_feasible(&q).is_err());
    }

    #[test]
    fn doubling_grid_is_a_factor_two_chain() {
        let eta = Measure::new(vec![0.5, 0.3, 0.11, 0.05, 0.04]).unwrap();
        let full = mass_targets(&eta, 0.1, GuessGrid::Full);
        let thin = mass_targets(&eta, 0.1, GuessGrid::Doubling);
        assert!(thin.len() < full.len());
        assert_eq!(thin[0], full[0]);
        assert_eq!(thin.last(), full.last());
        for w in thin.windows(2) {
            assert!(w[1] <= 2.0 * w[0] || !full.iter().any(|&h| h > w[0] && h <= 2.0 * w[0]));
        }
        // every full guess lies within a factor two above some kept guess
        for &h in &full {
            assert!(thin.iter().any(|&t| t <= h && h < 2.0 * t + 1e-15));
        }
    }

    #[test]
    fn backend_names_round_trip() {
        for b in [Backend::Exact, Backend::Sdp, Backend::Lp] {
            assert_eq!(b.id().parse::<Backend>().unwrap(), b);
        }
        assert!("bogus".parse::<Backend>().is_err());
    }
}
