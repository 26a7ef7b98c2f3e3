//! End-to-end drivers: covering followed by aggregation.

use serde::{Deserialize, Serialize};

use crate::aggregation::{aggregate, aggregate_with_terminals, AggLog, AggregateParams, TerminalParams};
use crate::covering::{cover_minmax_cut, cover_minmax_kpart, cut_total_budget, Contract, Cover, CoverConfig, CutCaps};
use crate::error::{Error, Result};
use crate::graph::{validate_partition, Graph, Partition};
use crate::rng::stream;
use crate::sse::{Backend, RoundingConfig};

/// Settings shared by every driver.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub backend: Backend,
    pub epsilon: f64,
    pub seed: u64,
    pub rounding: RoundingConfig,
    /// Cut factor assumed for rounding backends.
    pub alpha: Option<f64>,
}

impl PipelineConfig {
    pub fn new(backend: Backend, epsilon: f64, seed: u64) -> Self {
        PipelineConfig { backend, epsilon, seed, rounding: RoundingConfig::default(), alpha: None }
    }

    fn cover_config(&self) -> CoverConfig {
        CoverConfig { backend: self.backend, epsilon: self.epsilon, rounding: self.rounding.clone(), alpha: self.alpha }
    }
}

/// Summary of one driver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub problem: String,
    pub n: usize,
    pub k: usize,
    pub backend: Backend,
    pub seed: u64,
    pub epsilon: f64,
    pub max_cut: f64,
    pub sum_cut: f64,
    pub max_size: usize,
    /// Caps the output was validated against.
    pub size_cap: f64,
    pub cost_cap: f64,
    pub cover_sets: usize,
    /// Largest cover-set cut, used as `B`.
    pub cover_max_cut: f64,
    /// Coverage constant `c = k·min_v N_v/ℓ`.
    pub coverage: f64,
    pub b_prime: f64,
    pub uncrossings: usize,
    pub merges: usize,
    pub contract: Contract,
    pub fallbacks: usize,
    pub draws: usize,
    /// Accepted `(C, D)` of the cut-capped driver.
    pub caps: Option<(f64, f64)>,
    /// `max δ / (α·C)` of the cut-capped driver.
    pub max_cut_ratio: Option<f64>,
    /// `Σ δ / D` of the cut-capped driver.
    pub sum_cut_multiple: Option<f64>,
    /// `Σ δ` over cover sets against the covering budget `17αγ·log₂n·D`.
    pub cover_budget: Option<(f64, f64)>,
}

/// Partition, report and the cover it came from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub partition: Partition,
    pub report: PipelineReport,
    pub cover: Option<Cover>,
}

fn trivial(g: &Graph, problem: &str, cfg: &PipelineConfig) -> PipelineOutput {
    let n = g.n();
    let partition = Partition::from_parts(n, vec![(0..n).collect()]).expect("one part");
    PipelineOutput {
        report: PipelineReport {
            problem: problem.into(),
            n,
            k: 1,
            backend: cfg.backend,
            seed: cfg.seed,
            epsilon: cfg.epsilon,
            max_cut: 0.0,
            sum_cut: 0.0,
            max_size: n,
            size_cap: n as f64,
            cost_cap: 0.0,
            cover_sets: 0,
            cover_max_cut: 0.0,
            coverage: 1.0,
            b_prime: 0.0,
            uncrossings: 0,
            merges: 0,
            contract: Contract::EXACT,
            fallbacks: 0,
            draws: 0,
            caps: None,
            max_cut_ratio: None,
            sum_cut_multiple: None,
            cover_budget: None,
        },
        partition,
        cover: None,
    }
}

/// Min-max k-partitioning: balanced covering, then sampling, uncrossing and
/// greedy merging. Parts have at most `2(1+ε)n/k` vertices and cut at most
/// `2B′/ε`.
pub fn run_minmax_kpart(g: &Graph, k: usize, cfg: &PipelineConfig, log: Option<&mut AggLog>) -> Result<PipelineOutput> {
    let n = g.n();
    if k == 0 {
        return Err(Error::Input("k must be positive".into()));
    }
    if k == 1 || n <= 1 {
        return Ok(trivial(g, "kpart", cfg));
    }
    if k > n {
        return Err(Error::Input(format!("k={k} exceeds n={n}")));
    }
    let cover = cover_minmax_kpart(g, k, &cfg.cover_config(), &mut stream(cfg.seed, "cover"))?;
    let sets: Vec<Vec<usize>> = cover.sets().map(<[usize]>::to_vec).collect();
    let b = cover.max_cut();
    let c = cover.coverage_constant().min(1.0);
    let params = AggregateParams { k, c, b, epsilon: cfg.epsilon };
    let agg = aggregate(g, &sets, params, &mut stream(cfg.seed, "aggregate"), log)?;
    let size_cap = 2.0 * (1.0 + cfg.epsilon) * n as f64 / k as f64;
    let cost_cap = 2.0 * agg.b_prime / cfg.epsilon;
    let rep = validate_partition(g, &agg.partition.parts, k, size_cap, cost_cap);
    if !rep.is_valid() {
        return Err(Error::Contract(format!("aggregated partition fails its caps: {rep:?}")));
    }
    Ok(PipelineOutput {
        report: PipelineReport {
            problem: "kpart".into(),
            n,
            k,
            backend: cfg.backend,
            seed: cfg.seed,
            epsilon: cfg.epsilon,
            max_cut: rep.max_cut,
            sum_cut: rep.sum_cut,
            max_size: rep.max_size,
            size_cap,
            cost_cap,
            cover_sets: cover.len(),
            cover_max_cut: b,
            coverage: c,
            b_prime: agg.b_prime,
            uncrossings: agg.uncrossings,
            merges: agg.merges,
            contract: cover.contract,
            fallbacks: cover.fallbacks(),
            draws: cover.draws,
            caps: None,
            max_cut_ratio: None,
            sum_cut_multiple: None,
            cover_budget: None,
        },
        partition: agg.partition,
        cover: Some(cover),
    })
}

/// Graph with every terminal set contracted to one vertex.
#[derive(Clone, Debug)]
pub struct Shrunk {
    pub graph: Graph,
    /// Shrunk vertex of every original vertex.
    pub map: Vec<usize>,
    /// Number of original vertices behind every shrunk vertex.
    pub sizes: Vec<usize>,
    /// Shrunk vertex of terminal set `i`.
    pub terminals: Vec<usize>,
}

/// Contracts each terminal set to a single vertex whose size is the set's
/// size; edges inside a set disappear and parallel edges are summed.
pub fn shrink_terminals(g: &Graph, terminal_sets: &[Vec<usize>]) -> Result<Shrunk> {
    let n = g.n();
    let mut owner = vec![usize::MAX; n];
    for (i, t) in terminal_sets.iter().enumerate() {
        if t.is_empty() {
            return Err(Error::Input(format!("terminal set {i} is empty")));
        }
        for &v in t {
            if v >= n {
                return Err(Error::Input(format!("terminal vertex {v} out of range")));
            }
            if owner[v] != usize::MAX {
                return Err(Error::Input(format!("vertex {v} lies in two terminal sets")));
            }
            owner[v] = i;
        }
    }
    let k = terminal_sets.len();
    let mut map = vec![usize::MAX; n];
    let mut next = k;
    for v in 0..n {
        map[v] = if owner[v] != usize::MAX {
            owner[v]
        } else {
            next += 1;
            next - 1
        };
    }
    let mut sizes = vec![0usize; next];
    for v in 0..n {
        sizes[map[v]] += 1;
    }
    let edges = g.edges().iter().filter(|e| map[e.0] != map[e.1]).map(|e| (map[e.0], map[e.1], e.2));
    let (graph, _) = Graph::new_counting(next, edges)?;
    Ok(Shrunk { graph, map, sizes, terminals: (0..k).collect() })
}

/// Cut caps to use: given, or the smallest feasible pair of the sweep
/// `C ∈ {2ʲ}`, `D ∈ {C, kC}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CapChoice {
    Given { c: f64, d: f64 },
    Sweep,
}

fn sweep_caps(g: &Graph, k: usize) -> Vec<(f64, f64)> {
    let total = g.total_weight();
    let min_w = g.edges().iter().map(|e| e.2).filter(|&w| w > 0.0).fold(f64::INFINITY, f64::min);
    if !min_w.is_finite() {
        return vec![(1.0, 1.0)];
    }
    let lo = min_w.log2().floor() as i32;
    let hi = (2.0 * total).log2().ceil() as i32;
    let mut out = Vec::new();
    for j in lo..=hi {
        let c = 2f64.powi(j);
        out.push((c, c));
        if k > 1 {
            out.push((c, k as f64 * c));
        }
    }
    out
}

/// Min-Max Cut: parts of size at most `(2+ε)ρn` with terminal set `i` inside
/// part `i`. Terminal sets are shrunk to weighted representatives, covered
/// under the caps, grouped and expanded back.
pub fn run_minmax_cut(
    g: &Graph,
    terminal_sets: &[Vec<usize>],
    k: usize,
    rho: f64,
    caps: CapChoice,
    cfg: &PipelineConfig,
    log: Option<&mut AggLog>,
) -> Result<PipelineOutput> {
    let n = g.n();
    if k == 0 || terminal_sets.len() > k {
        return Err(Error::Input(format!("need 1 ≤ k and at most k terminal sets (k={k}, {})", terminal_sets.len())));
    }
    if !(rho * k as f64 >= 1.0 - 1e-12 && rho <= 1.0) {
        return Err(Error::Input(format!("rho={rho} must lie in [1/k, 1]")));
    }
    if k == 1 {
        let out = trivial(g, "minmaxcut", cfg);
        shrink_terminals(g, terminal_sets)?;
        return Ok(out);
    }
    let sh = shrink_terminals(g, terminal_sets)?;
    let cover_cfg = cfg.cover_config();
    let candidates = match caps {
        CapChoice::Given { c, d } => vec![(c, d)],
        CapChoice::Sweep => sweep_caps(&sh.graph, k),
    };
    let mut found = None;
    let mut last_err = None;
    for (c, d) in candidates {
        let caps = CutCaps { rho, c, d };
        match cover_minmax_cut(&sh.graph, k, caps, &sh.terminals, Some(&sh.sizes), &cover_cfg, &mut stream(cfg.seed, "cover")) {
            Ok(cover) => {
                found = Some((cover, caps));
                break;
            }
            Err(e @ Error::Infeasible(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let (cover, used) = match found {
        Some(x) => x,
        None => return Err(last_err.unwrap_or_else(|| Error::Infeasible("no caps to try".into()))),
    };
    let sets: Vec<Vec<usize>> = cover.sets().map(<[usize]>::to_vec).collect();
    let b = cover.max_cut();
    let params = TerminalParams {
        k,
        rho,
        b,
        epsilon: cfg.epsilon,
        terminals: sh.terminals.clone(),
        sizes: Some(sh.sizes.clone()),
    };
    let agg = aggregate_with_terminals(&sh.graph, &sets, &params, &mut stream(cfg.seed, "aggregate"), log)?;
    let mut parts = vec![Vec::new(); k];
    for v in 0..n {
        parts[agg.partition.part_of[sh.map[v]]].push(v);
    }
    let partition = Partition::from_parts(n, parts)?;
    for (i, t) in terminal_sets.iter().enumerate() {
        if let Some(&v) = t.iter().find(|&&v| partition.part_of[v] != i) {
            return Err(Error::Contract(format!("terminal vertex {v} left part {i}")));
        }
    }
    let size_cap = (2.0 + cfg.epsilon) * rho * n as f64;
    let cost_cap = 8.0 * agg.b_prime;
    let rep = validate_partition(g, &partition.parts, k, size_cap, cost_cap);
    if !rep.is_valid() {
        return Err(Error::Contract(format!("grouped partition fails its caps: {rep:?}")));
    }
    let ct = cover.contract;
    Ok(PipelineOutput {
        report: PipelineReport {
            problem: "minmaxcut".into(),
            n,
            k,
            backend: cfg.backend,
            seed: cfg.seed,
            epsilon: cfg.epsilon,
            max_cut: rep.max_cut,
            sum_cut: rep.sum_cut,
            max_size: rep.max_size,
            size_cap,
            cost_cap,
            cover_sets: cover.len(),
            cover_max_cut: b,
            coverage: cover.coverage_constant(),
            b_prime: agg.b_prime,
            uncrossings: agg.uncrossings,
            merges: agg.merges,
            contract: ct,
            fallbacks: cover.fallbacks(),
            draws: cover.draws,
            caps: Some((used.c, used.d)),
            max_cut_ratio: Some(rep.max_cut / (ct.alpha * used.c)),
            sum_cut_multiple: Some(rep.sum_cut / used.d),
            cover_budget: Some((cover.total_cut(), cut_total_budget(sh.graph.n(), &ct, used.d))),
        },
        partition,
        cover: Some(cover),
    })
}

/// Min-max multiway cut: the Min-Max Cut driver with `ρ = 1` and singleton
/// terminal sets.
pub fn run_minmax_multiway(
    g: &Graph,
    terminals: &[usize],
    cfg: &PipelineConfig,
    log: Option<&mut AggLog>,
) -> Result<PipelineOutput> {
    let k = terminals.len();
    if k == 0 {
        return Err(Error::Input("at least one terminal required".into()));
    }
    let sets: Vec<Vec<usize>> = terminals.iter().map(|&t| vec![t]).collect();
    let mut out = run_minmax_cut(g, &sets, k, 1.0, CapChoice::Sweep, cfg, log)?;
    out.report.problem = "multiway".into();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_greedy_bad_tree;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn four_cycle_bisection_matches_oracle() {
        let g = cycle(4);
        let opt = crate::oracle::exact_minmax_kpart(&g, 2, 2).unwrap().value;
        assert_eq!(opt, 2.0);
        // the size slack of 2(1+ε)n/k ≥ n allows a single part
        let out = run_minmax_kpart(&g, 2, &PipelineConfig::new(Backend::Exact, 0.25, 1), None).unwrap();
        assert!(out.report.max_cut <= opt);
    }

    #[test]
    fn single_part_has_no_cut() {
        let g = cycle(5);
        let out = run_minmax_kpart(&g, 1, &PipelineConfig::new(Backend::Exact, 0.25, 1), None).unwrap();
        assert_eq!(out.partition.parts.len(), 1);
        assert_eq!(out.report.max_cut, 0.0);
    }

    #[test]
    fn shrinking_sums_parallel_edges() {
        let g = cycle(4);
        let sh = shrink_terminals(&g, &[vec![0, 2]]).unwrap();
        assert_eq!(sh.graph.n(), 3);
        assert_eq!(sh.sizes, vec![2, 1, 1]);
        assert_eq!(sh.graph.weighted_degree(0), 4.0);
    }

    #[test]
    fn multiway_on_disconnected_terminals_is_free() {
        let g = Graph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let out = run_minmax_multiway(&g, &[0, 2], &PipelineConfig::new(Backend::Exact, 0.25, 3), None).unwrap();
        assert_eq!(out.report.max_cut, 0.0);
        assert_eq!(out.partition.part_of[0], 0);
        assert_eq!(out.partition.part_of[2], 1);
    }

    #[test]
    fn tree_pipeline_respects_caps() {
        let g = gen_greedy_bad_tree(3).unwrap();
        let mut log = AggLog::default();
        let out = run_minmax_kpart(&g, 3, &PipelineConfig::new(Backend::Exact, 0.25, 9), Some(&mut log)).unwrap();
        assert!(out.report.max_size as f64 <= 2.5 * 3.0);
        assert!(!log.events.is_empty());
    }
}
