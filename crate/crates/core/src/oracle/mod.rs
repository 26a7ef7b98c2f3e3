//! Exact brute-force solvers for small instances.
//!
//! Subsets are enumerated in Gray-code order with incremental cut updates;
//! partitions by depth-first assignment with restricted-growth labels and
//! branch-and-bound on the partial objective. Forests with integer weights
//! fall back to an exact dynamic programme when enumeration is too large.

mod forest;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{to_mask, CutReport, Graph, Measure, Partition};
use crate::sse::{Acceptance, SseSolution};

/// Largest vertex count for subset enumeration.
pub const SUBSET_CAP: usize = 22;
/// Largest vertex count for partition enumeration.
pub const PARTITION_CAP: usize = 14;

const REL_TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Normalized SSE objective (δ(S)/w(E))·(1/η(S)).
pub fn sse_objective(g: &Graph, cut: f64, eta_s: f64) -> f64 {
    if cut <= 0.0 || g.total_weight() <= 0.0 {
        0.0
    } else {
        cut / g.total_weight() / eta_s
    }
}

fn mask_to_set(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| (mask >> i) & 1 == 1).collect()
}

/// Visits every nonempty subset in Gray-code order with its size, cut weight
/// and running sums of the given per-vertex arrays.
fn gray_walk(g: &Graph, arrays: &[&[f64]], mut visit: impl FnMut(u64, usize, f64, &[f64])) {
    let n = g.n();
    let mut inside = vec![false; n];
    let mut mask = 0u64;
    let mut size = 0usize;
    let mut cut = 0.0f64;
    let mut acc = vec![0.0f64; arrays.len()];
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let was = inside[v];
        for (u, w) in g.neighbors(v) {
            if inside[u] == was {
                cut += w;
            } else {
                cut -= w;
            }
        }
        inside[v] = !was;
        mask ^= 1 << v;
        if was {
            size -= 1;
            for (a, arr) in acc.iter_mut().zip(arrays) {
                *a -= arr[v];
            }
        } else {
            size += 1;
            for (a, arr) in acc.iter_mut().zip(arrays) {
                *a += arr[v];
            }
        }
        visit(mask, size, cut, &acc);
    }
}

fn check_measure(g: &Graph, m: &Measure, name: &str) -> Result<()> {
    if m.len() != g.n() {
        return Err(Error::Input(format!("{name} has {} entries for n={}", m.len(), g.n())));
    }
    Ok(())
}

fn solution(
    g: &Graph,
    set: Vec<usize>,
    mu: &Measure,
    eta: &Measure,
    objective: f64,
    backend: &str,
) -> SseSolution {
    let report = CutReport::new(g, &set, mu, eta);
    SseSolution {
        set,
        report,
        objective,
        accepted_by: Acceptance::Exact,
        iterations: 0,
        backend: backend.to_string(),
        budget_exhausted: false,
        h: None,
        relaxation_value: None,
        distortion: None,
    }
}

/// Exact weighted small-set expansion: minimizes (δ(S)/w(E))/η(S) over
/// nonempty S with μ(S) ≤ ρ and η(S) > 0. Ties go to smaller |S|, then to
/// the smaller bitmask.
pub fn exact_sse(g: &Graph, mu: &Measure, eta: &Measure, rho: f64) -> Result<SseSolution> {
    exact_sse_capped(g, mu, eta, rho, SUBSET_CAP)
}

pub fn exact_sse_capped(
    g: &Graph,
    mu: &Measure,
    eta: &Measure,
    rho: f64,
    cap: usize,
) -> Result<SseSolution> {
    let n = g.n();
    if n > cap || n > 63 {
        return Err(Error::Capacity(format!("exact SSE enumeration limited to n ≤ {cap}, got {n}")));
    }
    check_measure(g, mu, "mu")?;
    check_measure(g, eta, "eta")?;
    let positive: Vec<f64> = eta.values().iter().map(|&x| (x > 0.0) as u8 as f64).collect();
    let mut best: Option<(f64, usize, u64)> = None;
    gray_walk(g, &[mu.values(), eta.values(), &positive], |mask, size, cut, acc| {
        if acc[0] > rho + 1e-12 || acc[2] < 0.5 {
            return;
        }
        let obj = sse_objective(g, cut, acc[1]);
        let better = match best {
            None => true,
            Some((b, bs, bm)) => {
                if close(obj, b) {
                    (size, mask) < (bs, bm)
                } else {
                    obj < b
                }
            }
        };
        if better {
            best = Some((obj, size, mask));
        }
    });
    let (_, _, mask) = best.ok_or_else(|| {
        Error::Infeasible("no nonempty set with μ(S) ≤ ρ and η(S) > 0".into())
    })?;
    let set = mask_to_set(mask, n);
    let m = to_mask(n, &set);
    let obj = sse_objective(g, g.cut_of_mask(&m), eta.of(&set));
    Ok(solution(g, set, mu, eta, obj, "exact"))
}

/// A weighted unbalanced cut query: minimize δ(S) subject to
/// y(S) ≥ τ·y(V), weight(S) ≤ ρ·weight(V), S ≠ ∅ and at most one terminal in S.
#[derive(Clone, Debug)]
pub struct UcutQuery {
    pub y: Vec<f64>,
    pub tau: f64,
    pub rho: f64,
    /// Integer vertex weights for the size constraint; unit weights by default.
    pub size_w: Vec<usize>,
    pub terminals: Vec<usize>,
}

impl UcutQuery {
    pub fn new(y: &Measure, tau: f64, rho: f64) -> Self {
        UcutQuery {
            y: y.values().to_vec(),
            tau,
            rho,
            size_w: vec![1; y.len()],
            terminals: Vec::new(),
        }
    }

    pub fn size_total(&self) -> usize {
        self.size_w.iter().sum()
    }

    /// Largest admissible weighted size.
    pub fn size_cap(&self) -> usize {
        (self.rho * self.size_total() as f64 + 1e-9).floor() as usize
    }

    fn y_total(&self) -> f64 {
        self.y.iter().sum()
    }
}

/// Exact weighted ρ-unbalanced cut with unit vertex sizes.
pub fn exact_unbalanced_cut(g: &Graph, y: &Measure, tau: f64, rho: f64) -> Result<SseSolution> {
    check_measure(g, y, "y")?;
    exact_unbalanced_cut_query(g, &UcutQuery::new(y, tau, rho))
}

/// Exact weighted ρ-unbalanced cut. Ties on δ go to larger y(S), then smaller
/// size, then smaller bitmask.
pub fn exact_unbalanced_cut_query(g: &Graph, q: &UcutQuery) -> Result<SseSolution> {
    let n = g.n();
    if q.y.len() != n || q.size_w.len() != n {
        return Err(Error::Input("query arrays do not match the graph".into()));
    }
    if q.terminals.iter().any(|&t| t >= n) {
        return Err(Error::Input("terminal out of range".into()));
    }
    let y_total = q.y_total();
    let need = q.tau * y_total - 1e-12 * y_total.max(1.0);
    let cap = q.size_cap();
    let set = if n <= SUBSET_CAP {
        let sizes: Vec<f64> = q.size_w.iter().map(|&s| s as f64).collect();
        let term = to_mask(n, &q.terminals);
        let tf: Vec<f64> = term.iter().map(|&b| b as u8 as f64).collect();
        let mut best: Option<(f64, f64, usize, u64)> = None;
        gray_walk(g, &[&q.y, &sizes, &tf], |mask, _, cut, acc| {
            if acc[1] > cap as f64 + 0.5 || acc[2] > 1.5 || acc[0] < need {
                return;
            }
            let size = acc[1].round() as usize;
            let better = match best {
                None => true,
                Some((bc, by, bs, bm)) => {
                    if close(cut, bc) {
                        if close(acc[0], by) {
                            (size, mask) < (bs, bm)
                        } else {
                            acc[0] > by
                        }
                    } else {
                        cut < bc
                    }
                }
            };
            if better {
                best = Some((cut, acc[0], size, mask));
            }
        });
        let (_, _, _, mask) = best.ok_or_else(|| {
            Error::Infeasible(format!("no set with y(S) ≥ {}·y(V) and size ≤ {cap}", q.tau))
        })?;
        mask_to_set(mask, n)
    } else if g.is_forest() && g.has_integer_weights() {
        forest_ucut(g, q, need, cap)?
    } else {
        return Err(Error::Capacity(format!(
            "exact unbalanced cut needs n ≤ {SUBSET_CAP} or an integer-weighted forest, got n={n}"
        )));
    };
    let mu = Measure::new(q.size_w.iter().map(|&s| s as f64 / q.size_total() as f64).collect())?;
    let eta = Measure::new(q.y.iter().map(|&v| if y_total > 0.0 { v / y_total } else { 0.0 }).collect())?;
    let cut = g.cut_of_mask(&to_mask(n, &set));
    Ok(solution(g, set, &mu, &eta, cut, "exact"))
}

fn forest_ucut(g: &Graph, q: &UcutQuery, need: f64, cap: usize) -> Result<Vec<usize>> {
    let n = g.n();
    let term = to_mask(n, &q.terminals);
    let input = forest::ForestInput { graph: g, size_w: &q.size_w, y: &q.y, terminal: &term, cap };
    let total = g.total_weight().round() as usize;
    let mut cmax = 1usize;
    loop {
        let tab = forest::solve(&input, cmax.min(total));
        for c in 0..=tab.cmax() {
            let mut pick: Option<(f64, usize, usize)> = None;
            for s in 1..=tab.cap() {
                for t in 0..2 {
                    let v = tab.root_value(s, c, t);
                    if v == f64::NEG_INFINITY || v < need {
                        continue;
                    }
                    let better = match pick {
                        None => true,
                        Some((pv, ps, pt)) => {
                            if close(v, pv) {
                                (s, t) < (ps, pt)
                            } else {
                                v > pv
                            }
                        }
                    };
                    if better {
                        pick = Some((v, s, t));
                    }
                }
            }
            if let Some((_, s, t)) = pick {
                return Ok(tab.recover(s, c, t));
            }
        }
        if cmax >= total {
            return Err(Error::Infeasible(format!(
                "no set with y(S) ≥ {}·y(V) and size ≤ {cap}",
                q.tau
            )));
        }
        cmax *= 2;
    }
}

/// Minimum-cut set of exactly `size` vertices; ties to the smaller bitmask
/// under enumeration.
pub fn exact_fixed_size_cut(g: &Graph, size: usize) -> Result<Vec<usize>> {
    let n = g.n();
    if size == 0 || size > n {
        return Err(Error::Input(format!("size {size} out of range for n={n}")));
    }
    if n <= SUBSET_CAP {
        let mut best: Option<(f64, u64)> = None;
        gray_walk(g, &[], |mask, s, cut, _| {
            if s != size {
                return;
            }
            let better = match best {
                None => true,
                Some((bc, bm)) => {
                    if close(cut, bc) {
                        mask < bm
                    } else {
                        cut < bc
                    }
                }
            };
            if better {
                best = Some((cut, mask));
            }
        });
        return Ok(mask_to_set(best.unwrap().1, n));
    }
    if !(g.is_forest() && g.has_integer_weights()) {
        return Err(Error::Capacity(format!(
            "fixed-size cut needs n ≤ {SUBSET_CAP} or an integer-weighted forest, got n={n}"
        )));
    }
    let sizes = vec![1usize; n];
    let y = vec![0.0; n];
    let term = vec![false; n];
    let input = forest::ForestInput { graph: g, size_w: &sizes, y: &y, terminal: &term, cap: size };
    let total = g.total_weight().round() as usize;
    let mut cmax = 1usize;
    loop {
        let tab = forest::solve(&input, cmax.min(total));
        for c in 0..=tab.cmax() {
            if tab.root_value(size, c, 0) != f64::NEG_INFINITY {
                return Ok(tab.recover(size, c, 0));
            }
        }
        cmax *= 2;
    }
}

/// Optimal partition with its objective value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSolution {
    pub partition: Partition,
    pub value: f64,
}

struct Assign<'a> {
    g: &'a Graph,
    k: usize,
    cap: usize,
    order: Vec<usize>,
    fixed: Vec<Option<usize>>,
    rgs: bool,
    sum_objective: bool,
    labels: Vec<usize>,
    placed: Vec<bool>,
    sizes: Vec<usize>,
    cuts: Vec<f64>,
    crossing: f64,
    best: f64,
    best_labels: Option<Vec<usize>>,
}

impl Assign<'_> {
    fn objective(&self) -> f64 {
        if self.sum_objective {
            self.crossing
        } else {
            self.cuts.iter().copied().fold(0.0, f64::max)
        }
    }

    fn run(&mut self, depth: usize, used: usize) {
        let n = self.order.len();
        if depth == n {
            let obj = self.objective();
            if self.best_labels.is_none() || obj < self.best - REL_TOL * self.best.max(1.0) {
                self.best = obj;
                self.best_labels = Some(self.labels.clone());
            }
            return;
        }
        let free: usize = self.sizes.iter().map(|&s| self.cap - s).sum();
        if free < n - depth {
            return;
        }
        let v = self.order[depth];
        let choices: Vec<usize> = match self.fixed[v] {
            Some(l) => vec![l],
            None if self.rgs => (0..self.k.min(used + 1)).collect(),
            None => (0..self.k).collect(),
        };
        for l in choices {
            if self.sizes[l] >= self.cap {
                continue;
            }
            let saved_cuts = self.cuts.clone();
            let saved_crossing = self.crossing;
            for (u, w) in self.g.neighbors(v) {
                if self.placed[u] && self.labels[u] != l {
                    self.cuts[l] += w;
                    let lu = self.labels[u];
                    self.cuts[lu] += w;
                    self.crossing += w;
                }
            }
            let bound = self.objective();
            if self.best_labels.is_none() || bound < self.best - REL_TOL * self.best.max(1.0) {
                self.labels[v] = l;
                self.placed[v] = true;
                self.sizes[l] += 1;
                self.run(depth + 1, used.max(l + 1));
                self.sizes[l] -= 1;
                self.placed[v] = false;
            }
            self.cuts = saved_cuts;
            self.crossing = saved_crossing;
        }
    }
}

fn assign_search(
    g: &Graph,
    k: usize,
    cap: usize,
    fixed: Vec<Option<usize>>,
    order: Vec<usize>,
    rgs: bool,
    sum_objective: bool,
) -> Option<(Vec<usize>, f64)> {
    let n = g.n();
    let mut a = Assign {
        g,
        k,
        cap,
        order,
        fixed,
        rgs,
        sum_objective,
        labels: vec![0; n],
        placed: vec![false; n],
        sizes: vec![0; k],
        cuts: vec![0.0; k],
        crossing: 0.0,
        best: f64::INFINITY,
        best_labels: None,
    };
    a.run(0, 0);
    let best = a.best;
    a.best_labels.map(|l| (l, best))
}

fn partition_of(labels: &[usize], k: usize) -> Partition {
    Partition::from_labels(labels, k).expect("labels in range").without_empty()
}

/// Exact min-max k-partitioning: at most `k` nonempty parts of size at most
/// `size_cap`, minimizing the largest part boundary.
pub fn exact_minmax_kpart(g: &Graph, k: usize, size_cap: usize) -> Result<PartitionSolution> {
    kpart(g, k, size_cap, false)
}

/// Exact min-sum k-partitioning: same constraints, minimizing the total
/// weight of crossing edges.
pub fn exact_minsum_kpart(g: &Graph, k: usize, size_cap: usize) -> Result<PartitionSolution> {
    kpart(g, k, size_cap, true)
}

fn kpart(g: &Graph, k: usize, size_cap: usize, sum_objective: bool) -> Result<PartitionSolution> {
    let n = g.n();
    if n > PARTITION_CAP {
        return Err(Error::Capacity(format!("partition enumeration limited to n ≤ {PARTITION_CAP}")));
    }
    if k == 0 || k.saturating_mul(size_cap) < n {
        return Err(Error::Infeasible(format!("{k} parts of size ≤ {size_cap} cannot cover {n} vertices")));
    }
    let (labels, value) =
        assign_search(g, k, size_cap, vec![None; n], (0..n).collect(), true, sum_objective)
            .ok_or_else(|| Error::Infeasible("no partition satisfies the caps".into()))?;
    Ok(PartitionSolution { partition: partition_of(&labels, k), value })
}

/// Exact min-max multiway cut: part `i` contains `terminals[i]`.
pub fn exact_multiway(g: &Graph, terminals: &[usize]) -> Result<PartitionSolution> {
    let n = g.n();
    if n > PARTITION_CAP {
        return Err(Error::Capacity(format!("partition enumeration limited to n ≤ {PARTITION_CAP}")));
    }
    let k = terminals.len();
    if k == 0 {
        return Err(Error::Input("at least one terminal required".into()));
    }
    let mut fixed = vec![None; n];
    for (i, &t) in terminals.iter().enumerate() {
        if t >= n {
            return Err(Error::Input(format!("terminal {t} out of range")));
        }
        if fixed[t].is_some() {
            return Err(Error::Input(format!("duplicate terminal {t}")));
        }
        fixed[t] = Some(i);
    }
    let mut order: Vec<usize> = terminals.to_vec();
    order.extend((0..n).filter(|v| fixed[*v].is_none()));
    let (labels, value) = assign_search(g, k, n, fixed, order, false, false)
        .ok_or_else(|| Error::Internal("multiway search found nothing".into()))?;
    let partition = Partition::from_labels(&labels, k)?;
    Ok(PartitionSolution { partition, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_greedy_bad_tree;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    fn path(n: usize) -> Graph {
        Graph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn six_cycle_sse_is_an_arc() {
        let g = cycle(6);
        let u = Measure::uniform(6);
        let s = exact_sse(&g, &u, &u, 0.5).unwrap();
        assert!((s.objective - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.set, vec![0, 1, 2]);
    }

    #[test]
    fn single_edge_sse() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        let u = Measure::uniform(2);
        let s = exact_sse(&g, &u, &u, 0.5).unwrap();
        assert_eq!(s.set, vec![0]);
        assert!((s.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sse_infeasible_without_eta_mass() {
        let g = path(3);
        let mu = Measure::uniform(3);
        let eta = Measure::new(vec![0.0, 0.0, 1.0]).unwrap();
        // only vertex 2 carries η, but μ({2}) = 1/3 > ρ
        assert!(matches!(exact_sse(&g, &mu, &eta, 0.2), Err(Error::Infeasible(_))));
        assert!(matches!(
            exact_sse_capped(&cycle(6), &Measure::uniform(6), &Measure::uniform(6), 0.5, 5),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn sse_on_greedy_bad_tree_is_pendant_path() {
        let g = gen_greedy_bad_tree(4).unwrap();
        let u = Measure::uniform(16);
        let s = exact_sse(&g, &u, &u, 0.25).unwrap();
        // a pendant path of four vertices: cut 1, η = 1/4, w(E) = 15
        assert_eq!(s.set.len(), 4);
        assert_eq!(s.report.boundary, 1.0);
        assert!((s.objective - (1.0 / 15.0) / 0.25).abs() < 1e-12);
    }

    #[test]
    fn four_cycle_bisection() {
        let s = exact_minmax_kpart(&cycle(4), 2, 2).unwrap();
        assert_eq!(s.value, 2.0);
        assert!(matches!(exact_minmax_kpart(&cycle(4), 2, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn greedy_bad_tree_k3_optimum_at_most_four() {
        let g = gen_greedy_bad_tree(3).unwrap();
        assert!(exact_minmax_kpart(&g, 3, 3).unwrap().value <= 4.0);
    }

    #[test]
    fn singletons_give_max_weighted_degree() {
        let g = Graph::new(5, [(0, 1, 2.0), (1, 2, 1.0), (2, 3, 3.0), (3, 4, 1.0), (0, 4, 1.0)]).unwrap();
        let s = exact_minmax_kpart(&g, 5, 1).unwrap();
        let maxdeg = (0..5).map(|v| g.weighted_degree(v)).fold(0.0, f64::max);
        assert_eq!(s.value, maxdeg);
    }

    #[test]
    fn multiway_two_terminals_one_edge() {
        let g = Graph::new(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(exact_multiway(&g, &[0, 1]).unwrap().value, 1.0);
        assert!(matches!(exact_multiway(&g, &[0, 0]), Err(Error::Input(_))));
    }

    #[test]
    fn star_multiway_is_k_minus_one() {
        let k = 4;
        let g = Graph::new(k + 1, (1..=k).map(|t| (0, t, 1.0))).unwrap();
        let terms: Vec<usize> = (1..=k).collect();
        assert_eq!(exact_multiway(&g, &terms).unwrap().value, (k - 1) as f64);
    }

    #[test]
    fn unbalanced_cut_path_end_pair() {
        let g = path(4);
        let s = exact_unbalanced_cut(&g, &Measure::uniform(4), 0.5, 0.5).unwrap();
        assert_eq!(s.report.boundary, 1.0);
        assert!(s.set == vec![0, 1] || s.set == vec![2, 3]);
    }

    #[test]
    fn unbalanced_cut_whole_graph() {
        let g = cycle(5);
        let s = exact_unbalanced_cut(&g, &Measure::uniform(5), 1.0, 1.0).unwrap();
        assert_eq!(s.set, vec![0, 1, 2, 3, 4]);
        assert_eq!(s.report.boundary, 0.0);
    }

    #[test]
    fn unbalanced_cut_tiny_tau_picks_best_singleton() {
        let g = Graph::new(4, [(0, 1, 3.0), (1, 2, 1.0), (2, 3, 2.0), (0, 3, 2.0)]).unwrap();
        let s = exact_unbalanced_cut(&g, &Measure::uniform(4), 1e-9, 0.25).unwrap();
        let best = (0..4).map(|v| g.weighted_degree(v)).fold(f64::INFINITY, f64::min);
        assert_eq!(s.set.len(), 1);
        assert_eq!(s.report.boundary, best);
    }

    #[test]
    fn unbalanced_cut_respects_terminals() {
        let g = path(4);
        let mut q = UcutQuery::new(&Measure::uniform(4), 0.5, 0.5);
        q.terminals = vec![0, 1];
        let s = exact_unbalanced_cut_query(&g, &q).unwrap();
        assert_eq!(s.set, vec![2, 3]);
        q.terminals = vec![0, 1, 2, 3];
        assert!(matches!(exact_unbalanced_cut_query(&g, &q), Err(Error::Infeasible(_))));
    }

    #[test]
    fn forest_and_enumeration_agree() {
        // a 20-vertex caterpillar is small enough for both routes
        let mut edges = Vec::new();
        for i in 0..9 {
            edges.push((i, i + 1, 1.0 + (i % 3) as f64));
        }
        for i in 10..20 {
            edges.push((i - 10, i, 1.0 + (i % 2) as f64));
        }
        let g = Graph::new(20, edges).unwrap();
        let y: Vec<f64> = (0..20).map(|i| 1.0 / (1 + i % 4) as f64).collect();
        let q = UcutQuery { y, tau: 0.2, rho: 0.3, size_w: vec![1; 20], terminals: vec![3, 7] };
        let by_enum = exact_unbalanced_cut_query(&g, &q).unwrap();
        let need = q.tau * q.y_total() - 1e-12;
        let by_dp = forest_ucut(&g, &q, need, q.size_cap()).unwrap();
        let cut_dp = g.cut_of_mask(&to_mask(20, &by_dp));
        assert_eq!(by_enum.report.boundary, cut_dp);
        let y_dp: f64 = by_dp.iter().map(|&v| q.y[v]).sum();
        let y_enum: f64 = by_enum.set.iter().map(|&v| q.y[v]).sum();
        assert!((y_dp - y_enum).abs() < 1e-12);
    }

    #[test]
    fn fixed_size_cut_on_large_tree_uses_forest_route() {
        let g = gen_greedy_bad_tree(6).unwrap();
        let s = exact_fixed_size_cut(&g, 6).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(g.cut_of_mask(&to_mask(g.n(), &s)), 1.0);
    }
}
